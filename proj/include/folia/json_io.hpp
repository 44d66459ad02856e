#pragma once

// JSON encodings:
//   Poly         [[coef, [e_0, ..., e_n]], ...]
//   MultiVector  [[[i, j, ...], coef], ...]            (1-based indices)
//   PolyForm     {grade, total_degree, comps: [[[i, ...], Poly], ...]}   (0-based variable indices)
//   LogParams    {n, q, degrees, lambdas, polys, field, seed?}
//   field        "Q" | {"Fp": p}
// Coefficients are strings. F_p values are written as their representative in
// (-p/2, p/2], so a small-integer instance reads back unchanged over Q or any
// other prime.

#include <string>
#include <vector>

#include <json.hpp>

#include "folia/errors.hpp"
#include "folia/forms.hpp"
#include "folia/logfol.hpp"
#include "folia/multivec.hpp"
#include "folia/poly.hpp"
#include "folia/scalar.hpp"
#include "folia/tangent.hpp"

namespace folia {

using json = nlohmann::ordered_json;

inline std::string scalar_to_string(const Rational& x) { return x.to_string(); }
inline std::string scalar_to_string(const Fp& x) {
  const std::uint32_t p = x.modulus();
  if (p == 0) return "0";
  const std::uint32_t v = x.value();
  return v > p / 2 ? "-" + std::to_string(p - v) : std::to_string(v);
}

inline json field_to_json(const FieldSpec& f) {
  if (f.is_rational()) return "Q";
  return json{{"Fp", f.prime}};
}

inline FieldSpec field_from_json(const json& j) {
  try {
    if (j.is_string()) {
      if (j.get<std::string>() != "Q") throw ParseError("field must be \"Q\" or {\"Fp\": p}");
      return FieldSpec::rationals();
    }
    if (j.is_object() && j.contains("Fp") && j.size() == 1) return FieldSpec::prime_field(j.at("Fp").get<std::uint64_t>());
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  throw ParseError("field must be \"Q\" or {\"Fp\": p}");
}

template <FieldScalar K>
json poly_to_json(const Poly<K>& p) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) out.push_back(json::array({scalar_to_string(c), m.exponents(p.nvars())}));
  return out;
}

namespace detail {
template <class T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("bad ") + what);
  }
}
inline const json& field_of(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}
}  // namespace detail

/// Reads a Poly in `nvars` variables; `degree` is used when the list is empty.
template <FieldScalar K>
Poly<K> poly_from_json(const json& j, int nvars, int degree, const FieldSpec& f) {
  if (!j.is_array()) throw ParseError("polynomial must be a list of [coef, exponents]");
  std::vector<typename Poly<K>::Term> terms;
  int deg = -1;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) throw ParseError("polynomial term must be [coef, exponents]");
    const auto coef = detail::get_as<std::string>(t[0], "coefficient string");
    const auto exps = detail::get_as<std::vector<int>>(t[1], "exponent list");
    if (static_cast<int>(exps.size()) != nvars) throw ParseError("exponent list has the wrong length");
    ExpVec m;
    int td = 0;
    for (int i = 0; i < nvars; ++i) {
      const int e = exps[static_cast<std::size_t>(i)];
      if (e < 0 || e > kMaxExponent) throw ParseError("exponent out of range");
      for (int k = 0; k < e; ++k) m = m + ExpVec::unit(i);
      td += e;
    }
    if (deg >= 0 && td != deg) throw ParseError("polynomial is not homogeneous");
    deg = td;
    try {
      terms.emplace_back(m, K::from_string(coef, f));
    } catch (const UsageError& e) {
      throw ParseError(e.what());
    }
  }
  if (deg < 0) deg = degree;
  try {
    return Poly<K>(nvars, deg, std::move(terms));
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  }
}

template <FieldScalar K>
json multivector_to_json(const MultiVector<K>& v) {
  json out = json::array();
  for (const auto& [s, c] : v.components()) {
    std::vector<int> idx;
    for (int i : s.elements()) idx.push_back(i + 1);
    out.push_back(json::array({idx, scalar_to_string(c)}));
  }
  return out;
}

template <FieldScalar K>
MultiVector<K> multivector_from_json(const json& j, int m, int grade, const FieldSpec& f) {
  if (!j.is_array()) throw ParseError("multivector must be a list of [indices, coef]");
  MultiVector<K> v(m, grade);
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) throw ParseError("multivector entry must be [indices, coef]");
    auto idx = detail::get_as<std::vector<int>>(t[0], "index list");
    for (auto& i : idx) {
      if (i < 1 || i > m) throw ParseError("multivector index out of range");
      --i;
    }
    try {
      v.add_to(IndexSet::from_elements(idx), K::from_string(detail::get_as<std::string>(t[1], "coefficient"), f));
    } catch (const UsageError& e) {
      throw ParseError(e.what());
    }
  }
  return v;
}

template <FieldScalar K>
json form_to_json(const PolyForm<K>& a) {
  json comps = json::array();
  for (const auto& [s, p] : a.components()) comps.push_back(json::array({s.elements(), poly_to_json(p)}));
  return json{{"grade", a.grade()}, {"total_degree", a.total_degree()}, {"comps", comps}};
}

template <FieldScalar K>
PolyForm<K> form_from_json(const json& j, int nvars, const FieldSpec& f) {
  const int grade = detail::get_as<int>(detail::field_of(j, "grade"), "grade");
  const int td = detail::get_as<int>(detail::field_of(j, "total_degree"), "total_degree");
  try {
    PolyForm<K> a(nvars, grade, td);
    for (const auto& c : detail::field_of(j, "comps")) {
      if (!c.is_array() || c.size() != 2) throw ParseError("form component must be [indices, poly]");
      const auto idx = detail::get_as<std::vector<int>>(c[0], "index list");
      a.add_to(IndexSet::from_elements(idx), poly_from_json<K>(c[1], nvars, td - grade, f));
    }
    return a;
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  }
}

/// Lambdas are written as coordinate lists [lambda_1, ..., lambda_m].
template <FieldScalar K>
json params_to_json(const LogParams<K>& p) {
  json lambdas = json::array();
  for (const auto& l : p.lambdas) {
    json row = json::array();
    for (int i = 0; i < l.m(); ++i) row.push_back(scalar_to_string(l[IndexSet{i}]));
    lambdas.push_back(row);
  }
  json polys = json::array();
  for (const auto& f : p.polys) polys.push_back(poly_to_json(f));
  json out{{"n", p.n}, {"q", p.q}, {"degrees", p.degrees.parts()}, {"lambdas", lambdas}, {"polys", polys},
           {"field", field_to_json(p.field)}};
  if (p.seed) out["seed"] = *p.seed;
  return out;
}

/// Field taken from `override_field` if given, else from the document, else `fallback`.
inline FieldSpec params_field(const json& j, const std::optional<FieldSpec>& override_field, const FieldSpec& fallback) {
  if (override_field) return *override_field;
  if (j.is_object() && j.contains("field")) return field_from_json(j.at("field"));
  return fallback;
}

template <FieldScalar K>
LogParams<K> params_from_json(const json& j, const FieldSpec& f) {
  if (!j.is_object()) throw ParseError("parameters must be a JSON object");
  LogParams<K> p;
  p.field = f;
  p.n = detail::get_as<int>(detail::field_of(j, "n"), "n");
  p.q = detail::get_as<int>(detail::field_of(j, "q"), "q");
  try {
    p.degrees = DegreeVector(detail::get_as<std::vector<int>>(detail::field_of(j, "degrees"), "degrees"));
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  }
  if (p.n < 1 || p.n + 1 > kMaxVars) throw ParseError("n out of range");
  const int m = p.degrees.m();
  const auto& lambdas = detail::field_of(j, "lambdas");
  if (!lambdas.is_array()) throw ParseError("lambdas must be a list");
  for (const auto& row : lambdas) {
    const auto coords = detail::get_as<std::vector<std::string>>(row, "lambda vector");
    if (static_cast<int>(coords.size()) != m) throw ParseError("lambda vector must have m entries");
    std::vector<K> v;
    try {
      for (const auto& c : coords) v.push_back(K::from_string(c, f));
    } catch (const UsageError& e) {
      throw ParseError(e.what());
    }
    p.lambdas.push_back(MultiVector<K>::from_vector(v));
  }
  const auto& polys = detail::field_of(j, "polys");
  if (!polys.is_array() || static_cast<int>(polys.size()) != m) throw ParseError("polys must be a list of m polynomials");
  for (int i = 0; i < m; ++i) p.polys.push_back(poly_from_json<K>(polys[static_cast<std::size_t>(i)], p.n + 1, p.degrees[i], f));
  if (j.contains("seed") && !j.at("seed").is_null()) p.seed = detail::get_as<std::uint64_t>(j.at("seed"), "seed");
  try {
    p.validate();
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  }
  return p;
}

inline json report_to_json(const StabilityReport& r) {
  json sanity{{"omega_in_kernel", r.sanity.omega_in_kernel},   {"omega_in_image", r.sanity.omega_in_image},
              {"image_in_kernel", r.sanity.image_in_kernel},   {"image_descends", r.sanity.image_descends},
              {"step1_vanishing", r.sanity.step1_vanishing},   {"dual_consistency", r.sanity.dual_consistency},
              {"scaling_directions", r.sanity.scaling_directions},
              {"dual_directions", r.sanity.dual_directions}};
  json out{{"version", r.version},
           {"n", r.n},
           {"q", r.q},
           {"degrees", r.degrees},
           {"seed", r.seed ? json(*r.seed) : json(nullptr)},
           {"field", field_to_json(r.field)},
           {"dim_ambient", r.dim_ambient},
           {"ker_dim", r.ker_dim},
           {"drho_rank", r.drho_rank},
           {"quotient_tangent_dim", r.ker_dim > 0 ? r.ker_dim - 1 : 0},
           {"quotient_image_dim", r.drho_rank > 0 ? r.drho_rank - 1 : 0},
           {"drho_columns", r.drho_columns},
           {"perturbation_rows", r.perturbation_rows},
           {"perturbation_rows_raw", r.perturbation_rows_raw},
           {"parameter_dim", r.parameter_dim},
           {"balanced_k2", r.balanced_k2},
           {"theorem_silent", r.theorem_silent},
           {"sanity", sanity},
           {"sanity_ok", r.sanity_ok()},
           {"assumptions",
            {{"normal_crossings", r.normal_crossings_verified ? "verified" : "assumed"},
             {"irreducible_hypersurfaces", "assumed"},
             {"singular_set_codim_ge_2", "assumed"}}},
           {"verdict", r.verdict()}};
  return out;
}

}  // namespace folia
