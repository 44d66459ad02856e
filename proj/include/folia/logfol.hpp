#pragma once

// Logarithmic q-forms of type d on P^n:
//     omega = sum_{|I| = q} lambda_I  Fhat_I  dF_{i_1} ^ ... ^ dF_{i_q},
// with Fhat_I the product of the F_j for j outside I and lambda the sorted
// coordinates of lambda^1 ^ ... ^ lambda^q. Also: the moduli-equation checks,
// genericity predicates, and fixed-degree slices of the stratum ideals.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "folia/errors.hpp"
#include "folia/exactla.hpp"
#include "folia/forms.hpp"
#include "folia/multivec.hpp"
#include "folia/poly.hpp"
#include "folia/scalar.hpp"

namespace folia {

/// A point (lambda^1..lambda^q, F_1..F_m) of the parameter space.
template <RingScalar K>
struct LogParams {
  int n = 0;
  int q = 0;
  DegreeVector degrees;
  std::vector<MultiVector<K>> lambdas;  // q grade-1 vectors in K^m
  std::vector<Poly<K>> polys;           // F_1..F_m
  FieldSpec field;
  std::optional<std::uint64_t> seed;

  int m() const { return degrees.m(); }
  int nvars() const { return n + 1; }
  int total_degree() const { return degrees.total(); }

  /// Shape checks only; lambdas outside K^m_d are reported by lambdas_in_cmd().
  void validate() const {
    if (n < 1 || n + 1 > kMaxVars) throw UsageError("n out of range (1 <= n <= " + std::to_string(kMaxVars - 1) + ")");
    if (q < 1) throw UsageError("q must be >= 1");
    if (m() < q + 1) throw UsageError("need m >= q+1 (m=" + std::to_string(m()) + ", q=" + std::to_string(q) + ")");
    if (static_cast<int>(lambdas.size()) != q) throw UsageError("expected q lambda vectors");
    for (const auto& l : lambdas)
      if (l.grade() != 1 || l.m() != m()) throw UsageError("lambda vectors must be grade-1 in K^m");
    if (static_cast<int>(polys.size()) != m()) throw UsageError("expected m polynomials");
    for (int i = 0; i < m(); ++i) {
      const auto& f = polys[static_cast<std::size_t>(i)];
      if (f.nvars() != nvars()) throw UsageError("polynomial F_" + std::to_string(i + 1) + " has wrong nvars");
      if (f.is_zero()) throw UsageError("polynomial F_" + std::to_string(i + 1) + " is zero");
      if (f.degree() != degrees[i]) throw UsageError("deg F_" + std::to_string(i + 1) + " != d_" + std::to_string(i + 1));
    }
  }

  /// i_d(lambda^j) == 0 for every j.
  bool lambdas_in_cmd() const {
    for (const auto& l : lambdas)
      if (!interior_d(degrees, l).is_zero()) return false;
    return true;
  }

  MultiVector<K> lambda_tensor() const {
    MultiVector<K> t = MultiVector<K>::scalar(m(), K::from_int(1, field));
    for (const auto& l : lambdas) t = wedge_mv(t, l);
    return t;
  }
};

/// Fhat_I = prod_{j not in I} F_j (the constant 1 for I = everything).
template <RingScalar K>
Poly<K> hat_F(const std::vector<Poly<K>>& polys, IndexSet s, const FieldSpec& f) {
  if (polys.empty()) throw UsageError("hat_F: no polynomials");
  Poly<K> r = Poly<K>::constant(polys[0].nvars(), K::from_int(1, f));
  for (int j = 0; j < static_cast<int>(polys.size()); ++j)
    if (!s.contains(j)) r = mul(r, polys[static_cast<std::size_t>(j)]);
  return r;
}

/// dF_{i_1} ^ ... ^ dF_{i_q}, with `replacement` substituted for dF_k when k is in I.
template <RingScalar K>
PolyForm<K> wedge_of_differentials(const std::vector<PolyForm<K>>& dfs, IndexSet s,
                                   int k = -1, const PolyForm<K>* replacement = nullptr) {
  const int nvars = dfs.at(0).nvars();
  PolyForm<K> acc(nvars, 0, 0);
  bool first = true;
  for (int i : s.elements()) {
    const PolyForm<K>& di = (i == k && replacement) ? *replacement : dfs[static_cast<std::size_t>(i)];
    acc = first ? di : wedge_forms(acc, di);
    first = false;
  }
  return acc;
}

/// sum_I tensor_I Fhat_I dF_I for an arbitrary grade-q tensor.
template <RingScalar K>
PolyForm<K> log_form_from_tensor(const MultiVector<K>& tensor, const std::vector<Poly<K>>& polys, const FieldSpec& f) {
  const int m = static_cast<int>(polys.size());
  if (tensor.m() != m) throw UsageError("tensor and polynomial count disagree");
  int d = 0;
  for (const auto& p : polys) d += p.degree();
  const int nvars = polys.at(0).nvars();
  std::vector<PolyForm<K>> dfs;
  for (const auto& p : polys) dfs.push_back(PolyForm<K>::differential(p));
  PolyForm<K> omega(nvars, tensor.grade(), d);
  for (const auto& [s, c] : tensor.components()) {
    auto coef = scal_mul(c, hat_F(polys, s, f));
    omega += coef * wedge_of_differentials(dfs, s);
  }
  return omega;
}

template <RingScalar K>
PolyForm<K> construct_log_form(const LogParams<K>& p) {
  p.validate();
  const auto tensor = p.lambda_tensor();
  if (tensor.is_zero()) throw DegenerateInputError("lambda^1 ^ ... ^ lambda^q vanishes (dependent lambdas)");
  return log_form_from_tensor(tensor, p.polys, p.field);
}

/// Plucker decomposability: omega ^ omega == 0 for q = 2, otherwise
/// i_v(omega) ^ omega == 0 for every coordinate (q-1)-vector v.
template <RingScalar K>
bool pluecker_check(const PolyForm<K>& omega, int q) {
  if (omega.grade() != q) throw UsageError("pluecker_check: grade mismatch");
  if (q == 2) return wedge_forms(omega, omega).is_zero();
  for (auto v : subsets(omega.nvars(), q - 1))
    if (!wedge_forms(contract_multi(v, omega), omega).is_zero()) return false;
  return true;
}

/// Frobenius integrability: i_v(omega) ^ d(omega) == 0 for every coordinate (q-1)-vector v.
template <RingScalar K>
bool integrability_check(const PolyForm<K>& omega, int q) {
  if (omega.grade() != q) throw UsageError("integrability_check: grade mismatch");
  const auto domega = ext_d(omega);
  if (domega.is_zero()) return true;
  for (auto v : subsets(omega.nvars(), q - 1))
    if (!wedge_forms(contract_multi(v, omega), domega).is_zero()) return false;
  return true;
}

/// F * d(omega) == dF ^ omega with F = prod F_i.
template <RingScalar K>
bool logdiff_identity_check(const LogParams<K>& p) {
  const auto omega = construct_log_form(p);
  const auto big_f = hat_F(p.polys, IndexSet{}, p.field);
  const auto lhs = big_f * ext_d(omega);
  const auto rhs = wedge_forms(PolyForm<K>::differential(big_f), omega);
  return lhs == rhs;
}

/// The inequalities lambda_ij != 0, lambda_ij - lambda_ik + lambda_jk != 0 and
/// lambda_ij - lambda_ik - lambda_jk != 0 for i < j < k.
template <RingScalar K>
bool genericity_check(const MultiVector<K>& lambda) {
  if (lambda.grade() != 2) throw UsageError("genericity_check: need a grade-2 tensor");
  const int m = lambda.m();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const K a = lambda[IndexSet{i, j}];
      if (a.is_zero()) return false;
      for (int k = j + 1; k < m; ++k) {
        const K b = lambda[IndexSet{i, k}], c = lambda[IndexSet{j, k}];
        if ((a - b + c).is_zero() || (a - b - c).is_zero()) return false;
      }
    }
  return true;
}

/// Every k of the degrees sum to strictly less than the remaining ones.
inline bool balanced_check(const DegreeVector& d, int k) {
  if (k < 1 || k >= d.m()) throw UsageError("balanced_check: need 1 <= k < m");
  const int total = d.total();
  for (auto s : subsets(d.m(), k)) {
    int in = 0;
    for (int i : s.elements()) in += d[i];
    if (in >= total - in) return false;
  }
  return true;
}

/// Simple normal crossings for hyperplanes: every min(m, n+1) of the linear
/// forms have independent coefficient vectors.
template <FieldScalar K>
bool nc_linear_check(const std::vector<Poly<K>>& polys) {
  if (polys.empty()) return true;
  const int nvars = polys[0].nvars();
  const MonomialBasis lin(nvars - 1, 1);
  std::vector<std::vector<K>> rows;
  for (const auto& p : polys) {
    if (p.degree() != 1 && !p.is_zero()) throw UsageError("nc_linear_check: all polynomials must be linear");
    rows.push_back(lin.to_coefficients(p));
  }
  const int m = static_cast<int>(polys.size());
  const int s = std::min(m, nvars);
  for (auto sub : subsets(m, s)) {
    std::vector<std::vector<K>> pick;
    for (int i : sub.elements()) pick.push_back(rows[static_cast<std::size_t>(i)]);
    if (rank(SparseMatrix<K>::from_dense(pick, static_cast<std::size_t>(nvars))) != static_cast<std::size_t>(s))
      return false;
  }
  return true;
}

/// Degree-e slice of the ideal generated by {Fhat_J : |J| = k-1}.
template <FieldScalar K>
struct StratumSlice {
  int k = 0;
  int e = 0;
  SparseMatrix<K> basis_matrix;  // rows: monomial_basis(n, e); columns: Fhat_J * monomial

  std::size_t dim() const { return rank(basis_matrix); }
};

/// Columns g * mu for each generator g and each monomial mu of degree e - deg g.
template <FieldScalar K>
SparseMatrix<K> multiples_matrix(const std::vector<Poly<K>>& gens, int n, int e) {
  const MonomialBasis target(n, e);
  std::vector<typename SparseMatrix<K>::Entry> es;
  std::size_t col = 0;
  for (const auto& g : gens) {
    if (g.is_zero() || g.degree() > e) continue;
    for (ExpVec mu : monomial_basis(n, e - g.degree())) {
      for (const auto& [m, c] : g.terms()) es.push_back({target.index_of(m + mu), col, c});
      ++col;
    }
  }
  return SparseMatrix<K>(target.size(), col, std::move(es));
}

template <FieldScalar K>
StratumSlice<K> stratum_slice(const std::vector<Poly<K>>& polys, int k, int e, const FieldSpec& f) {
  const int m = static_cast<int>(polys.size());
  if (k < 1 || k > m) throw UsageError("stratum_slice: need 1 <= k <= m");
  if (e < 0) throw UsageError("stratum_slice: negative degree");
  std::vector<Poly<K>> gens;
  for (auto j : subsets(m, k - 1)) gens.push_back(hat_F(polys, j, f));
  return StratumSlice<K>{k, e, multiples_matrix(gens, polys[0].nvars() - 1, e)};
}

/// Every coefficient of every form lies in the slice's column space.
template <FieldScalar K>
bool forms_vanish_on_stratum(const std::vector<PolyForm<K>>& forms, const StratumSlice<K>& slice) {
  if (forms.empty()) return true;
  const int n = forms[0].nvars() - 1;
  const MonomialBasis target(n, slice.e);
  std::vector<std::vector<K>> cols;
  for (const auto& a : forms) {
    if (a.is_zero()) continue;
    if (a.coef_degree() != slice.e) throw UsageError("vanishes_on_stratum: degree mismatch with slice");
    for (const auto& [s, p] : a.components()) cols.push_back(target.to_coefficients(p));
  }
  if (cols.empty()) return true;
  return column_space_contains(slice.basis_matrix, SparseMatrix<K>::from_columns(target.size(), cols));
}

template <FieldScalar K>
bool vanishes_on_stratum(const PolyForm<K>& alpha, const std::vector<Poly<K>>& polys, int k, const FieldSpec& f) {
  if (alpha.is_zero()) return true;
  const auto slice = stratum_slice(polys, k, alpha.coef_degree(), f);
  return forms_vanish_on_stratum(std::vector<PolyForm<K>>{alpha}, slice);
}

struct IdealComparison {
  std::size_t intersection_dim = 0;  // degree-e slice of the intersection of <F_j : j in J>, |J| = k
  std::size_t slice_dim = 0;         // degree-e slice of <Fhat_J : |J| = k-1>
  bool slice_inside = false;         // slice contained in the intersection
  bool equal() const { return slice_inside && intersection_dim == slice_dim; }
};

/// Compares the two descriptions of the stratum ideal in degree e. The
/// intersection is the kernel of the stacked annihilators of each <F_J>_e.
template <FieldScalar K>
IdealComparison compare_stratum_ideals(const std::vector<Poly<K>>& polys, int k, int e, const FieldSpec& f) {
  const int m = static_cast<int>(polys.size());
  if (k < 1 || k > m) throw UsageError("ideal_equality_check: need 1 <= k <= m");
  const int n = polys.at(0).nvars() - 1;
  const std::size_t nmon = binomial(n + e, e);
  SparseMatrix<K> annihilators(0, nmon);
  for (auto js : subsets(m, k)) {
    std::vector<Poly<K>> gens;
    for (int j : js.elements()) gens.push_back(polys[static_cast<std::size_t>(j)]);
    const auto u = multiples_matrix(gens, n, e);
    const auto ann = kernel_basis(u.transpose(), f);  // row vectors y with y^T U = 0
    std::vector<typename SparseMatrix<K>::Entry> es;
    for (std::size_t r = 0; r < ann.size(); ++r)
      for (std::size_t c = 0; c < nmon; ++c)
        if (!ann[r][c].is_zero()) es.push_back({r, c, ann[r][c]});
    annihilators = annihilators.vstack(SparseMatrix<K>(ann.size(), nmon, std::move(es)));
  }
  const auto slice = stratum_slice(polys, k, e, f);
  IdealComparison out;
  out.intersection_dim = nmon - rank(annihilators);
  out.slice_dim = slice.dim();
  out.slice_inside = true;
  for (std::size_t c = 0; c < slice.basis_matrix.ncols() && out.slice_inside; ++c) {
    const auto col = slice.basis_matrix.column(c);
    for (const auto& v : annihilators.apply(col))
      if (!v.is_zero()) {
        out.slice_inside = false;
        break;
      }
  }
  return out;
}

template <FieldScalar K>
bool ideal_equality_check(const std::vector<Poly<K>>& polys, int k, int e, const FieldSpec& f) {
  return compare_stratum_ideals(polys, k, e, f).equal();
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

/// Uniform integer in [lo, hi]; modulo reduction keeps the stream portable.
inline long long draw(std::mt19937_64& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct IntegerInstance {
  std::vector<std::vector<long long>> lambdas;     // q vectors of length m
  std::vector<std::vector<long long>> poly_coeffs;  // per F_i, indexed by monomial_basis(n, d_i)
};

template <RingScalar K>
LogParams<K> realize(const IntegerInstance& inst, int n, int q, const DegreeVector& d, const FieldSpec& f) {
  LogParams<K> p;
  p.n = n;
  p.q = q;
  p.degrees = d;
  p.field = f;
  for (const auto& l : inst.lambdas) {
    std::vector<K> v;
    for (auto x : l) v.push_back(K::from_int(x, f));
    p.lambdas.push_back(MultiVector<K>::from_vector(v));
  }
  for (int i = 0; i < d.m(); ++i) {
    const auto mons = monomial_basis(n, d[i]);
    std::vector<typename Poly<K>::Term> t;
    for (std::size_t j = 0; j < mons.size(); ++j)
      t.emplace_back(mons[j], K::from_int(inst.poly_coeffs[static_cast<std::size_t>(i)][j], f));
    p.polys.emplace_back(n + 1, d[i], std::move(t));
  }
  return p;
}

template <FieldScalar K>
bool acceptable_sample(const LogParams<K>& p) {
  for (const auto& f : p.polys)
    if (f.is_zero()) return false;
  const auto tensor = p.lambda_tensor();
  if (tensor.is_zero()) return false;
  if (p.q == 2 && !genericity_check(tensor)) return false;
  bool linear = true;
  for (int i = 0; i < p.m(); ++i) linear = linear && p.degrees[i] == 1;
  if (linear && !nc_linear_check(p.polys)) return false;
  return true;
}

}  // namespace detail

inline constexpr long long kPolyCoefficientRange = 30;
inline constexpr long long kLambdaCoefficientRange = 5;
inline constexpr int kMaxSamplingAttempts = 1000;

/// Seeded sample of generic parameters. Coefficients are small integers drawn
/// independently of the field, so one seed names the same rational instance
/// over Q and over every prime (up to the rare rejection that only one field
/// sees). The sample must pass the genericity checks over Q and over f.
template <FieldScalar K>
LogParams<K> random_params(std::uint64_t seed, int n, int q, const DegreeVector& d, const FieldSpec& f) {
  if (q < 1) throw PreconditionError("q must be >= 1");
  if (d.m() < q + 1)
    throw PreconditionError("need m >= q+1 (m=" + std::to_string(d.m()) + ", q=" + std::to_string(q) + ")");
  if (n < 1 || n + 1 > kMaxVars) throw PreconditionError("n out of range");
  std::mt19937_64 rng(seed);
  const int m = d.m();
  for (int attempt = 0; attempt < kMaxSamplingAttempts; ++attempt) {
    detail::IntegerInstance inst;
    for (int i = 0; i < m; ++i) {
      std::vector<long long> c(binomial(n + d[i], d[i]));
      for (auto& x : c) x = detail::draw(rng, -kPolyCoefficientRange, kPolyCoefficientRange);
      inst.poly_coeffs.push_back(std::move(c));
    }
    for (int j = 0; j < q; ++j) {
      // Integer combination of mu_k = d_k e_1 - d_1 e_k.
      std::vector<long long> v(static_cast<std::size_t>(m), 0);
      for (int k = 1; k < m; ++k) {
        const long long c = detail::draw(rng, -kLambdaCoefficientRange, kLambdaCoefficientRange);
        v[0] += c * d[k];
        v[static_cast<std::size_t>(k)] -= c * d[0];
      }
      inst.lambdas.push_back(std::move(v));
    }
    auto over_q = detail::realize<Rational>(inst, n, q, d, FieldSpec::rationals());
    if (!detail::acceptable_sample(over_q)) continue;
    auto p = detail::realize<K>(inst, n, q, d, f);
    if (!detail::acceptable_sample(p)) continue;
    p.seed = seed;
    return p;
  }
  throw SamplingError("no generic sample after " + std::to_string(kMaxSamplingAttempts) + " attempts");
}

}  // namespace folia
