#pragma once

// Twisted form spaces H^0(P^n, Omega^q(d)), the first-order perturbation
// system of the integrability equations at a logarithmic 2-form, the
// differential of the parametrization, and the stability certificate.

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "folia/errors.hpp"
#include "folia/exactla.hpp"
#include "folia/forms.hpp"
#include "folia/logfol.hpp"
#include "folia/multivec.hpp"
#include "folia/poly.hpp"
#include "folia/scalar.hpp"

namespace folia {

/// dim H^0(P^n, Omega^q(d)) = C(d+n-q, d) * C(d-1, q).
inline std::uint64_t bott_dimension(int n, int q, int d) {
  if (d < 1) return 0;
  return binomial(d + n - q, d) * binomial(d - 1, q);
}

/// Matrix of the radial contraction i_R from affine q-forms of total degree d
/// to (q-1)-forms of total degree d.
template <FieldScalar K>
SparseMatrix<K> radial_contraction_matrix(int n, int q, int d, const FieldSpec& f) {
  const FormCoordinates src(n, q, d), dst(n, q - 1, d);
  const K one = K::from_int(1, f);
  std::vector<typename SparseMatrix<K>::Entry> es;
  for (std::size_t c = 0; c < src.dim(); ++c) {
    const auto [s, mon] = src.at(c);
    for (int i : s.elements()) {
      const K v = (s.count_below(i) % 2) ? -one : one;
      es.push_back({dst.index(s.without(i), mon + ExpVec::unit(i)), c, v});
    }
  }
  return SparseMatrix<K>(dst.dim(), src.dim(), std::move(es));
}

/// Basis of the q-forms of total degree d with i_R(alpha) = 0, i.e. of
/// H^0(P^n, Omega^q(d)). Elements are i_R(x^nu dx_J), |J| = q+1, chosen
/// greedily; each has at most q+1 terms.
template <FieldScalar K>
class FormBasis {
 public:
  FormBasis(int n, int q, int d, const FieldSpec& f) : n_(n), q_(q), d_(d), field_(f), ambient_(n, q, d) {
    if (n < 1 || n + 1 > kMaxVars) throw UsageError("FormBasis: n out of range");
    if (q < 1 || q > n) throw UsageError("FormBasis: need 1 <= q <= n");
    const K one = K::from_int(1, f);
    std::vector<typename SparseMatrix<K>::Entry> es;
    std::size_t ncand = 0;
    if (d >= q + 1) {
      for (auto j : subsets(n + 1, q + 1))
        for (ExpVec nu : monomial_basis(n, d - q - 1)) {
          for (int i : j.elements()) {
            const K v = (j.count_below(i) % 2) ? -one : one;
            es.push_back({ambient_.index(j.without(i), nu + ExpVec::unit(i)), ncand, v});
          }
          ++ncand;
        }
    }
    const SparseMatrix<K> cand(ambient_.dim(), ncand, std::move(es));
    auto pivots = row_reduce(cand).pivot_cols;
    std::sort(pivots.begin(), pivots.end());
    std::vector<typename SparseMatrix<K>::Entry> chosen;
    for (std::size_t k = 0; k < pivots.size(); ++k)
      for (const auto& [r, v] : cand.column_entries(pivots[k])) chosen.push_back({r, k, v});
    generators_ = SparseMatrix<K>(ambient_.dim(), pivots.size(), std::move(chosen));

    const auto expected = bott_dimension(n, q, d);
    const auto kernel_dim = ambient_.dim() - rank(radial_contraction_matrix<K>(n, q, d, f));
    if (generators_.ncols() != expected || kernel_dim != expected) {
      std::ostringstream os;
      os << "descended form basis: span " << generators_.ncols() << ", kernel of i_R " << kernel_dim
         << ", expected " << expected << " (n=" << n << ", q=" << q << ", d=" << d << ")";
      throw ConsistencyError(os.str());
    }
  }

  int n() const { return n_; }
  int grade() const { return q_; }
  int total_degree() const { return d_; }
  std::size_t dim() const { return generators_.ncols(); }
  const FormCoordinates& ambient() const { return ambient_; }
  /// Columns: basis elements in ambient coordinates.
  const SparseMatrix<K>& generators() const { return generators_; }

  PolyForm<K> element(std::size_t j) const { return ambient_.decode<K>(std::span<const K>(generators_.column(j))); }

  std::vector<K> to_ambient(std::span<const K> coords) const {
    if (coords.size() != dim()) throw UsageError("FormBasis: coordinate vector has wrong length");
    return generators_.apply(coords);
  }
  PolyForm<K> decode(std::span<const K> coords) const {
    const auto a = to_ambient(coords);
    return ambient_.decode<K>(std::span<const K>(a));
  }

  /// Coordinates of forms in this basis; UsageError if one does not descend.
  std::vector<std::vector<K>> encode_many(const std::vector<PolyForm<K>>& forms) const {
    std::vector<std::vector<K>> cols;
    for (const auto& a : forms) cols.push_back(ambient_.encode(a));
    const auto sols = solve_columns(generators_, SparseMatrix<K>::from_columns(ambient_.dim(), cols));
    std::vector<std::vector<K>> out;
    for (const auto& s : sols) {
      if (!s) throw UsageError("form does not descend (i_R(alpha) != 0) or has the wrong shape");
      out.push_back(*s);
    }
    return out;
  }
  std::vector<K> encode(const PolyForm<K>& a) const { return encode_many({a}).front(); }

 private:
  int n_, q_, d_;
  FieldSpec field_;
  FormCoordinates ambient_;
  SparseMatrix<K> generators_;
};

template <FieldScalar K>
FormBasis<K> twisted_form_basis(int n, int q, int d, const FieldSpec& f) {
  return FormBasis<K>(n, q, d, f);
}

// ---------------------------------------------------------------------------
// Perturbation system

/// Linearization at omega (grade 2, total degree d) of
///     omega ^ omega = 0,   i_v(omega) ^ d(omega) = 0   (v = e_0..e_n),
/// i.e. alpha ^ omega = 0 and i_v(omega) ^ d(alpha) + i_v(alpha) ^ d(omega) = 0.
/// Raw rows are the coordinates of these 4-forms.
template <FieldScalar K>
class PerturbationOperator {
 public:
  explicit PerturbationOperator(const PolyForm<K>& omega)
      : omega_(omega),
        domega_(ext_d(omega)),
        wedge_rows_(omega.nvars() - 1, 4, 2 * omega.total_degree()),
        integ_rows_(omega.nvars() - 1, 4, 2 * omega.total_degree() - 1) {
    if (omega.grade() != 2) throw UsageError("perturbation system: omega must be a 2-form");
    for (int v = 0; v < omega.nvars(); ++v) contracted_.push_back(contract_const(v, omega));
  }

  std::size_t raw_rows() const { return wedge_rows_.dim() + contracted_.size() * integ_rows_.dim(); }
  std::size_t wedge_block_rows() const { return wedge_rows_.dim(); }
  std::size_t integrability_block_rows() const { return contracted_.size() * integ_rows_.dim(); }

  /// Nonzero raw-row entries of the linearized equations at alpha.
  std::vector<std::pair<std::size_t, K>> apply(const PolyForm<K>& alpha) const {
    std::vector<std::pair<std::size_t, K>> out;
    if (alpha.is_zero()) return out;
    if (alpha.grade() != 2 || alpha.total_degree() != omega_.total_degree() || alpha.nvars() != omega_.nvars())
      throw UsageError("perturbation system: alpha has the wrong shape");
    emit(out, wedge_forms(alpha, omega_), wedge_rows_, 0);
    const auto dalpha = ext_d(alpha);
    for (int v = 0; v < static_cast<int>(contracted_.size()); ++v) {
      auto t = wedge_forms(contracted_[static_cast<std::size_t>(v)], dalpha);
      t += wedge_forms(contract_const(v, alpha), domega_);
      emit(out, t, integ_rows_, wedge_rows_.dim() + static_cast<std::size_t>(v) * integ_rows_.dim());
    }
    return out;
  }

 private:
  static void emit(std::vector<std::pair<std::size_t, K>>& out, const PolyForm<K>& f, const FormCoordinates& rows,
                   std::size_t offset) {
    for (const auto& [s, p] : f.components())
      for (const auto& [m, c] : p.terms()) out.emplace_back(offset + rows.index(s, m), c);
  }

  PolyForm<K> omega_;
  PolyForm<K> domega_;
  std::vector<PolyForm<K>> contracted_;
  FormCoordinates wedge_rows_;
  FormCoordinates integ_rows_;
};

template <FieldScalar K>
struct PerturbationSystem {
  SparseMatrix<K> matrix;            // pruned rows x basis dimension
  std::size_t raw_rows = 0;          // before dropping identically zero rows
  std::vector<std::size_t> raw_row;  // pruned row -> raw row index
};

/// Matrix of the perturbation system in the coordinates of `basis`; its kernel
/// is the ambient tangent cone at omega.
template <FieldScalar K>
PerturbationSystem<K> perturbation_system(const PolyForm<K>& omega, const FormBasis<K>& basis) {
  if (basis.grade() != 2 || basis.total_degree() != omega.total_degree() || basis.n() + 1 != omega.nvars())
    throw UsageError("perturbation_system: basis does not match omega");
  const PerturbationOperator<K> op(omega);
  std::vector<std::vector<std::pair<std::size_t, K>>> cols;
  std::vector<char> used(op.raw_rows(), 0);
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    cols.push_back(op.apply(basis.element(j)));
    for (const auto& [r, v] : cols.back()) used[r] = 1;
  }
  PerturbationSystem<K> out;
  out.raw_rows = op.raw_rows();
  std::vector<std::size_t> compact(op.raw_rows(), 0);
  for (std::size_t r = 0; r < used.size(); ++r)
    if (used[r]) {
      compact[r] = out.raw_row.size();
      out.raw_row.push_back(r);
    }
  std::vector<typename SparseMatrix<K>::Entry> es;
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (auto& [r, v] : cols[j]) es.push_back({compact[r], j, std::move(v)});
  out.matrix = SparseMatrix<K>(out.raw_row.size(), basis.dim(), std::move(es));
  return out;
}

// ---------------------------------------------------------------------------
// Differential of the parametrization

/// Column layout of the drho matrix: 2(m-1) lambda directions (mu_k ^ lambda^2,
/// then lambda^1 ^ mu_k), followed by one column per (k, monomial of degree d_k).
struct DrhoLayout {
  int m = 0;
  std::size_t lambda_columns = 0;
  std::vector<std::size_t> poly_offset;        // first column of F_k's block
  std::vector<std::vector<ExpVec>> monomials;  // monomial_basis(n, d_k)
  std::size_t ncols() const { return poly_offset.empty() ? lambda_columns : poly_offset.back() + monomials.back().size(); }
};

template <FieldScalar K>
struct DrhoMatrix {
  SparseMatrix<K> matrix;  // rows: ambient 2-form coordinates (FormCoordinates(n, 2, d))
  DrhoLayout layout;
};

/// d/dt of the log form when F_k moves to F_k + t * x^mu:
///   sum_{I not containing k} lambda_I Fhat_{I+k} x^mu dF_I
/// + sum_{I containing k} lambda_I Fhat_I (dF_I with dF_k replaced by d(x^mu)).
template <RingScalar K>
PolyForm<K> poly_direction_form(const MultiVector<K>& tensor, const std::vector<Poly<K>>& polys, int k, ExpVec mu,
                                const FieldSpec& f) {
  const int nvars = polys.at(0).nvars();
  int d = 0;
  for (const auto& p : polys) d += p.degree();
  std::vector<PolyForm<K>> dfs;
  for (const auto& p : polys) dfs.push_back(PolyForm<K>::differential(p));
  const auto xmu = Poly<K>::monomial(nvars, mu, K::from_int(1, f));
  const auto dxmu = PolyForm<K>::differential(xmu);
  PolyForm<K> out(nvars, tensor.grade(), d);
  for (const auto& [s, c] : tensor.components()) {
    if (!s.contains(k)) {
      out += scal_mul(c, mul(hat_F(polys, s.with(k), f), xmu)) * wedge_of_differentials(dfs, s);
    } else {
      out += scal_mul(c, hat_F(polys, s, f)) * wedge_of_differentials(dfs, s, k, &dxmu);
    }
  }
  return out;
}

/// Columns are the derivatives of (lambda, F) -> omega along the lambda
/// directions of the Grassmannian cone and every monomial perturbation of every F_k.
template <FieldScalar K>
DrhoMatrix<K> drho_matrix(const LogParams<K>& p) {
  if (p.q != 2) throw PreconditionError("drho_matrix: only q = 2 is supported");
  p.validate();
  const FormCoordinates coords(p.n, 2, p.total_degree());
  DrhoMatrix<K> out;
  auto& lay = out.layout;
  lay.m = p.m();
  std::vector<std::vector<K>> cols;
  for (const auto& dir : grass_tangent_dirs(p.lambdas[0], p.lambdas[1], p.degrees, p.field))
    cols.push_back(coords.encode(log_form_from_tensor(dir, p.polys, p.field)));
  lay.lambda_columns = cols.size();
  const auto tensor = p.lambda_tensor();
  for (int k = 0; k < p.m(); ++k) {
    lay.poly_offset.push_back(cols.size());
    lay.monomials.push_back(monomial_basis(p.n, p.degrees[k]));
    for (ExpVec mu : lay.monomials.back())
      cols.push_back(coords.encode(poly_direction_form(tensor, p.polys, k, mu, p.field)));
  }
  out.matrix = SparseMatrix<K>::from_columns(coords.dim(), cols);
  return out;
}

/// A tangent vector (lambda'^1, lambda'^2, F'_1..F'_m) to the parameter space.
template <RingScalar K>
struct TangentDirection {
  std::vector<MultiVector<K>> lambdas;  // in K^m_d
  std::vector<Poly<K>> polys;           // deg F'_k = d_k (zero allowed)
};

/// Coefficients of v in mu_k = d_k e_1 - d_1 e_k; UsageError if i_d(v) != 0.
template <FieldScalar K>
std::vector<K> cmd_coordinates(const MultiVector<K>& v, const DegreeVector& d, const FieldSpec& f) {
  if (v.grade() != 1 || v.m() != d.m()) throw UsageError("cmd_coordinates: need a grade-1 vector in K^m");
  if (!interior_d(d, v).is_zero()) throw UsageError("cmd_coordinates: vector is not in K^m_d");
  const K inv = K::from_int(d[0], f).inverse();
  std::vector<K> c;
  for (int k = 1; k < d.m(); ++k) c.push_back(-(v[IndexSet{k}] * inv));
  return c;
}

/// Column coefficients of a tangent direction in the drho layout.
template <FieldScalar K>
std::vector<K> drho_coefficients(const LogParams<K>& p, const DrhoLayout& lay, const TangentDirection<K>& dir) {
  if (dir.lambdas.size() != 2 || static_cast<int>(dir.polys.size()) != p.m())
    throw UsageError("tangent direction has the wrong shape");
  std::vector<K> c;
  for (const auto& l : dir.lambdas) {
    const auto part = cmd_coordinates(l, p.degrees, p.field);
    c.insert(c.end(), part.begin(), part.end());
  }
  for (int k = 0; k < p.m(); ++k) {
    const auto& fk = dir.polys[static_cast<std::size_t>(k)];
    if (!fk.is_zero() && (fk.degree() != p.degrees[k] || fk.nvars() != p.nvars()))
      throw UsageError("tangent direction: F'_k has the wrong degree");
    for (ExpVec mu : lay.monomials[static_cast<std::size_t>(k)]) c.push_back(fk.coefficient(mu));
  }
  return c;
}

/// The eps-part of omega(lambda + eps lambda', F + eps F') over K[eps]/(eps^2).
template <FieldScalar K>
PolyForm<K> dual_number_derivative(const LogParams<K>& p, const TangentDirection<K>& dir) {
  using D = Dual<K>;
  const int m = p.m();
  std::vector<MultiVector<D>> ls;
  for (std::size_t j = 0; j < dir.lambdas.size(); ++j) {
    std::vector<D> v;
    for (int i = 0; i < m; ++i) v.emplace_back(p.lambdas[j][IndexSet{i}], dir.lambdas[j][IndexSet{i}]);
    ls.push_back(MultiVector<D>::from_vector(v));
  }
  MultiVector<D> tensor = MultiVector<D>::scalar(m, D::from_int(1, p.field));
  for (const auto& l : ls) tensor = wedge_mv(tensor, l);
  std::vector<Poly<D>> polys;
  for (int k = 0; k < m; ++k) {
    const auto& f0 = p.polys[static_cast<std::size_t>(k)];
    const auto& f1 = dir.polys[static_cast<std::size_t>(k)];
    std::vector<typename Poly<D>::Term> t;
    for (ExpVec mu : monomial_basis(p.n, p.degrees[k])) {
      D c(f0.coefficient(mu), f1.is_zero() ? K{} : f1.coefficient(mu));
      if (!c.is_zero()) t.emplace_back(mu, c);
    }
    polys.emplace_back(p.nvars(), p.degrees[k], std::move(t));
  }
  const auto omega_eps = log_form_from_tensor(tensor, polys, p.field);
  return omega_eps.map_coefficients([](const D& x) { return x.eps; });
}

/// drho applied to a direction agrees with the dual-number derivative.
template <FieldScalar K>
bool dual_number_consistency(const LogParams<K>& p, const DrhoMatrix<K>& drho, const TangentDirection<K>& dir) {
  const FormCoordinates coords(p.n, 2, p.total_degree());
  const auto lhs = drho.matrix.apply(drho_coefficients(p, drho.layout, dir));
  const auto rhs = coords.encode(dual_number_derivative(p, dir));
  return lhs == rhs;
}

/// A direction with small random integer coordinates.
template <FieldScalar K>
TangentDirection<K> random_direction(const LogParams<K>& p, std::mt19937_64& rng) {
  TangentDirection<K> dir;
  const auto mus = cmd_basis<K>(p.degrees, p.field);
  for (int j = 0; j < 2; ++j) {
    MultiVector<K> v(p.m(), 1);
    for (const auto& mu : mus) v = v + K::from_int(detail::draw(rng, -5, 5), p.field) * mu;
    dir.lambdas.push_back(v);
  }
  for (int k = 0; k < p.m(); ++k) {
    std::vector<typename Poly<K>::Term> t;
    for (ExpVec mu : monomial_basis(p.n, p.degrees[k])) t.emplace_back(mu, K::from_int(detail::draw(rng, -9, 9), p.field));
    dir.polys.emplace_back(p.nvars(), p.degrees[k], std::move(t));
  }
  return dir;
}

// ---------------------------------------------------------------------------
// Stability certificate

/// dim P_2 = sum_i C(n+d_i, d_i) - m + 2(m-3), computed two ways.
struct ParameterCount {
  std::int64_t grassmannian_part = 0;  // 2(m-3): projective Gr(2, K^m_d)
  std::int64_t polynomial_part = 0;    // sum (C(n+d_i, d_i) - 1)
  std::int64_t closed_form = 0;        // sum C(n+d_i, d_i) - m + 2(m-1-2)
  std::int64_t dim() const { return grassmannian_part + polynomial_part; }
  bool consistent() const { return dim() == closed_form; }
};

inline ParameterCount parameter_count(int n, const DegreeVector& d) {
  ParameterCount c;
  const std::int64_t m = d.m();
  std::int64_t sum = 0;
  for (int i = 0; i < d.m(); ++i) sum += static_cast<std::int64_t>(binomial(n + d[i], d[i]));
  c.grassmannian_part = 2 * ((m - 1) - 2);  // dim Gr(2, K^m_d), K^m_d of dimension m-1
  c.polynomial_part = sum - m;
  c.closed_form = sum - m + 2 * (m - 3);
  return c;
}

struct SanityFlags {
  bool omega_in_kernel = false;    // omega solves its own perturbation system
  bool omega_in_image = false;     // scaling lambda is a drho direction
  bool image_in_kernel = false;    // P * drho == 0
  bool image_descends = false;     // every drho column is a twisted form
  bool step1_vanishing = false;    // kernel coefficients lie in the codim-4 stratum slice
  bool dual_consistency = false;   // drho agrees with dual-number derivatives
  bool scaling_directions = false; // F'_k = F_k maps to omega for every k
  std::size_t dual_directions = 0;
};

struct StabilityReport {
  std::string version;
  int n = 0;
  int q = 0;
  std::vector<int> degrees;
  std::optional<std::uint64_t> seed;
  FieldSpec field;
  std::size_t dim_ambient = 0;      // dim H^0(Omega^2(d))
  std::size_t ker_dim = 0;          // ambient tangent cone
  std::size_t drho_rank = 0;        // ambient image of drho
  std::size_t drho_columns = 0;
  std::size_t perturbation_rows = 0;
  std::size_t perturbation_rows_raw = 0;
  std::int64_t parameter_dim = 0;
  bool balanced_k2 = false;
  bool theorem_silent = false;
  bool normal_crossings_verified = false;  // only checked for hyperplane arrangements
  SanityFlags sanity;
  bool stable = false;

  /// Flags that must hold for any instance; step-1 vanishing only when 2-balanced.
  bool sanity_ok() const {
    return sanity.omega_in_kernel && sanity.omega_in_image && sanity.image_in_kernel && sanity.image_descends &&
           sanity.dual_consistency && sanity.scaling_directions && (!balanced_k2 || sanity.step1_vanishing);
  }
  std::string verdict() const { return stable ? "stable" : "not-stable"; }
};

class SanityFailure : public ConsistencyError {
 public:
  SanityFailure(const std::string& msg, StabilityReport r) : ConsistencyError(msg), report(std::move(r)) {}
  StabilityReport report;
};

struct CertifyOptions {
  std::size_t dual_directions = 10;
  std::uint64_t direction_seed = 0x5eed;
  bool throw_on_sanity_failure = true;
};

#ifndef FOLIA_VERSION
#define FOLIA_VERSION "0.0.0"
#endif

/// Exact certificate: stable iff rank(drho) == dim ker(P) in the ambient space.
template <FieldScalar K>
StabilityReport certify_stability(const LogParams<K>& p, const CertifyOptions& opt = {}) {
  if (p.q != 2) throw PreconditionError("stability certificate needs q = 2");
  if (p.m() <= 3) throw PreconditionError("stability certificate needs m > 3");
  if (p.n <= 3) throw PreconditionError("stability certificate needs n > 3");
  p.validate();
  if (!p.lambdas_in_cmd()) throw UsageError("lambda vectors do not satisfy i_d(lambda^j) = 0");

  StabilityReport rep;
  rep.version = FOLIA_VERSION;
  rep.n = p.n;
  rep.q = p.q;
  rep.degrees = p.degrees.parts();
  rep.seed = p.seed;
  rep.field = p.field;
  rep.balanced_k2 = balanced_check(p.degrees, 2);
  rep.theorem_silent = !rep.balanced_k2;

  const auto count = parameter_count(p.n, p.degrees);
  if (!count.consistent()) throw ConsistencyError("parameter count identity failed");
  rep.parameter_dim = count.dim();

  bool linear = true;
  for (int i = 0; i < p.m(); ++i) linear = linear && p.degrees[i] == 1;
  rep.normal_crossings_verified = linear && nc_linear_check(p.polys);

  const int d = p.total_degree();
  const auto omega = construct_log_form(p);
  const FormBasis<K> basis(p.n, 2, d, p.field);
  rep.dim_ambient = basis.dim();

  const auto sys = perturbation_system(omega, basis);
  rep.perturbation_rows = sys.matrix.nrows();
  rep.perturbation_rows_raw = sys.raw_rows;
  const auto kernel = kernel_basis(sys.matrix, p.field);
  rep.ker_dim = kernel.size();

  const auto drho = drho_matrix(p);
  rep.drho_columns = drho.matrix.ncols();
  rep.drho_rank = rank(drho.matrix);

  const PerturbationOperator<K> op(omega);
  rep.sanity.omega_in_kernel = op.apply(omega).empty();

  const auto& coords = basis.ambient();
  const auto omega_col = SparseMatrix<K>::from_columns(coords.dim(), {coords.encode(omega)});
  rep.sanity.omega_in_image = column_space_contains(drho.matrix, omega_col);

  const auto radial = radial_contraction_matrix<K>(p.n, 2, d, p.field);
  rep.sanity.image_in_kernel = true;
  rep.sanity.image_descends = true;
  for (std::size_t c = 0; c < drho.matrix.ncols(); ++c) {
    const auto col = drho.matrix.column(c);
    for (const auto& v : radial.apply(col))
      if (!v.is_zero()) rep.sanity.image_descends = false;
    if (!op.apply(coords.template decode<K>(std::span<const K>(col))).empty()) rep.sanity.image_in_kernel = false;
  }

  std::vector<PolyForm<K>> kernel_forms;
  for (const auto& v : kernel) kernel_forms.push_back(basis.decode(v));
  const auto slice = stratum_slice(p.polys, 4, d - 2, p.field);
  rep.sanity.step1_vanishing = forms_vanish_on_stratum(kernel_forms, slice);

  const auto omega_coords = coords.encode(omega);
  rep.sanity.scaling_directions = true;
  for (int k = 0; k < p.m(); ++k) {
    std::vector<K> c(drho.matrix.ncols());
    const auto& mons = drho.layout.monomials[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < mons.size(); ++i)
      c[drho.layout.poly_offset[static_cast<std::size_t>(k)] + i] = p.polys[static_cast<std::size_t>(k)].coefficient(mons[i]);
    if (!(drho.matrix.apply(c) == omega_coords)) rep.sanity.scaling_directions = false;
  }

  std::mt19937_64 rng(opt.direction_seed);
  rep.sanity.dual_consistency = true;
  for (std::size_t i = 0; i < opt.dual_directions; ++i) {
    if (!dual_number_consistency(p, drho, random_direction(p, rng))) rep.sanity.dual_consistency = false;
    ++rep.sanity.dual_directions;
  }

  rep.stable = rep.drho_rank == rep.ker_dim;
  if (rep.drho_rank > rep.ker_dim && rep.sanity.image_in_kernel)
    throw ConsistencyError("rank(drho) exceeds the kernel dimension");
  if (opt.throw_on_sanity_failure && !rep.sanity_ok()) throw SanityFailure("stability certificate sanity check failed", rep);
  return rep;
}

}  // namespace folia
