#pragma once

// Exterior algebra of K^m. Indices are 0-based internally; the JSON layer and
// user-facing text use 1-based indices e_1..e_m.
//
// Only sorted index sets are stored, so a grade-2 tensor lambda has exactly one
// coordinate lambda_ij per pair i < j. Formulas written with a sum over
// ordered pairs i != j count every term twice; nothing here uses that form.

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "folia/errors.hpp"
#include "folia/exactla.hpp"
#include "folia/index_set.hpp"
#include "folia/scalar.hpp"

namespace folia {

/// Partition d = d_1 + ... + d_m with positive parts.
class DegreeVector {
 public:
  DegreeVector() = default;
  explicit DegreeVector(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw UsageError("degree vector must be non-empty");
    if (parts_.size() > 31) throw UsageError("at most 31 parts supported");
    for (int p : parts_)
      if (p < 1) throw UsageError("degree vector parts must be positive");
  }
  DegreeVector(std::initializer_list<int> parts) : DegreeVector(std::vector<int>(parts)) {}

  int m() const { return static_cast<int>(parts_.size()); }
  int operator[](int i) const { return parts_.at(static_cast<std::size_t>(i)); }
  int total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  const std::vector<int>& parts() const { return parts_; }
  std::string to_string() const {
    std::string s;
    for (int p : parts_) s += (s.empty() ? "" : ",") + std::to_string(p);
    return s;
  }
  friend bool operator==(const DegreeVector&, const DegreeVector&) = default;

 private:
  std::vector<int> parts_;
};

template <RingScalar K>
class MultiVector {
 public:
  MultiVector() = default;
  MultiVector(int m, int grade) : m_(m), grade_(grade) {
    if (m < 1 || m > 31) throw UsageError("MultiVector: m out of range");
    // Grades above m are allowed and always zero.
    if (grade < 0) throw UsageError("MultiVector: negative grade");
  }

  /// The basis element c * e_I.
  static MultiVector basis(int m, IndexSet s, K c) {
    MultiVector v(m, s.size());
    v.set(s, std::move(c));
    return v;
  }
  /// Grade-1 vector sum_i x[i] e_i.
  static MultiVector from_vector(const std::vector<K>& x) {
    MultiVector v(static_cast<int>(x.size()), 1);
    for (int i = 0; i < v.m_; ++i) v.set(IndexSet{i}, x[static_cast<std::size_t>(i)]);
    return v;
  }
  /// A scalar as a grade-0 element.
  static MultiVector scalar(int m, K c) { return basis(m, IndexSet{}, std::move(c)); }

  int m() const { return m_; }
  int grade() const { return grade_; }
  bool is_zero() const { return comps_.empty(); }
  const std::map<IndexSet, K>& components() const { return comps_; }

  K operator[](IndexSet s) const {
    auto it = comps_.find(s);
    return it == comps_.end() ? K{} : it->second;
  }
  /// Coordinate lambda_{ij} for i < j, or the antisymmetric value otherwise.
  K pair(int i, int j) const {
    if (i == j) return K{};
    return i < j ? (*this)[IndexSet{i, j}] : -(*this)[IndexSet{i, j}];
  }

  void set(IndexSet s, K c) {
    if (s.size() != grade_ || s.max_element() >= m_) throw UsageError("MultiVector: index set does not fit");
    if (c.is_zero()) comps_.erase(s);
    else comps_[s] = std::move(c);
  }
  void add_to(IndexSet s, const K& c) { set(s, (*this)[s] + c); }

  /// Coordinates in lexicographic order of grade-subsets of {0..m-1}.
  std::vector<K> coordinates() const {
    std::vector<K> out;
    for (auto s : subsets(m_, grade_)) out.push_back((*this)[s]);
    return out;
  }

  MultiVector operator-() const {
    MultiVector r = *this;
    for (auto& [s, c] : r.comps_) c = -c;
    return r;
  }
  friend MultiVector operator+(const MultiVector& a, const MultiVector& b) {
    a.check_same(b);
    MultiVector r = a;
    for (const auto& [s, c] : b.comps_) r.add_to(s, c);
    return r;
  }
  friend MultiVector operator-(const MultiVector& a, const MultiVector& b) { return a + (-b); }
  friend MultiVector operator*(const K& c, const MultiVector& a) {
    MultiVector r(a.m_, a.grade_);
    for (const auto& [s, v] : a.comps_) r.set(s, c * v);
    return r;
  }
  friend bool operator==(const MultiVector& a, const MultiVector& b) {
    if (a.m_ != b.m_ || a.grade_ != b.grade_ || a.comps_.size() != b.comps_.size()) return false;
    for (const auto& [s, c] : a.comps_)
      if (!(b[s] == c)) return false;
    return true;
  }

  template <class F>
  auto map_coefficients(F&& f) const -> MultiVector<std::decay_t<decltype(f(std::declval<const K&>()))>> {
    MultiVector<std::decay_t<decltype(f(std::declval<const K&>()))>> r(m_, grade_);
    for (const auto& [s, c] : comps_) r.set(s, f(c));
    return r;
  }

  std::string to_string() const {
    if (comps_.empty()) return "0";
    std::string out;
    for (const auto& [s, c] : comps_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.to_string() + ")e" + s.to_string(1);
    }
    return out;
  }

 private:
  void check_same(const MultiVector& b) const {
    if (m_ != b.m_ || grade_ != b.grade_) throw UsageError("MultiVector: shape mismatch");
  }

  int m_ = 1;
  int grade_ = 0;
  std::map<IndexSet, K> comps_;
};

template <RingScalar K>
MultiVector<K> wedge_mv(const MultiVector<K>& a, const MultiVector<K>& b) {
  if (a.m() != b.m()) throw UsageError("wedge_mv: m mismatch");
  MultiVector<K> r(a.m(), a.grade() + b.grade());
  for (const auto& [sa, ca] : a.components())
    for (const auto& [sb, cb] : b.components()) {
      if (!sa.disjoint(sb)) continue;
      K t = ca * cb;
      if (shuffle_sign(sa, sb) < 0) t = -t;
      r.add_to(sa | sb, t);
    }
  return r;
}

/// i_d(lambda): removes each index i_j with sign (-1)^(j+1) and weight d_{i_j}.
template <RingScalar K>
MultiVector<K> interior_d(const DegreeVector& d, const MultiVector<K>& lambda) {
  if (lambda.grade() < 1) throw UsageError("interior_d: grade must be >= 1");
  if (d.m() != lambda.m()) throw UsageError("interior_d: m mismatch");
  MultiVector<K> r(lambda.m(), lambda.grade() - 1);
  for (const auto& [s, c] : lambda.components())
    for (int i : s.elements()) {
      K t = c * static_cast<long long>(d[i]);
      if (s.count_below(i) % 2) t = -t;
      r.add_to(s.without(i), t);
    }
  return r;
}

/// Basis mu_k = d_k e_1 - d_1 e_k (k = 2..m) of the hyperplane sum mu_i d_i = 0.
template <RingScalar K>
std::vector<MultiVector<K>> cmd_basis(const DegreeVector& d, const FieldSpec& f) {
  std::vector<MultiVector<K>> out;
  for (int k = 1; k < d.m(); ++k) {
    MultiVector<K> mu(d.m(), 1);
    mu.set(IndexSet{0}, K::from_int(d[k], f));
    mu.set(IndexSet{k}, K::from_int(-d[0], f));
    out.push_back(std::move(mu));
  }
  return out;
}

/// Matrix of i_d : Lambda^q -> Lambda^{q-1} in lexicographic coordinates.
inline SparseMatrix<Rational> interior_d_matrix(const DegreeVector& d, int q) {
  const int m = d.m();
  const auto src = subsets(m, q);
  const auto dst = subsets(m, q - 1);
  std::map<IndexSet, std::size_t> dst_index;
  for (std::size_t i = 0; i < dst.size(); ++i) dst_index[dst[i]] = i;
  std::vector<SparseMatrix<Rational>::Entry> es;
  for (std::size_t c = 0; c < src.size(); ++c) {
    const auto img = interior_d(d, MultiVector<Rational>::basis(m, src[c], Rational(1)));
    for (const auto& [s, v] : img.components()) es.push_back({dst_index.at(s), c, v});
  }
  return SparseMatrix<Rational>(dst.size(), src.size(), std::move(es));
}

struct KoszulDims {
  std::size_t kernel_dim = 0;  // dim ker(i_d : Lambda^q -> Lambda^{q-1})
  std::size_t image_dim = 0;   // dim im(i_d : Lambda^{q+1} -> Lambda^q)
  bool exact() const { return kernel_dim == image_dim; }
};

inline KoszulDims koszul_dims(const DegreeVector& d, int q) {
  const int m = d.m();
  if (q < 1 || q > m - 1) throw UsageError("koszul_check: need 1 <= q <= m-1");
  KoszulDims k;
  k.kernel_dim = binomial(m, q) - rank(interior_d_matrix(d, q));
  k.image_dim = rank(interior_d_matrix(d, q + 1));
  return k;
}

/// Exactness of the Koszul complex of contraction by d at Lambda^q.
inline bool koszul_check(const DegreeVector& d, int q) { return koszul_dims(d, q).exact(); }

/// For grade 2: lambda ^ lambda == 0.
template <RingScalar K>
bool is_decomposable2(const MultiVector<K>& lambda) {
  if (lambda.grade() != 2) throw UsageError("is_decomposable2: grade must be 2");
  return wedge_mv(lambda, lambda).is_zero();
}

/// Spanning set {mu ^ l2} u {l1 ^ mu}, mu over cmd_basis(d), of the cone over
/// the tangent space of Gr(2, K^m_d) at l1 ^ l2.
template <RingScalar K>
std::vector<MultiVector<K>> grass_tangent_dirs(const MultiVector<K>& l1, const MultiVector<K>& l2,
                                               const DegreeVector& d, const FieldSpec& f) {
  if (l1.grade() != 1 || l2.grade() != 1) throw UsageError("grass_tangent_dirs: need grade-1 vectors");
  if (wedge_mv(l1, l2).is_zero()) throw UsageError("grass_tangent_dirs: lambda^1 and lambda^2 are dependent");
  const auto basis = cmd_basis<K>(d, f);
  std::vector<MultiVector<K>> out;
  for (const auto& mu : basis) out.push_back(wedge_mv(mu, l2));
  for (const auto& mu : basis) out.push_back(wedge_mv(l1, mu));
  return out;
}

}  // namespace folia
