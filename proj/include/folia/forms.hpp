#pragma once

// Polynomial differential forms on the affine cone K^{n+1}.
//
// A PolyForm of grade q and total degree d is sum_I A_I dx_I with every A_I
// homogeneous of degree d - q (each dx_i counts as degree one). Forms whose
// coefficient degree would be negative are necessarily zero.

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "folia/errors.hpp"
#include "folia/index_set.hpp"
#include "folia/poly.hpp"
#include "folia/scalar.hpp"

namespace folia {

template <RingScalar K>
class PolyForm {
 public:
  PolyForm() = default;
  PolyForm(int nvars, int grade, int total_degree) : nvars_(nvars), grade_(grade), total_degree_(total_degree) {
    if (nvars < 1 || nvars > kMaxVars) throw UsageError("PolyForm: unsupported number of variables");
    if (grade < 0) throw UsageError("PolyForm: negative grade");
  }

  /// A dx_I with the total degree inferred from A.
  static PolyForm monomial_form(IndexSet s, Poly<K> a) {
    PolyForm f(a.nvars(), s.size(), a.degree() + s.size());
    f.add_to(s, a);
    return f;
  }
  /// dP for a polynomial P (a grade-1 form of total degree deg P).
  static PolyForm differential(const Poly<K>& p) {
    PolyForm f(p.nvars(), 1, p.degree());
    for (int i = 0; i < p.nvars(); ++i) f.add_to(IndexSet{i}, p.partial(i));
    return f;
  }

  int nvars() const { return nvars_; }
  int grade() const { return grade_; }
  int total_degree() const { return total_degree_; }
  int coef_degree() const { return total_degree_ - grade_; }
  bool is_zero() const { return comps_.empty(); }
  const std::map<IndexSet, Poly<K>>& components() const { return comps_; }

  Poly<K> operator[](IndexSet s) const {
    auto it = comps_.find(s);
    if (it != comps_.end()) return it->second;
    return Poly<K>(nvars_, std::max(coef_degree(), 0));
  }

  void add_to(IndexSet s, const Poly<K>& a) {
    if (a.is_zero()) return;
    if (s.size() != grade_ || s.max_element() >= nvars_) throw UsageError("PolyForm: index set does not fit");
    if (a.nvars() != nvars_) throw UsageError("PolyForm: nvars mismatch");
    if (a.degree() != coef_degree())
      throw UsageError("PolyForm: coefficient of degree " + std::to_string(a.degree()) + ", expected " +
                       std::to_string(coef_degree()));
    auto it = comps_.find(s);
    if (it == comps_.end()) {
      comps_.emplace(s, a);
    } else {
      it->second += a;
      if (it->second.is_zero()) comps_.erase(it);
    }
  }

  PolyForm operator-() const {
    PolyForm r = *this;
    for (auto& [s, a] : r.comps_) a = -a;
    return r;
  }
  PolyForm& operator+=(const PolyForm& o) {
    check_same(o);
    for (const auto& [s, a] : o.comps_) add_to(s, a);
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) { return *this += -o; }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(const K& c, const PolyForm& a) {
    PolyForm r(a.nvars_, a.grade_, a.total_degree_);
    for (const auto& [s, p] : a.comps_) r.add_to(s, scal_mul(c, p));
    return r;
  }
  /// P * alpha for a homogeneous polynomial P.
  friend PolyForm operator*(const Poly<K>& p, const PolyForm& a) {
    if (p.nvars() != a.nvars_) throw UsageError("PolyForm: nvars mismatch");
    PolyForm r(a.nvars_, a.grade_, a.total_degree_ + p.degree());
    for (const auto& [s, c] : a.comps_) r.add_to(s, mul(p, c));
    return r;
  }

  friend bool operator==(const PolyForm& a, const PolyForm& b) {
    if (a.nvars_ != b.nvars_ || a.grade_ != b.grade_) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.total_degree_ != b.total_degree_ || a.comps_.size() != b.comps_.size()) return false;
    for (const auto& [s, p] : a.comps_) {
      auto it = b.comps_.find(s);
      if (it == b.comps_.end() || !(it->second == p)) return false;
    }
    return true;
  }

  template <class F>
  auto map_coefficients(F&& f) const -> PolyForm<std::decay_t<decltype(f(std::declval<const K&>()))>> {
    PolyForm<std::decay_t<decltype(f(std::declval<const K&>()))>> r(nvars_, grade_, total_degree_);
    for (const auto& [s, p] : comps_) r.add_to(s, p.map_coefficients(f));
    return r;
  }

  std::string to_string() const {
    if (comps_.empty()) return "0";
    std::string out;
    for (const auto& [s, p] : comps_) {
      if (!out.empty()) out += " + ";
      out += "[" + p.to_string() + "]dx" + s.to_string();
    }
    return out;
  }

 private:
  // A zero form adopts the other operand's total degree.
  void check_same(const PolyForm& o) {
    if (o.is_zero() && o.nvars_ == nvars_ && o.grade_ == grade_) return;
    if (nvars_ != o.nvars_ || grade_ != o.grade_ || (total_degree_ != o.total_degree_ && !is_zero()))
      throw UsageError("PolyForm: shape mismatch");
    total_degree_ = o.total_degree_;
  }

  int nvars_ = 1;
  int grade_ = 0;
  int total_degree_ = 0;
  std::map<IndexSet, Poly<K>> comps_;
};

/// Polynomial vector field sum_i v_i d/dx_i with homogeneous components of one degree.
template <RingScalar K>
struct PolyField {
  int nvars = 1;
  int degree = 0;
  std::vector<Poly<K>> comps;

  /// The constant field e_var = d/dx_var.
  static PolyField constant(int nvars, int var, const FieldSpec& f) {
    PolyField v{nvars, 0, {}};
    for (int i = 0; i < nvars; ++i)
      v.comps.push_back(i == var ? Poly<K>::constant(nvars, K::from_int(1, f)) : Poly<K>(nvars, 0));
    return v;
  }
  /// The Euler field R = sum_i x_i d/dx_i.
  static PolyField radial(int nvars, const FieldSpec& f) {
    PolyField v{nvars, 1, {}};
    for (int i = 0; i < nvars; ++i) v.comps.push_back(Poly<K>::variable(nvars, i, f));
    return v;
  }
};

template <RingScalar K>
PolyForm<K> wedge_forms(const PolyForm<K>& a, const PolyForm<K>& b) {
  if (a.nvars() != b.nvars()) throw UsageError("wedge_forms: nvars mismatch");
  PolyForm<K> r(a.nvars(), a.grade() + b.grade(), a.total_degree() + b.total_degree());
  for (const auto& [sa, pa] : a.components())
    for (const auto& [sb, pb] : b.components()) {
      if (!sa.disjoint(sb)) continue;
      auto prod = mul(pa, pb);
      if (shuffle_sign(sa, sb) < 0) prod = -prod;
      r.add_to(sa | sb, prod);
    }
  return r;
}

/// Exterior derivative d(A dx_I) = sum_i dA/dx_i dx_i ^ dx_I.
template <RingScalar K>
PolyForm<K> ext_d(const PolyForm<K>& a) {
  PolyForm<K> r(a.nvars(), a.grade() + 1, a.total_degree());
  for (const auto& [s, p] : a.components())
    for (int i = 0; i < a.nvars(); ++i) {
      if (s.contains(i)) continue;
      auto d = p.partial(i);
      if (d.is_zero()) continue;
      if (s.count_below(i) % 2) d = -d;
      r.add_to(s.with(i), d);
    }
  return r;
}

/// Interior product i_v(A dx_I) = sum_j (-1)^(j-1) v_{i_j} A dx_{I - i_j}.
template <RingScalar K>
PolyForm<K> contract(const PolyField<K>& v, const PolyForm<K>& a) {
  if (a.grade() < 1) throw UsageError("contract: grade must be >= 1");
  if (v.nvars != a.nvars()) throw UsageError("contract: nvars mismatch");
  PolyForm<K> r(a.nvars(), a.grade() - 1, a.total_degree() + v.degree - 1);
  for (const auto& [s, p] : a.components())
    for (int i : s.elements()) {
      const auto& vi = v.comps[static_cast<std::size_t>(i)];
      if (vi.is_zero()) continue;
      auto t = mul(vi, p);
      if (s.count_below(i) % 2) t = -t;
      r.add_to(s.without(i), t);
    }
  return r;
}

/// Contraction with the constant field d/dx_var.
template <RingScalar K>
PolyForm<K> contract_const(int var, const PolyForm<K>& a) {
  if (a.grade() < 1) throw UsageError("contract: grade must be >= 1");
  PolyForm<K> r(a.nvars(), a.grade() - 1, a.total_degree() - 1);
  for (const auto& [s, p] : a.components()) {
    if (!s.contains(var)) continue;
    r.add_to(s.without(var), s.count_below(var) % 2 ? -p : p);
  }
  return r;
}

/// i_v for a coordinate multivector v = e_{j_1} ^ ... ^ e_{j_k}: contracts by
/// e_{j_1} first, then e_{j_2}, and so on.
template <RingScalar K>
PolyForm<K> contract_multi(IndexSet v, const PolyForm<K>& a) {
  PolyForm<K> r = a;
  for (int j : v.elements()) r = contract_const(j, r);
  return r;
}

/// i_R(alpha) for the Euler field; zero exactly when alpha descends to P^n.
template <RingScalar K>
PolyForm<K> radial_contract(const PolyForm<K>& a) {
  if (a.grade() < 1) throw UsageError("radial_contract: grade must be >= 1");
  PolyForm<K> r(a.nvars(), a.grade() - 1, a.total_degree());
  for (const auto& [s, p] : a.components())
    for (int i : s.elements()) {
      std::vector<typename Poly<K>::Term> t;
      t.reserve(p.size());
      const bool neg = s.count_below(i) % 2;
      for (const auto& [mon, c] : p.terms()) t.emplace_back(mon + ExpVec::unit(i), neg ? -c : c);
      r.add_to(s.without(i), Poly<K>(a.nvars(), p.degree() + 1, std::move(t)));
    }
  return r;
}

/// Dense coordinates on affine q-forms of total degree d in n+1 variables:
/// index-set blocks in lexicographic order, each block indexed by monomial_basis(n, d-q).
class FormCoordinates {
 public:
  FormCoordinates(int n, int q, int d)
      : n_(n), q_(q), d_(d), sets_(subsets(n + 1, q)), mons_(n, std::max(d - q, 0)) {
    if (d < q) sets_.clear();
    for (std::size_t i = 0; i < sets_.size(); ++i) set_index_[sets_[i].mask()] = i;
  }

  int n() const { return n_; }
  int grade() const { return q_; }
  int total_degree() const { return d_; }
  std::size_t dim() const { return sets_.size() * mons_.size(); }
  const std::vector<IndexSet>& index_sets() const { return sets_; }
  const MonomialBasis& monomials() const { return mons_; }

  std::size_t index(IndexSet s, ExpVec m) const { return set_index_.at(s.mask()) * mons_.size() + mons_.index_of(m); }
  std::pair<IndexSet, ExpVec> at(std::size_t idx) const {
    return {sets_[idx / mons_.size()], mons_.monomials()[idx % mons_.size()]};
  }

  template <RingScalar K>
  std::vector<K> encode(const PolyForm<K>& a) const {
    std::vector<K> v(dim());
    if (a.is_zero()) return v;
    if (a.nvars() != n_ + 1 || a.grade() != q_ || a.total_degree() != d_)
      throw UsageError("FormCoordinates: form has the wrong shape");
    for (const auto& [s, p] : a.components())
      for (const auto& [m, c] : p.terms()) v[index(s, m)] = c;
    return v;
  }

  template <RingScalar K>
  PolyForm<K> decode(std::span<const K> v) const {
    if (v.size() != dim()) throw UsageError("FormCoordinates: vector has wrong length");
    PolyForm<K> a(n_ + 1, q_, d_);
    const std::size_t nm = mons_.size();
    for (std::size_t b = 0; b < sets_.size(); ++b) {
      std::vector<typename Poly<K>::Term> t;
      for (std::size_t j = 0; j < nm; ++j)
        if (!v[b * nm + j].is_zero()) t.emplace_back(mons_.monomials()[j], v[b * nm + j]);
      if (!t.empty()) a.add_to(sets_[b], Poly<K>(n_ + 1, d_ - q_, std::move(t)));
    }
    return a;
  }

 private:
  int n_, q_, d_;
  std::vector<IndexSet> sets_;
  MonomialBasis mons_;
  std::unordered_map<std::uint32_t, std::size_t> set_index_;
};

}  // namespace folia
