#pragma once

// Sparse homogeneous polynomials in x_0..x_n over an exact coefficient ring.
//
// Monomials are packed one byte per variable with x_0 in the most significant
// byte, so for a fixed total degree the integer order of the packed word is
// lexicographic order with x_0 > x_1 > ... . Terms are kept in decreasing
// order, which is graded-lex order within one homogeneous degree and matches
// monomial_basis().

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "folia/errors.hpp"
#include "folia/scalar.hpp"

namespace folia {

inline constexpr int kMaxVars = 8;
inline constexpr int kMaxExponent = 255;

/// Exponent vector of a monomial in at most kMaxVars variables.
class ExpVec {
 public:
  constexpr ExpVec() = default;
  explicit ExpVec(std::span<const int> exps) {
    if (exps.size() > static_cast<std::size_t>(kMaxVars)) throw UsageError("too many variables");
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] < 0 || exps[i] > kMaxExponent) throw UsageError("exponent out of range");
      bits_ |= std::uint64_t(exps[i]) << shift(static_cast<int>(i));
    }
  }
  ExpVec(std::initializer_list<int> exps) : ExpVec(std::span<const int>(exps.begin(), exps.size())) {}

  static constexpr ExpVec from_bits(std::uint64_t b) {
    ExpVec e;
    e.bits_ = b;
    return e;
  }
  static ExpVec unit(int var) {
    check_var(var);
    return from_bits(std::uint64_t{1} << shift(var));
  }

  constexpr std::uint64_t bits() const { return bits_; }
  int operator[](int var) const { return static_cast<int>((bits_ >> shift(var)) & 0xff); }
  int degree() const {
    int d = 0;
    for (int i = 0; i < kMaxVars; ++i) d += (*this)[i];
    return d;
  }
  std::vector<int> exponents(int nvars) const {
    std::vector<int> v(static_cast<std::size_t>(nvars));
    for (int i = 0; i < nvars; ++i) v[static_cast<std::size_t>(i)] = (*this)[i];
    return v;
  }

  /// Product of monomials; caller guarantees exponents stay in range.
  friend constexpr ExpVec operator+(ExpVec a, ExpVec b) { return from_bits(a.bits_ + b.bits_); }
  /// Quotient a / b; caller guarantees divisibility.
  friend constexpr ExpVec operator-(ExpVec a, ExpVec b) { return from_bits(a.bits_ - b.bits_); }
  friend constexpr bool operator==(ExpVec, ExpVec) = default;
  friend constexpr auto operator<=>(ExpVec a, ExpVec b) { return a.bits_ <=> b.bits_; }

  static void check_var(int var) {
    if (var < 0 || var >= kMaxVars) throw UsageError("variable index out of range");
  }

 private:
  static constexpr int shift(int var) { return 8 * (kMaxVars - 1 - var); }
  std::uint64_t bits_ = 0;
};

/// Position of `m` in monomial_basis(nvars - 1, deg(m)).
inline std::size_t grlex_rank(ExpVec m, int nvars) {
  std::size_t idx = 0;
  int rem = m.degree();
  for (int i = 0; i + 1 < nvars; ++i) {
    const int a = m[i];
    const int k = nvars - i - 2;
    // Monomials with a larger exponent at x_i come first.
    idx += binomial(rem - a + k, k + 1);
    rem -= a;
  }
  return idx;
}

/// All monomials of degree e in n+1 variables, in graded-lex order (x_0^e first).
inline std::vector<ExpVec> monomial_basis(int n, int e) {
  if (n < 0 || n + 1 > kMaxVars) throw UsageError("unsupported number of variables");
  if (e < 0) throw UsageError("negative degree");
  std::vector<ExpVec> out;
  out.reserve(binomial(n + e, e));
  std::vector<int> exps(static_cast<std::size_t>(n + 1), 0);
  // Recursive descent over the exponent of each variable, largest first.
  auto rec = [&](auto&& self, int var, int rem) -> void {
    if (var == n) {
      exps[static_cast<std::size_t>(var)] = rem;
      out.emplace_back(std::span<const int>(exps));
      return;
    }
    for (int a = rem; a >= 0; --a) {
      exps[static_cast<std::size_t>(var)] = a;
      self(self, var + 1, rem - a);
    }
  };
  rec(rec, 0, e);
  return out;
}

/// monomial_basis(n, e), memoized per thread.
inline const std::vector<ExpVec>& cached_monomial_basis(int n, int e) {
  thread_local std::map<std::pair<int, int>, std::vector<ExpVec>> cache;
  auto it = cache.find({n, e});
  if (it == cache.end()) it = cache.emplace(std::make_pair(n, e), monomial_basis(n, e)).first;
  return it->second;
}

template <RingScalar K>
class Poly {
 public:
  using Term = std::pair<ExpVec, K>;

  Poly() = default;
  Poly(int nvars, int degree) : nvars_(nvars), degree_(degree) { check_shape(); }

  /// Terms may be in any order and contain duplicates; all must have the given degree.
  Poly(int nvars, int degree, std::vector<Term> terms) : nvars_(nvars), degree_(degree) {
    check_shape();
    for (const auto& [m, c] : terms) {
      if (m.degree() != degree) throw UsageError("inhomogeneous term");
      for (int i = nvars; i < kMaxVars; ++i)
        if (m[i] != 0) throw UsageError("term uses a variable beyond nvars");
    }
    terms_ = std::move(terms);
    normalize();
  }

  static Poly monomial(int nvars, ExpVec m, K c) {
    std::vector<Term> t;
    t.emplace_back(m, std::move(c));
    return Poly(nvars, m.degree(), std::move(t));
  }
  static Poly constant(int nvars, K c) { return monomial(nvars, ExpVec{}, std::move(c)); }
  static Poly variable(int nvars, int var, const FieldSpec& f) {
    return monomial(nvars, ExpVec::unit(var), K::from_int(1, f));
  }

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::span<const Term> terms() const { return terms_; }

  K coefficient(ExpVec m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, ExpVec key) { return t.first > key; });
    return (it != terms_.end() && it->first == m) ? it->second : K{};
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }
  Poly& operator+=(const Poly& o) { return *this = add(*this, o); }
  Poly& operator-=(const Poly& o) { return *this = add(*this, -o); }

  friend Poly add(const Poly& a, const Poly& b) {
    if (a.nvars_ != b.nvars_) throw UsageError("add: nvars mismatch");
    if (a.degree_ != b.degree_) {
      // The zero polynomial may carry any declared degree.
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      throw UsageError("add: degree mismatch");
    }
    Poly r(a.nvars_, a.degree_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin(), j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && i->first > j->first)) {
        r.terms_.push_back(*i++);
      } else if (i == a.terms_.end() || j->first > i->first) {
        r.terms_.push_back(*j++);
      } else {
        K c = i->second + j->second;
        if (!c.is_zero()) r.terms_.emplace_back(i->first, std::move(c));
        ++i, ++j;
      }
    }
    return r;
  }
  friend Poly operator+(const Poly& a, const Poly& b) { return add(a, b); }
  friend Poly operator-(const Poly& a, const Poly& b) { return add(a, -b); }

  friend Poly scal_mul(const K& c, const Poly& p) {
    Poly r(p.nvars_, p.degree_);
    if (c.is_zero()) return r;
    for (const auto& [m, v] : p.terms_) {
      K x = c * v;
      if (!x.is_zero()) r.terms_.emplace_back(m, std::move(x));
    }
    return r;
  }
  friend Poly operator*(const K& c, const Poly& p) { return scal_mul(c, p); }
  friend Poly operator*(const Poly& p, long long k) {
    Poly r(p.nvars_, p.degree_);
    for (const auto& [m, v] : p.terms_) {
      K x = v * k;
      if (!x.is_zero()) r.terms_.emplace_back(m, std::move(x));
    }
    return r;
  }

  friend Poly mul(const Poly& a, const Poly& b) {
    if (a.nvars_ != b.nvars_) throw UsageError("mul: nvars mismatch");
    const int deg = a.degree_ + b.degree_;
    if (deg > kMaxExponent) throw UsageError("mul: degree overflow");
    Poly r(a.nvars_, deg);
    if (a.is_zero() || b.is_zero()) return r;
    const std::size_t work = a.terms_.size() * b.terms_.size();
    const std::size_t space = binomial(a.nvars_ - 1 + deg, deg);
    if constexpr (std::is_same_v<K, Rational>) {
      if (work * 4 >= space) return mul_dense_rational(a, b, r, space);
    }
    if (work * 4 >= space) {
      // Dense accumulation indexed by graded-lex rank.
      std::vector<K> acc(space);
      std::vector<char> used(space, 0);
      for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
          const std::size_t idx = grlex_rank(ma + mb, a.nvars_);
          acc[idx] += ca * cb;
          used[idx] = 1;
        }
      // Rank order is term order; walk ranks ascending and recover monomials.
      const auto& basis = cached_monomial_basis(a.nvars_ - 1, deg);
      for (std::size_t idx = 0; idx < space; ++idx)
        if (used[idx] && !acc[idx].is_zero()) r.terms_.emplace_back(basis[idx], std::move(acc[idx]));
      return r;
    }
    r.terms_.reserve(work);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.terms_.emplace_back(ma + mb, ca * cb);
    r.normalize();
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }

 private:
  // Clears denominators and accumulates integer numerators with mpz addmul.
  static Poly mul_dense_rational(const Poly& a, const Poly& b, Poly& r, std::size_t space) {
    auto integral = [](const Poly& p, mpz_class& den) {
      den = 1;
      for (const auto& t : p.terms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.second.get().get_den_mpz_t());
      std::vector<mpz_class> num;
      num.reserve(p.terms_.size());
      for (const auto& t : p.terms_) num.push_back(t.second.get().get_num() * (den / t.second.get().get_den()));
      return num;
    };
    mpz_class da, db;
    const auto na = integral(a, da), nb = integral(b, db);
    std::vector<mpz_class> acc(space);
    std::vector<char> used(space, 0);
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      const auto& ma = a.terms_[i].first;
      for (std::size_t j = 0; j < b.terms_.size(); ++j) {
        const std::size_t idx = grlex_rank(ma + b.terms_[j].first, a.nvars_);
        mpz_addmul(acc[idx].get_mpz_t(), na[i].get_mpz_t(), nb[j].get_mpz_t());
        used[idx] = 1;
      }
    }
    const mpz_class den = da * db;
    const auto& basis = cached_monomial_basis(a.nvars_ - 1, r.degree_);
    for (std::size_t idx = 0; idx < space; ++idx)
      if (used[idx] && sgn(acc[idx]) != 0) r.terms_.emplace_back(basis[idx], Rational(mpq_class(acc[idx], den)));
    return r;
  }

 public:

  /// Formal derivative d/dx_var; the result has degree deg - 1.
  Poly partial(int var) const {
    if (var < 0 || var >= nvars_) throw UsageError("partial: variable out of range");
    Poly r(nvars_, degree_ > 0 ? degree_ - 1 : 0);
    if (degree_ == 0) return r;
    const ExpVec u = ExpVec::unit(var);
    for (const auto& [m, c] : terms_) {
      const int e = m[var];
      if (e == 0) continue;
      K x = c * static_cast<long long>(e);
      if (!x.is_zero()) r.terms_.emplace_back(m - u, std::move(x));
    }
    return r;  // subtracting a fixed unit preserves the order
  }

  /// Applies f to every coefficient, producing a polynomial over another ring.
  template <class F>
  auto map_coefficients(F&& f) const -> Poly<std::decay_t<decltype(f(std::declval<const K&>()))>> {
    using K2 = std::decay_t<decltype(f(std::declval<const K&>()))>;
    std::vector<typename Poly<K2>::Term> t;
    t.reserve(terms_.size());
    for (const auto& [m, c] : terms_) t.emplace_back(m, f(c));
    return Poly<K2>(nvars_, degree_, std::move(t));
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.nvars_ != b.nvars_) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.degree_ != b.degree_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].first != b.terms_[i].first || !(a.terms_[i].second == b.terms_[i].second)) return false;
    return true;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.to_string() + ")";
      for (int i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        s += "*x" + std::to_string(i);
        if (m[i] > 1) s += "^" + std::to_string(m[i]);
      }
    }
    return s;
  }

 private:
  void check_shape() const {
    if (nvars_ < 1 || nvars_ > kMaxVars) throw UsageError("unsupported number of variables");
    if (degree_ < 0) throw UsageError("negative degree");
  }
  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first > y.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
      else {
        if (!out.empty() && out.back().second.is_zero()) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && out.back().second.is_zero()) out.pop_back();
    terms_ = std::move(out);
  }

  int nvars_ = 1;
  int degree_ = 0;
  std::vector<Term> terms_;
};

/// Sum_i x_i * dP/dx_i == deg(P) * P.
template <RingScalar K>
bool euler_identity_check(const Poly<K>& p) {
  if (p.is_zero()) return true;
  Poly<K> lhs(p.nvars(), p.degree());
  for (int i = 0; i < p.nvars(); ++i) {
    auto d = p.partial(i);
    if (d.is_zero()) continue;
    // x_i * d: shift exponents directly instead of building x_i.
    std::vector<typename Poly<K>::Term> t;
    for (const auto& [m, c] : d.terms()) t.emplace_back(m + ExpVec::unit(i), c);
    lhs += Poly<K>(p.nvars(), p.degree(), std::move(t));
  }
  return lhs == p * static_cast<long long>(p.degree());
}

/// Coordinates of S_e against monomial_basis(n, e): Poly <-> dense vector.
class MonomialBasis {
 public:
  MonomialBasis(int n, int e) : n_(n), e_(e), mons_(monomial_basis(n, e)) {}

  int n() const { return n_; }
  int degree() const { return e_; }
  std::size_t size() const { return mons_.size(); }
  const std::vector<ExpVec>& monomials() const { return mons_; }
  std::size_t index_of(ExpVec m) const { return grlex_rank(m, n_ + 1); }

  template <RingScalar K>
  std::vector<K> to_coefficients(const Poly<K>& p) const {
    std::vector<K> v(mons_.size());
    if (p.is_zero()) return v;
    if (p.nvars() != n_ + 1 || p.degree() != e_) throw UsageError("polynomial does not live in this basis");
    for (const auto& [m, c] : p.terms()) v[index_of(m)] = c;
    return v;
  }

  template <RingScalar K>
  Poly<K> from_coefficients(std::span<const K> v) const {
    if (v.size() != mons_.size()) throw UsageError("coefficient vector has wrong length");
    std::vector<typename Poly<K>::Term> t;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].is_zero()) t.emplace_back(mons_[i], v[i]);
    return Poly<K>(n_ + 1, e_, std::move(t));
  }

 private:
  int n_;
  int e_;
  std::vector<ExpVec> mons_;
};

}  // namespace folia
