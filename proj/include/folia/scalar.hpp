#pragma once

// Exact coefficient fields: prime fields F_p with a runtime modulus, the
// rationals backed by GMP, and dual numbers K[eps]/(eps^2) over either.

#include <cstdint>
#include <cstdlib>
#include <gmpxx.h>
#include <ostream>
#include <string>
#include <string_view>

#include "folia/errors.hpp"

namespace folia {

inline constexpr std::uint32_t kDefaultPrime = 32003;

inline bool is_odd_prime(std::uint64_t p) {
  if (p < 3 || p % 2 == 0) return false;
  for (std::uint64_t f = 3; f * f <= p; f += 2)
    if (p % f == 0) return false;
  return true;
}

/// Which coefficient field a computation runs over: Q (prime == 0) or F_p.
struct FieldSpec {
  std::uint32_t prime = 0;

  static FieldSpec rationals() { return {}; }
  static FieldSpec prime_field(std::uint64_t p) {
    if (!is_odd_prime(p) || p >= (1ULL << 31))
      throw UsageError("modulus " + std::to_string(p) + " is not an odd prime below 2^31");
    return FieldSpec{static_cast<std::uint32_t>(p)};
  }
  /// Accepts "Q", "QQ" or a decimal prime.
  static FieldSpec parse(std::string_view s) {
    if (s == "Q" || s == "QQ" || s == "q") return rationals();
    std::uint64_t p = 0;
    if (s.empty()) throw ParseError("empty field name");
    for (char c : s) {
      if (c < '0' || c > '9') throw ParseError("bad field name '" + std::string(s) + "'");
      p = p * 10 + static_cast<std::uint64_t>(c - '0');
      if (p > (1ULL << 32)) throw ParseError("prime too large");
    }
    return prime_field(p);
  }

  bool is_rational() const { return prime == 0; }
  std::string name() const { return is_rational() ? "Q" : "F_" + std::to_string(prime); }
  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// ---------------------------------------------------------------------------
// F_p

/// Element of F_p. The modulus travels with the value; a default-constructed
/// element is the zero of whatever field it is later combined with.
class Fp {
 public:
  Fp() = default;
  Fp(long long v, std::uint32_t p) : p_(p) {
    if (p == 0) throw UsageError("Fp needs a modulus");
    long long r = v % static_cast<long long>(p);
    if (r < 0) r += p;
    v_ = static_cast<std::uint32_t>(r);
  }

  static Fp from_raw(std::uint32_t v, std::uint32_t p) {
    Fp x;
    x.v_ = v;
    x.p_ = p;
    return x;
  }
  static Fp from_int(long long v, const FieldSpec& f) {
    if (f.is_rational()) throw UsageError("Fp::from_int called with field Q");
    return Fp(v, f.prime);
  }
  /// Parses a decimal integer or "a/b", reducing into F_p.
  static Fp from_string(std::string_view s, const FieldSpec& f) {
    if (f.is_rational()) throw UsageError("Fp::from_string called with field Q");
    mpq_class q;
    if (q.set_str(std::string(s), 10) != 0) throw ParseError("bad coefficient '" + std::string(s) + "'");
    q.canonicalize();
    return from_rational(q, f.prime);
  }
  static Fp from_rational(const mpq_class& q, std::uint32_t p) {
    mpz_class num = q.get_num() % p;
    mpz_class den = q.get_den() % p;
    if (den == 0) throw UsageError("denominator divisible by " + std::to_string(p));
    Fp a(num.get_si(), p), b(den.get_si(), p);
    return a / b;
  }

  std::uint32_t value() const { return v_; }
  std::uint32_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }
  std::string to_string() const { return std::to_string(v_); }

  Fp inverse() const {
    if (v_ == 0) throw UsageError("division by zero in F_p");
    // Extended Euclid on (v, p).
    long long t = 0, nt = 1, r = p_, nr = v_;
    while (nr != 0) {
      long long q = r / nr;
      t -= q * nt;
      std::swap(t, nt);
      r -= q * nr;
      std::swap(r, nr);
    }
    if (t < 0) t += p_;
    return from_raw(static_cast<std::uint32_t>(t), p_);
  }

  Fp operator-() const { return from_raw(v_ == 0 ? 0 : p_ - v_, p_); }
  Fp& operator+=(const Fp& o) {
    p_ = join(p_, o.p_);
    std::uint64_t s = std::uint64_t(v_) + o.v_;
    if (s >= p_ && p_ != 0) s -= p_;
    v_ = static_cast<std::uint32_t>(s);
    return *this;
  }
  Fp& operator-=(const Fp& o) { return *this += -o; }
  Fp& operator*=(const Fp& o) {
    p_ = join(p_, o.p_);
    v_ = p_ == 0 ? 0 : static_cast<std::uint32_t>(std::uint64_t(v_) * o.v_ % p_);
    return *this;
  }
  Fp& operator/=(const Fp& o) { return *this *= o.inverse(); }
  Fp& operator*=(long long k) {
    if (p_ == 0) return *this;
    long long r = k % static_cast<long long>(p_);
    if (r < 0) r += p_;
    v_ = static_cast<std::uint32_t>(std::uint64_t(v_) * std::uint64_t(r) % p_);
    return *this;
  }

  friend Fp operator+(Fp a, const Fp& b) { return a += b; }
  friend Fp operator-(Fp a, const Fp& b) { return a -= b; }
  friend Fp operator*(Fp a, const Fp& b) { return a *= b; }
  friend Fp operator/(Fp a, const Fp& b) { return a /= b; }
  friend Fp operator*(Fp a, long long k) { return a *= k; }
  friend Fp operator*(long long k, Fp a) { return a *= k; }
  friend bool operator==(const Fp& a, const Fp& b) {
    join(a.p_, b.p_);
    return a.v_ == b.v_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Fp& x) { return os << x.v_; }

 private:
  static std::uint32_t join(std::uint32_t a, std::uint32_t b) {
    if (a == b || b == 0) return a;
    if (a == 0) return b;
    throw UsageError("arithmetic mixes F_" + std::to_string(a) + " and F_" + std::to_string(b));
  }

  std::uint32_t v_ = 0;
  std::uint32_t p_ = 0;
};

// ---------------------------------------------------------------------------
// Q

class Rational {
 public:
  Rational() = default;
  Rational(long long v) : q_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
  Rational(long long num, long long den) : q_(static_cast<long>(num), static_cast<unsigned long>(std::llabs(den))) {
    if (den == 0) throw UsageError("zero denominator");
    if (den < 0) q_ = -q_;
    q_.canonicalize();
  }

  static Rational from_int(long long v, const FieldSpec&) { return Rational(v); }
  static Rational from_string(std::string_view s, const FieldSpec& = {}) {
    mpq_class q;
    std::string str(s);
    if (!str.empty() && str[0] == '+') str.erase(0, 1);
    if (q.set_str(str, 10) != 0) throw ParseError("bad coefficient '" + std::string(s) + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    q.canonicalize();
    return Rational(q);
  }

  const mpq_class& get() const { return q_; }
  bool is_zero() const { return sgn(q_) == 0; }
  std::string to_string() const { return q_.get_str(); }
  Rational inverse() const {
    if (is_zero()) throw UsageError("division by zero in Q");
    return Rational(mpq_class(1) / q_);
  }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw UsageError("division by zero in Q");
    q_ /= o.q_;
    return *this;
  }
  Rational& operator*=(long long k) { q_ *= mpq_class(static_cast<long>(k)); return *this; }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator*(Rational a, long long k) { return a *= k; }
  friend Rational operator*(long long k, Rational a) { return a *= k; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.q_.get_str(); }

 private:
  mpq_class q_;
};

// ---------------------------------------------------------------------------
// K[eps]/(eps^2)

/// Dual number a + b*eps with eps^2 = 0. A ring, not a field; only the
/// polynomial and form layers are instantiated with it.
template <class K>
struct Dual {
  K re{};
  K eps{};

  Dual() = default;
  Dual(K a, K b) : re(std::move(a)), eps(std::move(b)) {}

  static Dual from_int(long long v, const FieldSpec& f) { return Dual(K::from_int(v, f), K{}); }
  static Dual from_string(std::string_view s, const FieldSpec& f) { return Dual(K::from_string(s, f), K{}); }

  bool is_zero() const { return re.is_zero() && eps.is_zero(); }
  std::string to_string() const { return re.to_string() + "+" + eps.to_string() + "e"; }

  Dual operator-() const { return Dual(-re, -eps); }
  Dual& operator+=(const Dual& o) { re += o.re; eps += o.eps; return *this; }
  Dual& operator-=(const Dual& o) { re -= o.re; eps -= o.eps; return *this; }
  Dual& operator*=(const Dual& o) {
    eps = re * o.eps + eps * o.re;
    re *= o.re;
    return *this;
  }
  Dual& operator*=(long long k) { re *= k; eps *= k; return *this; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator*(Dual a, long long k) { return a *= k; }
  friend Dual operator*(long long k, Dual a) { return a *= k; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.re == b.re && a.eps == b.eps; }
};

/// Types usable as polynomial coefficients.
template <class K>
concept RingScalar = requires(K a, K b, long long k, FieldSpec f) {
  { a + b } -> std::convertible_to<K>;
  { a - b } -> std::convertible_to<K>;
  { a * b } -> std::convertible_to<K>;
  { a * k } -> std::convertible_to<K>;
  { -a } -> std::convertible_to<K>;
  { a.is_zero() } -> std::convertible_to<bool>;
  { a.to_string() } -> std::convertible_to<std::string>;
  { K::from_int(k, f) } -> std::convertible_to<K>;
};

/// Types usable in linear algebra.
template <class K>
concept FieldScalar = RingScalar<K> && requires(K a, K b) {
  { a / b } -> std::convertible_to<K>;
  { a.inverse() } -> std::convertible_to<K>;
};

/// Binomial coefficient C(n, k); zero outside 0 <= k <= n.
inline std::uint64_t binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (long long i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace folia
