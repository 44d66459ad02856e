#pragma once

// Reference implementations for tests. Deliberately naive and independent of
// the library: plain maps keyed by exponent vectors, dense mpq matrices, and
// signs computed by counting inversions.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "folia/forms.hpp"
#include "folia/poly.hpp"
#include "folia/scalar.hpp"

namespace oracle {

using Q = mpq_class;
using Mono = std::vector<int>;
using P = std::map<Mono, Q>;

inline void clean(P& p) {
  for (auto it = p.begin(); it != p.end();) it = (it->second == 0) ? p.erase(it) : std::next(it);
}

inline P add(const P& a, const P& b) {
  P r = a;
  for (const auto& [m, c] : b) r[m] += c;
  clean(r);
  return r;
}

inline P scale(const Q& c, const P& a) {
  P r;
  for (const auto& [m, v] : a) r[m] = c * v;
  clean(r);
  return r;
}

inline P mul(const P& a, const P& b) {
  P r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Mono m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      r[m] += ca * cb;
    }
  clean(r);
  return r;
}

inline P partial(const P& a, int var) {
  P r;
  for (const auto& [m, c] : a) {
    if (m[static_cast<std::size_t>(var)] == 0) continue;
    Mono d = m;
    --d[static_cast<std::size_t>(var)];
    r[d] += c * m[static_cast<std::size_t>(var)];
  }
  clean(r);
  return r;
}

/// Sign of the permutation sorting v (0 if v has a repeat); v is sorted in place.
inline int sort_sign(std::vector<int>& v) {
  int inv = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) ++inv;
    }
  std::sort(v.begin(), v.end());
  return inv % 2 ? -1 : 1;
}

/// A form as a map (sorted index list) -> coefficient polynomial.
using F = std::map<std::vector<int>, P>;

inline void clean(F& f) {
  for (auto it = f.begin(); it != f.end();) {
    clean(it->second);
    it = it->second.empty() ? f.erase(it) : std::next(it);
  }
}

inline F add(const F& a, const F& b) {
  F r = a;
  for (const auto& [s, p] : b) r[s] = add(r[s], p);
  clean(r);
  return r;
}

inline F wedge(const F& a, const F& b) {
  F r;
  for (const auto& [sa, pa] : a)
    for (const auto& [sb, pb] : b) {
      std::vector<int> idx = sa;
      idx.insert(idx.end(), sb.begin(), sb.end());
      const int sg = sort_sign(idx);
      if (sg == 0) continue;
      r[idx] = add(r[idx], scale(Q(sg), mul(pa, pb)));
    }
  clean(r);
  return r;
}

inline F ext_d(const F& a, int nvars) {
  F r;
  for (const auto& [s, p] : a)
    for (int i = 0; i < nvars; ++i) {
      std::vector<int> idx{i};
      idx.insert(idx.end(), s.begin(), s.end());
      const int sg = sort_sign(idx);
      if (sg == 0) continue;
      r[idx] = add(r[idx], scale(Q(sg), partial(p, i)));
    }
  clean(r);
  return r;
}

/// Contraction with the constant field e_var.
inline F contract(int var, const F& a) {
  F r;
  for (const auto& [s, p] : a)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] != var) continue;
      std::vector<int> idx = s;
      idx.erase(idx.begin() + static_cast<long>(j));
      r[idx] = add(r[idx], scale(Q(j % 2 ? -1 : 1), p));
    }
  clean(r);
  return r;
}

inline F radial(const F& a) {
  F r;
  for (const auto& [s, p] : a)
    for (std::size_t j = 0; j < s.size(); ++j) {
      std::vector<int> idx = s;
      idx.erase(idx.begin() + static_cast<long>(j));
      P shifted;
      for (const auto& [m, c] : p) {
        Mono mm = m;
        ++mm[static_cast<std::size_t>(s[j])];
        shifted[mm] = c;
      }
      r[idx] = add(r[idx], scale(Q(j % 2 ? -1 : 1), shifted));
    }
  clean(r);
  return r;
}

// ---------------------------------------------------------------------------
// Conversions from library values (over Q).

inline P from_lib(const folia::Poly<folia::Rational>& p) {
  P r;
  for (const auto& [m, c] : p.terms()) r[m.exponents(p.nvars())] = c.get();
  return r;
}

inline F from_lib(const folia::PolyForm<folia::Rational>& a) {
  F r;
  for (const auto& [s, p] : a.components()) r[s.elements()] = from_lib(p);
  return r;
}

inline folia::Poly<folia::Rational> to_lib(const P& p, int nvars, int degree) {
  std::vector<folia::Poly<folia::Rational>::Term> t;
  for (const auto& [m, c] : p) {
    folia::ExpVec e;
    for (int i = 0; i < nvars; ++i)
      for (int k = 0; k < m[static_cast<std::size_t>(i)]; ++k) e = e + folia::ExpVec::unit(i);
    t.emplace_back(e, folia::Rational(c));
  }
  return folia::Poly<folia::Rational>(nvars, degree, std::move(t));
}

// ---------------------------------------------------------------------------
// Random inputs.

inline P random_poly(std::mt19937_64& rng, int nvars, int degree, int terms, int range = 5) {
  P r;
  for (int t = 0; t < terms; ++t) {
    Mono m(static_cast<std::size_t>(nvars), 0);
    for (int k = 0; k < degree; ++k) ++m[rng() % static_cast<std::uint64_t>(nvars)];
    r[m] += Q(static_cast<long>(rng() % static_cast<std::uint64_t>(2 * range + 1)) - range);
  }
  clean(r);
  return r;
}

inline F random_form(std::mt19937_64& rng, int nvars, int grade, int coef_degree, int comps, int terms) {
  F r;
  for (int c = 0; c < comps; ++c) {
    std::vector<int> all(static_cast<std::size_t>(nvars));
    for (int i = 0; i < nvars; ++i) all[static_cast<std::size_t>(i)] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> idx(all.begin(), all.begin() + grade);
    std::sort(idx.begin(), idx.end());
    r[idx] = add(r[idx], random_poly(rng, nvars, coef_degree, terms));
  }
  clean(r);
  return r;
}

inline folia::PolyForm<folia::Rational> to_lib(const F& f, int nvars, int grade, int total_degree) {
  folia::PolyForm<folia::Rational> a(nvars, grade, total_degree);
  for (const auto& [s, p] : f) a.add_to(folia::IndexSet::from_elements(s), to_lib(p, nvars, total_degree - grade));
  return a;
}

// ---------------------------------------------------------------------------
// Dense linear algebra.

using Matrix = std::vector<std::vector<Q>>;

inline std::size_t rank(Matrix a) {
  std::size_t r = 0;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Q f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

inline std::size_t rank_mod(std::vector<std::vector<std::int64_t>> a, std::int64_t p) {
  auto pw = [p](std::int64_t b, std::int64_t e) {
    std::int64_t r = 1;
    b %= p;
    while (e) {
      if (e & 1) r = static_cast<std::int64_t>((__int128)r * b % p);
      b = static_cast<std::int64_t>((__int128)b * b % p);
      e >>= 1;
    }
    return r;
  };
  for (auto& row : a)
    for (auto& x : row) x = ((x % p) + p) % p;
  std::size_t r = 0;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    const std::int64_t inv = pw(a[r][c], p - 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::int64_t f = static_cast<std::int64_t>((__int128)a[i][c] * inv % p);
      for (std::size_t j = c; j < cols; ++j)
        a[i][j] = static_cast<std::int64_t>(((__int128)a[i][j] - (__int128)f * a[r][j] % p + p) % p);
    }
    ++r;
  }
  return r;
}

}  // namespace oracle
