#pragma once

// Sparse exact matrices over F_p or Q with rank and kernel computations.
//
// Elimination streams rows in Markowitz order (sparsest rows first, pivot
// column of least global column count, ties broken by index) and keeps the
// pivot block in reduced row echelon form. Because every stored pivot row is
// zero on all other pivot columns, an incoming row x reduces as
//     x - sum_k x[c_k] * P_k,
// using the *original* entries of x, so only pivots touching the support of x
// are visited. Over F_p the sum is accumulated in 64-bit words and reduced
// lazily.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "folia/errors.hpp"
#include "folia/scalar.hpp"

namespace folia {

template <FieldScalar K>
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    K value;
  };

  SparseMatrix() : row_start_(1, 0) {}
  SparseMatrix(std::size_t nrows, std::size_t ncols) : nrows_(nrows), ncols_(ncols), row_start_(nrows + 1, 0) {}

  /// Sums duplicate (row, col) entries and drops zeros.
  SparseMatrix(std::size_t nrows, std::size_t ncols, std::vector<Entry> entries) : nrows_(nrows), ncols_(ncols) {
    for (const auto& e : entries)
      if (e.row >= nrows || e.col >= ncols) throw UsageError("matrix entry out of range");
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    for (auto& e : entries) {
      if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
        entries_.back().value += e.value;
      } else {
        if (!entries_.empty() && entries_.back().value.is_zero()) entries_.pop_back();
        entries_.push_back(std::move(e));
      }
    }
    if (!entries_.empty() && entries_.back().value.is_zero()) entries_.pop_back();
    row_start_.assign(nrows_ + 1, 0);
    for (const auto& e : entries_) ++row_start_[e.row + 1];
    std::partial_sum(row_start_.begin(), row_start_.end(), row_start_.begin());
  }

  static SparseMatrix from_dense(const std::vector<std::vector<K>>& rows, std::size_t ncols) {
    std::vector<Entry> es;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != ncols) throw UsageError("ragged dense matrix");
      for (std::size_t c = 0; c < ncols; ++c)
        if (!rows[r][c].is_zero()) es.push_back({r, c, rows[r][c]});
    }
    return SparseMatrix(rows.size(), ncols, std::move(es));
  }

  /// Builds the matrix whose c-th column is cols[c].
  static SparseMatrix from_columns(std::size_t nrows, const std::vector<std::vector<K>>& cols) {
    std::vector<Entry> es;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].size() != nrows) throw UsageError("column length mismatch");
      for (std::size_t r = 0; r < nrows; ++r)
        if (!cols[c][r].is_zero()) es.push_back({r, c, cols[c][r]});
    }
    return SparseMatrix(nrows, cols.size(), std::move(es));
  }

  static SparseMatrix identity(std::size_t n, const FieldSpec& f) {
    std::vector<Entry> es;
    for (std::size_t i = 0; i < n; ++i) es.push_back({i, i, K::from_int(1, f)});
    return SparseMatrix(n, n, std::move(es));
  }

  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const Entry> row(std::size_t r) const {
    return std::span<const Entry>(entries_).subspan(row_start_[r], row_start_[r + 1] - row_start_[r]);
  }

  std::vector<K> apply(std::span<const K> x) const {
    if (x.size() != ncols_) throw UsageError("matrix-vector size mismatch");
    std::vector<K> y(nrows_);
    for (const auto& e : entries_) y[e.row] += e.value * x[e.col];
    return y;
  }

  SparseMatrix transpose() const {
    std::vector<Entry> es;
    es.reserve(entries_.size());
    for (const auto& e : entries_) es.push_back({e.col, e.row, e.value});
    return SparseMatrix(ncols_, nrows_, std::move(es));
  }

  /// [this | other], same row count.
  SparseMatrix hstack(const SparseMatrix& other) const {
    if (other.nrows_ != nrows_) throw UsageError("hstack row mismatch");
    std::vector<Entry> es(entries_.begin(), entries_.end());
    for (const auto& e : other.entries_) es.push_back({e.row, e.col + ncols_, e.value});
    return SparseMatrix(nrows_, ncols_ + other.ncols_, std::move(es));
  }

  /// [this ; other], same column count.
  SparseMatrix vstack(const SparseMatrix& other) const {
    if (other.ncols_ != ncols_) throw UsageError("vstack column mismatch");
    std::vector<Entry> es(entries_.begin(), entries_.end());
    for (const auto& e : other.entries_) es.push_back({e.row + nrows_, e.col, e.value});
    return SparseMatrix(nrows_ + other.nrows_, ncols_, std::move(es));
  }

  std::vector<std::pair<std::size_t, K>> column_entries(std::size_t c) const {
    std::vector<std::pair<std::size_t, K>> out;
    for (const auto& e : entries_)
      if (e.col == c) out.emplace_back(e.row, e.value);
    return out;
  }

  std::vector<K> column(std::size_t c) const {
    std::vector<K> v(nrows_);
    for (const auto& e : entries_)
      if (e.col == c) v[e.row] = e.value;
    return v;
  }

 private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_start_;
};

/// Reduced row echelon form of the row space. rows[i][pivot_cols[i]] == 1 and
/// rows[i] vanishes on every other pivot column.
template <class K>
struct Echelon {
  std::size_t ncols = 0;
  std::vector<std::size_t> pivot_cols;
  std::vector<std::vector<K>> rows;

  std::size_t rank() const { return pivot_cols.size(); }
};

namespace detail {

template <class K>
std::vector<std::size_t> markowitz_row_order(const SparseMatrix<K>& m) {
  std::vector<std::size_t> order(m.nrows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m.row(a).size() < m.row(b).size(); });
  return order;
}

template <class K>
std::vector<std::size_t> column_counts(const SparseMatrix<K>& m) {
  std::vector<std::size_t> counts(m.ncols(), 0);
  for (const auto& e : m.entries()) ++counts[e.col];
  return counts;
}

inline std::uint32_t common_modulus(const SparseMatrix<Fp>& m) {
  std::uint32_t p = 0;
  for (const auto& e : m.entries()) {
    if (p == 0) p = e.value.modulus();
    else if (e.value.modulus() != p)
      throw UsageError("matrix mixes F_" + std::to_string(p) + " and F_" + std::to_string(e.value.modulus()));
  }
  return p;
}

inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) { return Fp::from_raw(a, p).inverse().value(); }

/// F_p elimination on raw words.
inline Echelon<std::uint32_t> reduce_fp(const SparseMatrix<Fp>& m, std::uint32_t p) {
  Echelon<std::uint32_t> ech;
  ech.ncols = m.ncols();
  const std::size_t n = m.ncols();
  if (p == 0) return ech;  // zero matrix
  const std::uint64_t sq = std::uint64_t(p - 1) * (p - 1);
  const std::uint64_t max_terms = sq == 0 ? std::numeric_limits<std::uint64_t>::max()
                                          : (std::numeric_limits<std::uint64_t>::max() - p) / sq;
  const auto counts = column_counts(m);
  std::vector<long> pivot_of_col(n, -1);
  std::vector<std::uint64_t> acc(n);
  std::vector<std::uint32_t> red(n);

  for (std::size_t r : markowitz_row_order(m)) {
    auto row = m.row(r);
    if (row.empty()) continue;
    std::fill(acc.begin(), acc.end(), 0);
    for (const auto& e : row) acc[e.col] += e.value.value();
    std::uint64_t terms = 0;
    for (const auto& e : row) {
      long k = pivot_of_col[e.col];
      if (k < 0) continue;
      const std::uint64_t coef = p - e.value.value();
      const std::uint32_t* prow = ech.rows[static_cast<std::size_t>(k)].data();
      for (std::size_t j = 0; j < n; ++j) acc[j] += coef * prow[j];
      if (++terms >= max_terms) {
        for (auto& a : acc) a %= p;
        terms = 0;
      }
    }
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      red[j] = static_cast<std::uint32_t>(acc[j] % p);
      if (red[j] != 0 && (best == n || counts[j] < counts[best])) best = j;
    }
    if (best == n) continue;
    const std::uint64_t inv = inv_mod(red[best], p);
    for (auto& v : red) v = static_cast<std::uint32_t>(v * inv % p);
    // Keep the pivot block reduced: clear column `best` from older pivots.
    for (auto& prow : ech.rows) {
      const std::uint32_t f = prow[best];
      if (f == 0) continue;
      const std::uint64_t coef = p - f;
      for (std::size_t j = 0; j < n; ++j) prow[j] = static_cast<std::uint32_t>((prow[j] + coef * red[j]) % p);
    }
    pivot_of_col[best] = static_cast<long>(ech.rows.size());
    ech.pivot_cols.push_back(best);
    ech.rows.push_back(red);
  }
  return ech;
}

/// Same algorithm with generic field arithmetic. Pivots are only taken in
/// columns below `pivot_limit`; rows with nothing left there are dropped.
template <FieldScalar K>
Echelon<K> reduce_generic(const SparseMatrix<K>& m, std::size_t pivot_limit = static_cast<std::size_t>(-1)) {
  Echelon<K> ech;
  ech.ncols = m.ncols();
  const std::size_t n = m.ncols();
  const std::size_t limit = std::min(n, pivot_limit);
  const auto counts = column_counts(m);
  std::vector<long> pivot_of_col(n, -1);

  for (std::size_t r : markowitz_row_order(m)) {
    auto row = m.row(r);
    if (row.empty()) continue;
    std::vector<K> acc(n);
    for (const auto& e : row) acc[e.col] = e.value;
    for (const auto& e : row) {
      long k = pivot_of_col[e.col];
      if (k < 0) continue;
      const auto& prow = ech.rows[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < n; ++j)
        if (!prow[j].is_zero()) acc[j] -= e.value * prow[j];
    }
    std::size_t best = limit;
    for (std::size_t j = 0; j < limit; ++j)
      if (!acc[j].is_zero() && (best == limit || counts[j] < counts[best])) best = j;
    if (best == limit) continue;
    const K inv = acc[best].inverse();
    for (auto& v : acc)
      if (!v.is_zero()) v *= inv;
    for (auto& prow : ech.rows) {
      if (prow[best].is_zero()) continue;
      const K f = prow[best];
      for (std::size_t j = 0; j < n; ++j)
        if (!acc[j].is_zero()) prow[j] -= f * acc[j];
    }
    pivot_of_col[best] = static_cast<long>(ech.rows.size());
    ech.pivot_cols.push_back(best);
    ech.rows.push_back(std::move(acc));
  }
  return ech;
}

/// Fraction-free (Bareiss) rank over Z after clearing row denominators.
inline std::size_t rank_fraction_free(const SparseMatrix<Rational>& m) {
  const std::size_t n = m.ncols();
  std::vector<std::vector<mpz_class>> a;
  for (std::size_t r = 0; r < m.nrows(); ++r) {
    auto row = m.row(r);
    if (row.empty()) continue;
    mpz_class l = 1;
    for (const auto& e : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.value.get().get_den_mpz_t());
    std::vector<mpz_class> dense(n, 0);
    for (const auto& e : row) dense[e.col] = e.value.get().get_num() * (l / e.value.get().get_den());
    a.push_back(std::move(dense));
  }
  std::size_t k = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < n && k < a.size(); ++col) {
    std::size_t piv = a.size();
    std::size_t piv_nnz = 0;
    for (std::size_t i = k; i < a.size(); ++i) {
      if (a[i][col] == 0) continue;
      std::size_t nnz = 0;
      for (std::size_t j = col; j < n; ++j) nnz += a[i][j] != 0;
      if (piv == a.size() || nnz < piv_nnz) piv = i, piv_nnz = nnz;
    }
    if (piv == a.size()) continue;
    std::swap(a[k], a[piv]);
    const mpz_class pk = a[k][col];
    for (std::size_t i = k + 1; i < a.size(); ++i) {
      const mpz_class ic = a[i][col];
      for (std::size_t j = col + 1; j < n; ++j) {
        a[i][j] = pk * a[i][j] - ic * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][col] = 0;
    }
    prev = pk;
    ++k;
  }
  return k;
}

}  // namespace detail

/// Reduced row echelon form of M's row space.
template <FieldScalar K>
Echelon<K> row_reduce(const SparseMatrix<K>& m) {
  if constexpr (std::is_same_v<K, Fp>) {
    const std::uint32_t p = detail::common_modulus(m);
    auto raw = detail::reduce_fp(m, p);
    Echelon<Fp> ech;
    ech.ncols = raw.ncols;
    ech.pivot_cols = std::move(raw.pivot_cols);
    for (const auto& r : raw.rows) {
      std::vector<Fp> row(r.size());
      for (std::size_t j = 0; j < r.size(); ++j) row[j] = Fp::from_raw(r[j], p);
      ech.rows.push_back(std::move(row));
    }
    return ech;
  } else {
    return detail::reduce_generic(m);
  }
}

/// Exact rank. Over Q this runs fraction-free elimination on integers.
template <FieldScalar K>
std::size_t rank(const SparseMatrix<K>& m) {
  if constexpr (std::is_same_v<K, Fp>) {
    return detail::reduce_fp(m, detail::common_modulus(m)).rank();
  } else if constexpr (std::is_same_v<K, Rational>) {
    return detail::rank_fraction_free(m);
  } else {
    return detail::reduce_generic(m).rank();
  }
}

/// Kernel basis read off an echelon form: one vector per free column f, with
/// a 1 at f, zeros at the other free columns.
template <FieldScalar K>
std::vector<std::vector<K>> kernel_from_echelon(const Echelon<K>& ech, const FieldSpec& f) {
  std::vector<bool> is_pivot(ech.ncols, false);
  for (auto c : ech.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<K>> basis;
  const K one = K::from_int(1, f);
  for (std::size_t free = 0; free < ech.ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<K> v(ech.ncols);
    v[free] = one;
    for (std::size_t k = 0; k < ech.rank(); ++k) v[ech.pivot_cols[k]] = -ech.rows[k][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <FieldScalar K>
std::vector<std::vector<K>> kernel_basis(const SparseMatrix<K>& m, const FieldSpec& f) {
  return kernel_from_echelon(row_reduce(m), f);
}

/// rank([A | B]) == rank(A): every column of B lies in the column space of A.
template <FieldScalar K>
bool column_space_contains(const SparseMatrix<K>& a, const SparseMatrix<K>& b) {
  if (b.ncols() == 0) return true;
  return rank(a.hstack(b)) == rank(a);
}

/// Solves A x = b for each column b of B. Returns nullopt for a column outside
/// the column space of A. Free variables are set to zero.
template <FieldScalar K>
std::vector<std::optional<std::vector<K>>> solve_columns(const SparseMatrix<K>& a, const SparseMatrix<K>& b) {
  if (a.nrows() != b.nrows()) throw UsageError("solve_columns: row count mismatch");
  const std::size_t r = a.ncols();
  const auto ech = detail::reduce_generic(a.hstack(b), r);
  std::vector<std::optional<std::vector<K>>> out;
  for (std::size_t t = 0; t < b.ncols(); ++t) {
    std::vector<K> x(r);
    for (std::size_t k = 0; k < ech.rank(); ++k) x[ech.pivot_cols[k]] = ech.rows[k][r + t];
    const auto lhs = a.apply(x);
    const auto rhs = b.column(t);
    bool ok = true;
    for (std::size_t i = 0; i < lhs.size() && ok; ++i) ok = lhs[i] == rhs[i];
    if (ok) out.emplace_back(std::move(x));
    else out.emplace_back(std::nullopt);
  }
  return out;
}

/// Reduces an integer/rational matrix modulo p.
inline SparseMatrix<Fp> reduce_mod(const SparseMatrix<Rational>& m, std::uint32_t p) {
  std::vector<SparseMatrix<Fp>::Entry> es;
  for (const auto& e : m.entries()) es.push_back({e.row, e.col, Fp::from_rational(e.value.get(), p)});
  return SparseMatrix<Fp>(m.nrows(), m.ncols(), std::move(es));
}

/// Ranks of one rational matrix over Q (optionally) and several primes.
struct RankAgreement {
  std::optional<std::size_t> rational_rank;
  std::vector<std::pair<std::uint32_t, std::size_t>> prime_ranks;
  bool agree = true;
};

inline RankAgreement rank_agreement(const SparseMatrix<Rational>& m, std::span<const std::uint32_t> primes,
                                    bool include_rational) {
  RankAgreement out;
  std::optional<std::size_t> first;
  auto note = [&](std::size_t r) {
    if (!first) first = r;
    else if (*first != r) out.agree = false;
  };
  if (include_rational) {
    out.rational_rank = rank(m);
    note(*out.rational_rank);
  }
  for (auto p : primes) {
    std::size_t r = rank(reduce_mod(m, p));
    out.prime_ranks.emplace_back(p, r);
    note(r);
  }
  return out;
}

}  // namespace folia
