#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "folia/errors.hpp"

namespace folia {

/// Sorted subset of {0, ..., 31}, stored as a bit mask. Ordered by size, then
/// lexicographically on the sorted elements.
class IndexSet {
 public:
  constexpr IndexSet() = default;
  IndexSet(std::initializer_list<int> elems) {
    for (int e : elems) {
      check(e);
      if (contains(e)) throw UsageError("repeated index in IndexSet");
      mask_ |= bit(e);
    }
  }
  static constexpr IndexSet from_mask(std::uint32_t m) {
    IndexSet s;
    s.mask_ = m;
    return s;
  }
  static IndexSet from_elements(const std::vector<int>& elems) {
    IndexSet s;
    for (int e : elems) {
      check(e);
      if (s.contains(e)) throw UsageError("repeated index in IndexSet");
      s.mask_ |= bit(e);
    }
    return s;
  }
  /// {0, ..., n-1}
  static IndexSet range(int n) { return from_mask(n >= 32 ? ~0u : (1u << n) - 1u); }

  constexpr std::uint32_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }
  bool contains(int i) const { return (mask_ >> i) & 1u; }
  int max_element() const { return empty() ? -1 : 31 - std::countl_zero(mask_); }
  /// Number of elements strictly below i.
  int count_below(int i) const { return std::popcount(mask_ & (bit(i) - 1u)); }

  IndexSet with(int i) const { return from_mask(mask_ | bit(i)); }
  IndexSet without(int i) const { return from_mask(mask_ & ~bit(i)); }
  bool disjoint(IndexSet o) const { return (mask_ & o.mask_) == 0; }
  bool subset_of(IndexSet o) const { return (mask_ & ~o.mask_) == 0; }
  friend IndexSet operator|(IndexSet a, IndexSet b) { return from_mask(a.mask_ | b.mask_); }
  friend IndexSet operator&(IndexSet a, IndexSet b) { return from_mask(a.mask_ & b.mask_); }

  std::vector<int> elements() const {
    std::vector<int> v;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) v.push_back(std::countr_zero(m));
    return v;
  }

  friend constexpr bool operator==(IndexSet, IndexSet) = default;
  friend std::strong_ordering operator<=>(IndexSet a, IndexSet b) {
    const int sa = std::popcount(a.mask_), sb = std::popcount(b.mask_);
    if (sa != sb) return sa <=> sb;
    if (a.mask_ == b.mask_) return std::strong_ordering::equal;
    const std::uint32_t x = a.mask_ ^ b.mask_;
    const std::uint32_t low = x & (~x + 1u);
    return (a.mask_ & low) ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  std::string to_string(int offset = 0) const {
    std::string s = "{";
    for (int e : elements()) s += (s.size() > 1 ? "," : "") + std::to_string(e + offset);
    return s + "}";
  }

 private:
  static constexpr std::uint32_t bit(int i) { return std::uint32_t{1} << i; }
  static void check(int e) {
    if (e < 0 || e >= 32) throw UsageError("index out of range for IndexSet");
  }
  std::uint32_t mask_ = 0;
};

/// Sign of e_A ^ e_B relative to e_{A u B} for disjoint A, B: (-1)^#{a in A, b in B : a > b}.
inline int shuffle_sign(IndexSet a, IndexSet b) {
  int inversions = 0;
  for (int e : b.elements()) inversions += a.size() - a.count_below(e);
  return (inversions % 2) ? -1 : 1;
}

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<IndexSet> subsets(int n, int k) {
  std::vector<IndexSet> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(IndexSet::from_elements(idx));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace folia
