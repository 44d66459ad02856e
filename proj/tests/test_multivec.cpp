#include <catch_amalgamated.hpp>

#include <random>

#include "folia/multivec.hpp"
#include "oracles.hpp"

using namespace folia;
using MV = MultiVector<Rational>;

namespace {

const FieldSpec kQ = FieldSpec::rationals();

MV e(int m, std::initializer_list<int> one_based, long long c = 1) {
  std::vector<int> idx;
  for (int i : one_based) idx.push_back(i - 1);
  return MV::basis(m, IndexSet::from_elements(idx), Rational(c));
}

MV random_mv(std::mt19937_64& rng, int m, int grade) {
  MV v(m, grade);
  for (auto s : subsets(m, grade)) v.set(s, Rational(static_cast<long long>(rng() % 7) - 3));
  return v;
}

MV random_vec(std::mt19937_64& rng, int m) { return random_mv(rng, m, 1); }

/// sum of c_k mu_k with random c over cmd_basis(d)
MV random_cmd(std::mt19937_64& rng, const DegreeVector& d) {
  MV v(d.m(), 1);
  for (const auto& mu : cmd_basis<Rational>(d, kQ)) v = v + Rational(static_cast<long long>(rng() % 9) - 4) * mu;
  return v;
}

std::size_t span_rank(const std::vector<MV>& vs) {
  oracle::Matrix rows;
  for (const auto& v : vs) {
    std::vector<oracle::Q> r;
    for (const auto& c : v.coordinates()) r.push_back(c.get());
    rows.push_back(r);
  }
  return oracle::rank(rows);
}

}  // namespace

TEST_CASE("index sets order by size, then lexicographically", "[multivec]") {
  CHECK(IndexSet{2} < IndexSet{0, 1});
  CHECK(IndexSet{0, 2} < IndexSet{1, 2});
  CHECK(IndexSet{0, 3} < IndexSet{1, 2});
  CHECK(IndexSet{0, 1, 4} < IndexSet{0, 2, 3});
  CHECK_THROWS_AS((IndexSet{1, 1}), UsageError);
  const auto s = subsets(5, 2);
  CHECK(s.size() == 10);
  CHECK(std::is_sorted(s.begin(), s.end()));
}

TEST_CASE("shuffle signs agree with inversion counting", "[multivec]") {
  for (std::uint32_t a = 0; a < 64; ++a)
    for (std::uint32_t b = 0; b < 64; ++b) {
      if (a & b) continue;
      const auto sa = IndexSet::from_mask(a), sb = IndexSet::from_mask(b);
      std::vector<int> cat = sa.elements();
      for (int x : sb.elements()) cat.push_back(x);
      CHECK(shuffle_sign(sa, sb) == oracle::sort_sign(cat));
    }
}

TEST_CASE("wedge products of basis vectors", "[multivec]") {
  CHECK(wedge_mv(e(3, {1}), e(3, {2})) == e(3, {1, 2}));
  CHECK(wedge_mv(e(3, {2}), e(3, {1})) == e(3, {1, 2}, -1));
  CHECK(wedge_mv(e(3, {1, 2}), e(3, {1, 3})).is_zero());
  const MV l = e(4, {1, 2}) - e(4, {1, 3}) + e(4, {2, 3});
  const auto ll = wedge_mv(l, l);
  CHECK(ll.grade() == 4);
  CHECK(ll.is_zero());
  CHECK_THROWS_AS(wedge_mv(e(3, {1}), e(4, {1})), UsageError);
}

TEST_CASE("wedge is associative and graded-anticommutative", "[multivec][property]") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 40; ++t) {
    const int m = 3 + static_cast<int>(rng() % 4);
    const int p = static_cast<int>(rng() % 3), q = static_cast<int>(rng() % 3), r = static_cast<int>(rng() % 2);
    const auto a = random_mv(rng, m, p), b = random_mv(rng, m, q), c = random_mv(rng, m, r);
    CHECK(wedge_mv(wedge_mv(a, b), c) == wedge_mv(a, wedge_mv(b, c)));
    const auto ab = wedge_mv(a, b), ba = wedge_mv(b, a);
    CHECK(ab == ((p * q) % 2 ? -ba : ba));
  }
}

TEST_CASE("interior product by the degree vector", "[multivec]") {
  const DegreeVector ones{1, 1, 1};
  CHECK(interior_d(ones, e(3, {1, 2})) == e(3, {2}) - e(3, {1}));
  CHECK(interior_d(ones, e(3, {1, 2}) - e(3, {1, 3}) + e(3, {2, 3})).is_zero());
  const auto s = interior_d(DegreeVector{2, 3}, e(2, {1}));
  CHECK(s.grade() == 0);
  CHECK(s[IndexSet{}] == Rational(2));
  CHECK_THROWS_AS(interior_d(ones, MV::scalar(3, Rational(1))), UsageError);
}

TEST_CASE("interior product squares to zero", "[multivec][property]") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    const int m = 2 + static_cast<int>(rng() % 5);
    std::vector<int> parts;
    for (int i = 0; i < m; ++i) parts.push_back(1 + static_cast<int>(rng() % 4));
    const DegreeVector d(parts);
    const int q = 2 + static_cast<int>(rng() % (m - 1));
    CHECK(interior_d(d, interior_d(d, random_mv(rng, m, q))).is_zero());
  }
}

TEST_CASE("basis of the hyperplane orthogonal to d", "[multivec]") {
  const auto b11 = cmd_basis<Rational>(DegreeVector{1, 1}, kQ);
  REQUIRE(b11.size() == 1);
  CHECK(b11[0] == e(2, {1}) - e(2, {2}));
  CHECK(cmd_basis<Rational>(DegreeVector{1, 1, 1, 1, 1}, kQ).size() == 4);
  const DegreeVector d{1, 2, 3};
  const auto b = cmd_basis<Rational>(d, kQ);
  REQUIRE(b.size() == 2);
  for (const auto& mu : b) CHECK(interior_d(d, mu).is_zero());
  CHECK(span_rank(b) == 2);
  // Same span as {(2,-1,0), (3,0,-1)}.
  std::vector<MV> with = b;
  with.push_back(e(3, {1}, 2) - e(3, {2}));
  with.push_back(e(3, {1}, 3) - e(3, {3}));
  CHECK(span_rank(with) == 2);
}

TEST_CASE("Koszul complex of contraction by d is exact", "[multivec]") {
  const auto k3 = koszul_dims(DegreeVector{1, 1, 1}, 2);
  CHECK(k3.kernel_dim == 1);
  CHECK(k3.image_dim == 1);
  CHECK(k3.exact());
  const auto k5 = koszul_dims(DegreeVector{1, 1, 1, 1, 1}, 2);
  CHECK(k5.kernel_dim == binomial(4, 2));
  CHECK(k5.exact());
  CHECK_THROWS_AS(koszul_check(DegreeVector{1, 1}, 2), UsageError);
  std::mt19937_64 rng(3);
  for (int m = 2; m <= 6; ++m)
    for (int t = 0; t < 5; ++t) {
      std::vector<int> parts;
      for (int i = 0; i < m; ++i) parts.push_back(1 + static_cast<int>(rng() % 6));
      for (int q = 1; q <= m - 1; ++q) {
        const auto k = koszul_dims(DegreeVector(parts), q);
        CHECK(k.exact());
        CHECK(k.kernel_dim == binomial(m - 1, q));
      }
    }
}

TEST_CASE("decomposability of grade-2 tensors", "[multivec]") {
  CHECK(is_decomposable2(e(4, {1, 2})));
  const auto l = e(4, {1, 2}) + e(4, {3, 4});
  CHECK_FALSE(is_decomposable2(l));
  CHECK(wedge_mv(l, l) == e(4, {1, 2, 3, 4}, 2));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + static_cast<int>(rng() % 5);
    CHECK(is_decomposable2(wedge_mv(random_vec(rng, m), random_vec(rng, m))));
  }
}

TEST_CASE("descent of a wedge of independent vectors", "[multivec][property]") {
  // i_d(l1 ^ l2) = 0 exactly when both factors are orthogonal to d.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const int m = 3 + static_cast<int>(rng() % 4);
    std::vector<int> parts;
    for (int i = 0; i < m; ++i) parts.push_back(1 + static_cast<int>(rng() % 3));
    const DegreeVector d(parts);
    const auto a = random_cmd(rng, d), b = random_cmd(rng, d);
    if (wedge_mv(a, b).is_zero()) continue;
    CHECK(interior_d(d, wedge_mv(a, b)).is_zero());
    auto c = b;
    c.add_to(IndexSet{0}, Rational(1));  // leaves the hyperplane
    if (!wedge_mv(a, c).is_zero()) CHECK_FALSE(interior_d(d, wedge_mv(a, c)).is_zero());
  }
}

TEST_CASE("Grassmannian tangent directions", "[multivec]") {
  const DegreeVector d{1, 1, 1, 1, 1};
  std::mt19937_64 rng(6);
  const auto l1 = random_cmd(rng, d), l2 = random_cmd(rng, d);
  REQUIRE_FALSE(wedge_mv(l1, l2).is_zero());
  const auto lam = wedge_mv(l1, l2);
  const auto dirs = grass_tangent_dirs(l1, l2, d, kQ);
  CHECK(dirs.size() == 8);
  for (const auto& dir : dirs) {
    CHECK(wedge_mv(dir, lam).is_zero());
    CHECK(interior_d(d, dir).is_zero());
  }
  // The span is the cone over the tangent space of Gr(2, m-1): dimension
  // 2((m-1) - 2) + 1, and it contains lambda.
  CHECK(span_rank(dirs) == 2 * (5 - 1 - 2) + 1);
  auto with = dirs;
  with.push_back(lam);
  CHECK(span_rank(with) == span_rank(dirs));
  CHECK_THROWS_AS(grass_tangent_dirs(l1, l1, d, kQ), UsageError);
}

TEST_CASE("Grassmannian tangent span for several m", "[multivec][property]") {
  std::mt19937_64 rng(7);
  for (int m = 3; m <= 7; ++m) {
    std::vector<int> parts;
    for (int i = 0; i < m; ++i) parts.push_back(1 + static_cast<int>(rng() % 3));
    const DegreeVector d(parts);
    auto l1 = random_cmd(rng, d), l2 = random_cmd(rng, d);
    while (wedge_mv(l1, l2).is_zero()) l2 = random_cmd(rng, d);
    CHECK(span_rank(grass_tangent_dirs(l1, l2, d, kQ)) == static_cast<std::size_t>(2 * (m - 3) + 1));
  }
}
