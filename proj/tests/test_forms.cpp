#include <catch_amalgamated.hpp>

#include <random>

#include "folia/forms.hpp"
#include "oracles.hpp"

using namespace folia;
using RF = PolyForm<Rational>;
using RP = Poly<Rational>;

namespace {

const FieldSpec kQ = FieldSpec::rationals();

RP x(int nvars, int i) { return RP::variable(nvars, i, kQ); }
RF dx(int nvars, int i) { return RF::differential(x(nvars, i)); }

struct RandomForm {
  oracle::F ref;
  RF lib;
};

RandomForm random_form(std::mt19937_64& rng, int nvars, int grade, int coef_degree) {
  auto f = oracle::random_form(rng, nvars, grade, coef_degree, 3, 4);
  return {f, oracle::to_lib(f, nvars, grade, coef_degree + grade)};
}

}  // namespace

TEST_CASE("wedge of differentials", "[forms]") {
  const auto w = wedge_forms(dx(3, 0), dx(3, 1));
  CHECK(w.grade() == 2);
  CHECK(w.total_degree() == 2);
  CHECK(w[IndexSet{0, 1}] == RP::constant(3, Rational(1)));
  CHECK(wedge_forms(dx(3, 1), dx(3, 0)) == -w);
  CHECK(wedge_forms(dx(3, 0), dx(3, 0)).is_zero());
}

TEST_CASE("exterior derivative of simple forms", "[forms]") {
  const auto x0 = x(3, 0), x1 = x(3, 1);
  // d(x0 dx1) = dx0 ^ dx1
  CHECK(ext_d(x0 * dx(3, 1)) == wedge_forms(dx(3, 0), dx(3, 1)));
  // d(x0 dx1 - x1 dx0) = 2 dx0 ^ dx1
  CHECK(ext_d(x0 * dx(3, 1) - x1 * dx(3, 0)) == Rational(2) * wedge_forms(dx(3, 0), dx(3, 1)));
  CHECK(ext_d(ext_d(RF::monomial_form(IndexSet{}, x0 * x0 * x1))).is_zero());
}

TEST_CASE("radial contraction of the volume form", "[forms]") {
  const int nv = 3;
  const auto vol = wedge_forms(wedge_forms(dx(nv, 0), dx(nv, 1)), dx(nv, 2));
  const auto r = radial_contract(vol);
  const auto expected = x(nv, 0) * wedge_forms(dx(nv, 1), dx(nv, 2)) - x(nv, 1) * wedge_forms(dx(nv, 0), dx(nv, 2)) +
                        x(nv, 2) * wedge_forms(dx(nv, 0), dx(nv, 1));
  CHECK(r == expected);
  CHECK(radial_contract(r).is_zero());
  CHECK(radial_contract(x(nv, 0) * dx(nv, 1) - x(nv, 1) * dx(nv, 0)).is_zero());
  CHECK_THROWS_AS(radial_contract(RF::monomial_form(IndexSet{}, x(nv, 0))), UsageError);
}

TEST_CASE("contraction with constant and polynomial fields", "[forms]") {
  const int nv = 3;
  const auto w = wedge_forms(dx(nv, 0), dx(nv, 1));
  CHECK(contract_const(0, w) == dx(nv, 1));
  CHECK(contract_const(1, w) == -dx(nv, 0));
  CHECK(contract_const(2, w).is_zero());
  CHECK(contract_multi(IndexSet{0, 1}, w) == RF::monomial_form(IndexSet{}, RP::constant(nv, Rational(1))));
  CHECK(contract(PolyField<Rational>::radial(nv, kQ), w) == radial_contract(w));
}

TEST_CASE("operations agree with the reference implementation", "[forms][property]") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const int nv = 2 + static_cast<int>(rng() % 4);
    const int ga = 1 + static_cast<int>(rng() % 2), gb = static_cast<int>(rng() % 2);
    const int ca = static_cast<int>(rng() % 3), cb = static_cast<int>(rng() % 3);
    const auto a = random_form(rng, nv, std::min(ga, nv), ca);
    const auto b = random_form(rng, nv, gb, cb);
    CHECK(oracle::from_lib(wedge_forms(a.lib, b.lib)) == oracle::wedge(a.ref, b.ref));
    CHECK(oracle::from_lib(ext_d(a.lib)) == oracle::ext_d(a.ref, nv));
    CHECK(oracle::from_lib(radial_contract(a.lib)) == oracle::radial(a.ref));
    const int v = static_cast<int>(rng() % static_cast<std::uint64_t>(nv));
    CHECK(oracle::from_lib(contract_const(v, a.lib)) == oracle::contract(v, a.ref));
  }
}

TEST_CASE("calculus identities", "[forms][property]") {
  std::mt19937_64 rng(12);
  const auto radial = PolyField<Rational>::radial(4, kQ);
  for (int t = 0; t < 40; ++t) {
    const int pa = 1 + static_cast<int>(rng() % 2), pb = 1 + static_cast<int>(rng() % 2);
    const auto a = random_form(rng, 4, pa, 1 + static_cast<int>(rng() % 2)).lib;
    const auto b = random_form(rng, 4, pb, static_cast<int>(rng() % 3)).lib;
    // d^2 = 0 and i_R^2 = 0
    CHECK(ext_d(ext_d(a)).is_zero());
    CHECK((a.grade() < 2 || radial_contract(radial_contract(a)).is_zero()));
    // Leibniz rules for d and for a contraction.
    const Rational sign(pa % 2 ? -1 : 1);
    CHECK(ext_d(wedge_forms(a, b)) == wedge_forms(ext_d(a), b) + sign * wedge_forms(a, ext_d(b)));
    CHECK(radial_contract(wedge_forms(a, b)) ==
          wedge_forms(radial_contract(a), b) + sign * wedge_forms(a, radial_contract(b)));
    // Cartan: (d i_R + i_R d) a = (total degree) a
    CHECK(ext_d(contract(radial, a)) + radial_contract(ext_d(a)) == Rational(a.total_degree()) * a);
  }
}

TEST_CASE("dense coordinates round-trip", "[forms]") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng() % 3), q = 1 + static_cast<int>(rng() % 2), e = static_cast<int>(rng() % 3);
    const FormCoordinates fc(n, q, q + e);
    CHECK(fc.dim() == binomial(n + 1, q) * binomial(n + e, e));
    const auto a = random_form(rng, n + 1, q, e).lib;
    const auto v = fc.encode(a);
    CHECK(fc.decode<Rational>(std::span<const Rational>(v)) == a);
    for (std::size_t i = 0; i < fc.dim(); i += 7) {
      const auto [s, m] = fc.at(i);
      CHECK(fc.index(s, m) == i);
    }
  }
  const FormCoordinates fc(2, 2, 3);
  CHECK_THROWS_AS(fc.encode(wedge_forms(dx(3, 0), dx(3, 1))), UsageError);
  CHECK_THROWS_AS(fc.decode<Rational>(std::vector<Rational>(2)), UsageError);
}

TEST_CASE("forms of mismatched shapes cannot be added", "[forms]") {
  CHECK_THROWS_AS(dx(3, 0) + wedge_forms(dx(3, 0), dx(3, 1)), UsageError);
  CHECK_THROWS_AS(dx(3, 0) + x(3, 0) * dx(3, 1), UsageError);
  CHECK_THROWS_AS(wedge_forms(dx(3, 0), dx(4, 1)), UsageError);
}
