#include <catch_amalgamated.hpp>

#include "folia/json_io.hpp"

using namespace folia;

namespace {

const FieldSpec kQ = FieldSpec::rationals();
const FieldSpec kP = FieldSpec::prime_field(32003);

}  // namespace

TEST_CASE("fields", "[json]") {
  CHECK(field_to_json(kQ) == json("Q"));
  CHECK(field_to_json(kP) == json::parse(R"({"Fp": 32003})"));
  CHECK(field_from_json(json("Q")).is_rational());
  CHECK(field_from_json(json::parse(R"({"Fp": 65537})")).prime == 65537u);
  CHECK_THROWS_AS(field_from_json(json("R")), ParseError);
  CHECK_THROWS_AS(field_from_json(json::parse(R"({"Fp": 12})")), ParseError);
  CHECK_THROWS_AS(field_from_json(json::parse(R"({"Fp": "x"})")), ParseError);
  CHECK_THROWS_AS(field_from_json(json(7)), ParseError);
}

TEST_CASE("prime-field values use the symmetric representative", "[json]") {
  CHECK(scalar_to_string(Fp(-3, 32003)) == "-3");
  CHECK(scalar_to_string(Fp(16001, 32003)) == "16001");
  CHECK(scalar_to_string(Fp(16002, 32003)) == "-16001");
  CHECK(scalar_to_string(Rational(-7, 3)) == "-7/3");
}

TEST_CASE("polynomials round-trip", "[json]") {
  const auto x0 = Poly<Rational>::variable(3, 0, kQ), x2 = Poly<Rational>::variable(3, 2, kQ);
  const auto p = Rational(3, 2) * (x0 * x0) - x0 * x2;
  const auto j = poly_to_json(p);
  CHECK(poly_from_json<Rational>(j, 3, 2, kQ) == p);
  CHECK(poly_from_json<Rational>(json::array(), 3, 4, kQ).is_zero());
  CHECK(poly_from_json<Rational>(json::parse(R"([["2", [1, 0, 1]]])"), 3, 2, kQ) == Rational(2) * (x0 * x2));

  CHECK_THROWS_AS(poly_from_json<Rational>(json::parse(R"([["1", [1, 0]]])"), 3, 1, kQ), ParseError);
  CHECK_THROWS_AS(poly_from_json<Rational>(json::parse(R"([["1", [1, 0, 0]], ["1", [1, 1, 0]]])"), 3, 1, kQ),
                  ParseError);
  CHECK_THROWS_AS(poly_from_json<Rational>(json::parse(R"([[1, [1, 0, 0]]])"), 3, 1, kQ), ParseError);
  CHECK_THROWS_AS(poly_from_json<Rational>(json::parse(R"([["x", [1, 0, 0]]])"), 3, 1, kQ), ParseError);
  CHECK_THROWS_AS(poly_from_json<Fp>(json::parse(R"([["1/32003", [1, 0, 0]]])"), 3, 1, kP), ParseError);
  CHECK_THROWS_AS(poly_from_json<Rational>(json::parse(R"({"a": 1})"), 3, 1, kQ), ParseError);
}

TEST_CASE("multivectors and forms round-trip", "[json]") {
  MultiVector<Fp> v(4, 2);
  v.set(IndexSet{0, 3}, Fp(5, 32003));
  v.set(IndexSet{1, 2}, Fp(-1, 32003));
  const auto j = multivector_to_json(v);
  CHECK(j == json::parse(R"([[[1, 4], "5"], [[2, 3], "-1"]])"));
  CHECK(multivector_from_json<Fp>(j, 4, 2, kP) == v);
  CHECK_THROWS_AS(multivector_from_json<Fp>(json::parse(R"([[[0, 1], "1"]])"), 4, 2, kP), ParseError);
  CHECK_THROWS_AS(multivector_from_json<Fp>(json::parse(R"([[[1, 1], "1"]])"), 4, 2, kP), ParseError);

  const auto p = random_params<Rational>(5, 3, 2, DegreeVector{1, 1, 2, 1}, kQ);
  const auto omega = construct_log_form(p);
  CHECK(form_from_json<Rational>(form_to_json(omega), 4, kQ) == omega);
  CHECK_THROWS_AS(form_from_json<Rational>(json::parse(R"({"grade": 2})"), 4, kQ), ParseError);
}

TEST_CASE("parameters round-trip and carry over between fields", "[json]") {
  const auto p = random_params<Fp>(9, 4, 2, DegreeVector{1, 1, 1, 1, 1}, kP);
  const auto j = params_to_json(p);
  CHECK(j.at("field") == json::parse(R"({"Fp": 32003})"));
  CHECK(j.at("seed") == 9);
  const auto back = params_from_json<Fp>(j, kP);
  CHECK(back.polys == p.polys);
  CHECK(back.lambdas == p.lambdas);
  CHECK(back.seed == p.seed);
  CHECK(params_to_json(back).dump() == j.dump());

  // The same document read over Q is the sampled rational instance.
  const auto r = random_params<Rational>(9, 4, 2, DegreeVector{1, 1, 1, 1, 1}, kQ);
  const auto over_q = params_from_json<Rational>(j, kQ);
  CHECK(over_q.polys == r.polys);
  CHECK(over_q.lambdas == r.lambdas);
}

TEST_CASE("field precedence for parameter files", "[json]") {
  const auto doc = json::parse(R"({"field": {"Fp": 65537}})");
  CHECK(params_field(doc, std::nullopt, kP).prime == 65537u);
  CHECK(params_field(doc, kQ, kP).is_rational());
  CHECK(params_field(json::object(), std::nullopt, kP).prime == 32003u);
}

TEST_CASE("malformed parameter documents", "[json]") {
  const auto good = params_to_json(random_params<Rational>(1, 2, 2, DegreeVector{1, 1, 1}, kQ));
  CHECK_NOTHROW(params_from_json<Rational>(good, kQ));
  auto drop = [&](const char* key) {
    auto j = good;
    j.erase(key);
    return j;
  };
  for (const char* key : {"n", "q", "degrees", "lambdas", "polys"})
    CHECK_THROWS_AS(params_from_json<Rational>(drop(key), kQ), ParseError);

  auto short_lambda = good;
  short_lambda["lambdas"][0] = json::parse(R"(["1", "-1"])");
  CHECK_THROWS_AS(params_from_json<Rational>(short_lambda, kQ), ParseError);

  auto wrong_degree = good;
  wrong_degree["degrees"] = json::parse("[1, 1, 2]");
  CHECK_THROWS_AS(params_from_json<Rational>(wrong_degree, kQ), ParseError);

  auto zero_poly = good;
  zero_poly["polys"][1] = json::array();
  CHECK_THROWS_AS(params_from_json<Rational>(zero_poly, kQ), ParseError);

  auto too_many_lambdas = good;
  too_many_lambdas["lambdas"].push_back(good["lambdas"][0]);
  CHECK_THROWS_AS(params_from_json<Rational>(too_many_lambdas, kQ), ParseError);

  CHECK_THROWS_AS(params_from_json<Rational>(json::array(), kQ), ParseError);
}

TEST_CASE("stability reports", "[json]") {
  const auto p = random_params<Fp>(1, 4, 2, DegreeVector{1, 1, 1, 1, 1}, kP);
  const auto j = report_to_json(certify_stability(p));
  CHECK(j.at("verdict") == "stable");
  CHECK(j.at("ker_dim") == 25);
  CHECK(j.at("drho_rank") == 25);
  CHECK(j.at("quotient_tangent_dim") == 24);
  CHECK(j.at("parameter_dim") == 24);
  CHECK(j.at("sanity_ok") == true);
  CHECK(j.at("seed") == 1);
  CHECK(j.at("assumptions").at("normal_crossings") == "verified");
  CHECK(j.at("sanity").at("dual_directions") == 10);
}
