#include <string>

#include "doctest.h"
#include "sproc/error.hpp"
#include "sproc/problem.hpp"

using namespace sproc;

TEST_CASE("minimal p = 0 file") {
  const auto pf = parse_problem(R"({"n": 1, "p": 0, "functions": [{"quadratic": {"Q": [2], "c": [0], "d": 1}}]})");
  CHECK(pf.n == 1);
  CHECK(pf.p == 0);
  CHECK(pf.system().num_constraints() == 0);
  CHECK_FALSE(pf.expected_verdict.has_value());
}

TEST_CASE("bundled example3_pair") {
  const auto pf = load_problem(SPROC_CORPUS_DIR "/example3_pair.json");
  const auto sys = pf.system();
  REQUIRE(sys.all_quadratic());
  const auto q = sys.quadratics();
  // q0 = 2x^2 - y^2, q1 = x + y
  CHECK(q[0].Q()(0, 0) == 4.0);
  CHECK(q[0].Q()(1, 1) == -2.0);
  CHECK(q[0].Q()(0, 1) == 0.0);
  CHECK(q[0].d() == 0.0);
  CHECK(q[1].is_affine());
  CHECK(q[1].c()[0] == 1.0);
  CHECK(q[1].c()[1] == 1.0);
  CHECK(pf.config.seed.value() == 1);
  CHECK(pf.expected_verdict.value() == "InvalidWithCounterexample");
}

TEST_CASE("flat and nested Q agree") {
  const auto flat = parse_problem(R"({"n": 2, "p": 0, "functions": [{"quadratic": {"Q": [1, 2, 2, 5], "c": [0, 1], "d": 0}}]})");
  const auto nested = parse_problem(R"({"n": 2, "p": 0, "functions": [{"quadratic": {"Q": [[1, 2], [2, 5]], "c": [0, 1], "d": 0}}]})");
  const double x[] = {0.3, -1.7};
  CHECK(flat.system().objective()(x) == nested.system().objective()(x));
}

TEST_CASE("linear entries are <a, x> - b") {
  const auto pf = parse_problem(R"({"n": 2, "p": 1, "functions": [{"linear": {"a": [1, 0], "b": 2}}, {"linear": {"a": [0, 1], "b": -1}}]})");
  CHECK(pf.all_linear());
  const double x[] = {3.0, 4.0};
  const auto v = pf.system().values(x);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 5.0);
}

TEST_CASE("expression entries") {
  const auto pf = parse_problem(R"({"n": 2, "p": 1, "functions": [{"expr": "exp(x1) + x2^2"}, {"expr": "1 - x1^2 - x2^2"}]})");
  CHECK(pf.system().kind() == FunctionSystem::Kind::Mixed);
  CHECK_FALSE(pf.all_linear());
}

TEST_CASE("load errors") {
  CHECK_THROWS_AS(parse_problem(R"({"n": 2, "p": 0, "functions": [{"quadratic": {"Q": [1, 0, 0], "c": [0, 0], "d": 0}}]})"),
                  DimensionMismatch);
  CHECK_THROWS_AS(parse_problem(R"({"n": 2, "p": 1, "functions": [{"linear": {"a": [1, 0], "b": 0}}]})"),
                  DimensionMismatch);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "p": 0, "extra": 1, "functions": [{"linear": {"a": [1], "b": 0}}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "p": 0, "functions": [{"cubic": {}}]})"), ParseError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "p": 0, "functions": [{"expr": "x1 +"}]})"), Error);
  CHECK_THROWS_AS(load_problem(SPROC_CORPUS_DIR "/does_not_exist.json"), Error);

  try {
    parse_problem("{\n  \"n\": 1,\n  \"p\": \n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_problem(R"({"n": "two", "p": 0, "functions": []})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("field 'n'") != std::string::npos);
  }
}
