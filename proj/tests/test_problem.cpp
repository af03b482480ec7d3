#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "mposos/expr_parser.hpp"
#include "mposos/problem.hpp"

using namespace mposos;

TEST_SUITE("problem") {

TEST_CASE("corpus contents") {
  const auto names = corpus_names();
  const std::vector<std::string> expect{"ex3_3i", "ex3_3ii", "ex3_3iii", "ex7_1", "ex7_2", "ex7_3", "ex7_4", "ex7_5"};
  CHECK(names == expect);
  CHECK_FALSE(corpus_text("nope").has_value());
  CHECK_THROWS_AS(load_corpus("nope"), std::out_of_range);
}

TEST_CASE("quadratic example loads as written") {
  const auto spec = load_problem_or_corpus("ex7_1.json");
  CHECK(spec.name == "ex7_1");
  CHECK(spec.n == 2);
  CHECK(spec.objective == parse_polynomial("x1^2 + x2^2", 2));
  CHECK(spec.g(0, 1) == parse_polynomial("0.5*x1*x2", 2));
  CHECK(spec.g.is_symmetric());
  REQUIRE(spec.reference.f_min.has_value());
  CHECK(*spec.reference.f_min == 8.0);
  CHECK(spec.reference.minimizers.size() == 4);
}

TEST_CASE("upper triangle is mirrored") {
  const auto spec = parse_problem(R"({"n": 2, "objective": "x1",
    "G": [["x1", "x2"], [null, "1"]]})");
  CHECK(spec.g(1, 0) == spec.g(0, 1));
  const auto both = parse_problem(R"({"n": 2, "objective": "x1", "G": [["x1", "x2"], ["x2", "1"]]})");
  CHECK(both.g == spec.g);
}

TEST_CASE("term lists, numbers and names") {
  const auto spec = parse_problem(R"({"n": 2, "vars": ["a", "b"],
    "objective": [{"coeff": 2, "exp": [1, 1]}, {"coeff": -1, "exp": [0, 0]}],
    "G": [[3]], "theta": [["a + b"]]})");
  CHECK(spec.objective == parse_polynomial("2*a*b - 1", 2, {"a", "b"}));
  CHECK(spec.g(0, 0) == Polynomial::constant(2, 3.0));
  REQUIRE(spec.theta.has_value());
  CHECK((*spec.theta)(0, 0) == parse_polynomial("a + b", 2, {"a", "b"}));
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_problem(R"({"n": 2, "objective": "x1", "G": [["x1", "x2"], ["x1", "1"]]})"), SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 2, "objective": [{"coeff": 1, "exp": [1]}], "G": [["1"]]})"), SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"objective": "x1", "G": [["1"]]})"), SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "G": [["1"]]})"), SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "objective": "x1", "G": [["1", "x1"]]})"), SchemaError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "objective": "x1", "G": [[null, "x1"], [null, "1"]]})"), SchemaError);
  CHECK_THROWS(parse_problem("{not json"));
  try {
    parse_problem(R"({"n": 1, "objective": "x1 +", "G": [["1"]]})");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

TEST_CASE("files load by path") {
  const std::string path = "problem_test_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"name": "tmp", "n": 1, "objective": "x1^2", "G": [["1 - x1"]]})";
  }
  const auto spec = load_problem_or_corpus(path);
  CHECK(spec.name == "tmp");
  std::remove(path.c_str());
  CHECK_THROWS(load_problem("does/not/exist.json"));
}

}  // TEST_SUITE
