#include <doctest.h>

#include <cmath>

#include "mposos/oracle.hpp"
#include "support.hpp"

using namespace mposos;
using mposos::testing::random_polynomial;

TEST_SUITE("polycore") {

TEST_CASE("graded lex basis order") {
  const auto b = monomial_basis(2, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == Monomial({0, 0}));
  CHECK(b[1] == Monomial({1, 0}));
  CHECK(b[2] == Monomial({0, 1}));
  CHECK(b[3] == Monomial({2, 0}));
  CHECK(b[4] == Monomial({1, 1}));
  CHECK(b[5] == Monomial({0, 2}));
  CHECK(binomial(6 + 3, 3) == monomial_basis(6, 3).size());
  CHECK(binomial(4, 7) == 0);
}

TEST_CASE("monomial arithmetic") {
  const Monomial a({2, 0, 1});
  const Monomial b({1, 3, 0});
  CHECK((a * b) == Monomial({3, 3, 1}));
  CHECK((a * b).degree() == 7);
  CHECK((a * b).divisible_by(b));
  CHECK_FALSE(a.divisible_by(b));
  CHECK(((a * b) / b) == a);
}

TEST_CASE("ring laws on random polynomials") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 4;
    const auto p = random_polynomial(n, 3, 6, rng);
    const auto q = random_polynomial(n, 3, 6, rng);
    const auto r = random_polynomial(n, 2, 4, rng);
    const auto one = Polynomial::constant(n, 1.0);
    CHECK((p + q).approx_equal(q + p, 1e-12));
    CHECK((p * q).approx_equal(q * p, 1e-12));
    CHECK(((p + q) + r).approx_equal(p + (q + r), 1e-12));
    CHECK(((p * q) * r).approx_equal(p * (q * r), 1e-10));
    CHECK((p * (q + r)).approx_equal(p * q + p * r, 1e-10));
    CHECK((p * one) == p);
    CHECK((p - p).is_zero());
    CHECK((p + (-p)).is_zero());
    CHECK(p.pow(3).approx_equal(p * p * p, 1e-9));
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_polynomial(3, 4, 8, rng);
    const auto q = random_polynomial(3, 3, 5, rng);
    const std::vector<double> u{0.3, -1.2, 0.7};
    CHECK((p * q).evaluate(u) == doctest::Approx(p.evaluate(u) * q.evaluate(u)).epsilon(1e-12));
    CHECK((p - q).evaluate(u) == doctest::Approx(p.evaluate(u) - q.evaluate(u)).epsilon(1e-12));
  }
}

TEST_CASE("symbolic derivatives match central differences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 5;
    const auto p = random_polynomial(n, 4, 10, rng);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = unit(rng);
    CHECK(finite_diff_check(p, u, 1e-5) <= 1e-6);
  }
  std::mt19937_64 grng(14);
  const auto g = random_matrix_polynomial(3, 2, 2, grng);
  const std::vector<double> u{0.4, -0.9};
  CHECK(finite_diff_check(g, u, 1e-5) <= 1e-6);
}

TEST_CASE("derivative rules") {
  std::mt19937_64 rng(15);
  const auto p = random_polynomial(3, 3, 6, rng);
  const auto q = random_polynomial(3, 3, 6, rng);
  for (int i = 0; i < 3; ++i)
    CHECK((p * q).derivative(i).approx_equal(p.derivative(i) * q + p * q.derivative(i), 1e-10));
  CHECK(Polynomial::constant(3, 4.0).derivative(1).is_zero());
  CHECK_THROWS_AS(p.derivative(3), std::out_of_range);
}

TEST_CASE("parser precedence and expansion") {
  const auto p = parse_polynomial("2*x1^2 - (x1 - x2)^2 + 3", 2);
  const auto expect = parse_polynomial("x1^2 + 2*x1*x2 - x2^2 + 3", 2);
  CHECK(p == expect);
  CHECK(parse_polynomial("-x1^2", 1).evaluate(std::vector<double>{2.0}) == doctest::Approx(-4.0));
  CHECK(parse_polynomial("1.5e1*a*b", 2, {"a", "b"}).evaluate(std::vector<double>{2.0, 3.0}) == doctest::Approx(90.0));
  CHECK(parse_polynomial("0.5*x1*x2 - 0.5*x2*x1", 2).is_zero());
}

TEST_CASE("parser rejects malformed input with a location") {
  CHECK_THROWS_AS(parse_polynomial("x1 + y", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1^-1", 1), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1^2.5", 1), ParseError);
  CHECK_THROWS_AS(parse_polynomial("(x1 + 1", 1), ParseError);
  CHECK_THROWS_AS(parse_polynomial("", 1), ParseError);
  try {
    parse_polynomial("x1 +\n  * x2", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    const auto p = random_polynomial(n, 4, 7, rng);
    CHECK(parse_polynomial(p.to_string(), n) == p);
  }
  CHECK(Polynomial(2).to_string() == "0");
}

TEST_CASE("matrix polynomial evaluation and products") {
  using mposos::testing::matrix_of;
  const auto a = matrix_of({{"x1", "x1*x2 - 1"}, {"x1*x2 - 1", "x2*x3 - 1"}}, 3);
  const auto b = matrix_of({{"1", "x3"}, {"x3", "x1^2"}}, 3);
  const std::vector<double> u{0.5, -2.0, 1.5};
  CHECK(a.is_symmetric());
  CHECK(a.degree() == 2);
  CHECK(((a * b).evaluate(u) - a.evaluate(u) * b.evaluate(u)).norm() < 1e-12);
  CHECK(((a + b).evaluate(u) - (a.evaluate(u) + b.evaluate(u))).norm() < 1e-12);
  CHECK((a * b).transpose() == b.transpose() * a.transpose());
  CHECK((MatrixPolynomial::identity(2, 3) * a) == a);
}

TEST_CASE("uvec layout and inverse") {
  CHECK(uvec_position(0, 0) == 0);
  CHECK(uvec_position(0, 1) == 1);
  CHECK(uvec_position(1, 1) == 2);
  CHECK(uvec_position(0, 2) == 3);
  for (int pos = 0; pos < triangle_size(5); ++pos) {
    const auto [a, b] = uvec_pair(pos);
    CHECK(uvec_position(a, b) == pos);
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Random(4, 4);
  s = (s + s.transpose()).eval();
  CHECK((from_uvec(uvec(s), 4) - s).norm() == 0.0);
  CHECK_THROWS_AS(uvec(Eigen::MatrixXd::Random(3, 3)), std::invalid_argument);
}

}  // TEST_SUITE
