#include <doctest.h>

#include <Eigen/Dense>

#include "mposos/lme.hpp"
#include "mposos/oracle.hpp"
#include "mposos/problem.hpp"
#include "printed_fixtures.hpp"

using namespace mposos;
using namespace mposos::testing;

namespace {

// Least-squares residual of L(u_s) P(u_s) = I over random sample points,
// with the entries of L of degree <= ell. Independent of the
// coefficient-matching system used by solve_left_inverse.
double interpolation_residual(const KktSystem& sys, int ell, std::mt19937_64& rng) {
  const auto basis = monomial_basis(sys.n, ell);
  const int rows = sys.p.rows();
  const int cols = sys.p.cols();
  const auto pts = random_points(sys.n, 3 * static_cast<int>(monomial_basis(sys.n, ell + sys.p.degree()).size()), 1.0, rng);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()) * cols, rows * nb);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(a.rows(), cols);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const std::span<const double> u(pts[s].data(), static_cast<std::size_t>(sys.n));
    const Eigen::MatrixXd p = sys.p.evaluate(u);
    Eigen::VectorXd mono(nb);
    for (Eigen::Index k = 0; k < nb; ++k) mono(k) = Polynomial::term(basis[static_cast<std::size_t>(k)], 1.0).evaluate(u);
    for (int c = 0; c < cols; ++c) {
      const auto row = static_cast<Eigen::Index>(s) * cols + c;
      for (int j = 0; j < rows; ++j) a.row(row).segment(j * nb, nb) = mono.transpose() * p(j, c);
      b(row, c) = 1.0;
    }
  }
  const Eigen::MatrixXd x = a.completeOrthogonalDecomposition().solve(b);
  return (a * x - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("lme") {

TEST_CASE("KKT matrix applies the adjoint and the complementarity map") {
  std::mt19937_64 rng(21);
  for (int m = 1; m <= 3; ++m) {
    const auto g = random_matrix_polynomial(m, 3, 2, rng);
    const auto sys = build_kkt_system(g, 3);
    CHECK(sys.p.rows() == 3 + m * m);
    CHECK(sys.p.cols() == triangle_size(m));
    const std::vector<double> u{0.3, -0.7, 1.1};
    Eigen::MatrixXd lam = Eigen::MatrixXd::Random(m, m);
    lam = (lam + lam.transpose()).eval();
    const Eigen::VectorXd top = sys.p1.evaluate(u) * uvec(lam);
    const Eigen::VectorXd bottom = sys.p2.evaluate(u) * uvec(lam);
    const Eigen::MatrixXd gl = g.evaluate(u) * lam;
    CHECK((top - gradient_adjoint(g, u, lam)).norm() < 1e-12);
    CHECK((bottom - Eigen::Map<const Eigen::VectorXd>(gl.data(), gl.size())).norm() < 1e-12);
  }
}

TEST_CASE("printed left inverses satisfy L P = I coefficientwise") {
  const auto id3 = MatrixPolynomial::identity(3, 2);
  const auto lp2 = printed_l_quadratic() * build_kkt_system(quadratic_pmi(), 2).p;
  CHECK((lp2 - id3).max_abs_coefficient() <= 1e-10);
  const auto lp3 = printed_l_bilinear() * build_kkt_system(bilinear_pmi(), 3).p;
  CHECK((lp3 - MatrixPolynomial::identity(3, 3)).max_abs_coefficient() <= 1e-10);
}

TEST_CASE("synthesized left inverses are exact identities") {
  std::mt19937_64 rng(22);
  for (const auto& name : corpus_names()) {
    CAPTURE(name);
    const auto spec = load_corpus(name);
    const auto res = synthesize_lme(spec.objective, spec.g);
    REQUIRE(res.solution.has_value());
    CHECK(res.solution->left.residual <= 1e-8);
    const auto sys = build_kkt_system(spec.g, spec.n);
    CHECK(check_identity(res.solution->left.l, sys.p, random_points(spec.n, 10, 1.5, rng)) <= 1e-7);
    CHECK(res.solution->theta.is_symmetric(1e-12));
  }
}

TEST_CASE("theta for the quadratic example at (2, 2)") {
  const auto spec = load_corpus("ex7_1");
  const auto res = synthesize_lme(spec.objective, spec.g);
  REQUIRE(res.solution.has_value());
  const Eigen::MatrixXd t = res.solution->theta.evaluate(std::vector<double>{2.0, 2.0});
  Eigen::Matrix2d expect;
  expect << 2, -2, -2, 2;
  CHECK((t - expect).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("synthesized and printed theta agree on the KKT points") {
  const auto spec = load_corpus("ex3_3ii");
  const auto res = synthesize_lme(spec.objective, spec.g);
  REQUIRE(res.solution.has_value());
  const auto printed = printed_theta_quadratic(spec.objective);
  REQUIRE_FALSE(spec.reference.minimizers.empty());
  for (const auto& u : spec.reference.minimizers) {
    const Eigen::MatrixXd a = res.solution->theta.evaluate(u);
    const Eigen::MatrixXd b = printed.evaluate(u);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("KKT residuals vanish at reference minimizers") {
  for (const auto& name : corpus_names()) {
    const auto spec = load_corpus(name);
    const auto res = synthesize_lme(spec.objective, spec.g);
    REQUIRE(res.solution.has_value());
    for (const auto& u : spec.reference.minimizers) {
      CAPTURE(name);
      // Reference points are printed to four decimals.
      const auto r = kkt_residual(spec.objective, spec.g, res.solution->theta, u);
      CHECK(r.grad <= 5e-3);
      CHECK(r.comp <= 5e-3);
    }
  }
}

TEST_CASE("minimal degree agrees with a point-evaluation oracle") {
  std::mt19937_64 rng(23);
  const int shapes[][3] = {{2, 2, 1}, {3, 2, 1}, {2, 3, 2}};
  for (const auto& s : shapes) {
    const auto g = random_matrix_polynomial(s[0], s[1], s[2], rng);
    const auto sys = build_kkt_system(g, s[1]);
    const auto res = synthesize_lme(Polynomial::variable(s[1], 0), g, LmeOptions{0, 6, 1e-8});
    REQUIRE(res.solution.has_value());
    const int ell = res.solution->left.degree;
    CAPTURE(ell);
    CHECK(interpolation_residual(sys, ell, rng) <= 1e-8);
    if (ell > 0) CHECK(interpolation_residual(sys, ell - 1, rng) > 1e-6);
  }
}

TEST_CASE("constant left inverse for linear G with enough variables") {
  std::mt19937_64 rng(24);
  const auto g = random_matrix_polynomial(2, 3, 1, rng);
  const auto res = synthesize_lme(Polynomial::variable(3, 0), g);
  REQUIRE(res.solution.has_value());
  CHECK(res.solution->left.degree == 0);
  CHECK(res.solution->theta.degree() <= 1);
}

TEST_CASE("ell_start skips lower degrees") {
  const auto spec = load_corpus("ex7_3");
  LmeOptions o;
  o.ell_start = 2;
  const auto res = synthesize_lme(spec.objective, spec.g, o);
  REQUIRE(res.solution.has_value());
  CHECK(res.solution->left.degree == 2);
  CHECK(res.ell_start == 2);
}

TEST_CASE("degenerate constraint has no left inverse") {
  MatrixPolynomial g(1, 1, 1);
  g(0, 0) = parse_polynomial("x1^2", 1);
  const auto res = synthesize_lme(Polynomial::variable(1, 0), g, LmeOptions{0, 4, 1e-8});
  CHECK_FALSE(res.solution.has_value());
  CHECK(res.residual_by_degree.size() == 5);
  CHECK(probe_nondegeneracy(build_kkt_system(g, 1)) > 0.0);
}

}  // TEST_SUITE
