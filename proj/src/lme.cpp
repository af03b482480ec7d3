#include "mposos/lme.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace mposos {

KktSystem build_kkt_system(const MatrixPolynomial& g, int n) {
  if (!g.is_symmetric()) throw std::invalid_argument("G must be symmetric");
  if (g.nvars() != n) throw std::invalid_argument("G variable count does not match n");
  const int m = g.rows();
  const int delta = triangle_size(m);

  KktSystem sys;
  sys.n = n;
  sys.m = m;
  sys.p1 = MatrixPolynomial(n, delta, n);
  sys.p2 = MatrixPolynomial(m * m, delta, n);

  for (int b = 0; b < m; ++b) {
    for (int a = 0; a <= b; ++a) {
      const int j = uvec_position(a, b);
      const double scale = (a == b) ? 1.0 : 2.0;
      for (int i = 0; i < n; ++i) sys.p1(i, j) = scale * g(a, b).derivative(i);

      // G * E_ab: column b receives G(:, a), column a receives G(:, b).
      for (int r = 0; r < m; ++r) {
        sys.p2(b * m + r, j) += g(r, a);
        if (a != b) sys.p2(a * m + r, j) += g(r, b);
      }
    }
  }

  sys.p = MatrixPolynomial(n + m * m, delta, n);
  for (int j = 0; j < delta; ++j) {
    for (int i = 0; i < n; ++i) sys.p(i, j) = sys.p1(i, j);
    for (int i = 0; i < m * m; ++i) sys.p(n + i, j) = sys.p2(i, j);
  }
  return sys;
}

std::optional<LeftInverse> solve_left_inverse(const KktSystem& sys, int ell, double tol, double* residual_out) {
  if (ell < 0) throw std::invalid_argument("left inverse degree must be nonnegative");
  const int n = sys.n;
  const int rows_p = sys.p.rows();
  const int delta = sys.p.cols();
  const int deg_p = sys.p.degree();

  const auto lbasis = monomial_basis(n, ell);
  const auto gbasis = monomial_basis(n, ell + deg_p);
  std::unordered_map<Monomial, int, MonomialHash> gindex;
  for (std::size_t k = 0; k < gbasis.size(); ++k) gindex.emplace(gbasis[k], static_cast<int>(k));

  const int nb = static_cast<int>(lbasis.size());
  const int ng = static_cast<int>(gbasis.size());
  const int unknowns = rows_p * nb;
  const int equations = delta * ng;

  // A[(j, gamma), (r, beta)] = coefficient of x^(gamma - beta) in P(r, j).
  std::vector<Eigen::Triplet<double>> trips;
  for (int r = 0; r < rows_p; ++r) {
    for (int j = 0; j < delta; ++j) {
      for (const auto& [mu, c] : sys.p(r, j).terms()) {
        for (int b = 0; b < nb; ++b) {
          const int gi = gindex.at(mu * lbasis[static_cast<std::size_t>(b)]);
          trips.emplace_back(j * ng + gi, r * nb + b, c);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a_sparse(equations, unknowns);
  a_sparse.setFromTriplets(trips.begin(), trips.end());
  const Eigen::MatrixXd a = Eigen::MatrixXd(a_sparse);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? 1e-10 * sigma(0) : 0.0;
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  const auto u = svd.matrixU().leftCols(rank);
  const auto v = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd inv_sigma = sigma.head(rank).cwiseInverse();

  LeftInverse out;
  out.degree = ell;
  out.l = MatrixPolynomial(delta, rows_p, n);
  double worst = 0.0;
  bool feasible = true;
  for (int i = 0; i < delta; ++i) {
    // rhs is the unit vector at (j = i, gamma = 1).
    const int q = i * ng;
    const Eigen::VectorXd sol = v * (inv_sigma.asDiagonal() * u.row(q).transpose());
    Eigen::VectorXd resid = a_sparse * sol;
    resid(q) -= 1.0;
    const double r_inf = resid.cwiseAbs().maxCoeff();
    worst = std::max(worst, r_inf);
    if (r_inf > tol * 2.0) feasible = false;
    for (int r = 0; r < rows_p; ++r) {
      Polynomial entry(n);
      for (int b = 0; b < nb; ++b) entry.add_term(lbasis[static_cast<std::size_t>(b)], sol(r * nb + b));
      out.l(i, r) = std::move(entry);
    }
  }
  out.residual = worst;
  if (residual_out) *residual_out = worst;
  if (!feasible) return std::nullopt;
  return out;
}

MatrixPolynomial theta_from_left_inverse(const Polynomial& f, const MatrixPolynomial& l, int m) {
  const int n = f.nvars();
  const int delta = triangle_size(m);
  if (l.rows() != delta || l.cols() != n + m * m) throw std::invalid_argument("left inverse has wrong shape");
  const auto grad = f.gradient();
  std::vector<Polynomial> u(static_cast<std::size_t>(delta), Polynomial(n));
  for (int i = 0; i < delta; ++i)
    for (int r = 0; r < n; ++r) {
      if (l(i, r).is_zero() || grad[static_cast<std::size_t>(r)].is_zero()) continue;
      u[static_cast<std::size_t>(i)] += l(i, r) * grad[static_cast<std::size_t>(r)];
    }
  return from_uvec(u, m);
}

LmeResult synthesize_lme(const Polynomial& f, const MatrixPolynomial& g, const LmeOptions& opts) {
  const int n = f.nvars();
  const int ell_max = opts.ell_max < 0 ? f.degree() + g.degree() + 2 : opts.ell_max;
  if (opts.ell_start < 0 || opts.ell_start > ell_max) throw std::invalid_argument("invalid LME degree range");
  const KktSystem sys = build_kkt_system(g, n);

  LmeResult result;
  result.ell_start = opts.ell_start;
  for (int ell = opts.ell_start; ell <= ell_max; ++ell) {
    double resid = 0.0;
    auto left = solve_left_inverse(sys, ell, opts.tol, &resid);
    result.residual_by_degree.push_back(resid);
    if (left) {
      LmeSolution sol;
      sol.theta = theta_from_left_inverse(f, left->l, sys.m);
      sol.left = std::move(*left);
      result.solution = std::move(sol);
      break;
    }
  }
  return result;
}

Eigen::VectorXd gradient_adjoint(const MatrixPolynomial& g, std::span<const double> u, const Eigen::MatrixXd& lambda) {
  const int n = g.nvars();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = (g.derivative(i).evaluate(u).cwiseProduct(lambda)).sum();
  return out;
}

KktResidual kkt_residual(const Polynomial& f, const MatrixPolynomial& g, const MatrixPolynomial& theta,
                         std::span<const double> u) {
  const Eigen::MatrixXd gu = g.evaluate(u);
  const Eigen::MatrixXd tu = theta.evaluate(u);
  Eigen::VectorXd grad(f.nvars());
  for (int i = 0; i < f.nvars(); ++i) grad(i) = f.derivative(i).evaluate(u);

  KktResidual r;
  r.grad = (grad - gradient_adjoint(g, u, tu)).cwiseAbs().maxCoeff();
  r.comp = (gu * tu).cwiseAbs().maxCoeff();
  const double lg = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gu, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double lt = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tu, Eigen::EigenvaluesOnly).eigenvalues()(0);
  r.psd_viol = std::max({0.0, -lg, -lt});
  return r;
}

double probe_nondegeneracy(const KktSystem& sys, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 1.0;
  std::vector<std::complex<double>> u(static_cast<std::size_t>(sys.n));
  for (int s = 0; s < samples; ++s) {
    for (auto& z : u) z = {normal(rng), normal(rng)};
    const Eigen::MatrixXcd pu = sys.p.evaluate(std::span<const std::complex<double>>(u));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pu);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
    worst = std::min(worst, sv(sv.size() - 1) / sv(0));
  }
  return worst;
}

}  // namespace mposos
