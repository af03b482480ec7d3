#include "mposos/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mposos {

bool oracle_feasible(const MatrixPolynomial& g, std::span<const double> u, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.evaluate(u), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -tol;
}

SampleReport sample_upper_bound(const Polynomial& f, const MatrixPolynomial& g, const Box& box, long samples,
                                int refine_steps, std::uint64_t seed) {
  const int n = f.nvars();
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  if (static_cast<int>(box.size()) != n) throw std::invalid_argument("box dimension mismatch");

  SampleReport rep;
  rep.box = box;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd u(n);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) u(i) = box[static_cast<std::size_t>(i)].first + unit(rng) * (box[static_cast<std::size_t>(i)].second - box[static_cast<std::size_t>(i)].first);
    const std::span<const double> us(u.data(), static_cast<std::size_t>(n));
    if (!oracle_feasible(g, us)) continue;
    ++rep.feasible_hits;
    const double v = f.evaluate(us);
    if (v < rep.best_value) {
      rep.best_value = v;
      rep.best_point = u;
      rep.found = true;
    }
  }
  if (!rep.found) return rep;

  double width = 0.0;
  for (const auto& [lo, hi] : box) width = std::max(width, hi - lo);
  double step = 0.05 * width;
  Eigen::VectorXd cur = rep.best_point;
  double best = rep.best_value;
  for (int pass = 0; pass < refine_steps && step > 1e-12; ++pass) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double dir : {1.0, -1.0}) {
        Eigen::VectorXd cand = cur;
        cand(i) += dir * step;
        const std::span<const double> cs(cand.data(), static_cast<std::size_t>(n));
        if (!oracle_feasible(g, cs)) continue;
        const double v = f.evaluate(cs);
        if (v < best) {
          best = v;
          cur = cand;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  rep.best_point = cur;
  rep.best_value = best;
  return rep;
}

double check_identity(const MatrixPolynomial& l, const MatrixPolynomial& p, const std::vector<Eigen::VectorXd>& points) {
  if (l.cols() != p.rows() || l.rows() != p.cols()) throw std::invalid_argument("L and P dimensions do not match");
  double worst = 0.0;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(l.rows(), l.rows());
  for (const auto& u : points) {
    const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
    worst = std::max(worst, (l.evaluate(us) * p.evaluate(us) - id).cwiseAbs().maxCoeff());
  }
  return worst;
}

double finite_diff_check(const Polynomial& p, std::span<const double> u, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  std::vector<double> w(u.begin(), u.end());
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(u.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    w[k] = u[k] + h;
    const double up = p.evaluate(w);
    w[k] = u[k] - h;
    const double dn = p.evaluate(w);
    w[k] = u[k];
    worst = std::max(worst, std::abs(p.derivative(i).evaluate(u) - (up - dn) / (2.0 * h)));
  }
  return worst;
}

double finite_diff_check(const MatrixPolynomial& g, std::span<const double> u, double h) {
  double worst = 0.0;
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b) worst = std::max(worst, finite_diff_check(g(a, b), u, h));
  return worst;
}

MatrixPolynomial random_matrix_polynomial(int m, int n, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixPolynomial g(m, m, n);
  for (const auto& mono : monomial_basis(n, d))
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        const double c = normal(rng);
        g(a, b).add_term(mono, c);
        if (a != b) g(b, a).add_term(mono, c);
      }
  return g;
}

std::vector<Eigen::VectorXd> random_points(int n, int count, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-radius, radius);
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = unit(rng);
    pts.push_back(u);
  }
  return pts;
}

}  // namespace mposos
