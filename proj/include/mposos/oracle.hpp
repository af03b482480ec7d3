#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mposos/matrix_polynomial.hpp"

namespace mposos {

using Box = std::vector<std::pair<double, double>>;

struct SampleReport {
  bool found = false;
  Eigen::VectorXd best_point;
  /// Upper bound on f_min when found; +inf otherwise.
  double best_value = std::numeric_limits<double>::infinity();
  long feasible_hits = 0;
  long samples = 0;
  Box box;

  double hit_ratio() const { return samples > 0 ? static_cast<double>(feasible_hits) / static_cast<double>(samples) : 0.0; }
};

constexpr double kOracleFeasTol = 1e-9;

bool oracle_feasible(const MatrixPolynomial& g, std::span<const double> u, double tol = kOracleFeasTol);

/// Uniform sampling of the box followed by cyclic coordinate descent from
/// the best feasible sample (each pass tries +-step along every coordinate,
/// halving the step after a pass without improvement).
SampleReport sample_upper_bound(const Polynomial& f, const MatrixPolynomial& g, const Box& box, long samples,
                                int refine_steps = 200, std::uint64_t seed = 1);

/// max over points of |L(u) P(u) - I|_inf.
double check_identity(const MatrixPolynomial& l, const MatrixPolynomial& p, const std::vector<Eigen::VectorXd>& points);

/// max_i |d/dx_i p(u) - central difference|.
double finite_diff_check(const Polynomial& p, std::span<const double> u, double h);
/// Same, entrywise over a matrix polynomial.
double finite_diff_check(const MatrixPolynomial& g, std::span<const double> u, double h);

/// Symmetric m x m matrix polynomial sum_{|alpha| <= d} G_alpha x^alpha with
/// standard normal upper-triangular coefficients.
MatrixPolynomial random_matrix_polynomial(int m, int n, int d, std::mt19937_64& rng);

/// Uniform random points in [-radius, radius]^n.
std::vector<Eigen::VectorXd> random_points(int n, int count, double radius, std::mt19937_64& rng);

}  // namespace mposos
