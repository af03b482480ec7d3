#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mposos/matrix_polynomial.hpp"

namespace mposos {

/// Coefficient matrix of the KKT equation P(x) uvec(Lambda) = [grad f(x); 0].
///
/// Column j of P belongs to the uvec position (a, b). Its top n rows are
/// grad G_ab (doubled when a != b); its bottom m^2 rows are vec(G E_ab) with
/// E_aa = e_a e_a^T and E_ab = e_a e_b^T + e_b e_a^T.
struct KktSystem {
  int n = 0;
  int m = 0;
  MatrixPolynomial p1;  // n x m(m+1)/2
  MatrixPolynomial p2;  // m^2 x m(m+1)/2
  MatrixPolynomial p;   // [p1; p2]
};

KktSystem build_kkt_system(const MatrixPolynomial& g, int n);

/// Row-wise left inverse L(x) of P(x) found at a fixed degree.
struct LeftInverse {
  int degree = 0;
  MatrixPolynomial l;  // m(m+1)/2 x (n + m^2)
  /// Infinity norm of the coefficient mismatch of L P - I, worst row.
  double residual = 0.0;
};

/// Minimum 2-norm solution of the coefficient-matching system for L(x) P(x) = I
/// with entries of L of degree <= ell. Returns nullopt when some row misses
/// its right-hand side by more than tol * (1 + |rhs|_inf); the achieved
/// residual is written to `residual_out` either way.
std::optional<LeftInverse> solve_left_inverse(const KktSystem& sys, int ell, double tol,
                                              double* residual_out = nullptr);

struct LmeSolution {
  LeftInverse left;
  MatrixPolynomial theta;  // symmetric m x m
};

struct LmeOptions {
  int ell_start = 0;
  /// Negative means deg f + deg G + 2.
  int ell_max = -1;
  double tol = 1e-8;
};

struct LmeResult {
  std::optional<LmeSolution> solution;
  /// Achieved coefficient residual for each tried degree, starting at ell_start.
  std::vector<double> residual_by_degree;
  int ell_start = 0;
};

/// Searches ell = ell_start, ell_start + 1, ... for a left inverse and forms
/// uvec(Theta) = L [grad f; 0] at the first feasible degree.
LmeResult synthesize_lme(const Polynomial& f, const MatrixPolynomial& g, const LmeOptions& opts = {});

/// Theta from a given left inverse.
MatrixPolynomial theta_from_left_inverse(const Polynomial& f, const MatrixPolynomial& l, int m);

struct KktResidual {
  double grad = 0.0;      // |grad f(u) - grad G(u)^*[Theta(u)]|_inf
  double comp = 0.0;      // max |(G(u) Theta(u))_ij|
  double psd_viol = 0.0;  // max(0, -lambda_min G(u), -lambda_min Theta(u))
};

KktResidual kkt_residual(const Polynomial& f, const MatrixPolynomial& g, const MatrixPolynomial& theta,
                         std::span<const double> u);

/// grad G(u)^*[Lambda]: the vector of tr(dG/dx_i(u) Lambda).
Eigen::VectorXd gradient_adjoint(const MatrixPolynomial& g, std::span<const double> u, const Eigen::MatrixXd& lambda);

/// Heuristic nondegeneracy probe: smallest ratio sigma_min / sigma_max of
/// P(u) over `samples` random complex points. A value near zero hints that
/// P is singular somewhere; it is never a proof either way.
double probe_nondegeneracy(const KktSystem& sys, int samples = 8, std::uint64_t seed = 7);

}  // namespace mposos
