#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "mposos/polynomial.hpp"

namespace mposos {

/// Dense rows x cols grid of polynomials over a common variable count.
class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;
  MatrixPolynomial(int rows, int cols, int nvars);

  static MatrixPolynomial identity(int m, int nvars);
  /// Constant matrix polynomial from a real matrix.
  static MatrixPolynomial from_constant(const Eigen::MatrixXd& a, int nvars);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nvars() const { return nvars_; }

  Polynomial& operator()(int i, int j) { return entries_[index(i, j)]; }
  const Polynomial& operator()(int i, int j) const { return entries_[index(i, j)]; }

  /// Maximum entry degree.
  int degree() const;
  /// Square with entry(i,j) and entry(j,i) equal coefficientwise within tol.
  bool is_symmetric(double tol = 0.0) const;

  MatrixPolynomial transpose() const;
  MatrixPolynomial derivative(int i) const;

  MatrixPolynomial& operator+=(const MatrixPolynomial& rhs);
  MatrixPolynomial& operator-=(const MatrixPolynomial& rhs);
  friend MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b) { return a += b; }
  friend MatrixPolynomial operator-(MatrixPolynomial a, const MatrixPolynomial& b) { return a -= b; }
  friend MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b);
  friend MatrixPolynomial operator*(double s, MatrixPolynomial a);
  friend bool operator==(const MatrixPolynomial& a, const MatrixPolynomial& b) = default;

  Eigen::MatrixXd evaluate(std::span<const double> u) const;
  Eigen::MatrixXcd evaluate(std::span<const std::complex<double>> u) const;

  double max_abs_coefficient() const;

  /// One row per line, entries separated by " ; ".
  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  std::size_t index(int i, int j) const;

  int rows_ = 0;
  int cols_ = 0;
  int nvars_ = 0;
  std::vector<Polynomial> entries_;
};

/// Length of uvec for an m x m symmetric matrix: m(m+1)/2.
inline int triangle_size(int m) { return m * (m + 1) / 2; }

/// Position of (a, b), a <= b, 0-based, in the column-stacked upper triangle:
/// (0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...
inline int uvec_position(int a, int b) { return b * (b + 1) / 2 + a; }

/// Inverse of uvec_position.
std::pair<int, int> uvec_pair(int pos);

/// Upper triangle stacked column by column, no scaling on off-diagonal entries.
/// Throws std::invalid_argument on non-symmetric input.
Eigen::VectorXd uvec(const Eigen::MatrixXd& s, double tol = 1e-12);
std::vector<Polynomial> uvec(const MatrixPolynomial& s);

/// Symmetric matrix whose uvec is v.
Eigen::MatrixXd from_uvec(const Eigen::VectorXd& v, int m);
MatrixPolynomial from_uvec(const std::vector<Polynomial>& v, int m);

/// Full column stacking vec(A).
std::vector<Polynomial> vec(const MatrixPolynomial& a);

}  // namespace mposos
