#include "mposos/matrix_polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mposos {

MatrixPolynomial::MatrixPolynomial(int rows, int cols, int nvars)
    : rows_(rows), cols_(cols), nvars_(nvars),
      entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Polynomial(nvars)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix polynomial dimension");
}

MatrixPolynomial MatrixPolynomial::identity(int m, int nvars) {
  MatrixPolynomial out(m, m, nvars);
  for (int i = 0; i < m; ++i) out(i, i) = Polynomial::constant(nvars, 1.0);
  return out;
}

MatrixPolynomial MatrixPolynomial::from_constant(const Eigen::MatrixXd& a, int nvars) {
  MatrixPolynomial out(static_cast<int>(a.rows()), static_cast<int>(a.cols()), nvars);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = Polynomial::constant(nvars, a(i, j));
  return out;
}

std::size_t MatrixPolynomial::index(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("matrix polynomial index");
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(rows_) + static_cast<std::size_t>(i);
}

int MatrixPolynomial::degree() const {
  int d = 0;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

bool MatrixPolynomial::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) {
      if (tol == 0.0 ? !((*this)(i, j) == (*this)(j, i)) : !(*this)(i, j).approx_equal((*this)(j, i), tol))
        return false;
    }
  return true;
}

MatrixPolynomial MatrixPolynomial::transpose() const {
  MatrixPolynomial out(cols_, rows_, nvars_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

MatrixPolynomial MatrixPolynomial::derivative(int i) const {
  MatrixPolynomial out(rows_, cols_, nvars_);
  for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k].derivative(i);
  return out;
}

MatrixPolynomial& MatrixPolynomial::operator+=(const MatrixPolynomial& rhs) {
  if (rhs.rows_ != rows_ || rhs.cols_ != cols_) throw std::invalid_argument("matrix polynomial shape mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += rhs.entries_[k];
  return *this;
}

MatrixPolynomial& MatrixPolynomial::operator-=(const MatrixPolynomial& rhs) {
  if (rhs.rows_ != rows_ || rhs.cols_ != cols_) throw std::invalid_argument("matrix polynomial shape mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= rhs.entries_[k];
  return *this;
}

MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix polynomial product shape mismatch");
  MatrixPolynomial out(a.rows_, b.cols_, a.nvars_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) {
      Polynomial s(a.nvars_);
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        s += a(i, k) * b(k, j);
      }
      out(i, j) = std::move(s);
    }
  return out;
}

MatrixPolynomial operator*(double s, MatrixPolynomial a) {
  for (auto& p : a.entries_) p *= s;
  return a;
}

Eigen::MatrixXd MatrixPolynomial::evaluate(std::span<const double> u) const {
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).evaluate(u);
  return out;
}

Eigen::MatrixXcd MatrixPolynomial::evaluate(std::span<const std::complex<double>> u) const {
  Eigen::MatrixXcd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).evaluate(u);
  return out;
}

double MatrixPolynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& p : entries_) m = std::max(m, p.max_abs_coefficient());
  return m;
}

std::string MatrixPolynomial::to_string(const std::vector<std::string>& names) const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << "[ ";
    for (int j = 0; j < cols_; ++j) {
      if (j > 0) os << " ; ";
      os << (*this)(i, j).to_string(names);
    }
    os << " ]\n";
  }
  return os.str();
}

std::pair<int, int> uvec_pair(int pos) {
  int b = 0;
  while ((b + 1) * (b + 2) / 2 <= pos) ++b;
  return {pos - b * (b + 1) / 2, b};
}

Eigen::VectorXd uvec(const Eigen::MatrixXd& s, double tol) {
  if (s.rows() != s.cols()) throw std::invalid_argument("uvec of a non-square matrix");
  const int m = static_cast<int>(s.rows());
  const double scale = 1.0 + s.cwiseAbs().maxCoeff();
  Eigen::VectorXd v(triangle_size(m));
  for (int b = 0; b < m; ++b)
    for (int a = 0; a <= b; ++a) {
      if (std::abs(s(a, b) - s(b, a)) > tol * scale) throw std::invalid_argument("uvec of a non-symmetric matrix");
      v(uvec_position(a, b)) = s(a, b);
    }
  return v;
}

std::vector<Polynomial> uvec(const MatrixPolynomial& s) {
  if (!s.is_symmetric()) throw std::invalid_argument("uvec of a non-symmetric matrix polynomial");
  const int m = s.rows();
  std::vector<Polynomial> v(static_cast<std::size_t>(triangle_size(m)));
  for (int b = 0; b < m; ++b)
    for (int a = 0; a <= b; ++a) v[static_cast<std::size_t>(uvec_position(a, b))] = s(a, b);
  return v;
}

Eigen::MatrixXd from_uvec(const Eigen::VectorXd& v, int m) {
  if (v.size() != triangle_size(m)) throw std::invalid_argument("uvec length does not match m");
  Eigen::MatrixXd s(m, m);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a <= b; ++a) s(a, b) = s(b, a) = v(uvec_position(a, b));
  return s;
}

MatrixPolynomial from_uvec(const std::vector<Polynomial>& v, int m) {
  if (static_cast<int>(v.size()) != triangle_size(m)) throw std::invalid_argument("uvec length does not match m");
  const int n = v.empty() ? 0 : v.front().nvars();
  MatrixPolynomial s(m, m, n);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a <= b; ++a) s(a, b) = s(b, a) = v[static_cast<std::size_t>(uvec_position(a, b))];
  return s;
}

std::vector<Polynomial> vec(const MatrixPolynomial& a) {
  std::vector<Polynomial> v;
  v.reserve(static_cast<std::size_t>(a.rows() * a.cols()));
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) v.push_back(a(i, j));
  return v;
}

}  // namespace mposos
