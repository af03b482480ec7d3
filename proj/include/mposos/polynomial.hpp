#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mposos {

/// Exponent vector of a monomial x^alpha over a fixed number of variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(int nvars);
  /// x_i with a 0-based variable index.
  static Monomial variable(int nvars, int i);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  /// True when every exponent of `other` is at most the matching exponent here.
  bool divisible_by(const Monomial& other) const;
  /// Exponent-wise difference; requires divisible_by(other).
  Monomial operator/(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Graded lexicographic position order with x1 > x2 > ... > xn.
/// Lower total degree comes first; within a degree the lexicographically
/// larger exponent vector comes first, so [x]_2 = 1, x1, x2, x1^2, x1x2, x2^2.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

/// All monomials of degree <= d in n variables, in graded lex order.
std::vector<Monomial> monomial_basis(int n, int d);

/// Binomial coefficient C(a, b) as a size; the length of monomial_basis(n, d)
/// is binomial(n + d, d).
std::size_t binomial(int a, int b);

/// Coefficients whose magnitude falls below this after arithmetic are dropped.
inline constexpr double kPruneTolerance = 1e-14;

/// Sparse real polynomial in a fixed number of variables.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  /// x_i with a 0-based variable index.
  static Polynomial variable(int nvars, int i);
  static Polynomial term(const Monomial& m, double c);

  int nvars() const { return nvars_; }
  /// Total degree; the zero polynomial has degree 0.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  double coefficient(const Monomial& m) const;

  /// Adds c * m to this polynomial, pruning a cancelled term.
  void add_term(const Monomial& m, double c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);
  Polynomial& operator*=(const Polynomial& rhs);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(int e) const;

  /// Partial derivative with respect to x_i, 0-based. Throws std::out_of_range.
  Polynomial derivative(int i) const;
  std::vector<Polynomial> gradient() const;

  double evaluate(std::span<const double> u) const;
  std::complex<double> evaluate(std::span<const std::complex<double>> u) const;

  /// Largest coefficient magnitude (0 for the zero polynomial).
  double max_abs_coefficient() const;
  /// Coefficientwise comparison within an absolute tolerance.
  bool approx_equal(const Polynomial& other, double tol) const;

  /// Canonical text, leading (highest graded lex) term first. Coefficients are
  /// written with enough digits to round-trip through the expression parser.
  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  int nvars_ = 0;
  TermMap terms_;
};

/// Default variable names x1..xn.
std::vector<std::string> default_names(int n);

}  // namespace mposos
