#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mposos/matrix_polynomial.hpp"

namespace mposos {

/// Bijection between monomials of degree <= max_degree and positions
/// 0..C(n + max_degree, n) - 1 in graded lex order. Position 0 is the
/// constant monomial. Because the order is graded, the monomials of degree
/// <= d occupy a prefix of length C(n + d, n) for every d <= max_degree.
class MomentIndex {
 public:
  MomentIndex(int n, int max_degree);

  int nvars() const { return n_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(basis_.size()); }
  /// Number of monomials of degree <= d.
  int prefix_size(int d) const;

  const Monomial& monomial(int pos) const { return basis_[static_cast<std::size_t>(pos)]; }
  /// Position of a monomial; throws std::out_of_range if its degree is too high.
  int position(const Monomial& m) const;
  bool contains(const Monomial& m) const { return lookup_.contains(m); }

 private:
  int n_;
  int max_degree_;
  std::vector<Monomial> basis_;
  std::unordered_map<Monomial, int, MonomialHash> lookup_;
};

/// Truncated moment vector y indexed by a MomentIndex.
using MomentVector = Eigen::VectorXd;

/// Moments of the Dirac measure at u: y_alpha = u^alpha.
MomentVector dirac_moments(const MomentIndex& index, std::span<const double> u);

/// Riesz functional <p, y> = sum_alpha p_alpha y_alpha.
double riesz(const Polynomial& p, const MomentVector& y, const MomentIndex& index);

/// Linear equality <row, y> = rhs over moment positions.
struct LinearRow {
  std::vector<std::pair<int, double>> coeffs;  // sorted by position, no zeros
  double rhs = 0.0;
};

/// PSD block L_H^{(k)}[y] for a symmetric matrix polynomial H, stored by
/// structure: the entry at ((a, p), (b, q)) is sum_gamma C_gamma(a, b) *
/// y[gamma + beta_p + beta_q] where beta_p runs over [x]_t. Row (a, p) sits
/// at a * s + p with s = C(n + t, n).
class LocalizingBlock {
 public:
  LocalizingBlock(std::string label, const MatrixPolynomial& h, int t, const MomentIndex& index);

  const std::string& label() const { return label_; }
  int matrix_size() const { return m_; }
  int truncation() const { return t_; }
  int inner_size() const { return s_; }
  int dim() const { return m_ * s_; }

  struct Term {
    int gamma = 0;            // moment position of the monomial gamma
    Eigen::MatrixXd coeff;    // symmetric m x m coefficient of x^gamma in H
    std::vector<int> shift;   // shift[delta] = position(gamma + delta), delta < C(n + 2t, n)
  };
  const std::vector<Term>& terms() const { return terms_; }
  /// Position of beta_p + beta_q within the degree-2t prefix (s x s, row major).
  int pair_sum(int p, int q) const { return pair_sum_[static_cast<std::size_t>(p * s_ + q)]; }
  int inner_moments() const { return inner_moments_; }

  /// Dense L_H[y].
  Eigen::MatrixXd evaluate(const MomentVector& y) const;
  /// Adjoint map: out[alpha] += scale * <A_alpha, w> for a symmetric w of size dim().
  void add_adjoint(const Eigen::MatrixXd& w, Eigen::VectorXd& out, double scale = 1.0) const;
  /// Nonzero entries (row <= col) of each coefficient matrix A_alpha.
  struct Entry {
    int alpha;
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries() const;

 private:
  std::string label_;
  int m_;
  int t_;
  int s_;
  int inner_moments_;
  std::vector<int> pair_sum_;
  std::vector<Term> terms_;
};

/// k-th order moment matrix M_k[y].
Eigen::MatrixXd moment_matrix(const MomentVector& y, int k, const MomentIndex& index);
/// Block localizing matrix with uniform truncation t = k - ceil(deg H / 2).
Eigen::MatrixXd localizing_matrix(const MatrixPolynomial& h, const MomentVector& y, int k, const MomentIndex& index);

/// Rows <h x^beta, y> = 0 for |beta| <= max_degree - deg h, normalized to unit
/// infinity norm. Exact duplicates are dropped; the zero polynomial yields none.
std::vector<LinearRow> ideal_rows(const Polynomial& h, int max_degree, const MomentIndex& index);

/// Linear objective, linear equalities and structured PSD blocks over y.
struct ConicProblem {
  std::shared_ptr<const MomentIndex> index;
  Eigen::VectorXd cost;  // <f, y> = cost . y
  std::vector<LinearRow> equalities;
  std::vector<LocalizingBlock> blocks;

  int num_vars() const { return index ? index->size() : 0; }
  double objective(const MomentVector& y) const { return cost.dot(y); }
  /// Largest |<row, y> - rhs| over the equalities.
  double equality_violation(const MomentVector& y) const;
  /// Smallest eigenvalue over all PSD blocks (+inf without blocks).
  double min_block_eigenvalue(const MomentVector& y) const;
};

enum class RelaxationKind { standard, strengthened };

const char* to_string(RelaxationKind kind);

struct RelaxationMeta {
  RelaxationKind kind = RelaxationKind::standard;
  int order = 0;
  int d0 = 0;  // minimal admissible order
  std::vector<int> block_dims;
  std::size_t equality_rows = 0;
};

/// Order k below the minimal admissible order of a relaxation.
class OrderTooLow : public std::invalid_argument {
 public:
  OrderTooLow(int requested, int minimum);
  int minimum() const { return minimum_; }

 private:
  int minimum_;
};

/// d0 = max(ceil(deg f / 2), ceil(deg G / 2)) for the standard relaxation and
/// max(ceil(deg f / 2), ceil((deg G + deg Theta) / 2)) for the strengthened one.
int minimal_order(RelaxationKind kind, const Polynomial& f, const MatrixPolynomial& g,
                  const MatrixPolynomial* theta = nullptr);

struct Relaxation {
  ConicProblem problem;
  RelaxationMeta meta;
};

/// Standard: min <f,y> s.t. y0 = 1, M_k[y] >= 0, L_G[y] >= 0.
/// Strengthened: additionally L_Theta[y] >= 0 and the ideal rows of every
/// entry of G Theta and of grad f - grad G^*[Theta].
Relaxation build_relaxation(RelaxationKind kind, const Polynomial& f, const MatrixPolynomial& g,
                            const MatrixPolynomial* theta, int k);

/// The polynomials grad f - grad G^*[Theta] (one per variable).
std::vector<Polynomial> stationarity_residual(const Polynomial& f, const MatrixPolynomial& g,
                                              const MatrixPolynomial& theta);

}  // namespace mposos
