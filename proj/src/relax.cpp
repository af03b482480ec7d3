#include "mposos/relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace mposos {

MomentIndex::MomentIndex(int n, int max_degree) : n_(n), max_degree_(max_degree), basis_(monomial_basis(n, max_degree)) {
  lookup_.reserve(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) lookup_.emplace(basis_[i], static_cast<int>(i));
}

int MomentIndex::prefix_size(int d) const {
  if (d < 0) return 0;
  return static_cast<int>(binomial(n_ + std::min(d, max_degree_), n_));
}

int MomentIndex::position(const Monomial& m) const {
  auto it = lookup_.find(m);
  if (it == lookup_.end()) throw std::out_of_range("monomial degree exceeds the moment index");
  return it->second;
}

MomentVector dirac_moments(const MomentIndex& index, std::span<const double> u) {
  if (static_cast<int>(u.size()) != index.nvars()) throw std::invalid_argument("point dimension mismatch");
  MomentVector y(index.size());
  for (int i = 0; i < index.size(); ++i) {
    const Monomial& m = index.monomial(i);
    double v = 1.0;
    for (int j = 0; j < m.nvars(); ++j)
      for (int e = 0; e < m[j]; ++e) v *= u[static_cast<std::size_t>(j)];
    y(i) = v;
  }
  return y;
}

double riesz(const Polynomial& p, const MomentVector& y, const MomentIndex& index) {
  if (p.degree() > index.max_degree()) throw std::out_of_range("polynomial degree exceeds the moment vector");
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * y(index.position(m));
  return s;
}

LocalizingBlock::LocalizingBlock(std::string label, const MatrixPolynomial& h, int t, const MomentIndex& index)
    : label_(std::move(label)), m_(h.rows()), t_(t) {
  if (t < 0) throw std::invalid_argument("localizing truncation is negative");
  if (!h.is_symmetric()) throw std::invalid_argument("localizing matrix polynomial must be symmetric");
  if (h.degree() + 2 * t > index.max_degree()) throw std::out_of_range("localizing matrix exceeds the moment index");
  const int n = index.nvars();
  const auto inner = monomial_basis(n, t);
  s_ = static_cast<int>(inner.size());
  inner_moments_ = index.prefix_size(2 * t);
  pair_sum_.resize(static_cast<std::size_t>(s_) * static_cast<std::size_t>(s_));
  for (int p = 0; p < s_; ++p)
    for (int q = 0; q < s_; ++q)
      pair_sum_[static_cast<std::size_t>(p * s_ + q)] =
          index.position(inner[static_cast<std::size_t>(p)] * inner[static_cast<std::size_t>(q)]);

  std::map<Monomial, Eigen::MatrixXd, GradedLexLess> coeffs;
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b)
      for (const auto& [mono, c] : h(a, b).terms()) {
        auto [it, inserted] = coeffs.try_emplace(mono, Eigen::MatrixXd::Zero(m_, m_));
        it->second(a, b) = c;
      }
  for (auto& [gamma, c] : coeffs) {
    Term term;
    term.gamma = index.position(gamma);
    term.coeff = std::move(c);
    term.shift.resize(static_cast<std::size_t>(inner_moments_));
    for (int d = 0; d < inner_moments_; ++d)
      term.shift[static_cast<std::size_t>(d)] = index.position(gamma * index.monomial(d));
    terms_.push_back(std::move(term));
  }
}

Eigen::MatrixXd LocalizingBlock::evaluate(const MomentVector& y) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim(), dim());
  for (const auto& term : terms_) {
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        const double c = term.coeff(a, b);
        if (c == 0.0) continue;
        for (int q = 0; q < s_; ++q)
          for (int p = 0; p < s_; ++p)
            out(a * s_ + p, b * s_ + q) += c * y(term.shift[static_cast<std::size_t>(pair_sum(p, q))]);
      }
  }
  return out;
}

void LocalizingBlock::add_adjoint(const Eigen::MatrixXd& w, Eigen::VectorXd& out, double scale) const {
  // Collapse w onto the moments of degree <= 2t per (a, b) first.
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) {
      bool used = false;
      for (const auto& term : terms_) used = used || term.coeff(a, b) != 0.0;
      if (!used) continue;
      Eigen::VectorXd folded = Eigen::VectorXd::Zero(inner_moments_);
      for (int q = 0; q < s_; ++q)
        for (int p = 0; p < s_; ++p) folded(pair_sum(p, q)) += w(a * s_ + p, b * s_ + q);
      for (const auto& term : terms_) {
        const double c = term.coeff(a, b);
        if (c == 0.0) continue;
        for (int d = 0; d < inner_moments_; ++d) out(term.shift[static_cast<std::size_t>(d)]) += scale * c * folded(d);
      }
    }
}

std::vector<LocalizingBlock::Entry> LocalizingBlock::entries() const {
  std::map<std::tuple<int, int, int>, double> acc;
  for (const auto& term : terms_)
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        const double c = term.coeff(a, b);
        if (c == 0.0) continue;
        for (int p = 0; p < s_; ++p)
          for (int q = 0; q < s_; ++q) {
            const int row = a * s_ + p;
            const int col = b * s_ + q;
            if (row > col) continue;
            acc[{term.shift[static_cast<std::size_t>(pair_sum(p, q))], row, col}] += c;
          }
      }
  std::vector<Entry> out;
  out.reserve(acc.size());
  for (const auto& [key, v] : acc) {
    if (v == 0.0) continue;
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
  }
  return out;
}

namespace {

int half_up(int d) { return (d + 1) / 2; }

}  // namespace

Eigen::MatrixXd moment_matrix(const MomentVector& y, int k, const MomentIndex& index) {
  const int n = index.nvars();
  return LocalizingBlock("moment", MatrixPolynomial::identity(1, n), k, index).evaluate(y);
}

Eigen::MatrixXd localizing_matrix(const MatrixPolynomial& h, const MomentVector& y, int k, const MomentIndex& index) {
  const int t = k - half_up(h.degree());
  if (t < 0) throw std::invalid_argument("order too low for this localizing matrix");
  return LocalizingBlock("localizing", h, t, index).evaluate(y);
}

std::vector<LinearRow> ideal_rows(const Polynomial& h, int max_degree, const MomentIndex& index) {
  std::vector<LinearRow> rows;
  if (h.is_zero()) return rows;
  const int room = max_degree - h.degree();
  if (room < 0) throw std::out_of_range("ideal generator degree exceeds the moment index");
  std::set<std::vector<std::pair<int, double>>> seen;
  for (const auto& beta : monomial_basis(index.nvars(), room)) {
    std::vector<std::pair<int, double>> coeffs;
    double scale = 0.0;
    for (const auto& [m, c] : h.terms()) {
      coeffs.emplace_back(index.position(m * beta), c);
      scale = std::max(scale, std::abs(c));
    }
    std::sort(coeffs.begin(), coeffs.end());
    // Sign fixed by the first coefficient so that negated copies coincide.
    const double s = coeffs.front().second < 0 ? -1.0 / scale : 1.0 / scale;
    for (auto& [pos, c] : coeffs) c *= s;
    if (seen.insert(coeffs).second) rows.push_back({std::move(coeffs), 0.0});
  }
  return rows;
}

double ConicProblem::equality_violation(const MomentVector& y) const {
  double worst = 0.0;
  for (const auto& row : equalities) {
    double s = -row.rhs;
    for (const auto& [pos, c] : row.coeffs) s += c * y(pos);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double ConicProblem::min_block_eigenvalue(const MomentVector& y) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& block : blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.evaluate(y), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

const char* to_string(RelaxationKind kind) {
  return kind == RelaxationKind::standard ? "standard" : "strengthened";
}

OrderTooLow::OrderTooLow(int requested, int minimum)
    : std::invalid_argument("relaxation order " + std::to_string(requested) + " is below the minimal order " +
                            std::to_string(minimum)),
      minimum_(minimum) {}

int minimal_order(RelaxationKind kind, const Polynomial& f, const MatrixPolynomial& g, const MatrixPolynomial* theta) {
  const int df = half_up(f.degree());
  if (kind == RelaxationKind::standard) return std::max({1, df, half_up(g.degree())});
  if (!theta) throw std::invalid_argument("strengthened relaxation needs a multiplier expression");
  return std::max({1, df, half_up(g.degree() + theta->degree())});
}

std::vector<Polynomial> stationarity_residual(const Polynomial& f, const MatrixPolynomial& g,
                                              const MatrixPolynomial& theta) {
  const int n = f.nvars();
  const int m = g.rows();
  std::vector<Polynomial> out;
  for (int i = 0; i < n; ++i) {
    Polynomial r = f.derivative(i);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (theta(a, b).is_zero()) continue;
        const Polynomial dg = g(a, b).derivative(i);
        if (dg.is_zero()) continue;
        r -= dg * theta(a, b);
      }
    out.push_back(std::move(r));
  }
  return out;
}

Relaxation build_relaxation(RelaxationKind kind, const Polynomial& f, const MatrixPolynomial& g,
                            const MatrixPolynomial* theta, int k) {
  if (!g.is_symmetric()) throw std::invalid_argument("G must be symmetric");
  if (kind == RelaxationKind::strengthened) {
    if (!theta) throw std::invalid_argument("strengthened relaxation needs a multiplier expression");
    if (!theta->is_symmetric() || theta->rows() != g.rows())
      throw std::invalid_argument("multiplier expression must be symmetric and match G");
  }
  const int n = f.nvars();
  const int d0 = minimal_order(kind, f, g, theta);
  if (k < d0) throw OrderTooLow(k, d0);

  Relaxation out;
  out.meta.kind = kind;
  out.meta.order = k;
  out.meta.d0 = d0;

  auto index = std::make_shared<const MomentIndex>(n, 2 * k);
  ConicProblem& prob = out.problem;
  prob.index = index;
  prob.cost = Eigen::VectorXd::Zero(index->size());
  for (const auto& [m, c] : f.terms()) prob.cost(index->position(m)) = c;

  prob.equalities.push_back({{{0, 1.0}}, 1.0});
  prob.blocks.emplace_back("moment", MatrixPolynomial::identity(1, n), k, *index);
  prob.blocks.emplace_back("G", g, k - half_up(g.degree()), *index);

  if (kind == RelaxationKind::strengthened) {
    prob.blocks.emplace_back("Theta", *theta, k - half_up(theta->degree()), *index);
    std::vector<Polynomial> generators;
    const MatrixPolynomial gt = g * *theta;
    for (int j = 0; j < gt.cols(); ++j)
      for (int i = 0; i < gt.rows(); ++i) generators.push_back(gt(i, j));
    for (auto& r : stationarity_residual(f, g, *theta)) generators.push_back(std::move(r));

    std::set<std::vector<std::pair<int, double>>> seen;
    std::vector<LinearRow> rows;
    for (const auto& h : generators) {
      for (auto& row : ideal_rows(h, 2 * k, *index)) {
        if (seen.insert(row.coeffs).second) rows.push_back(std::move(row));
      }
    }
    std::sort(rows.begin(), rows.end(), [](const LinearRow& a, const LinearRow& b) { return a.coeffs < b.coeffs; });
    for (auto& r : rows) prob.equalities.push_back(std::move(r));
  }

  for (const auto& b : prob.blocks) out.meta.block_dims.push_back(b.dim());
  out.meta.equality_rows = prob.equalities.size();
  return out;
}

}  // namespace mposos
