#include "mposos/extract.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace mposos {

int numeric_rank(const Eigen::MatrixXd& m, double tol_rank) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s(0) <= 0.0) return 0;
  int r = 0;
  while (r < s.size() && s(r) > tol_rank * s(0)) ++r;
  return r;
}

std::vector<int> rank_profile(const MomentVector& y, const MomentIndex& index, int k, double tol_rank) {
  std::vector<int> ranks;
  for (int s = 0; s <= k; ++s) ranks.push_back(numeric_rank(moment_matrix(y, s, index), tol_rank));
  return ranks;
}

const char* to_string(ExtractStatus s) {
  switch (s) {
    case ExtractStatus::ok: return "ok";
    case ExtractStatus::no_flat: return "no_flat";
    case ExtractStatus::extraction_failure: return "extraction_failure";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::suspect: return "suspect";
    case Verdict::rejected: return "rejected";
  }
  return "?";
}

int flat_gap(const MatrixPolynomial& g) { return std::max(1, (g.degree() + 1) / 2); }

namespace {

// Rank-r factor V with M ~ V V^T from the leading eigenpairs.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m, int r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd v(n, r);
  for (int j = 0; j < r; ++j) {
    const int col = n - 1 - j;
    v.col(j) = es.eigenvectors().col(col) * std::sqrt(std::max(es.eigenvalues()(col), 0.0));
  }
  return v;
}

// Reduced column echelon form of v, scanning rows in order. Returns the pivot
// rows; v is overwritten so that v(pivots, :) is the identity.
std::vector<int> column_echelon(Eigen::MatrixXd& v, double tol) {
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> pivots;
  int c = 0;
  for (int i = 0; i < rows && c < cols; ++i) {
    Eigen::Index best = 0;
    const double piv = v.row(i).tail(cols - c).cwiseAbs().maxCoeff(&best);
    if (piv <= tol * scale) {
      v.row(i).tail(cols - c).setZero();
      continue;
    }
    v.col(c).swap(v.col(c + static_cast<int>(best)));
    v.col(c) /= v(i, c);
    for (int j = 0; j < cols; ++j)
      if (j != c) v.col(j) -= v(i, j) * v.col(c);
    pivots.push_back(i);
    ++c;
  }
  return pivots;
}

}  // namespace

ExtractResult flat_extract(const MomentVector& y, const MomentIndex& index, int k, int gap,
                           const ExtractOptions& opts) {
  if (gap < 1) throw std::invalid_argument("flat truncation gap must be positive");
  if (2 * k > index.max_degree() || y.size() != index.size())
    throw std::invalid_argument("moment vector does not reach order 2k");

  ExtractResult res;
  res.certificate.ranks = rank_profile(y, index, k, opts.tol_rank);
  const auto& ranks = res.certificate.ranks;

  int t = -1;
  for (int s = gap; s <= k; ++s) {
    if (ranks[static_cast<std::size_t>(s)] == ranks[static_cast<std::size_t>(s - gap)]) {
      t = s;
      break;
    }
  }
  if (t < 0) {
    res.status = ExtractStatus::no_flat;
    res.message = "no flat truncation up to the relaxation order";
    return res;
  }
  const int r = ranks[static_cast<std::size_t>(t)];
  res.certificate.t = t;
  res.certificate.r = r;
  auto fail = [&](const std::string& why) {
    res.status = ExtractStatus::extraction_failure;
    res.message = why;
    return res;
  };
  if (r == 0) return fail("moment matrix is zero");

  const int n = index.nvars();
  Eigen::MatrixXd u = psd_factor(moment_matrix(y, t, index), r);
  const std::vector<int> pivots = column_echelon(u, std::sqrt(opts.tol_rank));
  if (static_cast<int>(pivots.size()) != r) return fail("column echelon form is rank deficient");

  std::vector<Eigen::MatrixXd> mult(static_cast<std::size_t>(n), Eigen::MatrixXd(r, r));
  for (int j = 0; j < r; ++j) {
    const Monomial& b = index.monomial(pivots[static_cast<std::size_t>(j)]);
    if (b.degree() >= t) return fail("basis monomial of full degree; cannot form multiplication matrices");
    for (int i = 0; i < n; ++i)
      mult[static_cast<std::size_t>(i)].row(j) = u.row(index.position(b * Monomial::variable(n, i)));
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = unit(rng);
  lambda /= lambda.sum();
  Eigen::MatrixXd comb = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < n; ++i) comb += lambda(i) * mult[static_cast<std::size_t>(i)];

  Eigen::RealSchur<Eigen::MatrixXd> schur(comb);
  if (schur.info() != Eigen::Success) return fail("real Schur decomposition did not converge");
  const Eigen::MatrixXd& q = schur.matrixU();

  AtomSet& atoms = res.atoms;
  for (int j = 0; j < r; ++j) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = q.col(j).dot(mult[static_cast<std::size_t>(i)] * q.col(j));
    atoms.atoms.push_back(p);
  }

  double radius = 0.0;
  for (const auto& p : atoms.atoms) radius = std::max(radius, p.norm());
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      if ((atoms.atoms[static_cast<std::size_t>(a)] - atoms.atoms[static_cast<std::size_t>(b)]).norm() <=
          1e-6 * (1.0 + radius))
        return fail("extracted atoms coincide");

  const int rows = index.prefix_size(t);
  Eigen::MatrixXd vand(rows, r);
  for (int j = 0; j < r; ++j) {
    const auto& p = atoms.atoms[static_cast<std::size_t>(j)];
    vand.col(j) = dirac_moments(index, std::span<const double>(p.data(), static_cast<std::size_t>(n))).head(rows);
  }
  Eigen::VectorXd w = vand.colPivHouseholderQr().solve(y.head(rows));
  w = w.cwiseMax(0.0);
  if (!(w.sum() > 0.0)) return fail("all atom weights vanished");
  w /= w.sum();
  atoms.weights.assign(w.data(), w.data() + r);

  res.status = ExtractStatus::ok;
  return res;
}

MomentVector atomic_moments(const MomentIndex& index, const AtomSet& atoms) {
  MomentVector y = MomentVector::Zero(index.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const auto& p = atoms.atoms[j];
    y += atoms.weights[j] * dirac_moments(index, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  }
  return y;
}

CertReport certify(const AtomSet& atoms, const Polynomial& f, const MatrixPolynomial& g,
                   const MatrixPolynomial* theta, double bound, const CertifyTolerances& tols) {
  CertReport rep;
  if (atoms.size() == 0) return rep;
  rep.verdict = Verdict::certified;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    AtomCertificate c;
    c.point = atoms.atoms[j];
    c.weight = j < atoms.weights.size() ? atoms.weights[j] : 0.0;
    const std::span<const double> u(c.point.data(), static_cast<std::size_t>(c.point.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.evaluate(u), Eigen::EigenvaluesOnly);
    c.min_eig_g = es.eigenvalues()(0);
    c.value = f.evaluate(u);
    c.gap = std::abs(c.value - bound);
    if (theta) c.kkt = kkt_residual(f, g, *theta, u);

    if (c.min_eig_g < -tols.feas) {
      c.verdict = Verdict::rejected;
    } else if (!(c.gap <= tols.gap * (1.0 + std::abs(bound))) ||
               (c.kkt && std::max({c.kkt->grad, c.kkt->comp, c.kkt->psd_viol}) > tols.kkt)) {
      c.verdict = Verdict::suspect;
    } else {
      c.verdict = Verdict::certified;
    }
    rep.verdict = std::max(rep.verdict, c.verdict);
    rep.weighted_value += c.weight * c.value;
    rep.atoms.push_back(std::move(c));
  }
  return rep;
}

}  // namespace mposos
