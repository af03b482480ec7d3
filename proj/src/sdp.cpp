#include "mposos/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mposos {

SolverSettings SolverSettings::from_environment(SolverSettings base) {
  if (const char* env = std::getenv("MPOSOS_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) {
      base.feas_tol = v;
      base.gap_tol = v;
    }
  }
  return base;
}

SolverSettings SolverSettings::from_environment() { return from_environment(SolverSettings{}); }

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::near_optimal: return "near_optimal";
    case SolveStatus::primal_infeasible: return "primal_infeasible";
    case SolveStatus::dual_infeasible_unbounded: return "dual_infeasible_unbounded";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

double SolveReport::bound() const {
  if (unbounded()) return -std::numeric_limits<double>::infinity();
  return primal_obj;
}

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

// y = y_p + E z, with E selecting the free coordinates and, when rows other
// than single-entry fixings exist, mapping through a null-space basis.
struct Reduction {
  int ny = 0;
  Eigen::VectorXd yp;
  std::vector<int> free;
  std::vector<int> slot;  // y coordinate -> position in `free`, or -1
  Eigen::MatrixXd basis;  // free.size() x nz; unused when identity
  bool identity = true;
  int nz = 0;
  bool consistent = true;
  double residual = 0.0;

  Eigen::VectorXd lift(const Eigen::VectorXd& z) const {
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(ny);
    if (identity) {
      for (std::size_t i = 0; i < free.size(); ++i) dy(free[i]) = z(static_cast<Eigen::Index>(i));
    } else {
      const Eigen::VectorXd w = basis * z;
      for (std::size_t i = 0; i < free.size(); ++i) dy(free[i]) = w(static_cast<Eigen::Index>(i));
    }
    return dy;
  }

  Eigen::VectorXd restrict(const Eigen::VectorXd& gy) const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) w(static_cast<Eigen::Index>(i)) = gy(free[i]);
    if (identity) return w;
    return basis.transpose() * w;
  }

  Eigen::MatrixXd restrict(const Eigen::MatrixXd& h_free) const {
    if (identity) return h_free;
    return basis.transpose() * h_free * basis;
  }
};

Reduction reduce_equalities(const ConicProblem& p) {
  Reduction red;
  red.ny = p.num_vars();
  red.yp = Eigen::VectorXd::Zero(red.ny);
  std::vector<char> fixed(static_cast<std::size_t>(red.ny), 0);

  std::vector<const LinearRow*> general;
  for (const auto& row : p.equalities) {
    if (row.coeffs.size() == 1) {
      const auto [pos, c] = row.coeffs.front();
      const double v = row.rhs / c;
      if (fixed[static_cast<std::size_t>(pos)]) {
        if (std::abs(red.yp(pos) - v) > 1e-12 * (1.0 + std::abs(v))) red.consistent = false;
      } else {
        fixed[static_cast<std::size_t>(pos)] = 1;
        red.yp(pos) = v;
      }
    } else if (!row.coeffs.empty()) {
      general.push_back(&row);
    } else if (std::abs(row.rhs) > 0.0) {
      red.consistent = false;
    }
  }

  red.slot.assign(static_cast<std::size_t>(red.ny), -1);
  for (int i = 0; i < red.ny; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) {
      red.slot[static_cast<std::size_t>(i)] = static_cast<int>(red.free.size());
      red.free.push_back(i);
    }
  }
  const int nfree = static_cast<int>(red.free.size());

  if (!general.empty() && nfree > 0) {
    const int r = static_cast<int>(general.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, nfree);
    Eigen::VectorXd b(r);
    for (int i = 0; i < r; ++i) {
      double rhs = general[static_cast<std::size_t>(i)]->rhs;
      for (const auto& [pos, c] : general[static_cast<std::size_t>(i)]->coeffs) {
        const int s = red.slot[static_cast<std::size_t>(pos)];
        if (s < 0)
          rhs -= c * red.yp(pos);
        else
          a(i, s) += c;
      }
      b(i) = rhs;
    }
    // A^T P = Q R; the trailing columns of Q span the null space of A.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    qr.setThreshold(1e-10);
    qr.compute(a.transpose());
    const int rank = static_cast<int>(qr.rank());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nfree, nfree);
    if (rank > 0) {
      const Eigen::VectorXd pb = qr.colsPermutation().transpose() * b;
      const Eigen::MatrixXd r11 = qr.matrixR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
      const Eigen::VectorXd u1 = r11.transpose().triangularView<Eigen::Lower>().solve(pb.head(rank));
      const Eigen::VectorXd w = q.leftCols(rank) * u1;
      for (int i = 0; i < nfree; ++i) red.yp(red.free[static_cast<std::size_t>(i)]) = w(i);
    }
    red.basis = q.rightCols(nfree - rank);
    red.identity = false;
    red.nz = nfree - rank;
  } else {
    red.nz = nfree;
    if (!general.empty()) red.identity = true;
  }

  red.residual = p.equality_violation(red.yp);
  if (red.residual > 1e-9 * (1.0 + red.yp.cwiseAbs().maxCoeff())) red.consistent = false;
  return red;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double frobenius(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Blocks evaluate_blocks(const ConicProblem& p, const Eigen::VectorXd& y) {
  Blocks out;
  out.reserve(p.blocks.size());
  for (const auto& b : p.blocks) out.push_back(b.evaluate(y));
  return out;
}

Eigen::VectorXd adjoint(const ConicProblem& p, const Blocks& w) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.num_vars());
  for (std::size_t i = 0; i < p.blocks.size(); ++i) p.blocks[i].add_adjoint(w[i], g);
  return g;
}

double min_eigenvalue(const Blocks& a) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : a) {
    if (m.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

// Coefficient matrices A_alpha of one block grouped by alpha, both triangles listed.
struct BlockPattern {
  std::vector<int> alpha;
  std::vector<int> start;
  std::vector<int> row;
  std::vector<int> col;
  std::vector<double> val;
  // Upper triangle only, off-diagonal values doubled.
  std::vector<int> ustart;
  std::vector<int> uoffset;  // row * dim + col
  std::vector<double> uval;
};

BlockPattern block_pattern(const LocalizingBlock& blk) {
  BlockPattern pat;
  const int dim = blk.dim();
  for (const auto& e : blk.entries()) {
    if (pat.alpha.empty() || pat.alpha.back() != e.alpha) {
      pat.alpha.push_back(e.alpha);
      pat.start.push_back(static_cast<int>(pat.row.size()));
      pat.ustart.push_back(static_cast<int>(pat.uval.size()));
    }
    pat.uoffset.push_back(e.row * dim + e.col);
    pat.uval.push_back(e.row == e.col ? e.value : 2.0 * e.value);
    pat.row.push_back(e.row);
    pat.col.push_back(e.col);
    pat.val.push_back(e.value);
    if (e.row != e.col) {
      pat.row.push_back(e.col);
      pat.col.push_back(e.row);
      pat.val.push_back(e.value);
    }
  }
  pat.start.push_back(static_cast<int>(pat.row.size()));
  pat.ustart.push_back(static_cast<int>(pat.uval.size()));
  return pat;
}

// acc(slot[alpha], slot[beta]) += tr(A_alpha X A_beta T). For each alpha the
// product Z = T A_alpha X is formed densely, then tr(A_beta Z) is gathered.
// When X and T are the same matrix, Z and the result are symmetric and only
// the upper triangles are visited.
void accumulate_block_schur(const BlockPattern& pat, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                            const std::vector<int>& slot, Eigen::MatrixXd& acc) {
  const auto dim = x.rows();
  const std::size_t groups = pat.alpha.size();
  const bool same = x.data() == t.data();
  std::vector<int> gslot(groups);
  for (std::size_t g = 0; g < groups; ++g) gslot[g] = slot[static_cast<std::size_t>(pat.alpha[g])];

  Eigen::MatrixXd tc;
  Eigen::MatrixXd xr;
  Eigen::MatrixXd z(dim, dim);
  for (std::size_t g = 0; g < groups; ++g) {
    const int sa = gslot[g];
    if (sa < 0) continue;
    const int lo = pat.start[g];
    const int cnt = pat.start[g + 1] - lo;
    tc.resize(dim, cnt);
    xr.resize(cnt, dim);
    for (int e = 0; e < cnt; ++e) {
      const auto k = static_cast<std::size_t>(lo + e);
      tc.col(e) = t.col(pat.row[k]);
      xr.row(e) = pat.val[k] * x.row(pat.col[k]);
    }
    z.noalias() = tc * xr;
    const double* zd = z.data();
    if (same) {
      for (std::size_t h = g; h < groups; ++h) {
        const int sb = gslot[h];
        if (sb < 0) continue;
        double sum = 0.0;
        for (int k = pat.ustart[h]; k < pat.ustart[h + 1]; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          sum += pat.uval[kk] * zd[pat.uoffset[kk]];
        }
        acc(sa, sb) += sum;
        if (h != g) acc(sb, sa) += sum;
      }
      continue;
    }
    for (std::size_t h = 0; h < groups; ++h) {
      const int sb = gslot[h];
      if (sb < 0) continue;
      double sum = 0.0;
      for (int k = pat.start[h]; k < pat.start[h + 1]; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        sum += pat.val[kk] * zd[static_cast<std::size_t>(pat.row[kk]) * static_cast<std::size_t>(dim) + pat.col[kk]];
      }
      acc(sa, sb) += sum;
    }
  }
}

// Nesterov-Todd scaling of one block: R^T X R = diag(lambda) = R^{-1} S R^{-T}.
struct NtScaling {
  Eigen::MatrixXd r;
  Eigen::MatrixXd rinv;
  Eigen::MatrixXd winv;  // R^{-T} R^{-1}
  Eigen::VectorXd lambda;
};

bool nt_scaling(const Eigen::MatrixXd& s, const Eigen::MatrixXd& x, NtScaling& out) {
  Eigen::LLT<Eigen::MatrixXd> ls(s);
  Eigen::LLT<Eigen::MatrixXd> lx(x);
  if (ls.info() != Eigen::Success || lx.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l1 = ls.matrixL();
  const Eigen::MatrixXd l2 = lx.matrixL();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(l2.transpose() * l1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.lambda = svd.singularValues();
  if (!(out.lambda.minCoeff() > 0.0) || !out.lambda.allFinite()) return false;
  const Eigen::VectorXd isq = out.lambda.cwiseSqrt().cwiseInverse();
  out.r = l1 * svd.matrixV() * isq.asDiagonal();
  out.rinv = isq.asDiagonal() * svd.matrixU().transpose() * l2.transpose();
  out.winv = out.rinv.transpose() * out.rinv;
  return true;
}

// Largest step keeping diag(lambda) + step * d positive semidefinite.
double scaled_max_step(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& d) {
  const Eigen::VectorXd isq = lambda.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd m = isq.asDiagonal() * d * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(m), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo < 0.0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

// Solves diag(lambda) o V = rc for V, where A o B = (AB + BA) / 2.
Eigen::MatrixXd lyapunov_solve(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& rc) {
  Eigen::MatrixXd v = rc;
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) *= 2.0 / (lambda(i) + lambda(j));
  return v;
}

Eigen::MatrixXd jordan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return sym(a * b); }

struct Direction {
  Eigen::VectorXd dp;
  Blocks ds;
  Blocks dx;
  double dtau = 0.0;
  double dkappa = 0.0;
};

class Solver {
 public:
  Solver(const ConicProblem& p, const SolverSettings& settings) : p_(p), settings_(settings) {}

  SolveReport run();

 private:
  SolveReport finish(SolveReport rep, const Eigen::VectorXd& y);
  Eigen::MatrixXd reduced_schur(const Blocks& x, const Blocks& t) const;
  Blocks apply(const Eigen::VectorXd& p) const { return evaluate_blocks(p_, red_.lift(p)); }
  Eigen::VectorXd apply_adjoint(const Blocks& w) const { return red_.restrict(adjoint(p_, w)); }

  const ConicProblem& p_;
  SolverSettings settings_;
  Reduction red_;
  std::vector<BlockPattern> patterns_;
  std::chrono::steady_clock::time_point start_;
};

Eigen::MatrixXd Solver::reduced_schur(const Blocks& x, const Blocks& t) const {
  const int nfree = static_cast<int>(red_.free.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nfree, nfree);
  for (std::size_t i = 0; i < p_.blocks.size(); ++i) accumulate_block_schur(patterns_[i], x[i], t[i], red_.slot, acc);
  const Eigen::MatrixXd h = 0.5 * (acc + acc.transpose());
  return red_.restrict(h);
}

SolveReport Solver::finish(SolveReport rep, const Eigen::VectorXd& y) {
  rep.y = y;
  rep.equality_violation = p_.equality_violation(y);
  rep.min_block_eigenvalue = min_eigenvalue(evaluate_blocks(p_, y));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  if (rep.unbounded()) {
    rep.primal_obj = -std::numeric_limits<double>::infinity();
    rep.dual_obj = -std::numeric_limits<double>::infinity();
  }
  return rep;
}

// Homogeneous self-dual embedding of
//   min c.p + c0  s.t.  S = F0 + A(p) >= 0      and its dual
//   max c0 - <F0, X>  s.t.  A^*(X) = c, X >= 0,
// solved with Nesterov-Todd scaling and a Mehrotra corrector.
SolveReport Solver::run() {
  start_ = std::chrono::steady_clock::now();
  SolveReport rep;
  red_ = reduce_equalities(p_);
  for (const auto& b : p_.blocks) patterns_.push_back(block_pattern(b));
  if (!red_.consistent) {
    rep.status = SolveStatus::primal_infeasible;
    rep.message = "equality constraints are inconsistent";
    rep.primal_obj = std::numeric_limits<double>::infinity();
    rep.dual_obj = std::numeric_limits<double>::infinity();
    return finish(rep, red_.yp);
  }

  const double c0 = p_.cost.dot(red_.yp);
  const Eigen::VectorXd c = red_.restrict(p_.cost);
  const Blocks f0 = evaluate_blocks(p_, red_.yp);
  const int nz = red_.nz;
  int nu = 0;
  for (const auto& b : p_.blocks) nu += b.dim();

  if (nz == 0 || nu == 0) {
    const double lo = min_eigenvalue(f0);
    rep.primal_obj = rep.dual_obj = c0;
    if (nu == 0 && nz > 0 && c.norm() > 0.0) {
      rep.status = SolveStatus::dual_infeasible_unbounded;
      rep.message = "no conic constraints and a nonzero free objective";
    } else if (nu > 0 && lo < -settings_.feas_tol) {
      rep.status = SolveStatus::primal_infeasible;
      rep.message = "fixed moments violate a PSD block";
    } else {
      rep.status = SolveStatus::optimal;
    }
    return finish(rep, red_.yp);
  }

  const std::size_t nb = p_.blocks.size();
  const double f0_norm = frobenius(f0);
  const double c_norm = c.norm();
  constexpr double kInfeasTol = 1e-8;
  constexpr int kNoProgress = 12;

  Eigen::VectorXd p = Eigen::VectorXd::Zero(nz);
  Blocks s;
  Blocks x;
  for (const auto& b : p_.blocks) {
    s.push_back(Eigen::MatrixXd::Identity(b.dim(), b.dim()));
    x.push_back(Eigen::MatrixXd::Identity(b.dim(), b.dim()));
  }
  double tau = 1.0;
  double kappa = 1.0;

  struct Best {
    double merit = std::numeric_limits<double>::infinity();
    Eigen::VectorXd y;
    double pobj = 0, dobj = 0, pinf = 0, dinf = 0, gap = 0;
    int iter = 0;
  } best;

  int stalled = 0;
  std::vector<NtScaling> nt(nb);

  for (int iter = 0;; ++iter) {
    const Blocks ap = apply(p);
    Blocks rp(nb);
    for (std::size_t i = 0; i < nb; ++i) rp[i] = s[i] - tau * f0[i] - ap[i];
    const Eigen::VectorXd rd = apply_adjoint(x) - tau * c;
    const double f0x = inner(f0, x);
    const double cp = c.dot(p);
    const double rg = kappa + cp + f0x;
    const double sx = inner(s, x);
    const double mu = (sx + tau * kappa) / (nu + 1);

    const double pobj = c0 + cp / tau;
    const double dobj = c0 - f0x / tau;
    const double pinf = frobenius(rp) / tau / (1.0 + f0_norm);
    const double dinf = rd.norm() / tau / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    const Eigen::VectorXd y = red_.yp + red_.lift(p / tau);

    rep.iterations = iter;
    rep.primal_obj = pobj;
    rep.dual_obj = dobj;
    rep.primal_infeasibility = pinf;
    rep.dual_infeasibility = dinf;
    rep.relative_gap = gap;

    if (settings_.verbosity > 0) {
      std::fprintf(stderr, "%3d  pobj % .9e  dobj % .9e  pinf %.2e  dinf %.2e  gap %.2e  tau %.2e  kappa %.2e\n", iter,
                   pobj, dobj, pinf, dinf, gap, tau, kappa);
    }

    const double merit =
        std::max({pinf / settings_.feas_tol, dinf / settings_.feas_tol, gap / settings_.gap_tol});
    if (merit < best.merit && std::isfinite(merit)) {
      best = {merit, y, pobj, dobj, pinf, dinf, gap, iter};
    }
    if (merit <= 1.0) {
      rep.status = SolveStatus::optimal;
      return finish(rep, y);
    }

    // Improving ray: A(p) ~ S >= 0 with c.p < 0.
    if (cp < 0.0) {
      double ray = 0.0;
      for (std::size_t i = 0; i < nb; ++i) ray += (s[i] - ap[i]).squaredNorm();
      if (std::sqrt(ray) / -cp <= kInfeasTol && tau < 1e-3 * kappa) {
        rep.status = SolveStatus::dual_infeasible_unbounded;
        rep.message = "moment relaxation is unbounded below";
        return finish(rep, y);
      }
    }
    // Farkas certificate: X >= 0, A^*(X) = 0, <F0, X> < 0.
    if (f0x < 0.0) {
      const double ray = (rd + tau * c).norm();
      if (ray / -f0x <= kInfeasTol && tau < 1e-3 * kappa) {
        rep.status = SolveStatus::primal_infeasible;
        rep.message = "moment relaxation is infeasible";
        rep.primal_obj = rep.dual_obj = std::numeric_limits<double>::infinity();
        return finish(rep, y);
      }
    }

    auto stop = [&](SolveStatus otherwise, const char* why) {
      if (best.merit <= 1e3) {
        rep.status = SolveStatus::near_optimal;
        rep.iterations = iter;
        rep.primal_obj = best.pobj;
        rep.dual_obj = best.dobj;
        rep.primal_infeasibility = best.pinf;
        rep.dual_infeasibility = best.dinf;
        rep.relative_gap = best.gap;
        rep.message = why;
        return finish(rep, best.y);
      }
      rep.status = otherwise;
      rep.message = why;
      return finish(rep, y);
    };
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (stalled >= 3) return stop(SolveStatus::failed, "step lengths stalled");
    if (best.merit <= 1e3 && iter - best.iter >= kNoProgress) return stop(SolveStatus::failed, "no progress");
    if (iter >= settings_.max_iter || elapsed > settings_.time_limit)
      return stop(SolveStatus::max_iter, "iteration or time limit reached");

    bool scaled = true;
    for (std::size_t i = 0; i < nb && scaled; ++i) scaled = nt_scaling(s[i], x[i], nt[i]);
    if (!scaled) return stop(SolveStatus::failed, "iterates lost definiteness");

    Blocks winv(nb);
    for (std::size_t i = 0; i < nb; ++i) winv[i] = nt[i].winv;
    Eigen::MatrixXd h = reduced_schur(winv, winv);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) {
      const double shift = 1e-14 * std::max(1.0, h.diagonal().maxCoeff());
      for (double scale = 1.0; scale < 1e8 && llt.info() != Eigen::Success; scale *= 100.0) {
        Eigen::MatrixXd reg = h;
        reg.diagonal().array() += scale * shift;
        llt.compute(reg);
      }
      if (llt.info() != Eigen::Success) return stop(SolveStatus::failed, "Schur complement is singular");
    }
    auto schur_solve = [&](const Eigen::VectorXd& b) {
      Eigen::VectorXd v = llt.solve(b);
      Eigen::VectorXd r = b - h * v;
      double rn = r.norm();
      for (int k = 0; k < 6 && rn > 1e-15 * b.norm(); ++k) {
        const Eigen::VectorXd w = v + llt.solve(r);
        const Eigen::VectorXd rw = b - h * w;
        if (!(rw.norm() < rn)) break;
        v = w;
        r = rw;
        rn = r.norm();
      }
      return v;
    };

    Blocks f0w(nb);
    double f0w_f0 = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      f0w[i] = winv[i] * f0[i] * winv[i];
      f0w_f0 += f0w[i].cwiseProduct(f0[i]).sum();
    }
    const Eigen::VectorXd g = apply_adjoint(f0w);
    const Eigen::VectorXd p2 = schur_solve(g + c);
    const double den = kappa / tau + (c - g).dot(p2) + f0w_f0;

    // rc is the scaled complementarity target (one matrix per block).
    auto direction = [&](double eta, const Blocks& rc, double rtau) {
      Direction d;
      Blocks bmat(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        const Eigen::MatrixXd v = lyapunov_solve(nt[i].lambda, rc[i]);
        bmat[i] = nt[i].r * v * nt[i].r.transpose() + eta * rp[i];
      }
      Blocks wbw(nb);
      for (std::size_t i = 0; i < nb; ++i) wbw[i] = winv[i] * bmat[i] * winv[i];
      const Eigen::VectorXd b1 = apply_adjoint(wbw) + eta * rd;
      const Eigen::VectorXd p1 = schur_solve(b1);
      const double num = rtau / tau + (c - g).dot(p1) + inner(f0w, bmat) + eta * rg;
      d.dtau = num / den;
      d.dp = p1 - d.dtau * p2;
      const Blocks adp = apply(d.dp);
      d.dx.resize(nb);
      d.ds.resize(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        d.dx[i] = sym(winv[i] * (bmat[i] - d.dtau * f0[i] - adp[i]) * winv[i]);
        d.ds[i] = sym(adp[i] + d.dtau * f0[i] - eta * rp[i]);
      }
      d.dkappa = (rtau - kappa * d.dtau) / tau;
      return d;
    };

    auto max_alpha = [&](const Direction& d, Blocks* sds, Blocks* sdx) {
      double a = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nb; ++i) {
        Eigen::MatrixXd ds_s = nt[i].rinv * d.ds[i] * nt[i].rinv.transpose();
        Eigen::MatrixXd dx_s = nt[i].r.transpose() * d.dx[i] * nt[i].r;
        a = std::min({a, scaled_max_step(nt[i].lambda, ds_s), scaled_max_step(nt[i].lambda, dx_s)});
        if (sds) (*sds)[i] = std::move(ds_s);
        if (sdx) (*sdx)[i] = std::move(dx_s);
      }
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // Predictor.
    Blocks rc(nb);
    for (std::size_t i = 0; i < nb; ++i) rc[i] = -Eigen::MatrixXd(nt[i].lambda.cwiseAbs2().asDiagonal());
    const Direction aff = direction(1.0, rc, -tau * kappa);
    Blocks sds(nb);
    Blocks sdx(nb);
    const double a_aff = std::min(1.0, max_alpha(aff, &sds, &sdx));
    const double sigma = std::pow(1.0 - a_aff, 3.0);

    // Corrector.
    for (std::size_t i = 0; i < nb; ++i) {
      rc[i].diagonal().array() += sigma * mu;
      rc[i] -= jordan(sds[i], sdx[i]);
    }
    const Direction d = direction(1.0 - sigma, rc, sigma * mu - tau * kappa - aff.dtau * aff.dkappa);
    double alpha = std::min(1.0, 0.99 * max_alpha(d, nullptr, nullptr));
    if (!(alpha > 0.0) || !d.dp.allFinite()) return stop(SolveStatus::failed, "search direction is not finite");

    // Rounding near the boundary can leave a block indefinite; back off.
    Blocks s_new(nb);
    Blocks x_new(nb);
    bool inside = false;
    for (int tries = 0; tries < 30 && !inside; ++tries, alpha *= 0.5) {
      inside = true;
      for (std::size_t i = 0; i < nb && inside; ++i) {
        s_new[i] = sym(s[i] + alpha * d.ds[i]);
        x_new[i] = sym(x[i] + alpha * d.dx[i]);
        inside = Eigen::LLT<Eigen::MatrixXd>(s_new[i]).info() == Eigen::Success &&
                 Eigen::LLT<Eigen::MatrixXd>(x_new[i]).info() == Eigen::Success;
      }
      if (inside) break;
    }
    if (!inside) return stop(SolveStatus::failed, "iterates lost definiteness");
    stalled = alpha < 1e-8 ? stalled + 1 : 0;

    p += alpha * d.dp;
    s = std::move(s_new);
    x = std::move(x_new);
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }
}

}  // namespace

Eigen::MatrixXd schur_complement(const ConicProblem& problem, const std::vector<Eigen::MatrixXd>& x,
                                 const std::vector<Eigen::MatrixXd>& t, const std::vector<int>& coords) {
  std::vector<int> slot(static_cast<std::size_t>(problem.num_vars()), -1);
  for (std::size_t i = 0; i < coords.size(); ++i) slot[static_cast<std::size_t>(coords[i])] = static_cast<int>(i);
  const auto n = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < problem.blocks.size(); ++i)
    accumulate_block_schur(block_pattern(problem.blocks[i]), x[i], t[i], slot, acc);
  return acc;
}

SolveReport InteriorPointBackend::solve(const ConicProblem& problem, const SolverSettings& settings) const {
  if (!problem.index) throw std::invalid_argument("conic problem has no moment index");
  if (problem.cost.size() != problem.num_vars()) throw std::invalid_argument("cost vector has wrong length");
  return Solver(problem, settings).run();
}

SolveReport solve(const ConicProblem& problem, const SolverSettings& settings) {
  return InteriorPointBackend().solve(problem, settings);
}

namespace {

std::string sdpa_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_sdpa(const ConicProblem& problem, std::ostream& out) {
  const int ny = problem.num_vars();
  std::vector<char> fixed(static_cast<std::size_t>(ny), 0);
  Eigen::VectorXd value = Eigen::VectorXd::Zero(ny);
  std::vector<const LinearRow*> general;
  for (const auto& row : problem.equalities) {
    if (row.coeffs.size() == 1 && !fixed[static_cast<std::size_t>(row.coeffs[0].first)]) {
      fixed[static_cast<std::size_t>(row.coeffs[0].first)] = 1;
      value(row.coeffs[0].first) = row.rhs / row.coeffs[0].second;
    } else {
      general.push_back(&row);
    }
  }
  std::vector<int> var_of(static_cast<std::size_t>(ny), -1);
  std::vector<int> vars;
  for (int i = 0; i < ny; ++i)
    if (!fixed[static_cast<std::size_t>(i)]) {
      var_of[static_cast<std::size_t>(i)] = static_cast<int>(vars.size()) + 1;
      vars.push_back(i);
    }
  // A fully fixed problem keeps its fixings as variables so the file stays valid.
  if (vars.empty()) {
    general.clear();
    for (const auto& row : problem.equalities) general.push_back(&row);
    for (int i = 0; i < ny; ++i) {
      fixed[static_cast<std::size_t>(i)] = 0;
      value(i) = 0.0;
      var_of[static_cast<std::size_t>(i)] = i + 1;
      vars.push_back(i);
    }
  }

  const int nblocks = static_cast<int>(problem.blocks.size()) + (general.empty() ? 0 : 1);
  out << "\"mposos moment relaxation: min c.x s.t. sum x_i F_i - F0 >= 0; "
      << "equalities as paired LP rows; objective constant " << sdpa_number(problem.cost.dot(value)) << "\n";
  out << vars.size() << "\n" << nblocks << "\n";
  for (const auto& b : problem.blocks) out << b.dim() << " ";
  if (!general.empty()) out << -2 * static_cast<int>(general.size());
  out << "\n";
  for (std::size_t i = 0; i < vars.size(); ++i) out << (i ? " " : "") << sdpa_number(problem.cost(vars[i]));
  out << "\n";

  // (matrix, block, row, col) -> value; row <= col, 1-based.
  std::map<std::tuple<int, int, int, int>, double> entries;
  for (std::size_t bi = 0; bi < problem.blocks.size(); ++bi) {
    const int blk = static_cast<int>(bi) + 1;
    for (const auto& e : problem.blocks[bi].entries()) {
      const int var = var_of[static_cast<std::size_t>(e.alpha)];
      if (var > 0)
        entries[{var, blk, e.row + 1, e.col + 1}] += e.value;
      else
        entries[{0, blk, e.row + 1, e.col + 1}] -= e.value * value(e.alpha);
    }
  }
  if (!general.empty()) {
    const int blk = nblocks;
    for (std::size_t r = 0; r < general.size(); ++r) {
      const int up = 2 * static_cast<int>(r) + 1;
      const int down = up + 1;
      double rhs = general[r]->rhs;
      for (const auto& [pos, c] : general[r]->coeffs) {
        const int var = var_of[static_cast<std::size_t>(pos)];
        if (var > 0) {
          entries[{var, blk, up, up}] += c;
          entries[{var, blk, down, down}] -= c;
        } else {
          rhs -= c * value(pos);
        }
      }
      entries[{0, blk, up, up}] += rhs;
      entries[{0, blk, down, down}] -= rhs;
    }
  }
  for (const auto& [key, v] : entries) {
    if (v == 0.0) continue;
    const auto [mat, blk, i, j] = key;
    out << mat << " " << blk << " " << i << " " << j << " " << sdpa_number(v) << "\n";
  }
}

void export_sdpa(const ConicProblem& problem, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  export_sdpa(problem, f);
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace mposos
