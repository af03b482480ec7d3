#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mposos/relax.hpp"

namespace mposos {

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 100;
  double time_limit = 600.0;  // seconds
  int verbosity = 0;

  /// Applies MPOSOS_SOLVER_TOL (sets both tolerances) when it is present.
  static SolverSettings from_environment(SolverSettings base);
  static SolverSettings from_environment();
};

enum class SolveStatus {
  optimal,
  near_optimal,
  primal_infeasible,
  dual_infeasible_unbounded,
  max_iter,
  failed,
};

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::failed;
  MomentVector y;
  /// Moment relaxation value; -inf when unbounded below.
  double primal_obj = std::numeric_limits<double>::quiet_NaN();
  /// SOS (dual) bound; -inf when unbounded below.
  double dual_obj = std::numeric_limits<double>::quiet_NaN();
  double primal_infeasibility = 0.0;  // relative, PSD side
  double dual_infeasibility = 0.0;    // relative
  double relative_gap = 0.0;
  double min_block_eigenvalue = 0.0;
  double equality_violation = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string message;

  bool converged() const { return status == SolveStatus::optimal || status == SolveStatus::near_optimal; }
  bool unbounded() const { return status == SolveStatus::dual_infeasible_unbounded; }
  /// Lower bound to report: -inf when unbounded, else primal_obj.
  double bound() const;
};

/// Pluggable conic backend.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveReport solve(const ConicProblem& problem, const SolverSettings& settings) const = 0;
};

/// Primal-dual interior point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and a Mehrotra predictor-corrector.
/// Equalities are eliminated up front: rows fixing a single moment are
/// substituted and the rest are resolved through a null-space basis, so the
/// iteration runs over free coordinates z with y = y_p + E z. Infeasibility
/// and unboundedness are read off the embedding's certificates. Each call
/// owns its workspace, so distinct problems may be solved concurrently.
class InteriorPointBackend final : public SdpBackend {
 public:
  std::string name() const override { return "builtin-ipm"; }
  SolveReport solve(const ConicProblem& problem, const SolverSettings& settings) const override;
};

/// Solve with the built-in backend.
SolveReport solve(const ConicProblem& problem, const SolverSettings& settings = {});

/// Schur complement H[alpha, beta] = sum over blocks of tr(A_alpha X A_beta T)
/// for the moment coordinates listed in `coords`. `x` and `t` hold one dense
/// symmetric matrix per block. Exposed for testing against the direct formula.
Eigen::MatrixXd schur_complement(const ConicProblem& problem, const std::vector<Eigen::MatrixXd>& x,
                                 const std::vector<Eigen::MatrixXd>& t, const std::vector<int>& coords);

/// Writes the problem in SDPA sparse format (.dat-s).
///
/// Dialect: the SDPA variables are the moment coordinates that are not
/// fixed by a single-entry equality row; fixed coordinates are folded into
/// the constant matrix F0. Every remaining equality row a.y = b becomes a
/// 1x1 block pair encoded as one diagonal LP block holding a.y - b >= 0 and
/// b - a.y >= 0. The SDPA problem is min c.x s.t. sum_i x_i F_i - F0 >= 0; the
/// constant part of the objective is recorded in a header comment.
void export_sdpa(const ConicProblem& problem, std::ostream& out);
void export_sdpa(const ConicProblem& problem, const std::string& path);

}  // namespace mposos
