#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mposos/lme.hpp"
#include "mposos/relax.hpp"

namespace mposos {

/// Number of singular values above tol_rank * sigma_max (0 for the zero matrix).
int numeric_rank(const Eigen::MatrixXd& m, double tol_rank);

/// Numerical ranks of M_0[y], ..., M_k[y].
std::vector<int> rank_profile(const MomentVector& y, const MomentIndex& index, int k, double tol_rank);

struct FlatCertificate {
  int t = 0;
  int r = 0;
  std::vector<int> ranks;  // rank M_s for s = 0..k
};

struct AtomSet {
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
};

struct ExtractOptions {
  double tol_rank = 1e-6;
  std::uint64_t seed = 20240917;
};

enum class ExtractStatus { ok, no_flat, extraction_failure };

const char* to_string(ExtractStatus s);

struct ExtractResult {
  ExtractStatus status = ExtractStatus::no_flat;
  FlatCertificate certificate;  // ranks are always filled in
  AtomSet atoms;
  std::string message;

  bool ok() const { return status == ExtractStatus::ok; }
};

/// Rank gap for flat truncation: max(1, ceil(deg G / 2)).
int flat_gap(const MatrixPolynomial& g);

/// Looks for the first t in [gap, k] with rank M_t = rank M_{t - gap} and
/// extracts the r atoms of the representing measure.
///
/// The basis monomials come from a column echelon form of a rank-r factor of
/// M_t; the multiplication matrices on that basis share the atoms as joint
/// eigenvalues, which are read off the real Schur form of a random convex
/// combination. Weights match the moments of degree <= t in least squares,
/// clipped at zero and renormalized.
ExtractResult flat_extract(const MomentVector& y, const MomentIndex& index, int k, int gap,
                           const ExtractOptions& opts = {});

/// Moments of sum_j w_j delta_{u_j} over `index`.
MomentVector atomic_moments(const MomentIndex& index, const AtomSet& atoms);

enum class Verdict { certified, suspect, rejected };

const char* to_string(Verdict v);

struct CertifyTolerances {
  double feas = 1e-4;  // lambda_min G(u) >= -feas
  double gap = 1e-4;   // |f(u) - bound| <= gap (1 + |bound|)
  double kkt = 1e-3;
};

struct AtomCertificate {
  Eigen::VectorXd point;
  double weight = 0.0;
  double min_eig_g = 0.0;
  double value = 0.0;  // f(u)
  double gap = 0.0;    // |f(u) - bound|
  std::optional<KktResidual> kkt;
  Verdict verdict = Verdict::rejected;
};

struct CertReport {
  std::vector<AtomCertificate> atoms;
  /// Worst verdict over the atoms; rejected when there are none.
  Verdict verdict = Verdict::rejected;
  /// sum_j w_j f(u_j).
  double weighted_value = 0.0;
};

/// An atom is rejected when G(u) is not PSD within tolerance, suspect when its
/// objective misses the bound or (with theta) its KKT residual is too large,
/// and certified otherwise.
CertReport certify(const AtomSet& atoms, const Polynomial& f, const MatrixPolynomial& g,
                   const MatrixPolynomial* theta, double bound, const CertifyTolerances& tols = {});

}  // namespace mposos
