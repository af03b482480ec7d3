#pragma once

#include <optional>
#include <string>

#include "mposos/extract.hpp"
#include "mposos/lme.hpp"
#include "mposos/problem.hpp"
#include "mposos/relax.hpp"
#include "mposos/sdp.hpp"

namespace mposos {

/// Theta used by the strengthened relaxation: the problem's override when
/// present, otherwise a synthesized LME.
struct ThetaChoice {
  std::optional<MatrixPolynomial> theta;
  bool from_override = false;
  LmeResult lme;  // empty when overridden
};

ThetaChoice choose_theta(const ProblemSpec& spec, const LmeOptions& opts = {});

struct PipelineOptions {
  SolverSettings solver;
  ExtractOptions extract;
  CertifyTolerances cert;
  bool extract_atoms = true;
};

struct OrderResult {
  RelaxationKind kind = RelaxationKind::standard;
  int order = 0;
  int min_order = 0;
  bool below_min = false;  // nothing was solved
  RelaxationMeta meta;
  SolveReport report;
  std::optional<ExtractResult> extraction;
  std::optional<CertReport> certificate;
  double seconds = 0.0;  // assembly + solve
};

/// Builds and solves one relaxation, then extracts and certifies atoms when
/// the solve converged. `theta` is required for the strengthened kind.
OrderResult solve_order(const ProblemSpec& spec, RelaxationKind kind, int k, const MatrixPolynomial* theta,
                        const PipelineOptions& opts = {});

}  // namespace mposos
