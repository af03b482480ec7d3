#include "mposos/pipeline.hpp"

#include <chrono>

namespace mposos {

ThetaChoice choose_theta(const ProblemSpec& spec, const LmeOptions& opts) {
  ThetaChoice out;
  if (spec.theta) {
    out.theta = spec.theta;
    out.from_override = true;
    return out;
  }
  out.lme = synthesize_lme(spec.objective, spec.g, opts);
  if (out.lme.solution) out.theta = out.lme.solution->theta;
  return out;
}

OrderResult solve_order(const ProblemSpec& spec, RelaxationKind kind, int k, const MatrixPolynomial* theta,
                        const PipelineOptions& opts) {
  if (kind == RelaxationKind::strengthened && !theta) throw std::invalid_argument("strengthened relaxation needs theta");
  OrderResult res;
  res.kind = kind;
  res.order = k;
  res.min_order = minimal_order(kind, spec.objective, spec.g, theta);
  if (k < res.min_order) {
    res.below_min = true;
    return res;
  }

  const auto start = std::chrono::steady_clock::now();
  Relaxation rel = build_relaxation(kind, spec.objective, spec.g, theta, k);
  res.meta = rel.meta;
  res.report = solve(rel.problem, opts.solver);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (opts.extract_atoms && res.report.converged()) {
    res.extraction = flat_extract(res.report.y, *rel.problem.index, k, flat_gap(spec.g), opts.extract);
    if (res.extraction->ok())
      res.certificate = certify(res.extraction->atoms, spec.objective, spec.g,
                                kind == RelaxationKind::strengthened ? theta : nullptr, res.report.primal_obj,
                                opts.cert);
  }
  return res;
}

}  // namespace mposos
