// Command-line driver: LME synthesis, relaxation solves, bound tables
// and the built-in example corpus.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mposos/expr_parser.hpp"
#include "mposos/oracle.hpp"
#include "mposos/pipeline.hpp"

namespace {

using namespace mposos;
using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kUsage = 2,
  kProblemError = 3,
  kLmeFailure = 4,
  kSolveFailure = 5,
  kExtractFailure = 6,
};

enum class Format { text, tsv, json };

struct Config {
  std::string problem;
  int order = -1;
  std::string orders;
  bool standard = false;
  bool strengthened = false;
  bool both = false;
  int lme_degree = -1;
  double tol_rank = 1e-6;
  double tol_lme = 1e-8;
  std::uint64_t seed = ExtractOptions{}.seed;
  std::string format = "text";
  std::string export_sdpa;
  bool oracle = false;
  bool slow = false;
  bool no_times = false;
  bool run = false;
};

// Relaxations with more moments than this are skipped in table and examples
// modes unless --slow is given.
constexpr int kSlowMoments = 2000;

Format parse_format(const std::string& s) {
  if (s == "tsv") return Format::tsv;
  if (s == "json") return Format::json;
  return Format::text;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-4 * std::pow(10.0, -digits + 4)))
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  else
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string point_text(const Eigen::VectorXd& u) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (i) s += ", ";
    s += fixed(u(i));
  }
  return s + ")";
}

json terms_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [mono, c] : p.terms()) out.push_back({{"coeff", c}, {"exp", mono.exponents()}});
  return out;
}

json matrix_json(const MatrixPolynomial& m, const std::vector<std::string>& names) {
  json terms = json::array();
  json text = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json trow = json::array();
    json srow = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      trow.push_back(terms_json(m(i, j)));
      srow.push_back(m(i, j).to_string(names));
    }
    terms.push_back(trow);
    text.push_back(srow);
  }
  return {{"terms", terms}, {"text", text}};
}

/// Short label for a relaxation outcome in tables.
std::string bound_cell(const OrderResult& r, bool skipped) {
  if (skipped) return "skipped";
  if (r.below_min) return "n/a";
  switch (r.report.status) {
    case SolveStatus::optimal:
    case SolveStatus::near_optimal: return fixed(r.report.primal_obj);
    case SolveStatus::dual_infeasible_unbounded: return "-inf";
    case SolveStatus::primal_infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::failed: return "failed";
  }
  return "?";
}

bool solve_failed(const OrderResult& r) {
  return !r.below_min && (r.report.status == SolveStatus::failed || r.report.status == SolveStatus::max_iter);
}

json report_json(const OrderResult& r, const std::vector<std::string>& names) {
  json j = {{"kind", to_string(r.kind)}, {"order", r.order}, {"min_order", r.min_order}};
  if (r.below_min) {
    j["status"] = "below_min_order";
    return j;
  }
  const auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v < 0 ? "-inf" : "inf";
  };
  j["status"] = to_string(r.report.status);
  j["bound"] = num(r.report.bound());
  j["primal_obj"] = num(r.report.primal_obj);
  j["dual_obj"] = num(r.report.dual_obj);
  j["primal_infeasibility"] = r.report.primal_infeasibility;
  j["dual_infeasibility"] = r.report.dual_infeasibility;
  j["relative_gap"] = r.report.relative_gap;
  j["iterations"] = r.report.iterations;
  j["seconds"] = r.seconds;
  j["message"] = r.report.message;
  j["block_dims"] = r.meta.block_dims;
  j["equality_rows"] = r.meta.equality_rows;
  if (r.extraction) {
    json e = {{"status", to_string(r.extraction->status)}, {"ranks", r.extraction->certificate.ranks}};
    if (r.extraction->ok()) {
      e["t"] = r.extraction->certificate.t;
      e["rank"] = r.extraction->certificate.r;
    }
    j["extraction"] = e;
  }
  if (r.certificate) {
    json atoms = json::array();
    for (const auto& a : r.certificate->atoms) {
      json aj = {{"point", std::vector<double>(a.point.data(), a.point.data() + a.point.size())},
                 {"weight", a.weight},
                 {"value", a.value},
                 {"min_eig_G", a.min_eig_g},
                 {"gap", a.gap},
                 {"verdict", to_string(a.verdict)}};
      if (a.kkt) aj["kkt"] = {{"grad", a.kkt->grad}, {"comp", a.kkt->comp}, {"psd_viol", a.kkt->psd_viol}};
      atoms.push_back(aj);
    }
    j["atoms"] = atoms;
    j["verdict"] = to_string(r.certificate->verdict);
  }
  (void)names;
  return j;
}

void print_text_report(std::ostream& os, const OrderResult& r) {
  os << "relaxation " << to_string(r.kind) << ", order " << r.order << " (minimum " << r.min_order << ")\n";
  if (r.below_min) {
    os << "  order below the minimum; not solved\n";
    return;
  }
  os << "  blocks";
  for (int d : r.meta.block_dims) os << ' ' << d;
  os << ", equality rows " << r.meta.equality_rows << "\n";
  os << "  status " << to_string(r.report.status) << ", bound " << fixed(r.report.bound()) << " (sos "
     << fixed(r.report.unbounded() ? r.report.bound() : r.report.dual_obj) << "), " << r.report.iterations
     << " iterations, " << fixed(r.seconds) << " s\n";
  if (!r.report.message.empty()) os << "  note: " << r.report.message << "\n";
  os << "  residuals: primal " << sci(r.report.primal_infeasibility) << ", dual " << sci(r.report.dual_infeasibility)
     << ", gap " << sci(r.report.relative_gap) << "\n";
  if (!r.extraction) return;
  const auto& ex = *r.extraction;
  os << "  rank profile";
  for (int k : ex.certificate.ranks) os << ' ' << k;
  os << "\n";
  if (!ex.ok()) {
    os << "  extraction: " << to_string(ex.status) << " (" << ex.message << ")\n";
    return;
  }
  os << "  flat truncation at t = " << ex.certificate.t << ", rank " << ex.certificate.r << "\n";
  for (const auto& a : r.certificate->atoms) {
    os << "  atom " << point_text(a.point) << "  weight " << fixed(a.weight) << "  f = " << fixed(a.value)
       << "  lambda_min(G) = " << sci(a.min_eig_g);
    if (a.kkt) os << "  kkt = " << sci(std::max({a.kkt->grad, a.kkt->comp, a.kkt->psd_viol}));
    os << "  " << to_string(a.verdict) << "\n";
  }
  os << "  verdict " << to_string(r.certificate->verdict) << "\n";
}

bool parse_range(const std::string& s, int& lo, int& hi) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(s);
    } else {
      lo = std::stoi(s.substr(0, dots));
      hi = std::stoi(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return false;
  }
  return lo >= 0 && lo <= hi;
}

std::vector<RelaxationKind> kinds_of(const Config& cfg, bool default_both) {
  if (cfg.both || (cfg.standard && cfg.strengthened)) return {RelaxationKind::standard, RelaxationKind::strengthened};
  if (cfg.standard) return {RelaxationKind::standard};
  if (cfg.strengthened) return {RelaxationKind::strengthened};
  if (default_both) return {RelaxationKind::standard, RelaxationKind::strengthened};
  return {RelaxationKind::strengthened};
}

LmeOptions lme_options(const Config& cfg) {
  LmeOptions o;
  o.tol = cfg.tol_lme;
  if (cfg.lme_degree >= 0) {
    o.ell_start = cfg.lme_degree;
    o.ell_max = std::max(cfg.lme_degree, o.ell_max);
  }
  return o;
}

PipelineOptions pipeline_options(const Config& cfg) {
  PipelineOptions o;
  o.solver = SolverSettings::from_environment();
  o.extract.tol_rank = cfg.tol_rank;
  o.extract.seed = cfg.seed;
  return o;
}

Box oracle_box(const ProblemSpec& spec) {
  if (!spec.oracle.box.empty()) return spec.oracle.box;
  return Box(static_cast<std::size_t>(spec.n), {-3.0, 3.0});
}

long oracle_samples(const ProblemSpec& spec) { return spec.oracle.samples > 0 ? spec.oracle.samples : 20000; }

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + suffix;
  return path.substr(0, dot) + "." + suffix + path.substr(dot);
}

int run_lme(const Config& cfg, const ProblemSpec& spec) {
  const Format fmt = parse_format(cfg.format);
  const LmeResult res = synthesize_lme(spec.objective, spec.g, lme_options(cfg));
  const KktSystem sys = build_kkt_system(spec.g, spec.n);
  const double probe = probe_nondegeneracy(sys);
  if (fmt == Format::json) {
    json j = {{"problem", spec.name}, {"n", spec.n}, {"m", spec.g.rows()},
              {"ell_start", res.ell_start}, {"residual_by_degree", res.residual_by_degree},
              {"nondegeneracy_probe", probe}};
    if (res.solution) {
      j["ell"] = res.solution->left.degree;
      j["residual"] = res.solution->left.residual;
      j["theta"] = matrix_json(res.solution->theta, spec.vars);
    } else {
      j["ell"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
  } else if (fmt == Format::tsv) {
    std::cout << "key\tvalue\n";
    std::cout << "problem\t" << spec.name << "\n";
    for (std::size_t i = 0; i < res.residual_by_degree.size(); ++i)
      std::cout << "residual_ell_" << res.ell_start + static_cast<int>(i) << "\t" << sci(res.residual_by_degree[i]) << "\n";
    if (res.solution) {
      std::cout << "ell\t" << res.solution->left.degree << "\n";
      std::cout << "residual\t" << sci(res.solution->left.residual) << "\n";
      for (int i = 0; i < spec.g.rows(); ++i)
        for (int j = i; j < spec.g.rows(); ++j)
          std::cout << "theta_" << i + 1 << j + 1 << "\t" << res.solution->theta(i, j).to_string(spec.vars) << "\n";
    }
  } else {
    std::cout << "problem " << spec.name << " (n = " << spec.n << ", m = " << spec.g.rows() << ")\n";
    std::cout << "residual by degree:";
    for (std::size_t i = 0; i < res.residual_by_degree.size(); ++i)
      std::cout << "  ell=" << res.ell_start + static_cast<int>(i) << ": " << sci(res.residual_by_degree[i]);
    std::cout << "\nnondegeneracy probe (min sigma ratio of P at random complex points): " << sci(probe) << "\n";
    if (res.solution) {
      std::cout << "ell = " << res.solution->left.degree << ", residual " << sci(res.solution->left.residual) << "\n";
      for (int i = 0; i < spec.g.rows(); ++i)
        for (int j = i; j < spec.g.rows(); ++j)
          std::cout << "Theta[" << i + 1 << "," << j + 1 << "] = " << res.solution->theta(i, j).to_string(spec.vars) << "\n";
    }
  }
  if (!res.solution) {
    std::cerr << "mposos: no left inverse found up to the degree cap\n";
    return kLmeFailure;
  }
  return kOk;
}

// Theta for the strengthened kind, or an exit code when synthesis fails.
std::optional<MatrixPolynomial> theta_for(const Config& cfg, const ProblemSpec& spec, int& code) {
  ThetaChoice choice = choose_theta(spec, lme_options(cfg));
  if (!choice.theta) {
    std::cerr << "mposos: LME synthesis failed; strengthened relaxation unavailable\n";
    code = kLmeFailure;
  }
  return choice.theta;
}

int run_solve(const Config& cfg, const ProblemSpec& spec) {
  const Format fmt = parse_format(cfg.format);
  const auto kinds = kinds_of(cfg, false);
  int code = kOk;
  std::optional<MatrixPolynomial> theta;
  for (auto kind : kinds)
    if (kind == RelaxationKind::strengthened) {
      theta = theta_for(cfg, spec, code);
      if (!theta) return code;
    }

  const PipelineOptions opts = pipeline_options(cfg);
  std::vector<OrderResult> results;
  for (auto kind : kinds) {
    const MatrixPolynomial* th = kind == RelaxationKind::strengthened ? &*theta : nullptr;
    const int k_min = minimal_order(kind, spec.objective, spec.g, th);
    const int k = cfg.order >= 0 ? cfg.order : k_min;
    if (k < k_min) throw OrderTooLow(k, k_min);
    if (!cfg.export_sdpa.empty()) {
      const std::string path = kinds.size() > 1 ? with_suffix(cfg.export_sdpa, to_string(kind)) : cfg.export_sdpa;
      export_sdpa(build_relaxation(kind, spec.objective, spec.g, th, k).problem, path);
    }
    results.push_back(solve_order(spec, kind, k, th, opts));
  }

  std::optional<SampleReport> oracle;
  if (cfg.oracle) oracle = sample_upper_bound(spec.objective, spec.g, oracle_box(spec), oracle_samples(spec), 200, cfg.seed);

  if (fmt == Format::json) {
    json j = {{"problem", spec.name}, {"results", json::array()}};
    for (const auto& r : results) j["results"].push_back(report_json(r, spec.vars));
    if (oracle) {
      j["oracle"] = {{"found", oracle->found}, {"feasible_hits", oracle->feasible_hits}, {"samples", oracle->samples}};
      if (oracle->found) {
        j["oracle"]["upper_bound"] = oracle->best_value;
        j["oracle"]["point"] = std::vector<double>(oracle->best_point.data(), oracle->best_point.data() + oracle->best_point.size());
      }
    }
    std::cout << j.dump(2) << "\n";
  } else if (fmt == Format::tsv) {
    std::cout << "kind\torder\tstatus\tbound\tseconds\tatoms\tverdict\n";
    for (const auto& r : results) {
      std::cout << to_string(r.kind) << "\t" << r.order << "\t" << (r.below_min ? "below_min_order" : to_string(r.report.status))
                << "\t" << bound_cell(r, false) << "\t" << fixed(r.seconds) << "\t"
                << (r.certificate ? std::to_string(r.certificate->atoms.size()) : "0") << "\t"
                << (r.certificate ? to_string(r.certificate->verdict) : "-") << "\n";
    }
  } else {
    std::cout << "problem " << spec.name << "\n";
    for (const auto& r : results) print_text_report(std::cout, r);
    if (oracle) {
      if (oracle->found)
        std::cout << "oracle upper bound " << fixed(oracle->best_value) << " at " << point_text(oracle->best_point)
                  << " (" << oracle->feasible_hits << "/" << oracle->samples << " feasible samples)\n";
      else
        std::cout << "oracle found no feasible sample in " << oracle->samples << " draws\n";
    }
  }

  for (const auto& r : results) {
    if (solve_failed(r)) code = std::max(code, static_cast<int>(kSolveFailure));
    if (r.extraction && r.extraction->status == ExtractStatus::extraction_failure) code = std::max(code, static_cast<int>(kExtractFailure));
  }
  return code;
}

int moment_count(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= n; ++i) c = c * (2 * k + i) / i;
  return static_cast<int>(std::lround(c));
}

int run_table(const Config& cfg, const ProblemSpec& spec) {
  const Format fmt = parse_format(cfg.format);
  int code = kOk;
  std::optional<MatrixPolynomial> theta = theta_for(cfg, spec, code);
  if (!theta) return code;

  int lo = 0;
  int hi = 0;
  if (cfg.orders.empty()) {
    lo = minimal_order(RelaxationKind::standard, spec.objective, spec.g);
    hi = lo + 2;
  } else if (!parse_range(cfg.orders, lo, hi)) {
    std::cerr << "mposos: --orders expects A..B\n";
    return kUsage;
  }
  const auto kinds = kinds_of(cfg, true);
  const PipelineOptions opts = pipeline_options(cfg);

  struct Row {
    int k;
    std::map<RelaxationKind, OrderResult> res;
    std::map<RelaxationKind, bool> skipped;
  };
  std::vector<Row> rows;
  for (int k = lo; k <= hi; ++k) {
    Row row{k, {}, {}};
    for (auto kind : kinds) {
      const MatrixPolynomial* th = kind == RelaxationKind::strengthened ? &*theta : nullptr;
      const bool skip = !cfg.slow && moment_count(spec.n, k) > kSlowMoments &&
                        k >= minimal_order(kind, spec.objective, spec.g, th);
      row.skipped[kind] = skip;
      if (skip) {
        OrderResult r;
        r.kind = kind;
        r.order = k;
        r.min_order = minimal_order(kind, spec.objective, spec.g, th);
        row.res[kind] = r;
        continue;
      }
      row.res[kind] = solve_order(spec, kind, k, th, opts);
      if (solve_failed(row.res[kind])) code = kSolveFailure;
    }
    rows.push_back(std::move(row));
  }

  const auto time_cell = [&](const Row& row, RelaxationKind kind) -> std::string {
    const auto& r = row.res.at(kind);
    if (row.skipped.at(kind) || r.below_min) return "-";
    return fixed(r.seconds);
  };
  const char* kind_title[2] = {"without LME", "with LME"};

  if (fmt == Format::json) {
    json j = {{"problem", spec.name}, {"rows", json::array()}};
    for (const auto& row : rows) {
      json rj = {{"order", row.k}};
      for (auto kind : kinds) {
        json cell = row.skipped.at(kind) ? json{{"status", "skipped"}} : report_json(row.res.at(kind), spec.vars);
        if (cfg.no_times) cell.erase("seconds");
        rj[to_string(kind)] = cell;
      }
      j["rows"].push_back(rj);
    }
    std::cout << j.dump(2) << "\n";
    return code;
  }

  if (fmt == Format::tsv) {
    std::cout << "k";
    for (auto kind : kinds) {
      std::cout << "\tbound_" << to_string(kind);
      if (!cfg.no_times) std::cout << "\ttime_" << to_string(kind);
    }
    std::cout << "\n";
    for (const auto& row : rows) {
      std::cout << row.k;
      for (auto kind : kinds) {
        std::cout << "\t" << bound_cell(row.res.at(kind), row.skipped.at(kind));
        if (!cfg.no_times) std::cout << "\t" << time_cell(row, kind);
      }
      std::cout << "\n";
    }
    return code;
  }

  std::cout << "problem " << spec.name << "\n";
  std::ostringstream head;
  head << "order k";
  for (auto kind : kinds) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " | %-14s", kind_title[static_cast<int>(kind)]);
    head << buf;
    if (!cfg.no_times) head << "          ";
  }
  std::cout << head.str() << "\n";
  for (const auto& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%7d", row.k);
    std::cout << buf;
    for (auto kind : kinds) {
      std::snprintf(buf, sizeof buf, " | %14s", bound_cell(row.res.at(kind), row.skipped.at(kind)).c_str());
      std::cout << buf;
      if (!cfg.no_times) {
        std::snprintf(buf, sizeof buf, " %9s", time_cell(row, kind).c_str());
        std::cout << buf;
      }
    }
    std::cout << "\n";
  }
  return code;
}

// Strengthened solve from the minimal order upward until atoms certify.
int run_examples(const Config& cfg) {
  const Format fmt = parse_format(cfg.format);
  std::vector<std::string> names = corpus_names();
  if (!cfg.problem.empty()) {
    std::string name = cfg.problem;
    if (name.ends_with(".json")) name.resize(name.size() - 5);
    if (!corpus_text(name)) {
      std::cerr << "mposos: unknown example " << cfg.problem << "\n";
      return kProblemError;
    }
    if (!cfg.run) {
      std::cout << *corpus_text(name);
      return kOk;
    }
    names = {name};
  }
  if (!cfg.run) {
    for (const auto& name : names) {
      const ProblemSpec spec = load_corpus(name);
      if (fmt == Format::text)
        std::cout << name << "  n=" << spec.n << " m=" << spec.g.rows() << "  " << spec.description << "\n";
      else
        std::cout << name << "\t" << spec.n << "\t" << spec.g.rows() << "\t" << spec.description << "\n";
    }
    return kOk;
  }

  int code = kOk;
  json all = json::array();
  if (fmt != Format::json) std::cout << "example\torder\tstatus\tbound\tf_min\tatoms\tverdict\n";
  for (const auto& name : names) {
    const ProblemSpec spec = load_corpus(name);
    ThetaChoice choice = choose_theta(spec, lme_options(cfg));
    if (!choice.theta) {
      std::cout << name << "\t-\tlme_failed\t-\t-\t0\t-\n";
      code = std::max(code, static_cast<int>(kLmeFailure));
      continue;
    }
    const int k0 = minimal_order(RelaxationKind::strengthened, spec.objective, spec.g, &*choice.theta);
    OrderResult last;
    for (int k = k0; k <= k0 + 2; ++k) {
      if (!cfg.slow && moment_count(spec.n, k) > kSlowMoments) break;
      last = solve_order(spec, RelaxationKind::strengthened, k, &*choice.theta, pipeline_options(cfg));
      if (!last.report.converged() || (last.certificate && last.certificate->verdict == Verdict::certified)) break;
    }
    const std::string fmin = spec.reference.f_min ? fixed(*spec.reference.f_min) : "-";
    const std::size_t atoms = last.certificate ? last.certificate->atoms.size() : 0;
    const std::string verdict = last.certificate ? to_string(last.certificate->verdict) : "-";
    if (fmt == Format::json) {
      json j = report_json(last, spec.vars);
      j["example"] = name;
      j["f_min"] = spec.reference.f_min ? json(*spec.reference.f_min) : json(nullptr);
      all.push_back(j);
    } else {
      std::cout << name << "\t" << last.order << "\t" << to_string(last.report.status) << "\t" << bound_cell(last, false)
                << "\t" << fmin << "\t" << atoms << "\t" << verdict << "\n";
    }
    if (solve_failed(last)) code = std::max(code, static_cast<int>(kSolveFailure));
  }
  if (fmt == Format::json) std::cout << all.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix polynomial optimization with Lagrange multiplier expressions"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub, bool needs_problem) {
    auto* opt = sub->add_option("problem", cfg.problem, "problem JSON file or built-in example name");
    if (needs_problem) opt->required();
    sub->add_option("--lme-degree", cfg.lme_degree, "first degree of L(x) to try");
    sub->add_option("--tol-lme", cfg.tol_lme, "coefficient residual tolerance for L(x) P(x) = I");
    sub->add_option("--tol-rank", cfg.tol_rank, "relative singular value cutoff for flat truncation");
    sub->add_option("--seed", cfg.seed, "seed for extraction and sampling");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "tsv", "json"}));
    sub->add_flag("--slow", cfg.slow, "also run relaxations with more than 2000 moments");
  };
  auto kinds = [&](CLI::App* sub) {
    sub->add_flag("--standard", cfg.standard, "standard relaxation");
    sub->add_flag("--strengthened", cfg.strengthened, "strengthened relaxation (with LME)");
    sub->add_flag("--both", cfg.both, "both relaxations");
  };

  auto* lme = app.add_subcommand("lme", "synthesize the Lagrange multiplier expression");
  common(lme, true);
  auto* solve_cmd = app.add_subcommand("solve", "solve one relaxation order, extract and certify minimizers");
  common(solve_cmd, true);
  kinds(solve_cmd);
  solve_cmd->add_option("--order", cfg.order, "relaxation order k (default: the minimal order)");
  solve_cmd->add_option("--export-sdpa", cfg.export_sdpa, "write the relaxation in SDPA sparse format");
  solve_cmd->add_flag("--oracle", cfg.oracle, "report a sampling upper bound on f_min");
  auto* table = app.add_subcommand("table", "bounds and times over a range of orders");
  common(table, true);
  kinds(table);
  table->add_option("--orders", cfg.orders, "order range A..B");
  table->add_flag("--no-times", cfg.no_times, "omit wall-clock columns");
  auto* examples = app.add_subcommand("examples", "list, print or run the built-in examples");
  common(examples, false);
  examples->add_flag("--run", cfg.run, "solve the strengthened relaxation of each example");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (examples->parsed()) return run_examples(cfg);
    ProblemSpec spec;
    try {
      spec = load_problem_or_corpus(cfg.problem);
    } catch (const std::exception& e) {
      std::cerr << "mposos: " << e.what() << "\n";
      return kProblemError;
    }
    if (lme->parsed()) return run_lme(cfg, spec);
    if (solve_cmd->parsed()) return run_solve(cfg, spec);
    if (table->parsed()) return run_table(cfg, spec);
  } catch (const OrderTooLow& e) {
    std::cerr << "mposos: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "mposos: " << e.what() << "\n";
    return kSolveFailure;
  }
  return kUsage;
}
