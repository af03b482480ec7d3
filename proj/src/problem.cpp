#include "mposos/problem.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mposos/expr_parser.hpp"

namespace mposos {

namespace detail {
// Generated from corpus/*.json at configure time.
extern const std::vector<std::pair<std::string_view, std::string_view>> kCorpus;
}  // namespace detail

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& origin, const std::string& what) {
  throw SchemaError(origin + ": " + what);
}

Polynomial parse_entry(const json& j, int n, const std::vector<std::string>& vars, const std::string& origin,
                       const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_polynomial(j.get<std::string>(), n, vars);
    } catch (const ParseError& e) {
      schema(origin, where + ": " + e.what());
    }
  }
  if (j.is_number()) return Polynomial::constant(n, j.get<double>());
  if (!j.is_array()) schema(origin, where + ": expected an expression string, number or term list");
  Polynomial p(n);
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("coeff") || !t.contains("exp"))
      schema(origin, where + ": term needs \"coeff\" and \"exp\"");
    if (!t["coeff"].is_number()) schema(origin, where + ": \"coeff\" must be a number");
    const auto& e = t["exp"];
    if (!e.is_array() || static_cast<int>(e.size()) != n)
      schema(origin, where + ": \"exp\" must list " + std::to_string(n) + " exponents");
    std::vector<int> exps;
    for (const auto& v : e) {
      if (!v.is_number_integer() || v.get<int>() < 0) schema(origin, where + ": exponents must be nonnegative integers");
      exps.push_back(v.get<int>());
    }
    p.add_term(Monomial(std::move(exps)), t["coeff"].get<double>());
  }
  return p;
}

MatrixPolynomial parse_matrix(const json& j, int n, const std::vector<std::string>& vars, const std::string& origin,
                              const std::string& key) {
  if (!j.is_array() || j.empty()) schema(origin, "\"" + key + "\" must be a nonempty array of rows");
  const int m = static_cast<int>(j.size());
  MatrixPolynomial g(m, m, n);
  std::vector<std::vector<char>> given(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
  for (int i = 0; i < m; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) > m) schema(origin, "\"" + key + "\" row " + std::to_string(i + 1) + " is malformed");
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_null()) continue;
      const std::string where = key + "[" + std::to_string(i + 1) + "][" + std::to_string(c + 1) + "]";
      g(i, c) = parse_entry(e, n, vars, origin, where);
      given[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = 1;
    }
  }
  for (int i = 0; i < m; ++i)
    for (int c = i; c < m; ++c) {
      const bool up = given[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      const bool lo = given[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      if (!up && !lo) schema(origin, key + " entry (" + std::to_string(i + 1) + "," + std::to_string(c + 1) + ") is missing");
      if (up && lo) {
        if (!g(i, c).approx_equal(g(c, i), 1e-12))
          schema(origin, key + " is not symmetric at (" + std::to_string(i + 1) + "," + std::to_string(c + 1) + ")");
      } else if (up) {
        g(c, i) = g(i, c);
      } else {
        g(i, c) = g(c, i);
      }
    }
  return g;
}

std::vector<double> number_list(const json& j, const std::string& origin, const std::string& what) {
  if (!j.is_array()) schema(origin, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) schema(origin, what + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ProblemSpec parse_problem(std::string_view json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema(origin, "top level must be an object");

  ProblemSpec spec;
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<int>() < 1)
    schema(origin, "\"n\" must be a positive integer");
  spec.n = doc["n"].get<int>();
  if (doc.contains("name")) spec.name = doc["name"].get<std::string>();
  if (doc.contains("description")) spec.description = doc["description"].get<std::string>();
  if (doc.contains("vars")) {
    const auto& v = doc["vars"];
    if (!v.is_array() || static_cast<int>(v.size()) != spec.n) schema(origin, "\"vars\" must list n names");
    for (const auto& name : v) {
      if (!name.is_string()) schema(origin, "\"vars\" must hold strings");
      spec.vars.push_back(name.get<std::string>());
    }
  }
  if (!doc.contains("objective")) schema(origin, "missing \"objective\"");
  spec.objective = parse_entry(doc["objective"], spec.n, spec.vars, origin, "objective");
  if (!doc.contains("G")) schema(origin, "missing \"G\"");
  spec.g = parse_matrix(doc["G"], spec.n, spec.vars, origin, "G");
  if (doc.contains("theta")) {
    spec.theta = parse_matrix(doc["theta"], spec.n, spec.vars, origin, "theta");
    if (spec.theta->rows() != spec.g.rows()) schema(origin, "\"theta\" must have the size of G");
  }

  if (doc.contains("reference")) {
    const auto& r = doc["reference"];
    if (r.contains("f_min") && !r["f_min"].is_null()) spec.reference.f_min = r["f_min"].get<double>();
    if (r.contains("minimizers")) {
      for (const auto& u : r["minimizers"]) {
        auto pt = number_list(u, origin, "minimizer");
        if (static_cast<int>(pt.size()) != spec.n) schema(origin, "minimizer dimension differs from n");
        spec.reference.minimizers.push_back(std::move(pt));
      }
    }
  }
  if (doc.contains("oracle")) {
    const auto& o = doc["oracle"];
    if (o.contains("box")) {
      for (const auto& iv : o["box"]) {
        const auto b = number_list(iv, origin, "box interval");
        if (b.size() != 2 || !(b[0] <= b[1])) schema(origin, "box intervals must be [lo, hi]");
        spec.oracle.box.emplace_back(b[0], b[1]);
      }
      if (static_cast<int>(spec.oracle.box.size()) != spec.n) schema(origin, "box dimension differs from n");
    }
    if (o.contains("samples")) spec.oracle.samples = o["samples"].get<int>();
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ProblemSpec spec = parse_problem(ss.str(), path);
  if (spec.name.empty()) spec.name = std::filesystem::path(path).stem().string();
  return spec;
}

std::vector<std::string> corpus_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::kCorpus) names.emplace_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<std::string_view> corpus_text(std::string_view name) {
  for (const auto& [key, text] : detail::kCorpus)
    if (key == name) return text;
  return std::nullopt;
}

ProblemSpec load_corpus(std::string_view name) {
  const auto text = corpus_text(name);
  if (!text) throw std::out_of_range("unknown corpus entry " + std::string(name));
  ProblemSpec spec = parse_problem(*text, std::string(name));
  if (spec.name.empty()) spec.name = std::string(name);
  return spec;
}

ProblemSpec load_problem_or_corpus(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_problem(ref);
  std::string_view name = ref;
  if (name.ends_with(".json")) name.remove_suffix(5);
  if (const auto slash = name.find_last_of('/'); slash != std::string_view::npos) name.remove_prefix(slash + 1);
  if (corpus_text(name)) return load_corpus(name);
  throw std::runtime_error("no such file or corpus entry: " + ref);
}

}  // namespace mposos
