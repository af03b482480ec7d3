#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mposos/matrix_polynomial.hpp"

namespace mposos {

/// Malformed problem document.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferenceData {
  std::optional<double> f_min;
  std::vector<std::vector<double>> minimizers;
};

/// Sampling box for the brute-force oracle.
struct OracleHints {
  std::vector<std::pair<double, double>> box;
  int samples = 0;
};

/// min f(x) s.t. G(x) >= 0 over n variables.
struct ProblemSpec {
  std::string name;
  std::string description;
  int n = 0;
  std::vector<std::string> vars;  // empty means x1..xn
  Polynomial objective;
  MatrixPolynomial g;
  std::optional<MatrixPolynomial> theta;
  ReferenceData reference;
  OracleHints oracle;
};

/// Parses a JSON problem document.
///
///   { "n": int, "vars": [names]?, "objective": entry,
///     "G": [[entry | null, ...], ...], "theta": [[...]]?,
///     "name"?, "description"?, "reference"?, "oracle"? }
///
/// An entry is an expression string, a number, or a term list
/// [{"coeff": real, "exp": [n ints]}, ...]. Matrices need only their upper
/// triangle; null (or a missing row tail) below the diagonal is mirrored, and
/// entries given on both sides must agree.
ProblemSpec parse_problem(std::string_view json_text, const std::string& origin = "<input>");
ProblemSpec load_problem(const std::string& path);

/// Names of the built-in corpus, sorted.
std::vector<std::string> corpus_names();
/// Raw JSON of a corpus entry, or nullopt.
std::optional<std::string_view> corpus_text(std::string_view name);
/// Corpus entry by name; throws std::out_of_range for unknown names.
ProblemSpec load_corpus(std::string_view name);
/// A corpus name or a file path (a trailing ".json" on a corpus name is accepted).
ProblemSpec load_problem_or_corpus(const std::string& ref);

}  // namespace mposos
