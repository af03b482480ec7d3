#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mposos/polynomial.hpp"

namespace mposos {

/// Syntax or semantic error in a polynomial expression, with a 1-based
/// line/column pointing at the offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses and expands a polynomial expression.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary ('*' unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer)?
///   primary := number | variable | '(' expr ')'
///
/// Numbers are integers or decimals with an optional exponent part. Variables
/// are the declared names, or x1..xn when `names` is empty. The exponent after
/// '^' must be a bare nonnegative integer literal.
Polynomial parse_polynomial(std::string_view src, int n, const std::vector<std::string>& names = {});

}  // namespace mposos
