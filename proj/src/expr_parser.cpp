#include "mposos/expr_parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace mposos {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  Parser(std::string_view src, int n, const std::vector<std::string>& names)
      : src_(src), n_(n), names_(names.empty() ? default_names(n) : names) {
    if (static_cast<int>(names_.size()) != n_) throw std::invalid_argument("variable name count does not match n");
  }

  Polynomial parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Polynomial p = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected character '") + peek() + "'");
    return p;
  }

 private:
  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      skip_space();
      if (!accept('*')) return acc;
      acc *= unary();
    }
  }

  Polynomial unary() {
    skip_space();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    skip_space();
    if (!accept('^')) return base;
    skip_space();
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
      fail("exponent must be a nonnegative integer literal");
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (!at_end() && (peek() == '.' || peek() == 'e' || peek() == 'E'))
      fail("exponent must be a nonnegative integer literal");
    int e = 0;
    const auto digits = src_.substr(start, pos_ - start);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), e);
    if (ec != std::errc() || e > 1000) fail("exponent out of range");
    return base.pow(e);
  }

  Polynomial primary() {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = peek();
    if (c == '(') {
      advance();
      Polynomial inner = expr();
      skip_space();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Polynomial::constant(n_, number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return variable();
    fail(std::string("unexpected character '") + c + "'");
  }

  double number() {
    const std::size_t start = pos_;
    bool digits = false;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance(), digits = true;
    if (!at_end() && peek() == '.') {
      advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance(), digits = true;
    }
    if (!digits) fail("malformed number", start);
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      std::size_t save = pos_;
      advance();
      if (!at_end() && (peek() == '+' || peek() == '-')) advance();
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    return std::strtod(text.c_str(), nullptr);
  }

  Polynomial variable() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) advance();
    const std::string name(src_.substr(start, pos_ - start));
    for (int i = 0; i < n_; ++i)
      if (names_[static_cast<std::size_t>(i)] == name) return Polynomial::variable(n_, i);
    fail("unknown variable '" + name + "'", start);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  void advance() { ++pos_; }
  bool accept(char c) {
    if (!at_end() && peek() == c) {
      advance();
      return true;
    }
    return false;
  }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int n_;
  std::vector<std::string> names_;
};

}  // namespace

Polynomial parse_polynomial(std::string_view src, int n, const std::vector<std::string>& names) {
  return Parser(src, n, names).parse();
}

}  // namespace mposos
