#include "mposos/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mposos {

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("negative exponent in monomial");
    degree_ += e;
  }
}

Monomial Monomial::one(int nvars) { return Monomial(std::vector<int>(static_cast<std::size_t>(nvars), 0)); }

Monomial Monomial::variable(int nvars, int i) {
  if (i < 0 || i >= nvars) throw std::out_of_range("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.nvars() != nvars()) throw std::invalid_argument("monomial variable count mismatch");
  Monomial out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ += other.degree_;
  return out;
}

bool Monomial::divisible_by(const Monomial& other) const {
  if (other.nvars() != nvars()) return false;
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (other.exps_[i] > exps_[i]) return false;
  return true;
}

Monomial Monomial::operator/(const Monomial& other) const {
  if (!divisible_by(other)) throw std::invalid_argument("monomial is not divisible");
  Monomial out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] -= other.exps_[i];
  out.degree_ -= other.degree_;
  return out;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Larger exponent on x1 sorts first inside a degree.
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int e : m.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

// Exponent vectors of total degree exactly d, x1-heavy first.
void append_degree(int n, int d, std::vector<Monomial>& out) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == n - 1) {
      e[static_cast<std::size_t>(var)] = left;
      out.emplace_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[static_cast<std::size_t>(var)] = k;
      rec(var + 1, left - k);
    }
    e[static_cast<std::size_t>(var)] = 0;
  };
  rec(0, d);
}

}  // namespace

std::vector<Monomial> monomial_basis(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("monomial_basis requires n >= 1 and d >= 0");
  std::vector<Monomial> out;
  out.reserve(binomial(n + d, d));
  for (int k = 0; k <= d; ++k) append_degree(n, k, out);
  return out;
}

std::size_t binomial(int a, int b) {
  if (b < 0 || a < 0 || b > a) return 0;
  b = std::min(b, a - b);
  std::size_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * static_cast<std::size_t>(a - b + i) / static_cast<std::size_t>(i);
  return r;
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial::one(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  p.add_term(Monomial::variable(nvars, i), 1.0);
  return p;
}

Polynomial Polynomial::term(const Monomial& m, double c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const {
  // Terms are sorted by degree first, so the last one has the top degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.nvars() != nvars_) throw std::invalid_argument("term variable count mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kPruneTolerance) terms_.erase(it);
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.nvars_ != nvars_) throw std::invalid_argument("polynomial variable count mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.nvars_ != nvars_) throw std::invalid_argument("polynomial variable count mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < kPruneTolerance)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("polynomial variable count mismatch");
  Polynomial out(a.nvars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      auto [it, inserted] = out.terms_.try_emplace(ma * mb, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  std::erase_if(out.terms_, [](const auto& t) { return std::abs(t.second) < kPruneTolerance; });
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) { return *this = *this * rhs; }

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result = constant(nvars_, 1.0);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= nvars_) throw std::out_of_range("derivative variable index out of range");
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    const int e = m[i];
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[static_cast<std::size_t>(i)] -= 1;
    out.add_term(Monomial(std::move(exps)), c * e);
  }
  return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(static_cast<std::size_t>(nvars_));
  for (int i = 0; i < nvars_; ++i) g.push_back(derivative(i));
  return g;
}

namespace {

template <typename T>
T evaluate_terms(const Polynomial& p, std::span<const T> u) {
  if (static_cast<int>(u.size()) != p.nvars())
    throw std::invalid_argument("evaluation point has wrong dimension");
  T sum{};
  for (const auto& [m, c] : p.terms()) {
    T v(c);
    for (int i = 0; i < m.nvars(); ++i) {
      for (int k = 0; k < m[i]; ++k) v *= u[static_cast<std::size_t>(i)];
    }
    sum += v;
  }
  return sum;
}

}  // namespace

double Polynomial::evaluate(std::span<const double> u) const { return evaluate_terms(*this, u); }

std::complex<double> Polynomial::evaluate(std::span<const std::complex<double>> u) const {
  return evaluate_terms(*this, u);
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

bool Polynomial::approx_equal(const Polynomial& other, double tol) const {
  return (*this - other).max_abs_coefficient() <= tol;
}

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the short form when it round-trips.
  char shorter[64];
  std::snprintf(shorter, sizeof shorter, "%.15g", v);
  if (std::strtod(shorter, nullptr) == v) return shorter;
  return buf;
}

}  // namespace

std::string Polynomial::to_string(const std::vector<std::string>& names_in) const {
  if (terms_.empty()) return "0";
  const std::vector<std::string> names = names_in.empty() ? default_names(nvars_) : names_in;
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    double mag = std::abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    std::string factors;
    for (int i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += names[static_cast<std::size_t>(i)];
      if (m[i] > 1) factors += "^" + std::to_string(m[i]);
    }
    if (factors.empty()) {
      os << format_number(mag);
    } else if (mag == 1.0) {
      os << factors;
    } else {
      os << format_number(mag) << "*" << factors;
    }
  }
  return os.str();
}

}  // namespace mposos
