#pragma once

#include <random>
#include <string>
#include <vector>

#include "mposos/expr_parser.hpp"
#include "mposos/matrix_polynomial.hpp"
#include "mposos/polynomial.hpp"

namespace mposos::testing {

/// Polynomial with `terms` random monomials of degree <= d and normal coefficients.
inline Polynomial random_polynomial(int n, int d, int terms, std::mt19937_64& rng) {
  const auto basis = monomial_basis(n, d);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Polynomial p(n);
  for (int i = 0; i < terms; ++i) p.add_term(basis[pick(rng)], normal(rng));
  return p;
}

inline MatrixPolynomial matrix_of(const std::vector<std::vector<std::string>>& rows, int n) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  MatrixPolynomial m(r, c, n);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = parse_polynomial(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], n);
  return m;
}

}  // namespace mposos::testing
