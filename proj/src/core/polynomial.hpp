#pragma once

// Sparse multivariate integer polynomials in X0..X{n-1}, with a small
// recursive-descent parser for  + - * ^ ( )  integer literals and variables.

#include "arith.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toric {

class Polynomial {
public:
  using Monomial = std::vector<unsigned>;

  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(std::size_t nvars, const Int& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Monomial, Int>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  unsigned degree_in(std::size_t var) const;
  unsigned total_degree() const;

  Int eval(std::span<const u64> x) const;
  Int eval(std::span<const Int> x) const;

  // Substitutes every variable except `keep`; returns coefficients of the
  // resulting univariate polynomial, lowest degree first.
  std::vector<Int> specialize(std::size_t keep, std::span<const Int> values) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial pow(unsigned e) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  // Canonical rendering, e.g. "X0^2 - 3*X1 + 1"; terms in descending lex order.
  std::string to_string() const;

private:
  void add_term(const Monomial& m, const Int& c);

  std::size_t nvars_;
  std::map<Monomial, Int> terms_;
};

// Throws Parse on malformed input or a variable index >= nvars.
Polynomial parse_polynomial(std::string_view text, std::size_t nvars);

// Resultant of two univariate integer polynomials (coefficients lowest first).
Int resultant(const std::vector<Int>& f, const std::vector<Int>& g);

struct CoprimeWitness {
  bool coprime = false;
  // One entry per variable in which both polynomials have positive degree:
  // the specialization point and the nonzero resultant found there.
  struct Entry {
    std::size_t var;
    std::vector<Int> point;
    Int resultant;
  };
  std::vector<Entry> entries;
  std::string reason;
};

// Certifies that f and g share no nonconstant factor over Q. A common factor
// involving X_v forces Res_v(f, g) == 0 identically, so one specialization
// with nonvanishing leading coefficients and nonzero resultant per such
// variable suffices. coprime == false means no certificate was found.
CoprimeWitness coprime_witness(const Polynomial& f, const Polynomial& g);

} // namespace toric
