#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repargen/rational.hpp"
#include "repargen/symbol.hpp"

namespace repargen {

// Power product, variables sorted by name, exponents > 0.
class Monomial {
 public:
  using Factor = std::pair<Symbol, int>;

  Monomial() = default;
  explicit Monomial(Symbol s, int e = 1);
  static Monomial from_factors(std::vector<Factor> factors);  // sorts and merges

  const std::vector<Factor>& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }
  int degree() const;
  int degree_in(Symbol s) const;
  bool divides(const Monomial& other) const;

  Monomial operator*(const Monomial& o) const;
  Monomial operator/(const Monomial& o) const;  // requires o.divides(*this)
  Monomial without(Symbol s) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  std::string to_string() const;

 private:
  std::vector<Factor> f_;
};

// Lex order with variables ranked by name. Returns <0, 0, >0.
int lex_compare(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return lex_compare(a, b) < 0; }
};

struct Term {
  Monomial mono;
  Rational coef;
  friend bool operator==(const Term&, const Term&) = default;
};

// Sparse polynomial over Q; terms sorted by decreasing lex order, no zero
// coefficients. The first term is the leading term.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(implicit)
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(implicit)
  explicit Polynomial(Symbol s);
  Polynomial(const Monomial& m, const Rational& c);
  static Polynomial from_terms(std::vector<Term> terms);  // any order, merges duplicates

  const std::vector<Term>& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }
  Rational constant_value() const;  // requires is_constant()
  bool is_monomial() const { return t_.size() == 1; }
  const Term& leading() const { return t_.front(); }

  int degree_in(Symbol s) const;
  int total_degree() const;
  bool contains(Symbol s) const;
  std::vector<Symbol> variables() const;  // sorted by name

  // Coefficients with respect to s: result[k] multiplies s^k.
  std::vector<Polynomial> coefficients_in(Symbol s) const;
  static Polynomial from_coefficients(Symbol s, const std::vector<Polynomial>& coeffs);

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  Polynomial scaled(const Rational& c) const;
  Polynomial times(const Monomial& m, const Rational& c) const;
  Polynomial pow(unsigned n) const;

  // Leading coefficient becomes 1.
  Polynomial monic() const;

  Polynomial derivative(Symbol s) const;

  Rational evaluate(const std::function<Rational(Symbol)>& value) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
  std::string to_string() const;

 private:
  std::vector<Term> t_;
};

// Exact quotient if b divides a, otherwise nullopt.
std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

// Monic greatest common divisor (gcd(0,0) = 0).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

// For a polynomial linear in the unknowns: coefficient rows keyed by the
// unknown-free monomial. Each row lists (unknown index, coefficient).
// Throws std::invalid_argument if a term is not linear in the unknowns.
using SparseRow = std::vector<std::pair<std::size_t, Rational>>;
std::map<Monomial, SparseRow, MonomialLess> linear_rows(
    const Polynomial& p, const std::function<std::optional<std::size_t>(Symbol)>& unknown_index);

}  // namespace repargen
