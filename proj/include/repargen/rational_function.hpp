#pragma once

#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "repargen/polynomial.hpp"

namespace repargen {

class RationalFunction;

// An opaque power symbol stands for base^(1/root). A general power
// base^(p/q) is stored as base^floor(p/q) times this symbol raised to
// (p mod q), so numerators never carry the symbol to a power >= root.
struct AtomInfo {
  std::shared_ptr<const RationalFunction> base;
  unsigned long root = 1;
  std::vector<Symbol> base_symbols;  // every symbol reachable from base, sorted
};

// Canonical N/D: gcd(N, D) = 1 and D monic in lex order (D = 1 for
// polynomials). Two equal rational functions have identical N and D as long
// as no algebraic relation between distinct opaque powers is involved.
class RationalFunction {
 public:
  RationalFunction() : den_(1) {}
  RationalFunction(const Rational& c) : num_(c), den_(1) {}  // NOLINT(implicit)
  RationalFunction(long c) : RationalFunction(Rational(c)) {}  // NOLINT(implicit)
  RationalFunction(Polynomial p);  // NOLINT(implicit)
  explicit RationalFunction(Symbol s) : RationalFunction(Polynomial(s)) {}
  static RationalFunction make(const Polynomial& num, const Polynomial& den);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  RationalFunction operator-() const;
  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
  RationalFunction pow(long n) const;

  friend bool operator==(const RationalFunction&, const RationalFunction&) = default;
  std::string to_string() const;

 private:
  Polynomial num_, den_;
};

// base^q for rational q; exact when q is an integer or base is a constant
// with an exact rational q-th power, opaque otherwise.
RationalFunction power(const RationalFunction& base, const Rational& q);

RationalFunction derivative(const RationalFunction& f, Symbol v);

// Simultaneous substitution. Opaque powers whose base mentions a
// substituted symbol are rebuilt from the substituted base.
using Substitution = std::unordered_map<Symbol, RationalFunction>;
RationalFunction substitute(const RationalFunction& f, const Substitution& s);
RationalFunction substitute(const Polynomial& p, const Substitution& s);
// Numerator of substitute(p, s) before cancellation: p(s) times the product
// of the substituted denominators, without any gcd work. Useful when only
// the vanishing of the result matters.
Polynomial substitute_numerator(const Polynomial& p, const Substitution& s, Polynomial* denominator = nullptr);

// Some atom occurs to a power >= its root.
bool needs_atom_reduction(const Polynomial& p);
// Rewrites atom^e with e >= root as base^(e div root) * atom^(e mod root).
// Products of canonical forms are reduced this way, which keeps the zero test
// exact for the atoms produced by power().
RationalFunction reduce_atoms(const Polynomial& p);

// Symbols occurring in f, including those inside opaque-power bases
// (and the opaque-power symbols themselves when with_atoms is set).
std::set<Symbol> free_symbols(const RationalFunction& f, bool with_atoms = false);
bool depends_on(const RationalFunction& f, Symbol v);
bool has_atoms(const RationalFunction& f);
std::set<Symbol> atoms_of(const RationalFunction& f);  // transitive, inner atoms first is not guaranteed

// Exact value. Atoms take their bound value if present in the point,
// otherwise an exact rational root of their base; failing both, throws.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
using RationalPoint = std::unordered_map<Symbol, Rational>;
Rational evaluate(const RationalFunction& f, const RationalPoint& point);
Rational evaluate(const Polynomial& p, const RationalPoint& point);

double evaluate_double(const RationalFunction& f, const std::unordered_map<Symbol, double>& point);

}  // namespace repargen
