#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "repargen/rational_function.hpp"

namespace repargen {

// Immutable expression tree. Arithmetic builds tree nodes; canonical() turns
// a tree into its canonical rational function once and caches the result.
// Operations that the rest of the system relies on (differentiate,
// substitute) return already-canonical nodes.
class Expression {
 public:
  enum class Kind { Number, Symbol, Add, Mul, Div, Pow, OpaquePow, Canonical };

  Expression();
  Expression(long v);             // NOLINT(implicit)
  Expression(int v) : Expression(static_cast<long>(v)) {}  // NOLINT(implicit)
  Expression(const Rational& v);  // NOLINT(implicit)
  explicit Expression(Symbol s);
  static Expression symbol(std::string_view name) { return Expression(Symbol(name)); }
  static Expression from_canonical(RationalFunction f);

  Kind kind() const;
  const std::vector<Expression>& children() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  Expression& operator+=(const Expression& o) { return *this = *this + o; }
  Expression& operator-=(const Expression& o) { return *this = *this - o; }
  Expression& operator*=(const Expression& o) { return *this = *this * o; }
  Expression pow(long n) const;
  Expression pow(const Rational& q) const;  // opaque when q is not an integer

  const RationalFunction& canonical() const;
  Expression canonicalize() const { return from_canonical(canonical()); }

  // Exact zero test on the canonical form. When the canonical form is zero
  // the tree is additionally evaluated at random points; a disagreement
  // throws std::logic_error because it means canonicalization is broken.
  bool is_zero() const;
  bool is_constant() const { return canonical().is_constant(); }
  std::optional<Rational> constant_value() const;

  std::string str() const { return canonical().to_string(); }

  // Equality of canonical forms.
  friend bool operator==(const Expression& a, const Expression& b);

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Rational evaluate(const Expression&, const RationalPoint&);
  friend std::set<Symbol> tree_symbols(const Expression&);
};

Expression differentiate(const Expression& e, Symbol v);

using ExprMap = std::map<Symbol, Expression>;
Expression substitute(const Expression& e, const ExprMap& s);

// Evaluates the tree itself (not the canonical form), so it is an
// independent check of canonicalization. Throws PoleError at poles.
Rational evaluate(const Expression& e, const RationalPoint& point);
double evaluate_double(const Expression& e, const std::unordered_map<Symbol, double>& point);

// Symbols in the canonical form (atoms expanded into their base symbols).
std::set<Symbol> free_symbols(const Expression& e);
// Symbols anywhere in the tree, including ones that cancel.
std::set<Symbol> tree_symbols(const Expression& e);

// Decomposes the canonical numerator of e, which must be linear in the
// unknowns, as sum over unknown-free monomials m of coefficient(m) * m.
// The canonical denominator must be free of unknowns and is dropped.
std::map<Monomial, Expression, MonomialLess> linear_coefficients(const Expression& e, const std::set<Symbol>& unknowns);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

// Resolves an identifier to an expression (a symbol or a constant); it
// should throw ParseError for unknown names. The default maps every
// identifier to a symbol.
using NameResolver = std::function<Expression(const std::string& name, int column)>;

Expression parse_expression(std::string_view text, const NameResolver& resolve = {}, int line = 1, int column_offset = 0);

}  // namespace repargen
