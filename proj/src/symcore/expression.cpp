#include "repargen/expression.hpp"

#include <mutex>
#include <random>

namespace repargen {

struct Expression::Node {
  Kind kind = Kind::Number;
  Rational number;
  Symbol symbol;
  std::vector<Expression> children;
  long exponent = 0;
  Rational q;
  mutable std::once_flag once;
  mutable std::optional<RationalFunction> canon;
};

namespace {

using NodePtr = std::shared_ptr<Expression::Node>;

NodePtr make_node(Expression::Kind k) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  return n;
}

}  // namespace

Expression::Expression() : Expression(Rational(0)) {}

Expression::Expression(long v) : Expression(Rational(v)) {}

Expression::Expression(const Rational& v) {
  auto n = make_node(Kind::Number);
  n->number = v;
  n->number.canonicalize();
  node_ = n;
}

Expression::Expression(Symbol s) {
  auto n = make_node(Kind::Symbol);
  n->symbol = s;
  node_ = n;
}

Expression Expression::from_canonical(RationalFunction f) {
  auto n = make_node(Kind::Canonical);
  n->canon = std::move(f);
  std::call_once(n->once, [] {});
  return Expression(std::shared_ptr<const Node>(n));
}

Expression::Kind Expression::kind() const { return node_->kind; }
const std::vector<Expression>& Expression::children() const { return node_->children; }

namespace {

// Flattens nested sums and products so long accumulation loops do not build
// deep trees.
Expression nary(Expression::Kind k, const Expression& a, const Expression& b, const std::function<Expression(NodePtr)>& wrap) {
  auto n = make_node(k);
  for (const Expression* e : {&a, &b}) {
    if (e->kind() == k)
      n->children.insert(n->children.end(), e->children().begin(), e->children().end());
    else
      n->children.push_back(*e);
  }
  return wrap(n);
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return nary(Expression::Kind::Add, a, b, [](NodePtr n) { return Expression(std::shared_ptr<const Expression::Node>(n)); });
}

Expression operator*(const Expression& a, const Expression& b) {
  return nary(Expression::Kind::Mul, a, b, [](NodePtr n) { return Expression(std::shared_ptr<const Expression::Node>(n)); });
}

Expression operator-(const Expression& a) { return Expression(-1) * a; }

Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

Expression operator/(const Expression& a, const Expression& b) {
  auto n = make_node(Expression::Kind::Div);
  n->children = {a, b};
  return Expression(std::shared_ptr<const Expression::Node>(n));
}

Expression Expression::pow(long e) const {
  auto n = make_node(Kind::Pow);
  n->children = {*this};
  n->exponent = e;
  return Expression(std::shared_ptr<const Node>(n));
}

Expression Expression::pow(const Rational& q) const {
  if (is_integer(q) && q.get_num().fits_slong_p()) return pow(q.get_num().get_si());
  auto n = make_node(Kind::OpaquePow);
  n->children = {*this};
  n->q = q;
  return Expression(std::shared_ptr<const Node>(n));
}

const RationalFunction& Expression::canonical() const {
  const Node& n = *node_;
  std::call_once(n.once, [&n] {
    switch (n.kind) {
      case Kind::Number:
        n.canon = RationalFunction(n.number);
        break;
      case Kind::Symbol:
        n.canon = RationalFunction(n.symbol);
        break;
      case Kind::Add: {
        RationalFunction s;
        for (auto& c : n.children) s += c.canonical();
        n.canon = std::move(s);
        break;
      }
      case Kind::Mul: {
        RationalFunction p(1);
        for (auto& c : n.children) p *= c.canonical();
        n.canon = std::move(p);
        break;
      }
      case Kind::Div:
        n.canon = n.children[0].canonical() / n.children[1].canonical();
        break;
      case Kind::Pow:
        n.canon = n.children[0].canonical().pow(n.exponent);
        break;
      case Kind::OpaquePow:
        n.canon = power(n.children[0].canonical(), n.q);
        break;
      case Kind::Canonical:
        break;
    }
  });
  return *n.canon;
}

std::optional<Rational> Expression::constant_value() const {
  if (!is_constant()) return std::nullopt;
  return canonical().constant_value();
}

bool operator==(const Expression& a, const Expression& b) { return a.canonical() == b.canonical(); }

// ------------------------------------------------------------- evaluation

Rational evaluate(const Expression& e, const RationalPoint& point) {
  const auto& n = *e.node_;
  using K = Expression::Kind;
  switch (n.kind) {
    case K::Number:
      return n.number;
    case K::Symbol:
      if (auto it = point.find(n.symbol); it != point.end()) return it->second;
      return evaluate(RationalFunction(n.symbol), point);
    case K::Add: {
      Rational s = 0;
      for (auto& c : n.children) s += evaluate(c, point);
      return s;
    }
    case K::Mul: {
      Rational p = 1;
      for (auto& c : n.children) p *= evaluate(c, point);
      return p;
    }
    case K::Div: {
      Rational d = evaluate(n.children[1], point);
      if (d == 0) throw PoleError("pole: division by zero");
      return evaluate(n.children[0], point) / d;
    }
    case K::Pow: {
      Rational b = evaluate(n.children[0], point);
      if (b == 0 && n.exponent < 0) throw PoleError("pole: zero to a negative power");
      return pow_int(b, n.exponent);
    }
    case K::OpaquePow:
    case K::Canonical:
      return evaluate(e.canonical(), point);
  }
  throw std::logic_error("unreachable");
}

double evaluate_double(const Expression& e, const std::unordered_map<Symbol, double>& point) {
  return evaluate_double(e.canonical(), point);
}

std::set<Symbol> free_symbols(const Expression& e) { return free_symbols(e.canonical(), false); }

std::set<Symbol> tree_symbols(const Expression& e) {
  const auto& n = *e.node_;
  switch (n.kind) {
    case Expression::Kind::Number:
      return {};
    case Expression::Kind::Symbol:
      return {n.symbol};
    case Expression::Kind::Canonical:
      return free_symbols(*n.canon, true);
    default: {
      std::set<Symbol> out;
      for (auto& c : n.children) {
        auto s = tree_symbols(c);
        out.insert(s.begin(), s.end());
      }
      return out;
    }
  }
}

bool Expression::is_zero() const {
  if (!canonical().is_zero()) return false;
  if (node_->kind == Kind::Canonical || node_->kind == Kind::Number) return true;
  auto syms = tree_symbols(*this);
  for (Symbol s : syms)
    if (s.is_atom()) return true;  // no exact values available for an independent check
  thread_local std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<long> draw(2, 10007);
  int confirmed = 0;
  for (int attempt = 0; attempt < 30 && confirmed < 3; ++attempt) {
    RationalPoint point;
    for (Symbol s : syms) point[s] = Rational(draw(rng), draw(rng));
    try {
      if (evaluate(*this, point) != 0)
        throw std::logic_error("canonical form is zero but expression evaluates nonzero: " + std::to_string(attempt));
      ++confirmed;
    } catch (const PoleError&) {
    }
  }
  return true;
}

// ------------------------------------------------------ calculus, algebra

Expression differentiate(const Expression& e, Symbol v) { return Expression::from_canonical(derivative(e.canonical(), v)); }

Expression substitute(const Expression& e, const ExprMap& s) {
  Substitution sub;
  for (auto& [k, v] : s) sub.emplace(k, v.canonical());
  return Expression::from_canonical(substitute(e.canonical(), sub));
}

std::map<Monomial, Expression, MonomialLess> linear_coefficients(const Expression& e, const std::set<Symbol>& unknowns) {
  const auto& f = e.canonical();
  for (Symbol u : unknowns)
    if (f.den().contains(u)) throw std::invalid_argument("denominator depends on unknown '" + u.name() + "'");
  std::vector<Symbol> order(unknowns.begin(), unknowns.end());
  auto rows = linear_rows(f.num(), [&](Symbol s) -> std::optional<std::size_t> {
    auto it = unknowns.find(s);
    if (it == unknowns.end()) return std::nullopt;
    return static_cast<std::size_t>(std::distance(unknowns.begin(), it));
  });
  std::map<Monomial, Expression, MonomialLess> out;
  for (auto& [m, row] : rows) {
    Polynomial p;
    for (auto& [idx, c] : row) p += Polynomial(order[idx]).scaled(c);
    out.emplace(m, Expression::from_canonical(RationalFunction(p)));
  }
  return out;
}

}  // namespace repargen
