#include "repargen/rational_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repargen {

namespace {

Polynomial exact_div(const Polynomial& a, const Polynomial& b) {
  auto q = divide_exact(a, b);
  if (!q) throw std::logic_error("rational function: inexact division");
  return *q;
}

}  // namespace

bool needs_atom_reduction(const Polynomial& p) {
  for (auto& t : p.terms())
    for (auto& [s, e] : t.mono.factors())
      if (s.is_atom() && static_cast<unsigned long>(e) >= s.atom_info().root) return true;
  return false;
}

RationalFunction reduce_atoms(const Polynomial& p) {
  RationalFunction sum;
  for (auto& t : p.terms()) {
    RationalFunction term(t.coef);
    std::vector<Monomial::Factor> plain;
    for (auto& [s, e] : t.mono.factors()) {
      if (s.is_atom() && static_cast<unsigned long>(e) >= s.atom_info().root) {
        const auto& info = s.atom_info();
        long whole = e / static_cast<long>(info.root);
        int rest = e % static_cast<int>(info.root);
        term *= info.base->pow(whole);
        if (rest > 0) plain.emplace_back(s, rest);
      } else {
        plain.emplace_back(s, e);
      }
    }
    term *= RationalFunction(Polynomial(Monomial::from_factors(std::move(plain)), 1));
    sum += term;
  }
  return sum;
}

RationalFunction::RationalFunction(Polynomial p) : num_(std::move(p)), den_(1) {
  if (needs_atom_reduction(num_)) *this = reduce_atoms(num_);
}

RationalFunction RationalFunction::make(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw PoleError("division by zero");
  if (needs_atom_reduction(num) || needs_atom_reduction(den)) return reduce_atoms(num) / reduce_atoms(den);
  RationalFunction r;
  if (num.is_zero()) return r;
  if (den.is_constant()) {
    r.num_ = num.scaled(Rational(1) / den.constant_value());
    return r;
  }
  Polynomial g = gcd(num, den);
  Polynomial n = g.is_constant() ? num : exact_div(num, g);
  Polynomial d = g.is_constant() ? den : exact_div(den, g);
  Rational lc = d.leading().coef;
  if (lc != 1) {
    n = n.scaled(Rational(1) / lc);
    d = d.scaled(Rational(1) / lc);
  }
  r.num_ = std::move(n);
  r.den_ = std::move(d);
  return r;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  RationalFunction r;
  if (den_ == o.den_) {
    if (den_.is_constant()) {
      r.num_ = num_ + o.num_;
      return r;
    }
    return make(num_ + o.num_, den_);
  }
  // Henrici: only the common factor of the denominators can cancel.
  Polynomial g = gcd(den_, o.den_);
  Polynomial a = g.is_constant() ? den_ : exact_div(den_, g);
  Polynomial b = g.is_constant() ? o.den_ : exact_div(o.den_, g);
  Polynomial n = num_ * b + o.num_ * a;
  Polynomial d = den_ * b;
  if (g.is_constant() && !needs_atom_reduction(n) && !needs_atom_reduction(d)) {
    r.num_ = n.scaled(Rational(1) / d.leading().coef);
    r.den_ = d.monic();
    if (r.num_.is_zero()) r.den_ = Polynomial(1);
    return r;
  }
  return make(n, d);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const { return *this + (-o); }

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  if (is_zero() || o.is_zero()) return {};
  if (is_constant()) {
    RationalFunction r = o;
    r.num_ = r.num_.scaled(constant_value());
    return r;
  }
  if (o.is_constant()) return o * *this;
  Polynomial g1 = o.den_.is_constant() ? Polynomial(1) : gcd(num_, o.den_);
  Polynomial g2 = den_.is_constant() ? Polynomial(1) : gcd(o.num_, den_);
  Polynomial n1 = g1.is_constant() ? num_ : exact_div(num_, g1);
  Polynomial d2 = g1.is_constant() ? o.den_ : exact_div(o.den_, g1);
  Polynomial n2 = g2.is_constant() ? o.num_ : exact_div(o.num_, g2);
  Polynomial d1 = g2.is_constant() ? den_ : exact_div(den_, g2);
  Polynomial n = n1 * n2, d = d1 * d2;
  if (needs_atom_reduction(n) || needs_atom_reduction(d)) return make(n, d);
  RationalFunction r;
  Rational lc = d.leading().coef;
  r.num_ = n.scaled(Rational(1) / lc);
  r.den_ = d.scaled(Rational(1) / lc);
  return r;
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  if (o.is_zero()) throw PoleError("division by zero");
  RationalFunction inv;
  Rational lc = o.num_.leading().coef;
  inv.num_ = o.den_.scaled(Rational(1) / lc);
  inv.den_ = o.num_.scaled(Rational(1) / lc);
  return *this * inv;
}

RationalFunction RationalFunction::pow(long n) const {
  if (n < 0) return RationalFunction(1) / pow(-n);
  RationalFunction result(1), base = *this;
  while (n) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

std::string RationalFunction::to_string() const {
  if (den_.is_constant()) return num_.to_string();
  std::string n = num_.size() > 1 ? "(" + num_.to_string() + ")" : num_.to_string();
  bool bare = den_.is_monomial() && den_.leading().coef == 1 && den_.leading().mono.factors().size() == 1 &&
              den_.leading().mono.factors()[0].second == 1 && !den_.leading().mono.factors()[0].first.is_atom();
  return n + "/" + (bare ? den_.to_string() : "(" + den_.to_string() + ")");
}

// ------------------------------------------------------------------ powers

RationalFunction power(const RationalFunction& base, const Rational& q) {
  if (is_integer(q)) {
    if (!q.get_num().fits_slong_p()) throw std::overflow_error("exponent too large");
    return base.pow(q.get_num().get_si());
  }
  if (base.is_zero()) {
    if (q > 0) return {};
    throw PoleError("zero to a negative power");
  }
  if (base.is_constant())
    if (auto v = exact_power(base.constant_value(), q)) return RationalFunction(*v);
  if (!q.get_den().fits_ulong_p() || !q.get_num().fits_slong_p()) throw std::overflow_error("exponent too large");
  unsigned long root = q.get_den().get_ui();
  long p = q.get_num().get_si();
  long whole = p >= 0 ? p / static_cast<long>(root) : -((-p + static_cast<long>(root) - 1) / static_cast<long>(root));
  long rest = p - whole * static_cast<long>(root);

  auto info = std::make_shared<AtomInfo>();
  info->base = std::make_shared<const RationalFunction>(base);
  info->root = root;
  auto syms = free_symbols(base, true);
  info->base_symbols.assign(syms.begin(), syms.end());
  std::string name = "(" + base.to_string() + ")^(1/" + std::to_string(root) + ")";
  Symbol atom = Symbol::atom(name, std::move(info));
  return base.pow(whole) * RationalFunction(Polynomial(Monomial(atom, static_cast<int>(rest)), 1));
}

// -------------------------------------------------------- symbol queries

namespace {

void collect(const Polynomial& p, std::set<Symbol>& out, bool with_atoms) {
  for (auto& t : p.terms())
    for (auto& f : t.mono.factors()) {
      Symbol s = f.first;
      if (s.is_atom()) {
        if (with_atoms) out.insert(s);
        for (Symbol b : s.atom_info().base_symbols)
          if (with_atoms || !b.is_atom()) out.insert(b);
      } else {
        out.insert(s);
      }
    }
}

bool symbol_depends(Symbol s, Symbol v) {
  if (s == v) return true;
  if (!s.is_atom()) return false;
  const auto& bs = s.atom_info().base_symbols;
  return std::binary_search(bs.begin(), bs.end(), v);
}

bool poly_depends(const Polynomial& p, Symbol v) {
  for (auto& t : p.terms())
    for (auto& f : t.mono.factors())
      if (symbol_depends(f.first, v)) return true;
  return false;
}

}  // namespace

std::set<Symbol> free_symbols(const RationalFunction& f, bool with_atoms) {
  std::set<Symbol> out;
  collect(f.num(), out, with_atoms);
  collect(f.den(), out, with_atoms);
  return out;
}

bool depends_on(const RationalFunction& f, Symbol v) { return poly_depends(f.num(), v) || poly_depends(f.den(), v); }

bool has_atoms(const RationalFunction& f) {
  for (const Polynomial* p : {&f.num(), &f.den()})
    for (auto& t : p->terms())
      for (auto& fac : t.mono.factors())
        if (fac.first.is_atom()) return true;
  return false;
}

std::set<Symbol> atoms_of(const RationalFunction& f) {
  std::set<Symbol> out;
  for (Symbol s : free_symbols(f, true))
    if (s.is_atom()) out.insert(s);
  return out;
}

// ------------------------------------------------------------ derivative

namespace {

RationalFunction atom_derivative(Symbol atom, Symbol v) {
  const auto& info = atom.atom_info();
  RationalFunction db = derivative(*info.base, v);
  if (db.is_zero()) return {};
  return RationalFunction(Rational(1, info.root)) * RationalFunction(atom) * db / *info.base;
}

RationalFunction poly_derivative(const Polynomial& p, Symbol v) {
  RationalFunction d(p.derivative(v));
  for (Symbol s : p.variables())
    if (s.is_atom() && symbol_depends(s, v)) d += RationalFunction(p.derivative(s)) * atom_derivative(s, v);
  return d;
}

}  // namespace

RationalFunction derivative(const RationalFunction& f, Symbol v) {
  if (!depends_on(f, v)) return {};
  RationalFunction dn = poly_derivative(f.num(), v);
  if (f.den().is_constant()) return dn * RationalFunction(Rational(1) / f.den().constant_value());
  RationalFunction dd = poly_derivative(f.den(), v);
  RationalFunction n(f.num()), d(f.den());
  return (dn * d - n * dd) / (d * d);
}

// ---------------------------------------------------------- substitution

Polynomial substitute_numerator(const Polynomial& p, const Substitution& s, Polynomial* denominator) {
  struct Change {
    Symbol sym;
    Polynomial num, den;
    int max_deg;
    std::vector<Polynomial> num_pow, den_pow;
  };
  std::vector<Change> changes;
  for (Symbol v : p.variables()) {
    auto it = s.find(v);
    RationalFunction value;
    if (it != s.end()) {
      value = it->second;
    } else if (v.is_atom()) {
      const auto& info = v.atom_info();
      bool touched = false;
      for (Symbol b : info.base_symbols)
        if (s.count(b)) touched = true;
      if (!touched) continue;
      value = power(substitute(*info.base, s), Rational(1, info.root));
    } else {
      continue;
    }
    changes.push_back(Change{v, value.num(), value.den(), p.degree_in(v), {}, {}});
  }
  if (changes.empty()) {
    if (denominator) *denominator = Polynomial(1);
    return p;
  }

  Polynomial common(1);
  for (auto& c : changes) {
    c.num_pow.push_back(Polynomial(1));
    c.den_pow.push_back(Polynomial(1));
    for (int k = 1; k <= c.max_deg; ++k) {
      c.num_pow.push_back(c.num_pow.back() * c.num);
      c.den_pow.push_back(c.den.is_constant() ? Polynomial(1) : c.den_pow.back() * c.den);
    }
    if (!c.den.is_constant()) common *= c.den_pow.back();
  }
  Polynomial total;
  for (auto& t : p.terms()) {
    std::vector<Monomial::Factor> kept;
    Polynomial term(1);
    for (auto& [v, e] : t.mono.factors()) {
      auto it = std::find_if(changes.begin(), changes.end(), [&](const Change& c) { return c.sym == v; });
      if (it == changes.end()) {
        kept.emplace_back(v, e);
        continue;
      }
      term *= it->num_pow[e];
    }
    for (auto& c : changes)
      if (!c.den.is_constant()) term *= c.den_pow[c.max_deg - t.mono.degree_in(c.sym)];
    Rational scale = t.coef;
    for (auto& c : changes)
      if (c.den.is_constant() && c.den.constant_value() != 1) scale /= pow_int(c.den.constant_value(), t.mono.degree_in(c.sym));
    total += term.times(Monomial::from_factors(std::move(kept)), scale);
  }
  if (denominator) *denominator = std::move(common);
  return total;
}

RationalFunction substitute(const Polynomial& p, const Substitution& s) {
  Polynomial den;
  Polynomial num = substitute_numerator(p, s, &den);
  return RationalFunction::make(num, den);
}

RationalFunction substitute(const RationalFunction& f, const Substitution& s) {
  RationalFunction n = substitute(f.num(), s);
  if (f.den().is_constant()) return n * RationalFunction(Rational(1) / f.den().constant_value());
  return n / substitute(f.den(), s);
}

// ------------------------------------------------------------ evaluation

namespace {

Rational symbol_value(Symbol s, const RationalPoint& point) {
  if (auto it = point.find(s); it != point.end()) return it->second;
  if (!s.is_atom()) throw std::out_of_range("no value for symbol '" + s.name() + "'");
  const auto& info = s.atom_info();
  Rational b = evaluate(*info.base, point);
  if (auto r = exact_power(b, Rational(1, info.root))) return *r;
  throw std::domain_error("opaque power " + s.name() + " has no exact value here");
}

double symbol_value_double(Symbol s, const std::unordered_map<Symbol, double>& point) {
  if (auto it = point.find(s); it != point.end()) return it->second;
  if (!s.is_atom()) throw std::out_of_range("no value for symbol '" + s.name() + "'");
  const auto& info = s.atom_info();
  double b = evaluate_double(*info.base, point);
  if (!(b > 0)) throw PoleError("opaque power of a non-positive base");
  return std::pow(b, 1.0 / static_cast<double>(info.root));
}

double eval_poly_double(const Polynomial& p, const std::unordered_map<Symbol, double>& point) {
  double sum = 0;
  for (auto& t : p.terms()) {
    double v = t.coef.get_d();
    for (auto& [s, e] : t.mono.factors()) v *= std::pow(symbol_value_double(s, point), e);
    sum += v;
  }
  return sum;
}

}  // namespace

Rational evaluate(const Polynomial& p, const RationalPoint& point) {
  return p.evaluate([&](Symbol s) { return symbol_value(s, point); });
}

Rational evaluate(const RationalFunction& f, const RationalPoint& point) {
  Rational d = evaluate(f.den(), point);
  if (d == 0) throw PoleError("pole: denominator vanishes");
  return evaluate(f.num(), point) / d;
}

double evaluate_double(const RationalFunction& f, const std::unordered_map<Symbol, double>& point) {
  double d = eval_poly_double(f.den(), point);
  if (d == 0 || !std::isfinite(d)) throw PoleError("pole: denominator vanishes");
  return eval_poly_double(f.num(), point) / d;
}

}  // namespace repargen
