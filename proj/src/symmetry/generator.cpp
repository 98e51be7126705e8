#include <algorithm>
#include <cstdlib>

#include "repargen/symmetry.hpp"

namespace repargen {

namespace {

// d/dt of a symmetry variable, as seen by the prolonged action.
std::optional<Expression> time_derivative(const AugmentedSystem& a, Symbol v) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.vars[i] == v && a.classes[i] == VarClass::State) return a.rhs[i];
  for (auto& chain : a.unknown_chains)
    if (chain.front() == v) return Expression::symbol(derivative_name(v.name(), 1));
  return std::nullopt;
}

}  // namespace

std::vector<Symbol> InfinitesimalGenerator::support() const {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (!eta[i].is_zero()) out.push_back(vars[i]);
  return out;
}

const Expression& InfinitesimalGenerator::eta_of(Symbol v) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return eta[i];
  throw std::out_of_range("generator has no component for " + v.name());
}

std::size_t InfinitesimalGenerator::transformed_states() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (classes[i] == VarClass::State && !eta[i].is_zero()) ++n;
  return n;
}

Expression apply_generator(const InfinitesimalGenerator& g, const Expression& e) {
  Expression out(0);
  for (std::size_t i = 0; i < g.vars.size(); ++i) {
    if (g.eta[i].is_zero()) continue;
    Expression d = differentiate(e, g.vars[i]);
    if (!d.is_zero()) out += g.eta[i] * d;
  }
  return out;
}

bool check_generator(const InfinitesimalGenerator& g, const AugmentedSystem& a, const IcList* ics) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.classes[k] != VarClass::State) continue;
    const Expression& eta_k = g.eta_of(a.vars[k]);
    Expression prolonged(0);
    for (std::size_t i = 0; i < g.vars.size(); ++i) {
      auto flow = time_derivative(a, g.vars[i]);
      if (flow) prolonged += differentiate(eta_k, g.vars[i]) * *flow;
    }
    if (!(prolonged - apply_generator(g, a.rhs[k])).is_zero()) return false;
  }
  for (auto& y : a.outputs)
    if (!apply_generator(g, y).is_zero()) return false;
  if (ics) {
    ExprMap manifold;
    for (auto& ic : *ics) manifold.emplace(Symbol(ic.state), ic.expr);
    for (auto& ic : *ics) {
      Expression r = g.eta_of(Symbol(ic.state)) - apply_generator(g, ic.expr);
      if (!substitute(r, manifold).is_zero()) return false;
    }
  }
  return true;
}

Symbol epsilon_symbol() { return Symbol("eps"); }
Symbol exp_epsilon_symbol() { return Symbol("exp(eps)"); }

const Expression& LieTransformation::map_of(Symbol v) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return maps[i];
  throw std::out_of_range("transformation has no map for " + v.name());
}

namespace {

// Constant coefficients b with sum_i b_i s_i = 0, if any; s_0..s_{k-1} are
// assumed independent so at most one direction exists.
std::optional<Vector> constant_relation(const std::vector<Expression>& s) {
  std::vector<RationalFunction> parts;
  for (auto& e : s) parts.push_back(e.canonical());
  std::vector<Polynomial> scaled;
  // Bring everything over one denominator; reducing atom powers can bring
  // in new denominators, so repeat until the numerators are reduced.
  for (int pass = 0;; ++pass) {
    if (pass == 8) throw ClosureError("atom power reduction does not terminate");
    Polynomial l(1);
    for (auto& f : parts) l = l * *divide_exact(f.den(), gcd(l, f.den()));
    scaled.clear();
    bool again = false;
    for (auto& f : parts) {
      scaled.push_back(f.num() * *divide_exact(l, f.den()));
      again = again || needs_atom_reduction(scaled.back());
    }
    if (!again) break;
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] = reduce_atoms(scaled[i]);
  }
  std::map<Monomial, Vector, MonomialLess> table;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (auto& t : scaled[i].terms()) {
      auto& row = table[t.mono];
      row.resize(s.size());
      row[i] = t.coef;
    }
  Matrix m;
  for (auto& [mono, row] : table) m.push_back(row);
  auto kernel = nullspace(m, s.size());
  if (kernel.empty()) return std::nullopt;
  return kernel.front();
}

Rational eval_poly(const Vector& c, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Divides by (x - r); requires r to be a root.
Vector deflate(const Vector& c, const Rational& r) {
  Vector q(c.size() - 1);
  Rational carry = 0;
  for (std::size_t i = c.size(); i-- > 1;) {
    carry = carry * r + c[i];
    q[i - 1] = carry;
  }
  return q;
}

std::vector<Integer> divisors(Integer n) {
  n = abs(n);
  if (n == 0) return {};
  if (n > Integer("100000000000000")) throw ClosureError("characteristic polynomial coefficients too large");
  std::vector<Integer> out;
  for (Integer d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// Rational roots with multiplicity, in a fixed order (0 first, then by
// candidate enumeration). Throws when some root is not rational.
std::vector<std::pair<Rational, int>> rational_roots(Vector c) {
  std::vector<std::pair<Rational, int>> out;
  int zero = 0;
  while (c.size() > 1 && c.front() == 0) {
    c.erase(c.begin());
    ++zero;
  }
  if (zero) out.emplace_back(Rational(0), zero);
  if (c.size() > 1) {
    Integer lcm_den = 1;
    for (auto& x : c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
    Integer a0 = Rational(c.front() * lcm_den).get_num();
    Integer an = Rational(c.back() * lcm_den).get_num();
    auto ps = divisors(a0), qs = divisors(an);
    std::vector<Rational> candidates;
    for (auto& q : qs)
      for (auto& p : ps)
        for (int sign : {1, -1}) {
          Rational r(sign * p, q);
          r.canonicalize();
          if (std::find(candidates.begin(), candidates.end(), r) == candidates.end()) candidates.push_back(r);
        }
    for (auto& r : candidates) {
      int mult = 0;
      while (c.size() > 1 && eval_poly(c, r) == 0) {
        c = deflate(c, r);
        ++mult;
      }
      if (mult) out.emplace_back(r, mult);
    }
  }
  if (c.size() > 1) throw ClosureError("characteristic polynomial has irrational roots");
  return out;
}

Integer falling(long i, long j) {
  Integer out = 1;
  for (long t = 0; t < j; ++t) out *= (i - t);
  return out;
}

Expression exp_power(const Rational& lambda) {
  Expression z(exp_epsilon_symbol());
  if (lambda == 0) return Expression(1);
  if (is_integer(lambda)) return z.pow(lambda.get_num().get_si());
  return z.pow(lambda);
}

// Closed form of sum_n eps^n/n! s_n given the recurrence sum_i b_i s_i = 0.
Expression closed_form(const std::vector<Expression>& s, const Vector& b) {
  std::size_t k = s.size() - 1;
  Vector monic(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) monic[i] = b[i] / b[k];
  auto roots = rational_roots(monic);

  std::vector<std::pair<Rational, int>> basis;  // (lambda, j): eps^j exp(lambda eps)
  for (auto& [lambda, mult] : roots)
    for (int j = 0; j < mult; ++j) basis.emplace_back(lambda, j);

  // M[i][col] = i-th derivative of basis[col] at eps = 0; invert [M | I].
  Matrix aug(k, Vector(2 * k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t col = 0; col < k; ++col) {
      auto [lambda, j] = basis[col];
      if (static_cast<long>(i) < j) continue;
      long p = static_cast<long>(i) - j;
      aug[i][col] = Rational(falling(static_cast<long>(i), j)) * (p == 0 ? Rational(1) : pow_int(lambda, p));
    }
    aug[i][k + i] = 1;
  }
  Rref r = rref(aug, 2 * k);
  if (r.rank() < k || r.pivots[k - 1] != k - 1) throw std::logic_error("singular confluent Vandermonde system");

  Expression eps(epsilon_symbol());
  Expression out(0);
  for (std::size_t col = 0; col < k; ++col) {
    Expression c(0);
    for (std::size_t i = 0; i < k; ++i)
      if (r.rows[col][k + i] != 0) c += Expression(r.rows[col][k + i]) * s[i];
    auto [lambda, j] = basis[col];
    out += c * eps.pow(j) * exp_power(lambda);
  }
  return out.canonicalize();
}

// d/d eps when exp(eps) is carried as its own symbol.
Expression d_epsilon(const Expression& e) {
  Symbol z = exp_epsilon_symbol();
  return differentiate(e, epsilon_symbol()) + Expression(z) * differentiate(e, z);
}

}  // namespace

LieTransformation exponentiate(const InfinitesimalGenerator& g, int max_order) {
  if (max_order < 2) throw std::invalid_argument("max_order must be at least 2");
  LieTransformation t;
  t.generator = g;
  t.vars = g.vars;
  for (std::size_t v = 0; v < g.vars.size(); ++v) {
    std::vector<Expression> series{Expression(g.vars[v])};
    std::optional<Vector> relation;
    for (int k = 1; k <= max_order && !relation; ++k) {
      series.push_back(apply_generator(g, series.back()).canonicalize());
      relation = constant_relation(series);
    }
    if (!relation)
      throw ClosureError("no closed form for " + g.vars[v].name() + " within order " + std::to_string(max_order));
    t.maps.push_back(closed_form(series, *relation));
  }

  // Identity at eps = 0 and the flow equation d/d eps v* = eta_v(v*), exactly.
  ExprMap at_zero{{epsilon_symbol(), Expression(0)}, {exp_epsilon_symbol(), Expression(1)}};
  ExprMap along;
  for (std::size_t v = 0; v < t.vars.size(); ++v) along.emplace(t.vars[v], t.maps[v]);
  for (std::size_t v = 0; v < t.vars.size(); ++v) {
    if (!(substitute(t.maps[v], at_zero) - Expression(t.vars[v])).is_zero())
      throw ClosureError("closed form for " + t.vars[v].name() + " is not the identity at eps = 0");
    if (!(d_epsilon(t.maps[v]) - substitute(g.eta[v], along)).is_zero())
      throw ClosureError("closed form for " + t.vars[v].name() + " does not follow the generator's flow");
  }
  return t;
}

nlohmann::ordered_json to_json(const InfinitesimalGenerator& g) {
  nlohmann::ordered_json j;
  j["index"] = g.index;
  j["degree"] = g.degree;
  auto support = g.support();
  j["support"] = nlohmann::ordered_json::array();
  for (Symbol s : support) j["support"].push_back(s.name());
  j["eta"] = nlohmann::ordered_json::object();
  for (Symbol s : support) j["eta"][s.name()] = g.eta_of(s).str();
  return j;
}

nlohmann::ordered_json to_json(const LieTransformation& t) {
  nlohmann::ordered_json j;
  j["generator"] = to_json(t.generator);
  j["maps"] = nlohmann::ordered_json::object();
  for (Symbol s : t.generator.support()) j["maps"][s.name()] = t.map_of(s).str();
  return j;
}

}  // namespace repargen
