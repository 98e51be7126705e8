#include <algorithm>
#include <regex>

#include "repargen/repar.hpp"

namespace repargen {

namespace {

bool mentions(const Expression& e, Symbol s) {
  const auto& f = e.canonical();
  return depends_on(f, s) || free_symbols(f, true).count(s) > 0;
}

bool any_map_mentions(const LieTransformation& t, Symbol s) {
  for (auto& m : t.maps)
    if (mentions(m, s)) return true;
  return false;
}

// Exponent c when e == exp(eps)^c exactly (possibly through an opaque root).
std::optional<Rational> exp_exponent(const Expression& e) {
  const auto& f = e.canonical();
  if (!f.num().is_monomial() || !f.den().is_monomial()) return std::nullopt;
  if (f.num().leading().coef != 1 || f.den().leading().coef != 1) return std::nullopt;
  Symbol z = exp_epsilon_symbol();
  Rational c = 0;
  auto add = [&](const Monomial& m, int sign) {
    for (auto& [s, k] : m.factors()) {
      if (s == z) {
        c += sign * k;
      } else if (s.is_atom() && s.atom_info().base->num() == Polynomial(z) && s.atom_info().base->den() == Polynomial(1)) {
        c += Rational(sign * k, static_cast<long>(s.atom_info().root));
      } else {
        return false;
      }
    }
    return true;
  };
  if (!add(f.num().leading().mono, 1) || !add(f.den().leading().mono, -1)) return std::nullopt;
  c.canonicalize();
  return c;
}

std::optional<Expression> affine_slope(const Expression& map) {
  Symbol eps = epsilon_symbol();
  if (mentions(map, exp_epsilon_symbol())) return std::nullopt;
  const auto& f = map.canonical();
  if (depends_on(f.den(), eps) || f.num().degree_in(eps) != 1) return std::nullopt;
  Expression slope = differentiate(map, eps);
  if (slope.is_zero() || mentions(slope, eps)) return std::nullopt;
  return slope;
}

std::string strip_suffix(const std::string& name) {
  static const std::regex suffix("^(.*)_r[0-9]+$");
  std::smatch m;
  if (std::regex_match(name, m, suffix)) return m[1];
  return name;
}

}  // namespace

std::vector<Symbol> removable_parameters(const LieTransformation& t) {
  const auto& g = t.generator;
  bool has_exp = any_map_mentions(t, exp_epsilon_symbol());
  bool has_eps = any_map_mentions(t, epsilon_symbol());
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < t.vars.size(); ++i) {
    if (g.classes[i] != VarClass::Parameter || g.eta[i].is_zero()) continue;
    const Expression& map = t.maps[i];
    if (!has_exp && affine_slope(map)) {
      out.push_back(t.vars[i]);
      continue;
    }
    if (!has_eps) {
      auto c = exp_exponent(map / Expression(t.vars[i]));
      if (c && *c != 0) out.push_back(t.vars[i]);
    }
  }
  return out;
}

const Expression& EpsilonSolution::map_of(Symbol v) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return maps[i];
  throw std::out_of_range("solution has no map for " + v.name());
}

EpsilonSolution solve_epsilon(const LieTransformation& t, Symbol p) {
  auto removable = removable_parameters(t);
  if (std::find(removable.begin(), removable.end(), p) == removable.end())
    throw ReparError(p.name() + " is not removable by this transformation");
  const Expression& map = t.map_of(p);
  EpsilonSolution s;
  s.param = p;
  s.vars = t.vars;
  ExprMap sub;
  if (auto slope = affine_slope(map); slope && !any_map_mentions(t, exp_epsilon_symbol())) {
    Expression at_zero = substitute(map, {{epsilon_symbol(), Expression(0)}});
    s.value = ((Expression(1) - at_zero) / *slope).canonicalize();
    sub.emplace(epsilon_symbol(), s.value);
  } else {
    Rational c = *exp_exponent(map / Expression(p));
    s.exponential = true;
    Rational q = -1 / c;
    s.value = (is_integer(q) ? Expression(p).pow(q.get_num().get_si()) : Expression(p).pow(q)).canonicalize();
    sub.emplace(exp_epsilon_symbol(), s.value);
  }
  for (auto& m : t.maps) s.maps.push_back(substitute(m, sub));
  if (!(s.map_of(p) - Expression(1)).is_zero()) throw std::logic_error("unit normalization of " + p.name() + " failed");
  for (auto& m : s.maps)
    if (mentions(m, epsilon_symbol()) || mentions(m, exp_epsilon_symbol()))
      throw std::logic_error("group parameter left in a solved map");
  return s;
}

ReparStep apply_step(const Model& m, const EpsilonSolution& s, int step_number) {
  ReparStep step;
  step.solution = s;
  step.eliminated = s.param.name();
  auto existing = m.variables();
  auto taken = [&](const std::string& n) { return std::find(existing.begin(), existing.end(), n) != existing.end(); };

  ExprMap rename{{s.param, Expression(1)}};
  ExprMap forward;  // new symbol -> map in the old variables
  std::map<std::string, std::string> new_name;
  for (std::size_t i = 0; i < s.vars.size(); ++i) {
    Symbol v = s.vars[i];
    if (v == s.param || (s.maps[i] - Expression(v)).is_zero()) continue;
    std::string n = strip_suffix(v.name()) + "_r" + std::to_string(step_number);
    while (taken(n)) n += "_";
    new_name[v.name()] = n;
    rename.emplace(v, Expression::symbol(n));
    forward.emplace(Symbol(n), s.maps[i]);
    step.forward_map.emplace_back(n, s.maps[i].canonicalize());
  }
  auto renamed = [&](const std::string& n) {
    auto it = new_name.find(n);
    return it == new_name.end() ? n : it->second;
  };

  Model out = m;
  out.params.erase(std::find(out.params.begin(), out.params.end(), s.param.name()));
  for (auto& x : out.states) x = renamed(x);
  for (auto& p : out.params) p = renamed(p);
  for (auto& w : out.unknown_inputs) w.name = renamed(w.name);
  for (auto& f : out.dynamics) f = substitute(f, rename);
  for (auto& y : out.outputs) y.expr = substitute(y.expr, rename);

  // Exactness: along the old flow the maps obey the new dynamics, and the
  // outputs are reproduced.
  ExprMap flow;
  for (std::size_t i = 0; i < m.states.size(); ++i) flow.emplace(Symbol(m.states[i]), m.dynamics[i]);
  for (auto& w : m.unknown_inputs) flow.emplace(Symbol(w.name), Expression::symbol(derivative_name(w.name, 1)));
  for (auto& u : m.known_inputs) flow.emplace(Symbol(u.name), Expression::symbol(derivative_name(u.name, 1)));
  auto d_dt = [&](const Expression& e) {
    Expression acc(0);
    for (auto& [v, f] : flow) {
      Expression d = differentiate(e, v);
      if (!d.is_zero()) acc += d * f;
    }
    return acc;
  };
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    Expression image = substitute(Expression::symbol(out.states[i]), forward);
    if (!(d_dt(image) - substitute(out.dynamics[i], forward)).is_zero())
      throw ReparError("rewritten dynamics of " + out.states[i] + " do not hold along the original flow");
  }
  for (std::size_t l = 0; l < m.outputs.size(); ++l)
    if (!(substitute(out.outputs[l].expr, forward) - m.outputs[l].expr).is_zero())
      throw ReparError("output " + m.outputs[l].name + " changes under the transformation");

  ExprMap manifold;
  for (auto& ic : m.ics) manifold.emplace(Symbol(ic.state), ic.expr);
  out.ics.clear();
  for (auto& ic : m.ics) {
    InitialCondition nic{renamed(ic.state), substitute(ic.expr, rename)};
    Expression image = substitute(Expression::symbol(nic.state), forward);
    if ((substitute(image - substitute(nic.expr, forward), manifold)).is_zero()) {
      out.ics.push_back(std::move(nic));
    } else {
      step.warnings.push_back("initial condition of " + ic.state + " is not preserved by the transformation; dropped");
    }
  }
  out.validate();
  step.model = std::move(out);
  return step;
}

}  // namespace repargen
