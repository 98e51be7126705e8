#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "repargen/symmetry.hpp"

namespace repargen {

namespace {

std::vector<Monomial> monomials_upto(const std::vector<Symbol>& vars, int degree) {
  std::vector<Monomial> out{Monomial()};
  // combinations with replacement, degree by degree, in the order of vars
  std::vector<std::pair<Monomial, std::size_t>> layer{{Monomial(), 0}};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::pair<Monomial, std::size_t>> next;
    for (auto& [m, start] : layer)
      for (std::size_t i = start; i < vars.size(); ++i) {
        Monomial grown = m * Monomial(vars[i]);
        out.push_back(grown);
        next.emplace_back(grown, i);
      }
    layer = std::move(next);
  }
  return out;
}

Symbol coefficient_symbol(std::size_t i) { return Symbol("$c" + std::to_string(i)); }

// Sum of P_i * R_i where P_i is polynomial in the unknowns and R_i is an
// unknown-free rational function. Terms are grouped by denominator so the
// final common denominator needs only a handful of gcds.
class ResidualSum {
 public:
  void add(const Polynomial& p, const RationalFunction& r) {
    if (p.is_zero() || r.is_zero()) return;
    for (auto& [den, num] : groups_)
      if (den == r.den()) {
        num += p * r.num();
        return;
      }
    groups_.emplace_back(r.den(), p * r.num());
  }
  void add(const Polynomial& p) { add(p, RationalFunction(1)); }

  // Numerator over the common denominator, with atom powers reduced so that
  // equal quantities produce equal monomials.
  Polynomial numerator() const {
    Polynomial out = raw_numerator();
    for (int pass = 0; needs_atom_reduction(out); ++pass) {
      if (pass == 8) throw std::logic_error("atom power reduction does not terminate");
      ResidualSum reduced;
      for (auto& t : out.terms()) {
        std::vector<Monomial::Factor> kept;
        RationalFunction factor(t.coef);
        for (auto& [sym, e] : t.mono.factors()) {
          if (sym.is_atom() && static_cast<unsigned long>(e) >= sym.atom_info().root) {
            const auto& info = sym.atom_info();
            factor *= info.base->pow(e / static_cast<long>(info.root));
            if (e % static_cast<int>(info.root)) kept.emplace_back(sym, e % static_cast<int>(info.root));
          } else {
            kept.emplace_back(sym, e);
          }
        }
        reduced.add(Polynomial(Monomial::from_factors(std::move(kept)), 1), factor);
      }
      out = reduced.raw_numerator();
    }
    return out;
  }

 private:
  Polynomial raw_numerator() const {
    Polynomial l(1);
    for (auto& g : groups_) {
      Polynomial h = gcd(l, g.first);
      l = l * *divide_exact(g.first, h);
    }
    Polynomial out;
    for (auto& [den, num] : groups_) out += num * *divide_exact(l, den);
    return out;
  }

  std::vector<std::pair<Polynomial, Polynomial>> groups_;
};

Polynomial eta_polynomial(const AnsatzEntry& e, const std::vector<Symbol>& coeffs) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < e.monomials.size(); ++i)
    terms.push_back({e.monomials[i] * Monomial(coeffs[e.offset + i]), Rational(1)});
  return Polynomial::from_terms(std::move(terms));
}

void append_rows(SparseSystem& sys, const Polynomial& numerator,
                 const std::unordered_map<Symbol, std::size_t>& index, std::size_t& counter) {
  auto rows = linear_rows(numerator, [&](Symbol s) -> std::optional<std::size_t> {
    auto it = index.find(s);
    if (it == index.end()) return std::nullopt;
    return it->second;
  });
  for (auto& [mono, row] : rows) {
    if (row.empty()) continue;
    sys.rows.push_back(row);
    ++counter;
  }
}

}  // namespace

std::vector<Symbol> symmetry_variables(const AugmentedSystem& a) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.classes[i] == VarClass::State || a.classes[i] == VarClass::Parameter) out.push_back(a.vars[i]);
  for (auto& chain : a.unknown_chains) out.push_back(chain.front());
  return out;
}

std::vector<VarClass> symmetry_classes(const AugmentedSystem& a) {
  std::vector<VarClass> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.classes[i] == VarClass::State || a.classes[i] == VarClass::Parameter) out.push_back(a.classes[i]);
  out.insert(out.end(), a.unknown_chains.size(), VarClass::UnknownInput);
  return out;
}

const AnsatzEntry& Ansatz::entry(Symbol v) const {
  for (auto& e : entries)
    if (e.var == v) return e;
  throw std::out_of_range("no ansatz entry for " + v.name());
}

Ansatz build_ansatz(const AugmentedSystem& a, int degree) {
  if (degree < 1) throw std::invalid_argument("ansatz degree must be at least 1");
  std::vector<Symbol> states, params, ws;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.classes[i] == VarClass::State) states.push_back(a.vars[i]);
    if (a.classes[i] == VarClass::Parameter) params.push_back(a.vars[i]);
  }
  for (auto& chain : a.unknown_chains) ws.push_back(chain.front());

  std::vector<Symbol> state_deps = states;
  state_deps.insert(state_deps.end(), ws.begin(), ws.end());
  std::vector<Symbol> input_deps = states;
  input_deps.insert(input_deps.end(), params.begin(), params.end());
  input_deps.insert(input_deps.end(), ws.begin(), ws.end());

  auto state_monos = monomials_upto(state_deps, degree);
  auto input_monos = monomials_upto(input_deps, degree);
  auto param_monos = monomials_upto(params, degree);

  Ansatz z;
  z.degree = degree;
  auto push = [&](Symbol v, VarClass c, const std::vector<Monomial>& monos) {
    AnsatzEntry e{v, c, monos, z.coefficients.size()};
    for (std::size_t i = 0; i < monos.size(); ++i) z.coefficients.push_back(coefficient_symbol(z.coefficients.size()));
    z.entries.push_back(std::move(e));
  };
  for (Symbol s : states) push(s, VarClass::State, state_monos);
  for (Symbol w : ws) push(w, VarClass::UnknownInput, input_monos);
  for (Symbol p : params) push(p, VarClass::Parameter, param_monos);
  return z;
}

DeterminingSystem determining_system(const AugmentedSystem& a, const Ansatz& z, const IcList* ics) {
  DeterminingSystem out;
  out.system.cols = z.unknowns();
  std::unordered_map<Symbol, std::size_t> index;
  for (std::size_t i = 0; i < z.coefficients.size(); ++i) index.emplace(z.coefficients[i], i);

  std::unordered_map<Symbol, Polynomial> eta;
  for (auto& e : z.entries) eta.emplace(e.var, eta_polynomial(e, z.coefficients));

  // Time derivative of each ansatz variable. Unknown inputs get a free
  // derivative symbol: the symmetry must hold for any input signal.
  std::unordered_map<Symbol, RationalFunction> flow;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.classes[i] == VarClass::State) flow.emplace(a.vars[i], a.rhs[i].canonical());
  for (auto& chain : a.unknown_chains)
    flow.emplace(chain.front(), RationalFunction(Symbol(derivative_name(chain.front().name(), 1))));

  // sum_v eta_v * d(expr)/dv
  auto action = [&](ResidualSum& sum, const RationalFunction& expr, const Rational& sign) {
    for (auto& e : z.entries) {
      RationalFunction d = derivative(expr, e.var);
      if (!d.is_zero()) sum.add(eta.at(e.var).scaled(sign), d);
    }
  };

  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.classes[i] != VarClass::State) continue;
    const AnsatzEntry& entry = z.entry(a.vars[i]);
    const Polynomial& eta_k = eta.at(entry.var);
    ResidualSum sum;
    for (auto& [v, f] : flow) {
      Polynomial d = eta_k.derivative(v);
      if (!d.is_zero()) sum.add(d, f);
    }
    action(sum, a.rhs[i].canonical(), Rational(-1));
    append_rows(out.system, sum.numerator(), index, out.equations_from_states);
  }

  for (auto& g : a.outputs) {
    ResidualSum sum;
    action(sum, g.canonical(), Rational(1));
    append_rows(out.system, sum.numerator(), index, out.equations_from_outputs);
  }

  if (ics && !ics->empty()) {
    Substitution on_manifold;
    for (auto& ic : *ics) on_manifold.emplace(Symbol(ic.state), ic.expr.canonical());
    for (auto& ic : *ics) {
      ResidualSum sum;
      sum.add(eta.at(Symbol(ic.state)));
      action(sum, ic.expr.canonical(), Rational(-1));
      append_rows(out.system, substitute_numerator(sum.numerator(), on_manifold), index, out.equations_from_ics);
    }
  }
  return out;
}

std::vector<InfinitesimalGenerator> generator_basis(const AugmentedSystem& a, const Ansatz& z, const DeterminingSystem& s,
                                                    const IcList* ics) {
  auto kernel = sparse_nullspace(s.system);
  std::vector<InfinitesimalGenerator> out;
  for (auto& vec : kernel) {
    if (vec.empty()) continue;
    auto first = std::min_element(vec.begin(), vec.end(), [](auto& x, auto& y) { return x.first < y.first; });
    Rational scale = 1 / first->second;
    std::vector<Rational> coef(z.unknowns());
    for (auto& [i, c] : vec) coef[i] = c * scale;

    InfinitesimalGenerator g;
    g.degree = z.degree;
    g.vars = symmetry_variables(a);
    g.classes = symmetry_classes(a);
    for (Symbol v : g.vars) {
      const AnsatzEntry& e = z.entry(v);
      std::vector<Term> terms;
      for (std::size_t i = 0; i < e.monomials.size(); ++i)
        if (coef[e.offset + i] != 0) terms.push_back({e.monomials[i], coef[e.offset + i]});
      g.eta.push_back(Expression::from_canonical(Polynomial::from_terms(std::move(terms))));
    }
    out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.support_size() < y.support_size(); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].index = i;
    if (!check_generator(out[i], a, ics))
      throw std::logic_error("kernel vector " + std::to_string(i) + " fails the determining equations");
  }
  return out;
}

std::vector<InfinitesimalGenerator> find_generators(const AugmentedSystem& a, int degree, const IcList* ics) {
  Ansatz z = build_ansatz(a, degree);
  return generator_basis(a, z, determining_system(a, z, ics), ics);
}

}  // namespace repargen
