#include <algorithm>
#include <set>

#include "repargen/model.hpp"

namespace repargen {

std::string derivative_name(const std::string& input, int j) {
  return j == 0 ? input : input + "_d" + std::to_string(j);
}

std::optional<Role> Model::role(const std::string& n) const {
  if (std::find(states.begin(), states.end(), n) != states.end()) return Role::State;
  if (std::find(params.begin(), params.end(), n) != params.end()) return Role::Parameter;
  for (auto& u : known_inputs)
    if (u.name == n) return Role::KnownInput;
  for (auto& w : unknown_inputs)
    if (w.name == n) return Role::UnknownInput;
  for (auto& c : constants)
    if (c.name == n) return Role::Constant;
  return std::nullopt;
}

const Expression& Model::rhs(const std::string& state) const {
  auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) throw ModelError("no state named '" + state + "'");
  return dynamics.at(static_cast<std::size_t>(it - states.begin()));
}

const InitialCondition* Model::ic(const std::string& state) const {
  for (auto& c : ics)
    if (c.state == state) return &c;
  return nullptr;
}

std::vector<std::string> Model::variables() const {
  std::vector<std::string> v = states;
  v.insert(v.end(), params.begin(), params.end());
  for (auto& u : known_inputs) v.push_back(u.name);
  for (auto& w : unknown_inputs) v.push_back(w.name);
  return v;
}

void Model::validate() const {
  if (states.empty()) throw ModelError("model must declare at least one state");
  if (outputs.empty()) throw ModelError("model must declare at least one output");
  if (dynamics.size() != states.size())
    throw ModelError("arity mismatch: " + std::to_string(states.size()) + " states but " + std::to_string(dynamics.size()) +
                     " equations");
  std::set<std::string> seen;
  auto declare = [&](const std::string& n) {
    if (!seen.insert(n).second) throw ModelError("duplicate declaration of '" + n + "'");
  };
  for (auto& n : variables()) declare(n);
  for (auto& c : constants) declare(c.name);
  for (auto& o : outputs) declare(o.name);
  auto check_chain = [&](const std::string& input, int depth) {
    for (int j = 1; j <= depth + 1; ++j)
      if (seen.count(derivative_name(input, j)))
        throw ModelError("name '" + derivative_name(input, j) + "' is reserved for a derivative of '" + input + "'");
  };
  for (auto& u : known_inputs) {
    if (u.derivs < 0) throw ModelError("negative derivative budget for '" + u.name + "'");
    check_chain(u.name, u.derivs);
  }
  for (auto& w : unknown_inputs) {
    if (w.l < 0) throw ModelError("negative truncation order for '" + w.name + "'");
    check_chain(w.name, w.l);
  }

  auto allowed = [&](const Expression& e, std::initializer_list<Role> roles, const std::string& where) {
    for (Symbol s : free_symbols(e)) {
      auto r = role(s.name());
      if (!r || std::find(roles.begin(), roles.end(), *r) == roles.end())
        throw ModelError("symbol '" + s.name() + "' not allowed in " + where);
    }
  };
  const auto dyn_roles = {Role::State, Role::Parameter, Role::KnownInput, Role::UnknownInput};
  for (std::size_t i = 0; i < states.size(); ++i) allowed(dynamics[i], dyn_roles, "ddt " + states[i]);
  for (auto& o : outputs) allowed(o.expr, dyn_roles, "output " + o.name);
  std::set<std::string> with_ic;
  for (auto& c : ics) {
    if (role(c.state) != Role::State) throw ModelError("initial condition for non-state '" + c.state + "'");
    if (!with_ic.insert(c.state).second) throw ModelError("duplicate initial condition for '" + c.state + "'");
  }
  for (auto& c : ics) {
    allowed(c.expr, {Role::State, Role::Parameter}, "ic " + c.state);
    for (Symbol s : free_symbols(c.expr))
      if (with_ic.count(s.name())) throw ModelError("ic " + c.state + " refers to '" + s.name() + "', which has its own initial condition");
  }
}

const char* to_string(VarClass c) {
  switch (c) {
    case VarClass::State: return "state";
    case VarClass::Parameter: return "parameter";
    case VarClass::UnknownInput: return "unknown_input";
    case VarClass::UnknownInputDerivative: return "unknown_input_derivative";
  }
  return "?";
}

std::optional<std::size_t> AugmentedSystem::index_of(Symbol s) const {
  auto it = std::find(vars.begin(), vars.end(), s);
  if (it == vars.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vars.begin());
}

AugmentedSystem augment(const Model& m, const AugmentOptions& opt) {
  m.validate();
  AugmentedSystem a;
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    a.vars.emplace_back(m.states[i]);
    a.classes.push_back(VarClass::State);
    a.rhs.push_back(m.dynamics[i].canonicalize());
  }
  for (auto& p : m.params) {
    a.vars.emplace_back(p);
    a.classes.push_back(VarClass::Parameter);
    a.rhs.emplace_back(0);
  }
  for (auto& w : m.unknown_inputs) {
    int l = opt.l.value_or(w.l);
    std::vector<Symbol> chain;
    for (int j = 0; j <= l; ++j) chain.emplace_back(derivative_name(w.name, j));
    for (int j = 0; j <= l; ++j) {
      a.vars.push_back(chain[j]);
      a.classes.push_back(j == 0 ? VarClass::UnknownInput : VarClass::UnknownInputDerivative);
      a.rhs.push_back(j < l ? Expression(chain[j + 1]) : Expression(0));
    }
    a.unknown_chains.push_back(std::move(chain));
  }
  for (auto& u : m.known_inputs) {
    int k = opt.u_derivs.value_or(u.derivs);
    std::vector<Symbol> chain;
    for (int j = 0; j <= k; ++j) chain.emplace_back(derivative_name(u.name, j));
    a.known_chains.push_back(std::move(chain));
  }
  for (auto& o : m.outputs) a.outputs.push_back(o.expr.canonicalize());
  a.n_states = m.states.size();
  a.n_params = m.params.size();
  return a;
}

bool structurally_equal(const Model& a, const Model& b) {
  if (a.name != b.name || a.states != b.states || a.params != b.params) return false;
  if (a.known_inputs.size() != b.known_inputs.size() || a.unknown_inputs.size() != b.unknown_inputs.size()) return false;
  for (std::size_t i = 0; i < a.known_inputs.size(); ++i)
    if (a.known_inputs[i].name != b.known_inputs[i].name || a.known_inputs[i].derivs != b.known_inputs[i].derivs) return false;
  for (std::size_t i = 0; i < a.unknown_inputs.size(); ++i)
    if (a.unknown_inputs[i].name != b.unknown_inputs[i].name || a.unknown_inputs[i].l != b.unknown_inputs[i].l) return false;
  if (a.constants.size() != b.constants.size()) return false;
  for (std::size_t i = 0; i < a.constants.size(); ++i)
    if (a.constants[i].name != b.constants[i].name || a.constants[i].value != b.constants[i].value) return false;
  if (a.dynamics.size() != b.dynamics.size() || a.outputs.size() != b.outputs.size() || a.ics.size() != b.ics.size())
    return false;
  for (std::size_t i = 0; i < a.dynamics.size(); ++i)
    if (!(a.dynamics[i] == b.dynamics[i])) return false;
  for (std::size_t i = 0; i < a.outputs.size(); ++i)
    if (a.outputs[i].name != b.outputs[i].name || !(a.outputs[i].expr == b.outputs[i].expr)) return false;
  for (std::size_t i = 0; i < a.ics.size(); ++i)
    if (a.ics[i].state != b.ics[i].state || !(a.ics[i].expr == b.ics[i].expr)) return false;
  return true;
}

}  // namespace repargen
