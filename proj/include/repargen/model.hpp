#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "repargen/expression.hpp"

namespace repargen {

struct KnownInput {
  std::string name;
  int derivs = 2;  // derivatives available to the analysis; higher ones are taken as zero
};

struct UnknownInput {
  std::string name;
  int l = 1;  // w^(l+1) = 0
};

struct Constant {
  std::string name;
  Rational value;
};

struct Output {
  std::string name;
  Expression expr;
};

struct InitialCondition {
  std::string state;
  Expression expr;  // in parameters, constants and states without an initial condition
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { State, Parameter, KnownInput, UnknownInput, Constant };

// dx/dt = f(x, theta, u, w), y = g(x, theta, u, w). Constants are folded into
// the expressions when parsed and kept only for re-emission.
struct Model {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> params;
  std::vector<KnownInput> known_inputs;
  std::vector<UnknownInput> unknown_inputs;
  std::vector<Constant> constants;
  std::vector<Expression> dynamics;  // one per state, same order
  std::vector<Output> outputs;
  std::vector<InitialCondition> ics;  // ordered like states

  std::optional<Role> role(const std::string& name) const;
  const Expression& rhs(const std::string& state) const;
  const InitialCondition* ic(const std::string& state) const;
  std::vector<std::string> variables() const;  // states, params, known inputs, unknown inputs

  // Checks declarations, arity and symbol usage; throws ModelError.
  void validate() const;
};

// Name of the j-th time derivative of an input (j = 0 is the input itself).
std::string derivative_name(const std::string& input, int j);

Model parse_model(std::string_view text);
Model load_model(const std::filesystem::path& path);
std::string emit_model(const Model& m);
bool structurally_equal(const Model& a, const Model& b);

// Column classes of the observability-identifiability matrix.
enum class VarClass { State, Parameter, UnknownInput, UnknownInputDerivative };
const char* to_string(VarClass c);

// Augmented state x~ = (x, theta, w, w', ..., w^(l)) with theta' = 0 and
// w^(l+1) = 0. Known inputs keep their derivative chains outside x~.
struct AugmentedSystem {
  std::vector<Symbol> vars;
  std::vector<VarClass> classes;
  std::vector<Expression> rhs;  // d/dt of each var
  std::vector<Expression> outputs;
  std::vector<std::vector<Symbol>> known_chains;  // u, u', ..., u^(k); u^(k+1) = 0
  std::vector<std::vector<Symbol>> unknown_chains;
  std::size_t n_states = 0, n_params = 0;

  std::size_t size() const { return vars.size(); }
  std::optional<std::size_t> index_of(Symbol s) const;
};

struct AugmentOptions {
  std::optional<int> l;        // overrides every unknown input's truncation
  std::optional<int> u_derivs; // overrides every known input's derivative budget
};

AugmentedSystem augment(const Model& m, const AugmentOptions& opt = {});

// Graphviz digraph of state/parameter/input/output couplings. Nodes listed
// in `unobservable` are drawn in the light shade of their class colour.
std::string emit_dot(const Model& m, const std::map<std::string, bool>& observable = {});

}  // namespace repargen
