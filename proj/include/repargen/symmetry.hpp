#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "repargen/linalg.hpp"
#include "repargen/model.hpp"

namespace repargen {

// Symmetry variables: states, parameters and unknown inputs w (not their
// derivatives), in that order.
std::vector<Symbol> symmetry_variables(const AugmentedSystem& a);
std::vector<VarClass> symmetry_classes(const AugmentedSystem& a);

struct AnsatzEntry {
  Symbol var;
  VarClass cls;
  std::vector<Monomial> monomials;  // eta_var = sum_i c_{offset+i} * monomials[i]
  std::size_t offset = 0;
};

// Polynomial infinitesimals with unknown coefficients. State eta depend on
// states and unknown inputs, parameter eta on parameters, unknown-input eta
// on states, parameters and unknown inputs. Known inputs never enter.
struct Ansatz {
  int degree = 1;
  std::vector<AnsatzEntry> entries;  // unknowns ordered: states, unknown inputs, parameters
  std::vector<Symbol> coefficients;
  std::size_t unknowns() const { return coefficients.size(); }
  const AnsatzEntry& entry(Symbol v) const;
};

Ansatz build_ansatz(const AugmentedSystem& a, int degree);

// Optional invariance of parametric initial conditions: eta_xj - X(phi_j)
// must vanish on the manifold x_j = phi_j.
using IcList = std::vector<InitialCondition>;

struct DeterminingSystem {
  SparseSystem system;
  std::size_t equations_from_states = 0, equations_from_outputs = 0, equations_from_ics = 0;
};

DeterminingSystem determining_system(const AugmentedSystem& a, const Ansatz& z, const IcList* ics = nullptr);

struct InfinitesimalGenerator {
  std::vector<Symbol> vars;
  std::vector<VarClass> classes;  // State, Parameter or UnknownInput
  std::vector<Expression> eta;    // parallel to vars
  int degree = 0;
  std::size_t index = 0;  // position in the normalized basis it came from

  std::vector<Symbol> support() const;
  std::size_t support_size() const { return support().size(); }
  const Expression& eta_of(Symbol v) const;
  std::size_t transformed_states() const;
};

// Both determining-equation families (and IC invariance, when given) vanish
// identically, checked by direct symbolic evaluation of the residuals.
bool check_generator(const InfinitesimalGenerator& g, const AugmentedSystem& a, const IcList* ics = nullptr);

// Exact kernel of the determining system as normalized generators (first
// nonzero coefficient 1), stably sorted by support size, each re-verified.
std::vector<InfinitesimalGenerator> generator_basis(const AugmentedSystem& a, const Ansatz& z, const DeterminingSystem& s,
                                                    const IcList* ics = nullptr);

// Convenience: ansatz, determining system and basis at one degree.
std::vector<InfinitesimalGenerator> find_generators(const AugmentedSystem& a, int degree, const IcList* ics = nullptr);

class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Group parameter and its exponential, which closed forms treat as two
// independent symbols.
Symbol epsilon_symbol();
Symbol exp_epsilon_symbol();

struct LieTransformation {
  InfinitesimalGenerator generator;
  std::vector<Symbol> vars;
  std::vector<Expression> maps;  // v* in terms of v, eps and exp(eps)
  const Expression& map_of(Symbol v) const;
};

// Sums the Lie series in closed form: finds the smallest k with X^k v a
// constant-coefficient combination of v, ..., X^{k-1} v and solves the
// resulting linear recurrence. Throws ClosureError when no closure exists up
// to max_order or the characteristic roots are not rational.
LieTransformation exponentiate(const InfinitesimalGenerator& g, int max_order = 8);

// Applies the infinitesimal generator X to an expression.
Expression apply_generator(const InfinitesimalGenerator& g, const Expression& e);

nlohmann::ordered_json to_json(const InfinitesimalGenerator& g);
nlohmann::ordered_json to_json(const LieTransformation& t);

}  // namespace repargen
