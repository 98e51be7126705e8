#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "repargen/fispo.hpp"
#include "repargen/symmetry.hpp"

namespace repargen {

class ReparError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters whose transformed value can be normalized to 1 by solving for
// the group parameter: maps affine in eps (with no exp(eps) anywhere in the
// transformation) or of the form p * exp(c eps), c != 0 (with no bare eps
// anywhere). Declaration order.
std::vector<Symbol> removable_parameters(const LieTransformation& t);

struct EpsilonSolution {
  Symbol param;
  bool exponential = false;  // value solves exp(eps), otherwise eps
  Expression value;
  std::vector<Symbol> vars;
  std::vector<Expression> maps;  // group parameter eliminated; map of param is 1
  const Expression& map_of(Symbol v) const;
};

EpsilonSolution solve_epsilon(const LieTransformation& t, Symbol p);

// Ordered new-name -> expression in the previous step's variables.
using Mapping = std::vector<std::pair<std::string, Expression>>;

struct ReparStep {
  InfinitesimalGenerator generator;
  LieTransformation transformation;
  EpsilonSolution solution;
  std::string eliminated;
  Mapping forward_map;  // only variables that actually change
  Model model;          // the rewritten model
  std::vector<std::string> warnings;
};

// Rewrites m with the transformed variables renamed (suffix _r<step>) and the
// eliminated parameter fixed at 1, then proves the rewrite exact: the maps
// satisfy the new dynamics along the old flow and reproduce every output.
// Initial conditions that cannot be carried over are dropped with a warning.
ReparStep apply_step(const Model& m, const EpsilonSolution& s, int step_number);

struct Candidate {
  InfinitesimalGenerator generator;
  LieTransformation transformation;
  std::vector<Symbol> removable;
  std::size_t transformed_states = 0;
};

struct SelectionPolicy {
  enum class Mode { Automatic, Pinned, Interactive };
  Mode mode = Mode::Automatic;
  std::vector<std::string> pins;  // Pinned: removal list, consumed in order
  std::istream* in = nullptr;     // Interactive
  std::ostream* out = nullptr;
};

struct ReparOptions {
  ClassifyOptions classify;
  int degree_cap = 2;
  int max_order = 8;
};

struct ReparResult {
  Model original;
  FispoReport initial_report;
  std::vector<ReparStep> steps;
  Model final_model;
  FispoReport final_report;
  Mapping composed;  // final variable -> expression in the original variables
  std::vector<std::string> warnings;
};

// Generators admitting a removable parameter for the current model, found
// with the degree escalation rule and ranked (support size, transformed
// states, degree, basis index).
std::vector<Candidate> rank_candidates(const Model& m, const ReparOptions& opt, const std::string& must_contain = {});

ReparResult autorepar(const Model& m, const SelectionPolicy& policy = {}, const ReparOptions& opt = {});

// Forward composition of the step mappings; identity for untouched variables.
Mapping compose_mapping(const ReparResult& r);

const Expression& mapping_of(const Mapping& m, const std::string& name);

nlohmann::ordered_json to_json(const ReparStep& s);
nlohmann::ordered_json to_json(const ReparResult& r);

}  // namespace repargen
