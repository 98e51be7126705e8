#pragma once

#include <utility>
#include <vector>

#include "repargen/validate.hpp"

namespace repargen::detail {

// A closed ODE system ready for integration. Constants and polynomial
// inputs are bound by value; everything else must be a state.
struct OdeSystem {
  std::vector<Symbol> states;
  std::vector<Expression> rhs;
  std::vector<double> initial;
  std::vector<Expression> outputs;
  std::vector<std::string> output_names;
  std::vector<std::pair<Symbol, double>> constants;
  std::vector<std::pair<Symbol, std::vector<double>>> inputs;
};

Trajectory integrate(const OdeSystem& s, const std::vector<double>& grid, const SimOptions& opt);

}  // namespace repargen::detail
