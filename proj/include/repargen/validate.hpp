#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "repargen/repar.hpp"

namespace repargen {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Concrete values for a simulation. Inputs are polynomials in t given by
// their coefficients (constant term first); every state needs an initial
// value unless the model has an initial condition for it.
struct Instantiation {
  std::map<std::string, double> params;
  std::map<std::string, double> initial;
  std::map<std::string, std::vector<double>> inputs;
  std::vector<double> grid;
};

struct SimOptions {
  double rtol = 1e-9, atol = 1e-12;
  long max_steps = 2'000'000;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::string> names;      // outputs
  std::vector<std::vector<double>> y;  // y[output][grid index]
};

// Dormand-Prince 5(4) with error control, landing exactly on the grid.
// Throws PoleError when an expression hits a pole (or an opaque power a
// non-positive base) and SimulationError when the step size collapses.
Trajectory simulate(const Model& m, const Instantiation& inst, const SimOptions& opt = {});

void write_csv(std::ostream& out, const Trajectory& tr);

struct TrialDeviation {
  std::vector<double> abs_dev, rel_dev;  // per output
  double max_rel = 0;
};

struct TrajectoryReport {
  std::string check;
  std::vector<std::string> outputs;
  std::vector<TrialDeviation> trials;
  double max_abs = 0, max_rel = 0;
  double tol = 1e-6;
  bool pass = false;
};

struct OracleOptions {
  int trials = 10;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  double horizon = 5;
  int points = 26;
  SimOptions sim;
};

// Relative deviation of two runs per output: max_t |a - b| / max_t |a|.
TrialDeviation compare(const Trajectory& a, const Trajectory& b);

// Random but reproducible instantiation of a model: parameters and initial
// states in [0.5, 1.5], unknown inputs as polynomials of degree l, known
// inputs of degree equal to their derivative budget.
Instantiation random_instantiation(const Model& m, std::uint64_t seed, double horizon, int points);

// Simulates m at a base point and at the point moved along the group orbit
// for random eps in [-1/2, 1/2]. Transformed unknown inputs are driven by
// the base trajectory, so both systems are integrated together.
TrajectoryReport symmetry_orbit_check(const Model& m, const LieTransformation& t, const OracleOptions& opt = {});

// Same, at a fixed base instantiation and group parameter.
TrajectoryReport symmetry_orbit_check(const Model& m, const LieTransformation& t, const Instantiation& base, double eps,
                                      const SimOptions& sim = {}, double tol = 1e-6);

// Original versus rewritten model, the latter instantiated through the
// mapping (final variable -> expression in original variables).
TrajectoryReport oracle_output_equivalence(const Model& original, const Model& rewritten, const Mapping& mapping,
                                           const OracleOptions& opt = {});
TrajectoryReport oracle_output_equivalence(const Model& original, const ReparResult& r, const OracleOptions& opt = {});

nlohmann::ordered_json to_json(const TrajectoryReport& r);

}  // namespace repargen
