#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "repargen/linalg.hpp"
#include "repargen/model.hpp"

namespace repargen {

// L^0 g = g, L^{i+1} g = dL^i/dx~ . f^l + sum_j dL^i/du^(j) u^(j+1).
// Result[i][l] is L^i of output l.
std::vector<std::vector<Expression>> extended_lie_derivatives(const AugmentedSystem& a, int k_max);

struct OIMatrix {
  std::vector<Symbol> columns;                 // augmented variable order
  std::vector<std::vector<Expression>> rows;   // block i holds n_y rows d(L^i g)/dx~
  int k = 0;
};

OIMatrix build_oi_matrix(const AugmentedSystem& a, int k);

struct SamplingOptions {
  std::uint64_t seed = 1;
  long lo = 2, hi = 10000;
  int redraws = 50;
};

// Maximum exact rank over `trials` random integer points.
std::size_t generic_rank(const OIMatrix& m, int trials, const SamplingOptions& s = {});

Matrix evaluate_matrix(const OIMatrix& m, const RationalPoint& point);

// Portable deterministic generator (the standard distributions are
// implementation-defined, so values are drawn by hand).
class PointSampler {
 public:
  PointSampler(std::uint64_t seed, long lo, long hi) : rng_(seed), lo_(lo), hi_(hi) {}
  Rational draw() { return Rational(lo_ + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi_ - lo_ + 1))); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  long lo_, hi_;
};

// Random values for every augmented variable, known-input derivative and
// opaque power of the system. With `model` given, states with initial
// conditions are moved onto their IC manifold.
RationalPoint random_point(const AugmentedSystem& a, PointSampler& s, const Model* ics_from = nullptr);

// Rows 0..k of the OI matrix at a point, computed by exact Taylor expansion.
// Row block i equals d(L^i g)/dx~ (already rescaled by i!).
Matrix series_oi_matrix(const AugmentedSystem& a, const RationalPoint& point, int k);

struct ClassifyOptions {
  AugmentOptions augment;
  int trials = 3;
  SamplingOptions sampling;
  bool early_stop = true;
  bool use_ics = false;         // constrain the point and the matrix by the model's ICs
  std::optional<int> max_order; // default n_x~ - 1
};

struct Verdict {
  std::string name;
  bool positive;  // identifiable / observable
};

struct FispoReport {
  std::string model;
  int l = 0;
  int k_used = 0;
  std::size_t rank = 0, dim = 0;
  bool fispo = false;
  std::vector<Verdict> params, states, unknown_inputs, unknown_input_derivatives;
  std::size_t transformations_needed = 0;
  std::uint64_t seed = 0;
  int trials = 0;
  bool ics_used = false;

  bool positive(const std::string& name) const;
  std::vector<std::string> negatives() const;  // params, states and unknown inputs without a positive verdict
  std::vector<std::string> unidentifiable_params() const;
  std::vector<std::string> identifiable_params() const;
};

FispoReport classify(const Model& m, const ClassifyOptions& opt = {});
std::size_t transformations_needed(const FispoReport& r);

nlohmann::ordered_json to_json(const FispoReport& r);

}  // namespace repargen
