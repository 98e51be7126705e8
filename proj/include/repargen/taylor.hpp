#pragma once

#include "repargen/linalg.hpp"
#include "repargen/model.hpp"
#include "repargen/program.hpp"

namespace repargen {

// Value and gradient with respect to the augmented variables; an empty
// gradient means zero.
struct Jet {
  Rational v;
  Vector g;
  bool is_zero() const { return v == 0 && g.empty(); }
};

// Exact Taylor expansion of the augmented system's outputs around a point,
// carrying gradients with respect to the initial values of x~. Order m of
// the output series is L^m g / m!, so its gradient is a (scaled) row of the
// observability-identifiability matrix.
class TaylorJets {
 public:
  explicit TaylorJets(const AugmentedSystem& a);

  // `point` must bind every augmented variable and every known-input chain
  // symbol; opaque powers use their bound value when present.
  void start(const RationalPoint& point);

  // Gradient rows (one per output) of the next series order.
  std::vector<Vector> next_order();
  int order() const { return m_; }

 private:
  Jet coefficient(std::size_t instr, int m);

  const AugmentedSystem& a_;
  Program prog_;
  std::vector<std::size_t> rhs_reg_, out_reg_;
  std::size_t n_;
  std::vector<std::vector<Jet>> x_;      // series of each augmented variable
  std::vector<std::vector<Jet>> known_;  // series of each known input
  std::vector<std::vector<Jet>> reg_;    // series of each instruction
  RationalPoint point_;
  int m_ = 0;
};

}  // namespace repargen
