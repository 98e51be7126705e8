#include <algorithm>
#include <cmath>
#include <ostream>

#include "repargen/program.hpp"
#include "validate_internal.hpp"

namespace repargen::detail {

namespace {

double eval_poly(const std::vector<double>& c, double t) {
  double acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

class CompiledRhs {
 public:
  explicit CompiledRhs(const OdeSystem& s) : sys_(s), prog_(slots(s)) {
    for (auto& f : s.rhs) rhs_.push_back(prog_.add(f.canonical()));
    for (auto& g : s.outputs) out_.push_back(prog_.add(g.canonical()));
    values_.resize(prog_.inputs().size());
    std::size_t k = s.states.size();
    for (auto& [sym, v] : s.constants) values_[k++] = v;
  }

  void rhs(double t, const std::vector<double>& y, std::vector<double>& dy) {
    load(t, y);
    for (std::size_t i = 0; i < rhs_.size(); ++i) {
      dy[i] = regs_[rhs_[i]];
      if (!std::isfinite(dy[i])) throw PoleError("non-finite derivative at t = " + std::to_string(t));
    }
  }

  void outputs(double t, const std::vector<double>& y, std::vector<double>& out) {
    load(t, y);
    for (std::size_t i = 0; i < out_.size(); ++i) out[i] = regs_[out_[i]];
  }

 private:
  static std::vector<Symbol> slots(const OdeSystem& s) {
    std::vector<Symbol> v = s.states;
    for (auto& [sym, val] : s.constants) v.push_back(sym);
    for (auto& [sym, c] : s.inputs) v.push_back(sym);
    return v;
  }

  void load(double t, const std::vector<double>& y) {
    std::copy(y.begin(), y.end(), values_.begin());
    std::size_t k = sys_.states.size() + sys_.constants.size();
    for (auto& [sym, c] : sys_.inputs) values_[k++] = eval_poly(c, t);
    prog_.run(values_, regs_);
  }

  const OdeSystem& sys_;
  Program prog_;
  std::vector<std::size_t> rhs_, out_;
  std::vector<double> values_, regs_;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

}  // namespace

Trajectory integrate(const OdeSystem& s, const std::vector<double>& grid, const SimOptions& opt) {
  if (grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  if (s.initial.size() != s.states.size()) throw std::invalid_argument("initial state has the wrong size");

  CompiledRhs f(s);
  const std::size_t n = s.states.size();
  Trajectory tr;
  tr.t = grid;
  tr.names = s.output_names;
  tr.y.assign(s.outputs.size(), std::vector<double>(grid.size()));
  std::vector<double> out(s.outputs.size());
  auto record = [&](std::size_t gi, double t, const std::vector<double>& y) {
    f.outputs(t, y, out);
    for (std::size_t j = 0; j < out.size(); ++j) tr.y[j][gi] = out[j];
  };

  std::vector<double> y = s.initial, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  double t = grid.front();
  record(0, t, y);
  double span = grid.back() - grid.front();
  double h = span > 0 ? span * 1e-3 : 1e-3;
  f.rhs(t, y, k1);
  long steps = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    double target = grid[gi];
    while (t < target) {
      if (++steps > opt.max_steps) throw SimulationError("step budget exhausted at t = " + std::to_string(t));
      bool last = t + h >= target;
      double step = last ? target - t : h;
      if (step < 1e-14 * std::max(1.0, std::abs(t)))
        throw SimulationError("step size collapsed at t = " + std::to_string(t));
      auto stage = [&](std::vector<double>& dst, double ct,
                       std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = y[i];
          for (auto& [a, k] : terms) acc += step * a * (*k)[i];
          tmp[i] = acc;
        }
        f.rhs(t + ct * step, tmp, dst);
      };
      stage(k2, c2, {{a21, &k1}});
      stage(k3, c3, {{a31, &k1}, {a32, &k2}});
      stage(k4, c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      stage(k5, c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      stage(k6, 1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      for (std::size_t i = 0; i < n; ++i)
        y5[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      f.rhs(t + step, y5, k7);
      double err = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err += (e / sc) * (e / sc);
      }
      err = n ? std::sqrt(err / static_cast<double>(n)) : 0;
      if (!std::isfinite(err)) {
        h = step * 0.2;
        continue;
      }
      double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1) {
        t = last ? target : t + step;
        y.swap(y5);
        k1.swap(k7);  // first same as last
        // a step shortened to hit the grid says little about the next one
        h = last ? std::max(h, step * factor) : step * factor;
      } else {
        h = step * std::min(1.0, factor);
      }
    }
    record(gi, t, y);
  }
  return tr;
}

}  // namespace repargen::detail

namespace repargen {

void write_csv(std::ostream& out, const Trajectory& tr) {
  out << "t";
  for (auto& n : tr.names) out << "," << n;
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    out << tr.t[i];
    for (auto& col : tr.y) out << "," << col[i];
    out << "\n";
  }
}

}  // namespace repargen
