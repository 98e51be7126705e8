#include <algorithm>
#include <cmath>
#include <random>

#include "validate_internal.hpp"

namespace repargen {

using detail::OdeSystem;

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    double u = static_cast<double>(rng_() >> 11) * 0x1p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

double eval_poly(const std::vector<double>& c, double t) {
  double acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

using Point = std::unordered_map<Symbol, double>;

// Numeric values of a model's parameters, inputs at t0 and initial states
// (initial conditions evaluated where the model has them).
Point base_point(const Model& m, const Instantiation& inst) {
  Point p;
  for (auto& name : m.params) {
    auto it = inst.params.find(name);
    if (it == inst.params.end()) throw std::invalid_argument("no value for parameter " + name);
    p[Symbol(name)] = it->second;
  }
  double t0 = inst.grid.empty() ? 0.0 : inst.grid.front();
  auto input_value = [&](const std::string& name) {
    auto it = inst.inputs.find(name);
    if (it == inst.inputs.end()) throw std::invalid_argument("no signal for input " + name);
    return eval_poly(it->second, t0);
  };
  for (auto& u : m.known_inputs) p[Symbol(u.name)] = input_value(u.name);
  for (auto& w : m.unknown_inputs) p[Symbol(w.name)] = input_value(w.name);
  for (auto& x : m.states)
    if (!m.ic(x)) {
      auto it = inst.initial.find(x);
      if (it == inst.initial.end()) throw std::invalid_argument("no initial value for state " + x);
      p[Symbol(x)] = it->second;
    }
  for (auto& ic : m.ics) p[Symbol(ic.state)] = evaluate_double(ic.expr, p);
  return p;
}

// Adds m to s. Symbols are prefixed so that two copies can coexist; the
// inputs of m are either polynomial signals from `inst` or, when listed in
// `driven`, expressions in symbols already present in s.
void add_model(OdeSystem& s, const Model& m, const std::string& prefix, const Point& point,
               const Instantiation* inst, const ExprMap& driven) {
  ExprMap rename;
  auto local = [&](const std::string& n) { return Symbol(prefix + n); };
  if (!prefix.empty()) {
    for (auto& v : m.variables()) rename.emplace(Symbol(v), Expression(local(v)));
  }
  for (auto& [sym, e] : driven) rename[sym] = e;
  auto bind = [&](const Expression& e) { return rename.empty() ? e : substitute(e, rename); };

  for (auto& p : m.params) s.constants.emplace_back(local(p), point.at(Symbol(p)));
  auto add_input = [&](const std::string& name) {
    if (driven.count(Symbol(name))) return;
    if (!inst) throw std::invalid_argument("no signal for input " + name);
    s.inputs.emplace_back(local(name), inst->inputs.at(name));
  };
  for (auto& u : m.known_inputs) add_input(u.name);
  for (auto& w : m.unknown_inputs) add_input(w.name);
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    s.states.push_back(local(m.states[i]));
    s.rhs.push_back(bind(m.dynamics[i]));
    s.initial.push_back(point.at(Symbol(m.states[i])));
  }
  for (auto& y : m.outputs) {
    s.outputs.push_back(bind(y.expr));
    s.output_names.push_back(prefix + y.name);
  }
}

OdeSystem single(const Model& m, const Instantiation& inst) {
  OdeSystem s;
  add_model(s, m, "", base_point(m, inst), &inst, {});
  return s;
}

// Splits the outputs of a joint run into the two copies.
std::pair<Trajectory, Trajectory> split(const Trajectory& joint, std::size_t first) {
  Trajectory a, b;
  a.t = b.t = joint.t;
  a.names.assign(joint.names.begin(), joint.names.begin() + static_cast<long>(first));
  b.names.assign(joint.names.begin() + static_cast<long>(first), joint.names.end());
  a.y.assign(joint.y.begin(), joint.y.begin() + static_cast<long>(first));
  b.y.assign(joint.y.begin() + static_cast<long>(first), joint.y.end());
  return {a, b};
}

void accumulate(TrajectoryReport& r, const TrialDeviation& d) {
  for (double v : d.abs_dev) r.max_abs = std::max(r.max_abs, v);
  r.max_rel = std::max(r.max_rel, d.max_rel);
  r.trials.push_back(d);
}

std::vector<double> make_grid(double horizon, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(horizon * i / std::max(1, points - 1));
  return g;
}

constexpr int kRedraws = 20;

// Models with finite-time blow-up fail on long horizons whatever the draw,
// so every second redraw also halves the horizon.
double horizon_for(const OracleOptions& opt, int attempt) { return opt.horizon * std::ldexp(1.0, -(attempt / 2)); }
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

Trajectory simulate(const Model& m, const Instantiation& inst, const SimOptions& opt) {
  return detail::integrate(single(m, inst), inst.grid, opt);
}

TrialDeviation compare(const Trajectory& a, const Trajectory& b) {
  if (a.y.size() != b.y.size()) throw std::invalid_argument("trajectories have different outputs");
  TrialDeviation d;
  for (std::size_t j = 0; j < a.y.size(); ++j) {
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.y[j].size(); ++i) {
      diff = std::max(diff, std::abs(a.y[j][i] - b.y[j][i]));
      scale = std::max(scale, std::abs(a.y[j][i]));
    }
    double rel = scale > 0 ? diff / scale : diff;
    if (!std::isfinite(diff)) rel = diff = INFINITY;
    d.abs_dev.push_back(diff);
    d.rel_dev.push_back(rel);
    d.max_rel = std::max(d.max_rel, rel);
  }
  return d;
}

Instantiation random_instantiation(const Model& m, std::uint64_t seed, double horizon, int points) {
  Uniform u(seed);
  Instantiation inst;
  inst.grid = make_grid(horizon, points);
  for (auto& p : m.params) inst.params[p] = u(0.5, 1.5);
  for (auto& x : m.states)
    if (!m.ic(x)) inst.initial[x] = u(0.5, 1.5);
  auto signal = [&](int degree) {
    std::vector<double> c{u(0.5, 1.5)};
    for (int k = 1; k <= degree; ++k) c.push_back(u(-0.5, 0.5) / std::pow(std::max(horizon, 1.0), k));
    return c;
  };
  for (auto& w : m.known_inputs) inst.inputs[w.name] = signal(w.derivs);
  for (auto& w : m.unknown_inputs) inst.inputs[w.name] = signal(w.l);
  return inst;
}

TrajectoryReport symmetry_orbit_check(const Model& m, const LieTransformation& t, const Instantiation& base, double eps,
                                      const SimOptions& sim, double tol) {
  TrajectoryReport r;
  r.check = "symmetry_orbit";
  r.tol = tol;
  for (auto& y : m.outputs) r.outputs.push_back(y.name);

  Point p = base_point(m, base);
  Symbol eps_sym = epsilon_symbol(), exp_sym = exp_epsilon_symbol();
  p[eps_sym] = eps;
  p[exp_sym] = std::exp(eps);

  Point moved = p;
  ExprMap driven;
  for (std::size_t i = 0; i < t.vars.size(); ++i) {
    Symbol v = t.vars[i];
    if (t.generator.classes[i] == VarClass::UnknownInput) {
      driven.emplace(v, t.maps[i]);
    } else {
      moved[v] = evaluate_double(t.maps[i], p);
    }
  }
  OdeSystem s;
  add_model(s, m, "", p, &base, {});
  s.constants.emplace_back(eps_sym, eps);
  s.constants.emplace_back(exp_sym, std::exp(eps));
  add_model(s, m, "orbit.", moved, &base, driven);
  auto [a, b] = split(detail::integrate(s, base.grid, sim), m.outputs.size());
  accumulate(r, compare(a, b));
  r.pass = r.max_rel <= tol;
  return r;
}

TrajectoryReport symmetry_orbit_check(const Model& m, const LieTransformation& t, const OracleOptions& opt) {
  TrajectoryReport r;
  r.check = "symmetry_orbit";
  r.tol = opt.tol;
  for (auto& y : m.outputs) r.outputs.push_back(y.name);
  for (int trial = 0; trial < opt.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kRedraws) throw SimulationError("no pole-free instantiation found");
      std::uint64_t seed = opt.seed + kGolden * static_cast<std::uint64_t>(trial * kRedraws + attempt + 1);
      Instantiation inst = random_instantiation(m, seed, horizon_for(opt, attempt), opt.points);
      double eps = Uniform(seed ^ 0xD1B54A32D192ED03ULL)(-0.5, 0.5);
      try {
        auto one = symmetry_orbit_check(m, t, inst, eps, opt.sim, opt.tol);
        accumulate(r, one.trials.front());
        break;
      } catch (const PoleError&) {
      } catch (const SimulationError&) {
      }
    }
  }
  r.pass = r.max_rel <= opt.tol;
  return r;
}

TrajectoryReport oracle_output_equivalence(const Model& original, const Model& rewritten, const Mapping& mapping,
                                           const OracleOptions& opt) {
  TrajectoryReport r;
  r.check = "output_equivalence";
  r.tol = opt.tol;
  for (auto& y : original.outputs) r.outputs.push_back(y.name);
  if (rewritten.outputs.size() != original.outputs.size()) throw std::invalid_argument("models have different outputs");

  auto image = [&](const std::string& name) {
    for (auto& [n, e] : mapping)
      if (n == name) return e;
    return Expression::symbol(name);
  };
  ExprMap driven;
  for (auto& w : rewritten.unknown_inputs) driven.emplace(Symbol(w.name), image(w.name));
  for (auto& u : rewritten.known_inputs) driven.emplace(Symbol(u.name), image(u.name));

  for (int trial = 0; trial < opt.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kRedraws) throw SimulationError("no pole-free instantiation found");
      std::uint64_t seed = opt.seed + kGolden * static_cast<std::uint64_t>(trial * kRedraws + attempt + 1);
      Instantiation inst = random_instantiation(original, seed, horizon_for(opt, attempt), opt.points);
      try {
        Point p = base_point(original, inst);
        Point q;
        for (auto& n : rewritten.params) q[Symbol(n)] = evaluate_double(image(n), p);
        for (auto& n : rewritten.states) q[Symbol(n)] = evaluate_double(image(n), p);
        OdeSystem s;
        add_model(s, original, "", p, &inst, {});
        add_model(s, rewritten, "rep.", q, &inst, driven);
        auto [a, b] = split(detail::integrate(s, inst.grid, opt.sim), original.outputs.size());
        accumulate(r, compare(a, b));
        break;
      } catch (const PoleError&) {
      } catch (const SimulationError&) {
      }
    }
  }
  r.pass = r.max_rel <= opt.tol;
  return r;
}

TrajectoryReport oracle_output_equivalence(const Model& original, const ReparResult& r, const OracleOptions& opt) {
  return oracle_output_equivalence(original, r.final_model, r.composed, opt);
}

nlohmann::ordered_json to_json(const TrajectoryReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["outputs"] = r.outputs;
  j["tol"] = r.tol;
  j["max_abs_deviation"] = r.max_abs;
  j["max_rel_deviation"] = r.max_rel;
  j["pass"] = r.pass;
  j["trials"] = nlohmann::ordered_json::array();
  for (auto& t : r.trials) j["trials"].push_back({{"rel_dev", t.rel_dev}, {"abs_dev", t.abs_dev}});
  return j;
}

}  // namespace repargen
