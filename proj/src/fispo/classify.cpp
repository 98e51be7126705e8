#include <algorithm>
#include <stdexcept>

#include "repargen/fispo.hpp"
#include "repargen/taylor.hpp"

namespace repargen {

RationalPoint random_point(const AugmentedSystem& a, PointSampler& s, const Model* ics_from) {
  RationalPoint p;
  for (Symbol v : a.vars) p[v] = s.draw();
  for (auto& chain : a.known_chains)
    for (Symbol u : chain) p[u] = s.draw();
  std::set<Symbol> atoms;
  for (const auto* list : {&a.rhs, &a.outputs})
    for (auto& e : *list) {
      auto at = atoms_of(e.canonical());
      atoms.insert(at.begin(), at.end());
    }
  for (Symbol at : atoms) p[at] = s.draw();
  if (ics_from)
    for (auto& ic : ics_from->ics) p[Symbol(ic.state)] = evaluate(ic.expr.canonical(), p);
  return p;
}

Matrix series_oi_matrix(const AugmentedSystem& a, const RationalPoint& point, int k) {
  TaylorJets jets(a);
  jets.start(point);
  Matrix out;
  Rational fact = 1;
  for (int m = 0; m <= k; ++m) {
    if (m > 0) fact *= m;
    for (auto& row : jets.next_order()) {
      for (auto& x : row) x *= fact;
      out.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

struct TrialResult {
  std::size_t rank = 0;
  int k_used = 0;
  std::vector<bool> positive;
};

TrialResult run_trial(const Model& m, const AugmentedSystem& a, const ClassifyOptions& opt, std::uint64_t seed,
                      const std::vector<std::pair<std::size_t, std::vector<Expression>>>& ic_grads) {
  const std::size_t n = a.size();
  const int max_k = opt.max_order.value_or(static_cast<int>(n) - 1);
  PointSampler sampler(seed, opt.sampling.lo, opt.sampling.hi);
  for (int attempt = 0; attempt < opt.sampling.redraws; ++attempt) {
    try {
      RationalPoint point = random_point(a, sampler, opt.use_ics ? &m : nullptr);
      IncrementalEchelon ech(n);
      for (auto& [j, grad] : ic_grads) {
        Vector row(n, Rational(0));
        row[j] = 1;
        for (std::size_t v = 0; v < n; ++v) row[v] -= evaluate(grad[v].canonical(), point);
        ech.add_row(std::move(row));
      }
      TaylorJets jets(a);
      jets.start(point);
      TrialResult r;
      int quiet = 0;
      for (int k = 0; k <= max_k; ++k) {
        bool grew = false;
        for (auto& row : jets.next_order()) grew |= ech.add_row(std::move(row));
        r.k_used = k;
        if (ech.rank() == n) break;
        quiet = grew ? 0 : quiet + 1;
        if (opt.early_stop && quiet >= 2) break;
      }
      r.rank = ech.rank();
      // column j is identifiable/observable iff no kernel vector touches it
      r.positive.assign(n, true);
      for (auto& v : nullspace(ech.rows(), n))
        for (std::size_t j = 0; j < n; ++j)
          if (v[j] != 0) r.positive[j] = false;
      return r;
    } catch (const PoleError&) {
    }
  }
  throw std::runtime_error("classify: redraw budget exhausted (every sampled point hit a pole)");
}

}  // namespace

FispoReport classify(const Model& m, const ClassifyOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be at least 1");
  AugmentedSystem a = augment(m, opt.augment);
  const std::size_t n = a.size();

  std::vector<std::pair<std::size_t, std::vector<Expression>>> ic_grads;
  if (opt.use_ics)
    for (auto& ic : m.ics) {
      std::vector<Expression> grad;
      for (Symbol v : a.vars) grad.push_back(differentiate(ic.expr, v));
      ic_grads.emplace_back(*a.index_of(Symbol(ic.state)), std::move(grad));
    }

  std::vector<TrialResult> results;
  for (int t = 0; t < opt.trials; ++t)
    results.push_back(run_trial(m, a, opt, opt.sampling.seed + static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ULL, ic_grads));

  FispoReport r;
  r.model = m.name;
  r.dim = n;
  r.seed = opt.sampling.seed;
  r.trials = opt.trials;
  r.ics_used = opt.use_ics && !m.ics.empty();
  std::vector<bool> positive(n, false);
  for (auto& t : results) r.rank = std::max(r.rank, t.rank);
  for (auto& t : results) {
    r.k_used = std::max(r.k_used, t.k_used);
    if (t.rank != r.rank) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (t.positive[j]) positive[j] = true;
  }
  int l = 0;
  for (auto& w : m.unknown_inputs) l = std::max(l, opt.augment.l.value_or(w.l));
  r.l = l;
  for (std::size_t j = 0; j < n; ++j) {
    Verdict v{a.vars[j].name(), positive[j]};
    switch (a.classes[j]) {
      case VarClass::State: r.states.push_back(v); break;
      case VarClass::Parameter: r.params.push_back(v); break;
      case VarClass::UnknownInput: r.unknown_inputs.push_back(v); break;
      case VarClass::UnknownInputDerivative: r.unknown_input_derivatives.push_back(v); break;
    }
  }
  r.fispo = r.rank == n;
  r.transformations_needed = n - r.rank;
  return r;
}

std::size_t transformations_needed(const FispoReport& r) { return r.dim - r.rank; }

bool FispoReport::positive(const std::string& name) const {
  for (const auto* list : {&params, &states, &unknown_inputs, &unknown_input_derivatives})
    for (auto& v : *list)
      if (v.name == name) return v.positive;
  throw std::out_of_range("no verdict for '" + name + "'");
}

std::vector<std::string> FispoReport::negatives() const {
  std::vector<std::string> out;
  for (const auto* list : {&params, &states, &unknown_inputs})
    for (auto& v : *list)
      if (!v.positive) out.push_back(v.name);
  return out;
}

std::vector<std::string> FispoReport::unidentifiable_params() const {
  std::vector<std::string> out;
  for (auto& v : params)
    if (!v.positive) out.push_back(v.name);
  return out;
}

std::vector<std::string> FispoReport::identifiable_params() const {
  std::vector<std::string> out;
  for (auto& v : params)
    if (v.positive) out.push_back(v.name);
  return out;
}

nlohmann::ordered_json to_json(const FispoReport& r) {
  using J = nlohmann::ordered_json;
  auto list = [](const std::vector<Verdict>& vs, const char* key) {
    J arr = J::array();
    for (auto& v : vs) arr.push_back(J{{"name", v.name}, {key, v.positive}});
    return arr;
  };
  J j;
  j["model"] = r.model;
  j["l"] = r.l;
  j["k_used"] = r.k_used;
  j["rank"] = r.rank;
  j["dim"] = r.dim;
  j["fispo"] = r.fispo;
  j["params"] = list(r.params, "identifiable");
  j["states"] = list(r.states, "observable");
  j["unknown_inputs"] = list(r.unknown_inputs, "observable");
  j["unknown_input_derivatives"] = list(r.unknown_input_derivatives, "observable");
  j["transformations_needed"] = r.transformations_needed;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["ics_used"] = r.ics_used;
  return j;
}

}  // namespace repargen
