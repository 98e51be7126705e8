#include <algorithm>
#include <istream>
#include <ostream>
#include <tuple>

#include "repargen/repar.hpp"

namespace repargen {

namespace {

bool same_generator(const InfinitesimalGenerator& a, const InfinitesimalGenerator& b) {
  if (a.vars != b.vars) return false;
  for (std::size_t i = 0; i < a.eta.size(); ++i)
    if (!(a.eta[i] == b.eta[i])) return false;
  return true;
}

auto rank_key(const Candidate& c) {
  return std::make_tuple(c.generator.support_size(), c.transformed_states, c.generator.degree, c.generator.index);
}

std::size_t deficiency(const FispoReport& r) { return r.dim - r.rank; }

std::size_t read_choice(const SelectionPolicy& p, const std::string& prompt, std::size_t n) {
  for (;;) {
    *p.out << prompt << " [1-" << n << "]: " << std::flush;
    std::string line;
    if (!std::getline(*p.in, line)) throw ReparError("no selection on standard input");
    try {
      std::size_t pos = 0;
      long v = std::stol(line, &pos);
      if (v >= 1 && static_cast<std::size_t>(v) <= n) return static_cast<std::size_t>(v - 1);
    } catch (const std::exception&) {
    }
    *p.out << "invalid choice\n";
  }
}

void print_menu(std::ostream& out, const std::vector<Candidate>& cands) {
  out << "generators:\n";
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i];
    out << "  " << i + 1 << ") degree " << c.generator.degree << ", support {";
    auto support = c.generator.support();
    for (std::size_t j = 0; j < support.size(); ++j) out << (j ? ", " : "") << support[j].name();
    out << "}, removable {";
    for (std::size_t j = 0; j < c.removable.size(); ++j) out << (j ? ", " : "") << c.removable[j].name();
    out << "}\n";
    for (Symbol s : support) out << "       " << s.name() << "* = " << c.transformation.map_of(s).str() << "\n";
  }
}

}  // namespace

const Expression& mapping_of(const Mapping& m, const std::string& name) {
  for (auto& [n, e] : m)
    if (n == name) return e;
  throw std::out_of_range("mapping has no entry for " + name);
}

std::vector<Candidate> rank_candidates(const Model& m, const ReparOptions& opt, const std::string& must_contain) {
  AugmentedSystem a = augment(m, opt.classify.augment);
  const IcList* ics = opt.classify.use_ics ? &m.ics : nullptr;
  std::vector<Candidate> out;
  for (int d = 1; d <= opt.degree_cap; ++d) {
    for (auto& g : find_generators(a, d, ics)) {
      if (std::any_of(out.begin(), out.end(), [&](const Candidate& c) { return same_generator(c.generator, g); }))
        continue;
      LieTransformation t;
      try {
        t = exponentiate(g, opt.max_order);
      } catch (const ClosureError&) {
        continue;
      }
      auto removable = removable_parameters(t);
      if (removable.empty()) continue;
      if (!must_contain.empty() &&
          std::none_of(removable.begin(), removable.end(), [&](Symbol s) { return s.name() == must_contain; }))
        continue;
      std::size_t states = g.transformed_states();
      out.push_back(Candidate{std::move(g), std::move(t), std::move(removable), states});
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return rank_key(x) < rank_key(y); });
    // A candidate that leaves every state untouched cannot be improved on by
    // a richer ansatz; otherwise look for one.
    if (!out.empty() && out.front().transformed_states == 0) break;
  }
  return out;
}

Mapping compose_mapping(const ReparResult& r) {
  std::map<std::string, Expression> current;
  for (auto& v : r.original.variables()) current.emplace(v, Expression::symbol(v));
  for (auto& step : r.steps) {
    ExprMap back;
    for (auto& [n, e] : current) back.emplace(Symbol(n), e);
    current.erase(step.eliminated);
    for (std::size_t i = 0; i < step.solution.vars.size(); ++i)
      if (!(step.solution.maps[i] - Expression(step.solution.vars[i])).is_zero())
        current.erase(step.solution.vars[i].name());
    for (auto& [n, e] : step.forward_map) current.emplace(n, substitute(e, back).canonicalize());
  }
  Mapping out;
  for (auto& v : r.final_model.variables()) {
    auto it = current.find(v);
    if (it == current.end()) throw std::logic_error("composed mapping lost " + v);
    out.emplace_back(v, it->second);
  }
  return out;
}

ReparResult autorepar(const Model& m, const SelectionPolicy& policy, const ReparOptions& opt) {
  if (policy.mode == SelectionPolicy::Mode::Interactive && (!policy.in || !policy.out))
    throw std::invalid_argument("interactive selection needs input and output streams");
  ReparResult r;
  r.original = m;
  r.initial_report = classify(m, opt.classify);
  FispoReport report = r.initial_report;
  Model current = m;
  std::size_t budget = deficiency(report);

  for (int step_number = 1; !report.fispo; ++step_number) {
    if (r.steps.size() >= budget) throw ReparError("deficiency did not vanish after the expected number of steps");

    std::string pin;
    if (policy.mode == SelectionPolicy::Mode::Pinned && static_cast<std::size_t>(step_number) <= policy.pins.size()) {
      pin = policy.pins[step_number - 1];
      if (std::find(current.params.begin(), current.params.end(), pin) == current.params.end())
        throw ReparError("pinned parameter " + pin + " is not a parameter of the current model");
    }
    auto cands = rank_candidates(current, opt, pin);
    if (cands.empty()) {
      if (!pin.empty())
        throw ReparError("no generator up to degree " + std::to_string(opt.degree_cap) + " can remove " + pin);
      throw ReparError("irreparable by this method: no generator up to degree " + std::to_string(opt.degree_cap) +
                       " has a removable parameter");
    }

    auto try_step = [&](std::size_t ci, Symbol p) {
      ReparStep step = apply_step(current, solve_epsilon(cands[ci].transformation, p), step_number);
      FispoReport next = classify(step.model, opt.classify);
      if (deficiency(next) + 1 != deficiency(report)) return false;
      step.generator = cands[ci].generator;
      step.transformation = cands[ci].transformation;
      for (auto& w : step.warnings) r.warnings.push_back("step " + std::to_string(step_number) + ": " + w);
      current = step.model;
      report = std::move(next);
      r.steps.push_back(std::move(step));
      return true;
    };

    bool done = false;
    if (policy.mode == SelectionPolicy::Mode::Interactive) {
      // keep asking until the user picks a step that actually lowers the deficiency
      *policy.out << "round " << step_number << ": " << deficiency(report) << " transformation(s) needed\n";
      while (!done) {
        print_menu(*policy.out, cands);
        std::size_t gi = read_choice(policy, "generator", cands.size());
        const auto& rem = cands[gi].removable;
        *policy.out << "parameters:\n";
        for (std::size_t j = 0; j < rem.size(); ++j) *policy.out << "  " << j + 1 << ") " << rem[j].name() << "\n";
        Symbol p = rem[read_choice(policy, "parameter", rem.size())];
        done = try_step(gi, p);
        if (!done) *policy.out << "removing " << p.name() << " this way does not lower the deficiency, choose again\n";
      }
    } else {
      for (std::size_t i = 0; i < cands.size() && !done; ++i)
        for (Symbol p : cands[i].removable)
          if ((pin.empty() || p.name() == pin) && try_step(i, p)) {
            done = true;
            break;
          }
    }
    if (!done) throw ReparError("no candidate step reduces the deficiency by one");
  }
  r.final_model = current;
  r.final_report = report;
  r.composed = compose_mapping(r);
  return r;
}

namespace {

nlohmann::ordered_json mapping_json(const Mapping& m, bool skip_identity = false) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto& [n, e] : m) {
    if (skip_identity && e == Expression::symbol(n)) continue;
    j[n] = e.str();
  }
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ReparStep& s) {
  nlohmann::ordered_json j;
  j["generator"] = to_json(s.generator);
  j["transformation"] = to_json(s.transformation)["maps"];
  j["eliminated"] = s.eliminated;
  j["solution"] = {{s.solution.exponential ? "exp(eps)" : "eps", s.solution.value.str()}};
  j["forward_map"] = mapping_json(s.forward_map);
  j["warnings"] = s.warnings;
  return j;
}

nlohmann::ordered_json to_json(const ReparResult& r) {
  nlohmann::ordered_json j;
  j["model"] = r.original.name;
  j["initial_report"] = to_json(r.initial_report);
  j["steps"] = nlohmann::ordered_json::array();
  for (auto& s : r.steps) j["steps"].push_back(to_json(s));
  j["final_model"] = emit_model(r.final_model);
  j["composed_mapping"] = mapping_json(r.composed, true);
  j["final_report"] = to_json(r.final_report);
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace repargen
