// repargen: identifiability/observability analysis, Lie symmetries and
// automatic reparameterization of rational ODE models.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "repargen/validate.hpp"

namespace fs = std::filesystem;
using namespace repargen;

namespace {

struct Common {
  std::string model;
  int l = -1;
  int u_derivs = -1;
  int degree_cap = 2;
  std::uint64_t seed = 1;
  int trials = 3;
  bool ics = false;
  std::string json;  // "-" for stdout
  bool json_set = false;
};

void add_common(CLI::App* sub, Common& c, bool symmetry_flags) {
  sub->add_option("model", c.model, "model file")->required();
  sub->add_option("--l", c.l, "truncation order for unknown inputs (w^(l+1) = 0)")->check(CLI::NonNegativeNumber);
  sub->add_option("--u-derivs", c.u_derivs, "known-input derivatives available to the analysis")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "seed for the random evaluation points");
  sub->add_option("--trials", c.trials, "independent rank trials")->check(CLI::PositiveNumber);
  sub->add_flag("--ics", c.ics, "use the model's initial conditions");
  sub->add_option("--json", c.json, "write JSON to a file (or '-' / no value for stdout)")->expected(0, 1);
  if (symmetry_flags)
    sub->add_option("--degree-cap", c.degree_cap, "highest ansatz degree for generator search")
        ->check(CLI::PositiveNumber);
}

ClassifyOptions classify_options(const Common& c) {
  ClassifyOptions o;
  if (c.l >= 0) o.augment.l = c.l;
  if (c.u_derivs >= 0) o.augment.u_derivs = c.u_derivs;
  o.sampling.seed = c.seed;
  o.trials = c.trials;
  o.use_ics = c.ics;
  return o;
}

ReparOptions repar_options(const Common& c) {
  ReparOptions o;
  o.classify = classify_options(c);
  o.degree_cap = c.degree_cap;
  return o;
}

Model load(const Common& c) {
  if (!fs::exists(c.model)) throw ModelError("file not found: " + c.model);
  return load_model(c.model);
}

bool json_to_stdout(const Common& c) { return c.json_set && (c.json.empty() || c.json == "-"); }

void emit_json(const Common& c, const nlohmann::ordered_json& j) {
  if (!c.json_set) return;
  if (json_to_stdout(c)) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(c.json);
  if (!out) throw std::runtime_error("cannot write " + c.json);
  out << j.dump(2) << "\n";
}

void print_report(std::ostream& out, const FispoReport& r) {
  out << "model " << r.model << ": rank " << r.rank << " of " << r.dim << (r.fispo ? " (FISPO)" : "") << "\n";
  auto section = [&](const char* title, const std::vector<Verdict>& v, const char* yes, const char* no) {
    if (v.empty()) return;
    out << title << ":\n";
    for (auto& x : v) out << "  " << std::left << std::setw(12) << x.name << (x.positive ? yes : no) << "\n";
  };
  section("parameters", r.params, "identifiable", "unidentifiable");
  section("states", r.states, "observable", "unobservable");
  section("unknown inputs", r.unknown_inputs, "observable", "unobservable");
  out << "transformations needed: " << r.transformations_needed << "\n";
}

int cmd_analyze(const Common& c) {
  Model m = load(c);
  FispoReport r = classify(m, classify_options(c));
  if (!json_to_stdout(c)) print_report(std::cout, r);
  emit_json(c, to_json(r));
  return 0;
}

int cmd_symmetries(const Common& c) {
  Model m = load(c);
  AugmentOptions ao = classify_options(c).augment;
  AugmentedSystem a = augment(m, ao);
  const IcList* ics = c.ics ? &m.ics : nullptr;
  nlohmann::ordered_json j;
  j["model"] = m.name;
  j["degrees"] = nlohmann::ordered_json::array();
  bool text = !json_to_stdout(c);
  for (int d = 1; d <= c.degree_cap; ++d) {
    auto gens = find_generators(a, d, ics);
    nlohmann::ordered_json jd;
    jd["degree"] = d;
    jd["generators"] = nlohmann::ordered_json::array();
    if (text) std::cout << "degree " << d << ": " << gens.size() << " generator(s)\n";
    for (auto& g : gens) {
      nlohmann::ordered_json jg = to_json(g);
      if (text) {
        std::cout << "  [" << g.index + 1 << "]";
        for (Symbol s : g.support()) std::cout << " eta_" << s.name() << " = " << g.eta_of(s).str() << ";";
        std::cout << "\n";
      }
      try {
        LieTransformation t = exponentiate(g);
        jg["maps"] = to_json(t)["maps"];
        nlohmann::ordered_json rem = nlohmann::ordered_json::array();
        for (Symbol p : removable_parameters(t)) rem.push_back(p.name());
        jg["removable"] = rem;
        if (text) {
          for (Symbol s : g.support()) std::cout << "      " << s.name() << "* = " << t.map_of(s).str() << "\n";
          std::cout << "      removable: " << (rem.empty() ? "-" : rem.dump()) << "\n";
        }
      } catch (const ClosureError& e) {
        jg["closure_error"] = e.what();
        if (text) std::cout << "      no closed form: " << e.what() << "\n";
      }
      jd["generators"].push_back(std::move(jg));
    }
    j["degrees"].push_back(std::move(jd));
  }
  emit_json(c, j);
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ReparResult run_repar(const Common& c, const Model& m, const std::string& remove, bool interactive) {
  SelectionPolicy policy;
  if (interactive) {
    policy.mode = SelectionPolicy::Mode::Interactive;
    policy.in = &std::cin;
    policy.out = json_to_stdout(c) ? &std::cerr : &std::cout;
  } else if (!remove.empty()) {
    policy.mode = SelectionPolicy::Mode::Pinned;
    policy.pins = split_list(remove);
  }
  return autorepar(m, policy, repar_options(c));
}

int cmd_repar(const Common& c, const std::string& remove, bool interactive, const std::string& output) {
  Model m = load(c);
  ReparResult r = run_repar(c, m, remove, interactive);
  if (!json_to_stdout(c)) {
    if (r.steps.empty()) {
      std::cout << "model is already FISPO\n";
    } else {
      for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        std::cout << "step " << i + 1 << ": remove " << s.eliminated << " ("
                  << (s.solution.exponential ? "exp(eps) = " : "eps = ") << s.solution.value.str() << ")\n";
        for (auto& [n, e] : s.forward_map) std::cout << "    " << n << " = " << e.str() << "\n";
      }
      std::cout << "composed mapping:\n";
      for (auto& [n, e] : r.composed)
        if (!(e == Expression::symbol(n))) std::cout << "    " << n << " = " << e.str() << "\n";
      for (auto& w : r.warnings) std::cout << "warning: " << w << "\n";
      std::cout << "\n" << emit_model(r.final_model);
    }
  }
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    out << emit_model(r.final_model);
  }
  emit_json(c, to_json(r));
  return 0;
}

int cmd_validate(const Common& c, const std::string& remove, double tol, int sim_trials, const std::string& csv) {
  Model m = load(c);
  OracleOptions oo;
  oo.tol = tol;
  oo.trials = sim_trials;
  oo.seed = c.seed;
  bool text = !json_to_stdout(c);
  nlohmann::ordered_json j;
  j["model"] = m.name;

  // orbit checks for every generator of the original model with a closed form
  j["orbits"] = nlohmann::ordered_json::array();
  AugmentedSystem a = augment(m, classify_options(c).augment);
  bool all = true;
  for (auto& g : find_generators(a, c.degree_cap, c.ics ? &m.ics : nullptr)) {
    LieTransformation t;
    try {
      t = exponentiate(g);
    } catch (const ClosureError&) {
      continue;
    }
    TrajectoryReport r = symmetry_orbit_check(m, t, oo);
    all = all && r.pass;
    nlohmann::ordered_json jr = to_json(r);
    jr["generator"] = to_json(g);
    j["orbits"].push_back(jr);
    if (text)
      std::cout << "orbit of generator " << g.index + 1 << " " << to_json(g)["support"].dump() << ": max rel. deviation "
                << r.max_rel << (r.pass ? "  PASS" : "  FAIL") << "\n";
  }

  ReparResult rr = run_repar(c, m, remove, false);
  TrajectoryReport eq = oracle_output_equivalence(m, rr, oo);
  all = all && eq.pass;
  j["equivalence"] = to_json(eq);
  if (text)
    std::cout << "original vs. reparameterized (" << rr.steps.size() << " step(s)): max rel. deviation " << eq.max_rel
              << (eq.pass ? "  PASS" : "  FAIL") << "\n";
  if (!csv.empty()) {
    Instantiation inst = random_instantiation(m, c.seed, oo.horizon, oo.points);
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write " + csv);
    write_csv(out, simulate(m, inst, oo.sim));
  }
  j["pass"] = all;
  emit_json(c, j);
  return all ? 0 : 1;
}

int cmd_export(const Common& c, const std::string& dot) {
  Model m = load(c);
  FispoReport r = classify(m, classify_options(c));
  std::map<std::string, bool> observable;
  for (auto* group : {&r.params, &r.states, &r.unknown_inputs})
    for (auto& v : *group) observable[v.name] = v.positive;
  std::string text = emit_dot(m, observable);
  if (dot.empty() || dot == "-") {
    std::cout << text;
  } else {
    std::ofstream out(dot);
    if (!out) throw std::runtime_error("cannot write " + dot);
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural identifiability, Lie symmetries and reparameterization of ODE models"};
  app.require_subcommand(1);
  Common c;

  auto* analyze = app.add_subcommand("analyze", "identifiability and observability report");
  add_common(analyze, c, false);

  auto* symmetries = app.add_subcommand("symmetries", "Lie symmetry generators and their transformations");
  add_common(symmetries, c, true);

  std::string remove, output;
  bool interactive = false;
  auto* repar = app.add_subcommand("repar", "reparameterize until the model is FISPO");
  add_common(repar, c, true);
  auto* remove_opt = repar->add_option("--remove", remove, "comma-separated parameters to remove, in order");
  repar->add_flag("--interactive", interactive, "choose generators and parameters from menus")->excludes(remove_opt);
  repar->add_option("--output", output, "write the reparameterized model here");

  double tol = 1e-6;
  int sim_trials = 10;
  std::string csv;
  auto* validate = app.add_subcommand("validate", "numerical checks of symmetries and of the reparameterization");
  add_common(validate, c, true);
  validate->add_option("--remove", remove, "comma-separated parameters to remove, in order");
  validate->add_option("--tol", tol, "relative deviation threshold")->check(CLI::PositiveNumber);
  validate->add_option("--sim-trials", sim_trials, "random instantiations per check")->check(CLI::PositiveNumber);
  validate->add_option("--csv", csv, "dump one simulated trajectory of the original model");

  std::string dot;
  auto* exp = app.add_subcommand("export", "export diagrams");
  add_common(exp, c, false);
  exp->add_option("--dot", dot, "Graphviz output file ('-' for stdout)")->required()->expected(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--json")) c.json_set = true;

  try {
    if (analyze->parsed()) return cmd_analyze(c);
    if (symmetries->parsed()) return cmd_symmetries(c);
    if (repar->parsed()) return cmd_repar(c, remove, interactive, output);
    if (validate->parsed()) return cmd_validate(c, remove, tol, sim_trials, csv);
    if (exp->parsed()) return cmd_export(c, dot);
  } catch (const ParseError& e) {
    std::cerr << "error: " << c.model << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 1;
  } catch (const ReparError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
