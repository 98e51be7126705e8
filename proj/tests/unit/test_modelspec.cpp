#include <doctest.h>

#include <algorithm>

#include "common.hpp"
#include "repargen/fispo.hpp"
#include "repargen/repar.hpp"

using namespace repargen;
using testing::bundled;
using testing::E;
using testing::S;

TEST_CASE("bundled models have the expected augmented dimensions") {
  CHECK(augment(bundled("vajda")).size() == 8);
  CHECK(augment(bundled("pk")).size() == 15);
  // known inputs stay outside the augmented state
  auto big = augment(bundled("big_known"));
  CHECK(big.size() == 8);
  CHECK(big.known_chains.size() == 1);
  CHECK(big.known_chains[0].size() == 3);
}

TEST_CASE("augmented state order and truncation") {
  auto a = augment(bundled("vajda"));
  std::vector<std::string> names;
  for (Symbol s : a.vars) names.push_back(s.name());
  CHECK(names == std::vector<std::string>{"x1", "x2", "theta1", "theta2", "theta3", "theta4", "w", derivative_name("w", 1)});
  CHECK(a.rhs[6] == Expression(a.vars[7]));
  CHECK(a.rhs[7].is_zero());
  CHECK(a.rhs[2].is_zero());

  auto a3 = augment(bundled("vajda"), AugmentOptions{3, std::nullopt});
  CHECK(a3.size() == 10);

  auto toy = augment(bundled("toy_fispo"));
  CHECK(toy.size() == 3);
  CHECK(toy.unknown_chains.empty());
}

TEST_CASE("decimal constants are folded exactly") {
  Model m = bundled("big_known");
  auto c = std::find_if(m.constants.begin(), m.constants.end(), [](const Constant& k) { return k.name == "mu_p"; });
  REQUIRE(c != m.constants.end());
  CHECK(c->value == Rational(7, 480000));
  CHECK(free_symbols(m.rhs("beta")).count(S("mu_p")) == 0);
}

TEST_CASE("emit and parse round-trip every bundled model") {
  for (const char* n : {"vajda", "pk", "big_known", "big_unknown", "nfkb", "toy_fispo"}) {
    CAPTURE(n);
    Model m = bundled(n);
    Model back = parse_model(emit_model(m));
    CHECK(structurally_equal(m, back));
    CHECK(emit_model(back) == emit_model(m));
  }
}

TEST_CASE("model errors") {
  // declaration problems found while parsing carry a position
  CHECK_THROWS_WITH_AS(parse_model("model \"e\"\nparams a\n"), doctest::Contains("model must declare at least one state"),
                       ParseError);
  // undeclared symbol
  CHECK_THROWS_AS(parse_model("model \"e\"\nstates x\nddt x = -k*x\noutput y = x\n"), ParseError);
  // missing dynamics
  CHECK_THROWS_AS(parse_model("model \"e\"\nstates x z\nddt x = -x\noutput y = x\n"), ParseError);
  // no outputs
  CHECK_THROWS_AS(parse_model("model \"e\"\nstates x\nddt x = -x\n"), ParseError);
  // duplicate declaration
  CHECK_THROWS_AS(parse_model("model \"e\"\nstates x\nparams x\nddt x = -x\noutput y = x\n"), ParseError);
  // models assembled in code are checked by validate()
  Model m = bundled("vajda");
  m.dynamics.pop_back();
  CHECK_THROWS_AS(m.validate(), ModelError);
}

TEST_CASE("parse errors report line and column") {
  try {
    parse_model("model \"e\"\nstates x\nddt x = -x*\noutput y = x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 8);
  }
}

namespace {

std::string node_line(const std::string& dot, const std::string& name) {
  auto pos = dot.find("  \"" + name + "\" [");
  if (pos == std::string::npos) return {};
  return dot.substr(pos, dot.find('\n', pos) - pos);
}

std::map<std::string, bool> verdicts(const FispoReport& r) {
  std::map<std::string, bool> out;
  for (auto* g : {&r.params, &r.states, &r.unknown_inputs})
    for (auto& v : *g) out[v.name] = v.positive;
  return out;
}

}  // namespace

TEST_CASE("DOT export shades unobservable nodes") {
  Model m = bundled("vajda");
  std::string dot = emit_dot(m, verdicts(classify(m)));
  for (const char* light : {"x2", "theta2", "theta3"}) CHECK(node_line(dot, light).find("observable=false") != std::string::npos);
  for (const char* dark : {"x1", "w", "theta1", "theta4"})
    CHECK(node_line(dot, dark).find("observable=true") != std::string::npos);
  // coupling edges: x2 drives x1 through theta2*x1*x2, x1 feeds the output
  CHECK(dot.find("\"x2\" -> \"x1\"") != std::string::npos);
  CHECK(dot.find("\"theta2\" -> \"x1\"") != std::string::npos);
  CHECK(dot.find("\"x1\" -> \"y\"") != std::string::npos);
  CHECK(dot.find("\"theta3\" -> \"x1\"") == std::string::npos);

  ReparResult r = autorepar(m);
  std::string repaired = emit_dot(r.final_model, verdicts(r.final_report));
  CHECK(repaired.find("observable=false") == std::string::npos);
  CHECK(node_line(repaired, "theta2").empty());
}

TEST_CASE("DOT export of an identifiable toy is fully dark") {
  Model m = parse_model("model \"toy\"\nstates x\nparams theta\nddt x = -theta*x\noutput y = x\n");
  FispoReport r = classify(m);
  REQUIRE(r.rank == 2);
  CHECK(emit_dot(m, verdicts(r)).find("observable=false") == std::string::npos);
}
