#include <doctest.h>

#include <algorithm>

#include "common.hpp"
#include "repargen/repar.hpp"

using namespace repargen;
using testing::bundled;
using testing::E;
using testing::S;

namespace {

std::vector<std::string> names(const std::vector<Symbol>& v) {
  std::vector<std::string> out;
  for (Symbol s : v) out.push_back(s.name());
  std::sort(out.begin(), out.end());
  return out;
}

LieTransformation transformation_with(const Model& m, int degree, std::vector<std::string> support,
                                      const IcList* ics = nullptr) {
  std::sort(support.begin(), support.end());
  for (auto& g : find_generators(augment(m), degree, ics))
    if (names(g.support()) == support) return exponentiate(g);
  FAIL("no generator with the requested support");
  return {};
}

SelectionPolicy pinned(std::vector<std::string> pins) {
  SelectionPolicy p;
  p.mode = SelectionPolicy::Mode::Pinned;
  p.pins = std::move(pins);
  return p;
}

ReparOptions with_ics() {
  ReparOptions o;
  o.classify.use_ics = true;
  return o;
}

}  // namespace

TEST_CASE("removable parameters") {
  CHECK(names(removable_parameters(transformation_with(bundled("vajda"), 2, {"theta2", "w"}))) ==
        std::vector<std::string>{"theta2"});
  CHECK(names(removable_parameters(transformation_with(bundled("pk"), 2, {"x1", "k1", "k2", "u"}))) ==
        std::vector<std::string>{"k1", "k2"});
  Model nfkb = bundled("nfkb");
  auto t = transformation_with(nfkb, 1,
                               {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "k10", "s1", "s2", "s3", "s4"},
                               &nfkb.ics);
  CHECK(names(removable_parameters(t)) == std::vector<std::string>{"k10", "s1", "s2", "s3", "s4"});
}

TEST_CASE("solving for the group parameter") {
  auto vajda = solve_epsilon(transformation_with(bundled("vajda"), 2, {"theta2", "w"}), S("theta2"));
  CHECK_FALSE(vajda.exponential);
  CHECK(vajda.value == E("theta2 - 1"));
  CHECK(vajda.map_of(S("theta2")) == Expression(1));
  CHECK(vajda.map_of(S("w")) == E("w + x1*x2*(theta2 - 1)"));

  auto pk = solve_epsilon(transformation_with(bundled("pk"), 2, {"x1", "k1", "k2", "u"}), S("k1"));
  CHECK(pk.exponential);
  CHECK(pk.value == E("k1"));
  CHECK(pk.map_of(S("k2")) == E("k2/k1"));

  CHECK_THROWS_AS(solve_epsilon(transformation_with(bundled("pk"), 2, {"x1", "k1", "k2", "u"}), S("k4")), ReparError);
}

TEST_CASE("one Vajda step rewrites only the first equation") {
  Model m = bundled("vajda");
  auto step = apply_step(m, solve_epsilon(transformation_with(m, 2, {"theta2", "w"}), S("theta2")), 1);
  CHECK(step.eliminated == "theta2");
  REQUIRE(step.model.unknown_inputs.size() == 1);
  std::string w = step.model.unknown_inputs[0].name;
  CHECK(w != "w");
  CHECK(step.model.rhs("x1") == Expression::symbol(w) + E("theta1*x1^2 + x1*x2"));
  CHECK(step.model.rhs("x2") == m.rhs("x2"));
  CHECK(std::find(step.model.params.begin(), step.model.params.end(), "theta2") == step.model.params.end());
  REQUIRE(step.forward_map.size() == 1);
  CHECK(mapping_of(step.forward_map, w) == E("w + x1*x2*(theta2 - 1)"));
}

TEST_CASE("automatic Vajda repair") {
  ReparResult r = autorepar(bundled("vajda"));
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].eliminated == "theta2");
  CHECK(r.final_report.fispo);
  // theta3 and x2 become observable without being transformed
  CHECK(r.final_report.positive("theta3"));
  CHECK(r.final_report.positive("x2"));
  CHECK(mapping_of(r.composed, "theta3") == E("theta3"));
  CHECK(mapping_of(r.composed, "x2") == E("x2"));
  // a single step composes to its own forward map
  for (auto& [n, e] : r.steps[0].forward_map) CHECK(mapping_of(r.composed, n) == e);
}

TEST_CASE("pinned PK repair") {
  ReparResult r = autorepar(bundled("pk"), pinned({"k1", "s3"}));
  REQUIRE(r.steps.size() == 2);
  CHECK(r.final_report.fispo);
  FispoReport mid = classify(r.steps[0].model);
  CHECK(mid.positive("k3"));
  CHECK(mid.positive("k7"));
  CHECK_FALSE(r.initial_report.positive("k3"));
  CHECK(mapping_of(r.composed, "k2_r2") == E("k2*s3/k1"));
  // the composed input equals the second step applied on top of the first
  Expression u1 = E("x1*(k1 + k2) + k1*(u - x1*(k1 + k2))");
  CHECK(mapping_of(r.composed, "u_r2") == u1 + E("(k2/k1)*(k1*x1)*(s3 - 1)"));
}

TEST_CASE("automatic PK repair matches the pinned one in length") {
  ReparResult r = autorepar(bundled("pk"));
  CHECK(r.steps.size() == 2);
  CHECK(r.final_report.fispo);
}

TEST_CASE("beta-cell repair with a known input") {
  ReparResult r = autorepar(bundled("big_known"));
  REQUIRE(r.steps.size() == 2);
  CHECK(r.final_report.fispo);
  CHECK(mapping_of(r.composed, "beta_r2") == E("beta*si*p"));
  CHECK(mapping_of(r.composed, "I_r2") == E("I*si"));
}

TEST_CASE("NF-kB repair with pinned removals") {
  ReparResult r = autorepar(bundled("nfkb"), pinned({"k0", "k6", "k10"}), with_ics());
  REQUIRE(r.steps.size() == 3);
  CHECK(r.final_report.fispo);
  CHECK(mapping_of(r.steps[0].forward_map, "u_r1") == E("u*k0"));
  CHECK(mapping_of(r.steps[0].forward_map, "k1_r1") == E("k1/k0"));
  CHECK(mapping_of(r.steps[1].forward_map, "x7_r2") == E("x7/k6"));
  CHECK(mapping_of(r.steps[1].forward_map, "k8_r2") == E("k8*k6"));
  CHECK(mapping_of(r.steps[2].forward_map, "x1_r3") == E("x1*k10"));
  CHECK(mapping_of(r.steps[2].forward_map, "s1_r3") == E("s1/k10"));
  CHECK(names(removable_parameters(r.steps[2].transformation)) ==
        std::vector<std::string>{"k10", "s1", "s2", "s3", "s4"});
}

TEST_CASE("repair edge cases") {
  ReparResult toy = autorepar(bundled("toy_fispo"));
  CHECK(toy.steps.empty());
  CHECK(toy.final_report.fispo);
  CHECK_THROWS_AS(autorepar(bundled("vajda"), pinned({"theta9"})), ReparError);
  // theta1 is identifiable, so no candidate can remove it
  CHECK_THROWS_AS(autorepar(bundled("vajda"), pinned({"theta1"})), ReparError);
}

TEST_CASE("interactive selection reads menu choices") {
  std::istringstream in("2\n1\n");
  std::ostringstream out;
  SelectionPolicy p;
  p.mode = SelectionPolicy::Mode::Interactive;
  p.in = &in;
  p.out = &out;
  ReparResult r = autorepar(bundled("vajda"), p);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].eliminated == "theta2");
  CHECK(out.str().find("theta2* = -eps + theta2") != std::string::npos);

  std::istringstream empty("");
  p.in = &empty;
  CHECK_THROWS_AS(autorepar(bundled("vajda"), p), ReparError);
}

TEST_CASE("repair JSON is deterministic") {
  CHECK(to_json(autorepar(bundled("pk"))).dump() == to_json(autorepar(bundled("pk"))).dump());
}
