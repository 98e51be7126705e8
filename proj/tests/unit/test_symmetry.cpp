#include <doctest.h>

#include <algorithm>

#include "common.hpp"
#include "repargen/repar.hpp"

using namespace repargen;
using testing::bundled;
using testing::E;
using testing::S;

namespace {

long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::string> names(const std::vector<Symbol>& v) {
  std::vector<std::string> out;
  for (Symbol s : v) out.push_back(s.name());
  std::sort(out.begin(), out.end());
  return out;
}

const InfinitesimalGenerator* with_support(const std::vector<InfinitesimalGenerator>& gens,
                                           std::vector<std::string> support) {
  std::sort(support.begin(), support.end());
  for (auto& g : gens)
    if (names(g.support()) == support) return &g;
  return nullptr;
}

InfinitesimalGenerator zero_generator(const AugmentedSystem& a) {
  InfinitesimalGenerator g;
  g.vars = symmetry_variables(a);
  g.classes = symmetry_classes(a);
  g.eta.assign(g.vars.size(), Expression(0));
  g.degree = 1;
  return g;
}

void set_eta(InfinitesimalGenerator& g, const std::string& v, const Expression& e) {
  auto it = std::find(g.vars.begin(), g.vars.end(), S(v));
  REQUIRE(it != g.vars.end());
  g.eta[it - g.vars.begin()] = e;
}

// v* evaluated at eps = 0 must be v, and its eps-derivative there must be eta_v.
void check_series_start(const LieTransformation& t) {
  Symbol eps = epsilon_symbol(), z = exp_epsilon_symbol();
  ExprMap at_zero{{eps, Expression(0)}, {z, Expression(1)}};
  for (std::size_t i = 0; i < t.vars.size(); ++i) {
    CAPTURE(t.vars[i].name());
    const Expression& m = t.maps[i];
    CHECK(substitute(m, at_zero) == Expression(t.vars[i]));
    Expression rate = differentiate(m, eps) + Expression(z) * differentiate(m, z);
    CHECK(substitute(rate, at_zero) == t.generator.eta_of(t.vars[i]));
  }
}

Model pk_after_k1() {
  Model pk = bundled("pk");
  auto gens = find_generators(augment(pk), 2);
  auto* g = with_support(gens, {"x1", "k1", "k2", "u"});
  REQUIRE(g != nullptr);
  return apply_step(pk, solve_epsilon(exponentiate(*g), S("k1")), 1).model;
}

}  // namespace

TEST_CASE("ansatz size matches the monomial count") {
  auto a = augment(bundled("vajda"));
  for (int d : {1, 2, 3}) {
    // states depend on (x1, x2, w), w on all seven, parameters on the four parameters
    long expected = 2 * binomial(3 + d, d) + 1 * binomial(7 + d, d) + 4 * binomial(4 + d, d);
    CHECK(static_cast<long>(build_ansatz(a, d).unknowns()) == expected);
  }
  CHECK_THROWS_AS(build_ansatz(a, 0), std::invalid_argument);
}

TEST_CASE("degree-2 ansatz for w contains x1*x2") {
  auto a = augment(bundled("vajda"));
  Ansatz z = build_ansatz(a, 2);
  const auto& w = z.entry(S("w"));
  Monomial x1x2 = Monomial(S("x1")) * Monomial(S("x2"));
  CHECK(std::find(w.monomials.begin(), w.monomials.end(), x1x2) != w.monomials.end());
  const auto& x1 = z.entry(S("x1"));
  CHECK(std::find(x1.monomials.begin(), x1.monomials.end(), Monomial(S("theta1"))) == x1.monomials.end());
}

TEST_CASE("kernel dimensions") {
  Model toy = parse_model("model \"toy\"\nstates x\nparams theta\nddt x = -theta*x\noutput y = x\n");
  CHECK(find_generators(augment(toy), 2).empty());
  CHECK(find_generators(augment(bundled("toy_fispo")), 2).empty());
  CHECK(find_generators(augment(bundled("vajda")), 2).size() == 3);
  CHECK(find_generators(augment(bundled("pk")), 2).size() == 4);
  CHECK(find_generators(augment(pk_after_k1()), 2).size() == 3);
}

TEST_CASE("Vajda basis contains the (theta2, w) generator") {
  auto gens = find_generators(augment(bundled("vajda")), 2);
  auto* g = with_support(gens, {"theta2", "w"});
  REQUIRE(g != nullptr);
  // fix the scale on eta_theta2 = -1
  Expression scale = Expression(-1) / g->eta_of(S("theta2"));
  REQUIRE(scale.is_constant());
  CHECK(scale * g->eta_of(S("w")) == E("x1*x2"));
}

TEST_CASE("PK second round has a generator moving x3, k2, k3, k7, s3 and u") {
  auto gens = find_generators(augment(pk_after_k1()), 2);
  bool found = false;
  for (auto& g : gens) {
    auto n = names(g.support());
    std::vector<std::string> want{"k2_r1", "k3", "k7", "s3", "u_r1", "x3"};
    if (n == want) found = true;
  }
  CHECK(found);
}

TEST_CASE("generator checks") {
  auto a = augment(bundled("vajda"));
  auto gens = find_generators(a, 2);
  for (auto& g : gens) CHECK(check_generator(g, a));

  auto bumped = gens.front();
  auto s = bumped.support().front();
  set_eta(bumped, s.name(), bumped.eta_of(s) * 2);
  CHECK_FALSE(check_generator(bumped, a));

  auto big = augment(bundled("big_known"));
  auto scaling = zero_generator(big);
  set_eta(scaling, "beta", E("beta"));
  set_eta(scaling, "p", E("-p"));
  CHECK(check_generator(scaling, big));
  set_eta(scaling, "p", E("p"));
  CHECK_FALSE(check_generator(scaling, big));
}

TEST_CASE("exponentiating the Vajda generator") {
  auto gens = find_generators(augment(bundled("vajda")), 2);
  auto* g = with_support(gens, {"theta2", "w"});
  REQUIRE(g != nullptr);
  auto norm = *g;
  Expression scale = Expression(-1) / g->eta_of(S("theta2"));
  for (auto& e : norm.eta) e = e * scale;
  auto t = exponentiate(norm);
  CHECK(t.map_of(S("w")) == E("w + eps*x1*x2"));
  CHECK(t.map_of(S("theta2")) == E("theta2 - eps"));
  CHECK(t.map_of(S("x1")) == E("x1"));
  check_series_start(t);
}

TEST_CASE("exponentiating the PK scaling generator") {
  auto gens = find_generators(augment(bundled("pk")), 2);
  auto* g = with_support(gens, {"x1", "k1", "k2", "u"});
  REQUIRE(g != nullptr);
  auto norm = *g;
  Expression scale = Expression(S("x1")) / g->eta_of(S("x1"));
  REQUIRE(scale.is_constant());
  for (auto& e : norm.eta) e = e * scale;
  auto t = exponentiate(norm);
  Expression z(exp_epsilon_symbol());
  CHECK(t.map_of(S("x1")) == E("x1") * z);
  CHECK(t.map_of(S("k1")) == E("k1") / z);
  CHECK(t.map_of(S("k2")) == E("k2") / z);
  CHECK(t.map_of(S("u")) == E("x1*(k1 + k2)") + z * E("u - x1*(k1 + k2)"));
  check_series_start(t);
}

TEST_CASE("the zero generator exponentiates to the identity") {
  auto a = augment(bundled("vajda"));
  auto t = exponentiate(zero_generator(a));
  for (std::size_t i = 0; i < t.vars.size(); ++i) CHECK(t.maps[i] == Expression(t.vars[i]));
}

TEST_CASE("every generator is verified and every transformation preserves the outputs") {
  struct Case {
    const char* model;
    std::vector<int> degrees;
    bool ics;
  };
  for (const Case& c : {Case{"vajda", {1, 2}, false}, Case{"pk", {1, 2}, false}, Case{"big_known", {1}, false},
                        Case{"big_unknown", {1}, false}, Case{"nfkb", {1}, true}}) {
    Model m = bundled(c.model);
    auto a = augment(m);
    const IcList* ics = c.ics ? &m.ics : nullptr;
    for (int d : c.degrees) {
      CAPTURE(c.model);
      CAPTURE(d);
      auto gens = find_generators(a, d, ics);
      CHECK_FALSE(gens.empty());
      for (auto& g : gens) {
        CHECK(check_generator(g, a, ics));
        LieTransformation t;
        try {
          t = exponentiate(g);
        } catch (const ClosureError&) {
          continue;
        }
        check_series_start(t);
        ExprMap sub;
        for (std::size_t i = 0; i < t.vars.size(); ++i) sub[t.vars[i]] = t.maps[i];
        for (auto& out : m.outputs) CHECK(substitute(out.expr, sub) == out.expr);
      }
    }
  }
}

TEST_CASE("the NF-kB degree-1 kernel with initial conditions") {
  Model m = bundled("nfkb");
  auto gens = find_generators(augment(m), 1, &m.ics);
  REQUIRE(gens.size() == 3);
  CHECK(with_support(gens, {"k0", "k1", "u"}) != nullptr);
  CHECK(with_support(gens, {"x7", "k6", "k8"}) != nullptr);
  CHECK(with_support(gens, {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "k10", "s1", "s2", "s3",
                            "s4"}) != nullptr);
}
