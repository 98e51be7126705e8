#include <set>
#include <sstream>

#include "repargen/model.hpp"

namespace repargen {

namespace {

struct Shade {
  const char* dark;
  const char* light;
};

constexpr Shade kState{"#c0392b", "#f5b7b1"};
constexpr Shade kInput{"#d4ac0d", "#fcf3cf"};
constexpr Shade kParam{"#1e8449", "#abebc6"};

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string emit_dot(const Model& m, const std::map<std::string, bool>& observable) {
  std::ostringstream out;
  out << "digraph " << quoted(m.name) << " {\n  rankdir=LR;\n  node [style=filled, fontname=\"Helvetica\"];\n";
  auto node = [&](const std::string& n, const char* cls, const Shade& shade, const char* shape) {
    auto it = observable.find(n);
    bool obs = it == observable.end() || it->second;
    out << "  " << quoted(n) << " [class=" << cls << ", shape=" << shape << ", fillcolor=" << quoted(obs ? shade.dark : shade.light)
        << ", observable=" << (obs ? "true" : "false") << "];\n";
  };
  for (auto& x : m.states) node(x, "state", kState, "ellipse");
  for (auto& u : m.known_inputs) node(u.name, "known_input", kInput, "box");
  for (auto& w : m.unknown_inputs) node(w.name, "unknown_input", kInput, "box");
  for (auto& p : m.params) node(p, "parameter", kParam, "diamond");
  for (auto& o : m.outputs)
    out << "  " << quoted(o.name) << " [class=output, shape=doublecircle, fillcolor=\"#ffffff\"];\n";

  for (std::size_t i = 0; i < m.states.size(); ++i)
    for (Symbol s : free_symbols(m.dynamics[i]))
      if (s.name() != m.states[i]) out << "  " << quoted(s.name()) << " -> " << quoted(m.states[i]) << ";\n";
  for (auto& o : m.outputs)
    for (Symbol s : free_symbols(o.expr)) out << "  " << quoted(s.name()) << " -> " << quoted(o.name) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace repargen
