#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "repargen/model.hpp"

namespace repargen {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> r{"model", "states", "params", "known_inputs", "unknown_inputs", "const",
                                       "ddt",   "output", "ic",     "eps",          "t"};
  return r;
}

struct Item {
  std::string text;
  int column;
};

// Splits a declaration list on whitespace and commas, keeping [..] suffixes attached.
std::vector<Item> split_items(const std::string& line, std::size_t from) {
  std::vector<Item> out;
  std::size_t i = from;
  while (i < line.size()) {
    while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ',')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    int depth = 0;
    while (i < line.size()) {
      char c = line[i];
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (depth == 0 && (std::isspace(static_cast<unsigned char>(c)) || c == ',')) break;
      ++i;
    }
    out.push_back(Item{line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

class ModelParser {
 public:
  Model parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::size_t b = raw.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      statement(raw, b);
    }
    finish();
    return std::move(m_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int column) const { throw ParseError(msg, line_, column); }

  void statement(const std::string& line, std::size_t b) {
    std::size_t e = b;
    while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e]))) ++e;
    std::string kw = line.substr(b, e - b);
    int col = static_cast<int>(b) + 1;
    if (kw == "model") {
      std::string rest = line.substr(e);
      std::size_t s = rest.find_first_not_of(" \t");
      std::size_t t = rest.find_last_not_of(" \t\r");
      if (s == std::string::npos) fail("model needs a name", col);
      std::string name = rest.substr(s, t - s + 1);
      if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
      m_.name = name;
    } else if (kw == "states" || kw == "params" || kw == "parameters" || kw == "known_inputs" || kw == "unknown_inputs") {
      declare(kw, line, e);
    } else if (kw == "const" || kw == "ddt" || kw == "output" || kw == "ic") {
      equation(kw, line, e);
    } else {
      fail("unknown statement '" + kw + "'", col);
    }
  }

  void new_name(const std::string& name, int col) {
    if (!is_identifier(name)) fail("invalid identifier '" + name + "'", col);
    if (reserved_names().count(name)) fail("'" + name + "' is a reserved name", col);
    if (!names_.insert(name).second) fail("duplicate declaration of '" + name + "'", col);
  }

  void declare(const std::string& kw, const std::string& line, std::size_t from) {
    for (auto& item : split_items(line, from)) {
      std::string name = item.text;
      std::optional<int> option;
      std::string key;
      if (auto br = name.find('['); br != std::string::npos) {
        if (name.back() != ']') fail("unterminated '['", item.column + static_cast<int>(br));
        std::string opt = name.substr(br + 1, name.size() - br - 2);
        name = name.substr(0, br);
        auto eq = opt.find('=');
        if (eq == std::string::npos) fail("expected key=value in '[...]'", item.column + static_cast<int>(br) + 1);
        key = opt.substr(0, eq);
        try {
          option = std::stoi(opt.substr(eq + 1));
        } catch (const std::exception&) {
          fail("expected an integer in '[...]'", item.column + static_cast<int>(br + eq) + 2);
        }
      }
      new_name(name, item.column);
      if (kw == "states") {
        m_.states.push_back(name);
        decl_line_[name] = line_;
      } else if (kw == "params" || kw == "parameters") {
        m_.params.push_back(name);
      } else if (kw == "known_inputs") {
        if (option && key != "derivs") fail("known inputs take [derivs=N]", item.column);
        m_.known_inputs.push_back(KnownInput{name, option.value_or(2)});
      } else {
        if (option && key != "l") fail("unknown inputs take [l=N]", item.column);
        m_.unknown_inputs.push_back(UnknownInput{name, option.value_or(1)});
      }
      if (option && kw != "known_inputs" && kw != "unknown_inputs") fail("options are only allowed on inputs", item.column);
    }
  }

  void equation(const std::string& kw, const std::string& line, std::size_t from) {
    auto eq = line.find('=', from);
    if (eq == std::string::npos) fail("expected '='", static_cast<int>(line.size()) + 1);
    std::size_t s = line.find_first_not_of(" \t", from);
    std::size_t t = line.find_last_not_of(" \t", eq - 1);
    if (s == std::string::npos || s >= eq) fail("expected a name before '='", static_cast<int>(eq) + 1);
    std::string lhs = line.substr(s, t - s + 1);
    int lhs_col = static_cast<int>(s) + 1;
    std::string rhs = line.substr(eq + 1);
    auto resolver = [this](const std::string& name, int col) -> Expression {
      auto it = consts_.find(name);
      if (it != consts_.end()) return Expression(it->second);
      if (!names_.count(name) || outputs_.count(name)) throw ParseError("undeclared symbol '" + name + "'", line_, col);
      return Expression::symbol(name);
    };
    Expression e = parse_expression(rhs, resolver, line_, static_cast<int>(eq) + 1);

    if (kw == "const") {
      new_name(lhs, lhs_col);
      auto v = e.constant_value();
      if (!v) fail("constant '" + lhs + "' must have a numeric value", static_cast<int>(eq) + 2);
      m_.constants.push_back(Constant{lhs, *v});
      consts_[lhs] = *v;
    } else if (kw == "ddt") {
      if (m_.role(lhs) != Role::State) fail("ddt of undeclared state '" + lhs + "'", lhs_col);
      if (!rhs_.emplace(lhs, e).second) fail("second equation for state '" + lhs + "'", lhs_col);
    } else if (kw == "output") {
      new_name(lhs, lhs_col);
      outputs_.insert(lhs);
      m_.outputs.push_back(Output{lhs, e});
    } else {
      if (m_.role(lhs) != Role::State) fail("initial condition for undeclared state '" + lhs + "'", lhs_col);
      if (!ics_.emplace(lhs, e).second) fail("second initial condition for '" + lhs + "'", lhs_col);
    }
  }

  void finish() {
    if (m_.states.empty()) throw ParseError("model must declare at least one state", line_, 1);
    for (auto& x : m_.states) {
      auto it = rhs_.find(x);
      if (it == rhs_.end()) throw ParseError("arity mismatch: no ddt equation for state '" + x + "'", decl_line_[x], 1);
      m_.dynamics.push_back(it->second);
    }
    for (auto& x : m_.states)
      if (auto it = ics_.find(x); it != ics_.end()) m_.ics.push_back(InitialCondition{x, it->second});
    if (m_.outputs.empty()) throw ParseError("model must declare at least one output", line_, 1);
    try {
      m_.validate();
    } catch (const ModelError& err) {
      throw ParseError(err.what(), line_, 1);
    }
  }

  Model m_;
  int line_ = 0;
  std::set<std::string> names_, outputs_;
  std::map<std::string, Rational> consts_;
  std::map<std::string, Expression> rhs_, ics_;
  std::map<std::string, int> decl_line_;
};

}  // namespace

Model parse_model(std::string_view text) { return ModelParser().parse(text); }

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string emit_model(const Model& m) {
  std::ostringstream out;
  out << "model \"" << m.name << "\"\n";
  auto list = [&](const char* kw, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << kw;
    for (auto& n : names) out << ' ' << n;
    out << '\n';
  };
  list("states", m.states);
  list("params", m.params);
  if (!m.known_inputs.empty()) {
    out << "known_inputs";
    for (auto& u : m.known_inputs) out << ' ' << u.name << "[derivs=" << u.derivs << ']';
    out << '\n';
  }
  if (!m.unknown_inputs.empty()) {
    out << "unknown_inputs";
    for (auto& w : m.unknown_inputs) out << ' ' << w.name << "[l=" << w.l << ']';
    out << '\n';
  }
  for (auto& c : m.constants) out << "const " << c.name << " = " << c.value.get_str() << '\n';
  for (std::size_t i = 0; i < m.states.size(); ++i) out << "ddt " << m.states[i] << " = " << m.dynamics[i].str() << '\n';
  for (auto& o : m.outputs) out << "output " << o.name << " = " << o.expr.str() << '\n';
  for (auto& c : m.ics) out << "ic " << c.state << " = " << c.expr.str() << '\n';
  return out.str();
}

}  // namespace repargen
