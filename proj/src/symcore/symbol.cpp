#include "repargen/symbol.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "repargen/rational_function.hpp"

namespace repargen {

namespace {

// Symbols live for the whole process; the table only grows.
struct SymbolTable {
  std::mutex mutex;
  std::unordered_map<std::string, std::unique_ptr<detail::SymbolData>> by_name;

  const detail::SymbolData* intern(std::string_view name, std::shared_ptr<const AtomInfo> atom) {
    std::lock_guard lock(mutex);
    auto it = by_name.find(std::string(name));
    if (it != by_name.end()) {
      if (static_cast<bool>(atom) != static_cast<bool>(it->second->atom))
        throw std::logic_error("symbol kind clash for '" + std::string(name) + "'");
      return it->second.get();
    }
    auto data = std::make_unique<detail::SymbolData>();
    data->name = std::string(name);
    data->atom = std::move(atom);
    auto* raw = data.get();
    by_name.emplace(data->name, std::move(data));
    return raw;
  }
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

const std::string& empty_name() {
  static const std::string s;
  return s;
}

}  // namespace

Symbol::Symbol(std::string_view name) : data_(table().intern(name, nullptr)) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
}

Symbol Symbol::atom(const std::string& name, std::shared_ptr<const AtomInfo> info) {
  return Symbol(table().intern(name, std::move(info)));
}

const std::string& Symbol::name() const { return data_ ? data_->name : empty_name(); }

}  // namespace repargen
