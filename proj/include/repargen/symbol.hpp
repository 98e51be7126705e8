#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace repargen {

// Defined in rational_function.hpp. Present only on opaque-power symbols.
struct AtomInfo;

namespace detail {
struct SymbolData {
  std::string name;
  std::shared_ptr<const AtomInfo> atom;
};
}  // namespace detail

// Interned symbol. Two symbols with the same name are the same object, so
// equality is a pointer compare. Ordering is by name, which is what makes
// canonical forms independent of interning order.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  // Interns an opaque power symbol; the name must be derived from the
  // canonical base and exponent so that equal atoms share one object.
  static Symbol atom(const std::string& name, std::shared_ptr<const AtomInfo> info);

  const std::string& name() const;
  bool valid() const { return data_ != nullptr; }
  bool is_atom() const { return data_ && data_->atom != nullptr; }
  const AtomInfo& atom_info() const { return *data_->atom; }
  const void* key() const { return data_; }

  friend bool operator==(Symbol a, Symbol b) { return a.data_ == b.data_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.data_ == b.data_) return std::strong_ordering::equal;
    int c = a.name().compare(b.name());
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

 private:
  explicit Symbol(const detail::SymbolData* d) : data_(d) {}
  const detail::SymbolData* data_ = nullptr;
};

}  // namespace repargen

template <>
struct std::hash<repargen::Symbol> {
  std::size_t operator()(repargen::Symbol s) const noexcept { return std::hash<const void*>{}(s.key()); }
};
