#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "repargen/rational_function.hpp"

namespace repargen {

// Straight-line code for a set of rational functions over a fixed list of
// input symbols. Opaque powers become Root instructions over their compiled
// base. Identical monomials are shared between outputs.
class Program {
 public:
  enum class Op { Input, Const, Add, Sub, Scale, Mul, Div, Root };
  struct Instr {
    Op op;
    std::size_t a = 0, b = 0;  // operand instruction indices (Input: slot)
    Rational c;                // Const value or Scale factor
    unsigned long root = 1;    // Root: result = a^(1/root)
    Symbol atom;               // Root: the opaque-power symbol it computes
    double cd = 0;             // c as a double
  };

  explicit Program(std::vector<Symbol> inputs);

  // Returns the instruction index holding f.
  std::size_t add(const RationalFunction& f);

  const std::vector<Instr>& code() const { return code_; }
  const std::vector<Symbol>& inputs() const { return inputs_; }

  // Plain double evaluation; throws PoleError on zero denominators or
  // non-positive opaque-power bases. `values` is indexed by input slot.
  void run(const std::vector<double>& values, std::vector<double>& regs) const;

 private:
  std::size_t emit(Instr i);
  std::size_t constant(const Rational& c);
  std::size_t symbol(Symbol s);
  std::size_t power(Symbol s, int e);
  std::size_t polynomial(const Polynomial& p);

  std::vector<Symbol> inputs_;
  std::vector<Instr> code_;
  std::unordered_map<Symbol, std::size_t> symbol_reg_;
  std::map<std::pair<Symbol, int>, std::size_t> power_reg_;
  std::map<Monomial, std::size_t, MonomialLess> monomial_reg_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> div_reg_;
};

}  // namespace repargen
