#include "repargen/program.hpp"

#include <cmath>
#include <stdexcept>

namespace repargen {

Program::Program(std::vector<Symbol> inputs) : inputs_(std::move(inputs)) {
  for (std::size_t i = 0; i < inputs_.size(); ++i) symbol_reg_[inputs_[i]] = emit(Instr{Op::Input, i, 0, 0, 1, {}});
}

std::size_t Program::emit(Instr i) {
  i.cd = i.c.get_d();
  code_.push_back(std::move(i));
  return code_.size() - 1;
}

std::size_t Program::constant(const Rational& c) { return emit(Instr{Op::Const, 0, 0, c, 1, {}}); }

std::size_t Program::symbol(Symbol s) {
  if (auto it = symbol_reg_.find(s); it != symbol_reg_.end()) return it->second;
  if (!s.is_atom()) throw std::invalid_argument("program has no input for symbol '" + s.name() + "'");
  const auto& info = s.atom_info();
  std::size_t base = add(*info.base);
  std::size_t r = emit(Instr{Op::Root, base, 0, 0, info.root, s});
  symbol_reg_[s] = r;
  return r;
}

std::size_t Program::power(Symbol s, int e) {
  if (e == 1) return symbol(s);
  auto key = std::make_pair(s, e);
  if (auto it = power_reg_.find(key); it != power_reg_.end()) return it->second;
  std::size_t r = emit(Instr{Op::Mul, power(s, e - 1), symbol(s), 0, 1, {}});
  power_reg_[key] = r;
  return r;
}

std::size_t Program::polynomial(const Polynomial& p) {
  if (p.is_zero()) return constant(0);
  std::size_t acc = 0;
  bool first = true;
  for (auto& t : p.terms()) {
    std::size_t term;
    if (t.mono.is_one()) {
      term = constant(t.coef);
    } else {
      auto it = monomial_reg_.find(t.mono);
      if (it != monomial_reg_.end()) {
        term = it->second;
      } else {
        const auto& f = t.mono.factors();
        term = power(f[0].first, f[0].second);
        for (std::size_t k = 1; k < f.size(); ++k) term = emit(Instr{Op::Mul, term, power(f[k].first, f[k].second), 0, 1, {}});
        monomial_reg_[t.mono] = term;
      }
      if (t.coef != 1) term = emit(Instr{Op::Scale, term, 0, t.coef, 1, {}});
    }
    acc = first ? term : emit(Instr{Op::Add, acc, term, 0, 1, {}});
    first = false;
  }
  return acc;
}

std::size_t Program::add(const RationalFunction& f) {
  std::size_t n = polynomial(f.num());
  if (f.den().is_constant()) {
    Rational d = f.den().constant_value();
    return d == 1 ? n : emit(Instr{Op::Scale, n, 0, Rational(1) / d, 1, {}});
  }
  std::size_t d = polynomial(f.den());
  auto key = std::make_pair(n, d);
  if (auto it = div_reg_.find(key); it != div_reg_.end()) return it->second;
  std::size_t r = emit(Instr{Op::Div, n, d, 0, 1, {}});
  div_reg_[key] = r;
  return r;
}

void Program::run(const std::vector<double>& values, std::vector<double>& regs) const {
  regs.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::Input: regs[i] = values[in.a]; break;
      case Op::Const: regs[i] = in.cd; break;
      case Op::Add: regs[i] = regs[in.a] + regs[in.b]; break;
      case Op::Sub: regs[i] = regs[in.a] - regs[in.b]; break;
      case Op::Scale: regs[i] = in.cd * regs[in.a]; break;
      case Op::Mul: regs[i] = regs[in.a] * regs[in.b]; break;
      case Op::Div:
        if (regs[in.b] == 0) throw PoleError("pole: denominator vanishes");
        regs[i] = regs[in.a] / regs[in.b];
        break;
      case Op::Root:
        if (!(regs[in.a] > 0)) throw PoleError("opaque power of a non-positive base");
        regs[i] = std::pow(regs[in.a], 1.0 / static_cast<double>(in.root));
        break;
    }
  }
}

}  // namespace repargen
