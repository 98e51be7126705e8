#include "repargen/taylor.hpp"

#include <stdexcept>

namespace repargen {

namespace {

std::vector<Symbol> program_inputs(const AugmentedSystem& a) {
  std::vector<Symbol> in = a.vars;
  for (auto& chain : a.known_chains) in.push_back(chain.front());
  return in;
}

void axpy(Vector& y, const Rational& f, const Vector& x) {
  if (x.empty() || f == 0) return;
  if (y.empty()) y.assign(x.size(), Rational(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0) y[i] += f * x[i];
}

void add_to(Jet& acc, const Jet& a, const Rational& s = 1) {
  acc.v += s * a.v;
  axpy(acc.g, s, a.g);
}

// acc += a * b
void add_product(Jet& acc, const Jet& a, const Jet& b) {
  if (a.is_zero() || b.is_zero()) return;
  acc.v += a.v * b.v;
  axpy(acc.g, a.v, b.g);
  axpy(acc.g, b.v, a.g);
}

// a / b where b.v != 0
Jet divide(const Jet& a, const Jet& b) {
  Jet q;
  q.v = a.v / b.v;
  q.g = a.g;
  axpy(q.g, -q.v, b.g);
  if (!q.g.empty()) {
    Rational inv = 1 / b.v;
    for (auto& x : q.g) x *= inv;
  }
  return q;
}

}  // namespace

TaylorJets::TaylorJets(const AugmentedSystem& a) : a_(a), prog_(program_inputs(a)), n_(a.size()) {
  for (auto& e : a.rhs) rhs_reg_.push_back(prog_.add(e.canonical()));
  for (auto& e : a.outputs) out_reg_.push_back(prog_.add(e.canonical()));
}

void TaylorJets::start(const RationalPoint& point) {
  point_ = point;
  m_ = 0;
  x_.assign(n_, {});
  for (std::size_t v = 0; v < n_; ++v) {
    Jet j;
    j.v = point.at(a_.vars[v]);
    j.g.assign(n_, Rational(0));
    j.g[v] = 1;
    x_[v].push_back(std::move(j));
  }
  known_.assign(a_.known_chains.size(), {});
  for (std::size_t u = 0; u < a_.known_chains.size(); ++u) {
    Rational fact = 1;
    for (std::size_t k = 0; k < a_.known_chains[u].size(); ++k) {
      if (k > 0) fact *= static_cast<long>(k);
      known_[u].push_back(Jet{point.at(a_.known_chains[u][k]) / fact, {}});
    }
  }
  reg_.assign(prog_.code().size(), {});
}

Jet TaylorJets::coefficient(std::size_t i, int m) {
  using Op = Program::Op;
  const auto& in = prog_.code()[i];
  auto at = [&](std::size_t r, int k) -> const Jet& { return reg_[r][static_cast<std::size_t>(k)]; };
  switch (in.op) {
    case Op::Input: {
      if (in.a < n_) return x_[in.a][static_cast<std::size_t>(m)];
      const auto& s = known_[in.a - n_];
      return static_cast<std::size_t>(m) < s.size() ? s[static_cast<std::size_t>(m)] : Jet{};
    }
    case Op::Const:
      return m == 0 ? Jet{in.c, {}} : Jet{};
    case Op::Add: {
      Jet r = at(in.a, m);
      add_to(r, at(in.b, m));
      return r;
    }
    case Op::Sub: {
      Jet r = at(in.a, m);
      add_to(r, at(in.b, m), -1);
      return r;
    }
    case Op::Scale: {
      Jet r;
      add_to(r, at(in.a, m), in.c);
      return r;
    }
    case Op::Mul: {
      Jet r;
      for (int k = 0; k <= m; ++k) add_product(r, at(in.a, k), at(in.b, m - k));
      return r;
    }
    case Op::Div: {
      const Jet& b0 = at(in.b, 0);
      if (b0.v == 0) throw PoleError("pole: denominator vanishes at the expansion point");
      Jet r = at(in.a, m);
      for (int k = 1; k <= m; ++k) {
        Jet t;
        add_product(t, at(in.b, k), at(i, m - k));
        add_to(r, t, -1);
      }
      return divide(r, b0);
    }
    case Op::Root: {
      const Jet& b0 = at(in.a, 0);
      if (b0.v == 0) throw PoleError("opaque power of zero at the expansion point");
      Rational r(1, in.root);
      if (m == 0) {
        Jet p;
        if (auto it = point_.find(in.atom); it != point_.end()) {
          p.v = it->second;
        } else if (auto e = exact_power(b0.v, r)) {
          p.v = *e;
        } else {
          throw std::domain_error("no value for opaque power " + in.atom.name());
        }
        // d(b^r) = r * b^r * db / b
        axpy(p.g, r * p.v / b0.v, b0.g);
        return p;
      }
      // b p' = r p b'  gives  m b0 p_m = sum_j ((r+1) j - m) b_j p_{m-j}
      Jet acc;
      for (int j = 1; j <= m; ++j) {
        Jet t;
        add_product(t, at(in.a, j), at(i, m - j));
        add_to(acc, t, (r + 1) * j - m);
      }
      Jet denom = b0;
      denom.v *= m;
      for (auto& x : denom.g) x *= m;
      return divide(acc, denom);
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<Vector> TaylorJets::next_order() {
  const int m = m_;
  for (std::size_t i = 0; i < reg_.size(); ++i) reg_[i].push_back(coefficient(i, m));
  std::vector<Vector> rows;
  for (auto r : out_reg_) {
    Vector g = reg_[r][static_cast<std::size_t>(m)].g;
    if (g.empty()) g.assign(n_, Rational(0));
    rows.push_back(std::move(g));
  }
  for (std::size_t v = 0; v < n_; ++v) {
    Jet next;
    add_to(next, reg_[rhs_reg_[v]][static_cast<std::size_t>(m)], Rational(1, m + 1));
    x_[v].push_back(std::move(next));
  }
  ++m_;
  return rows;
}

}  // namespace repargen
