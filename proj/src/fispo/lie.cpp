#include <stdexcept>

#include "repargen/fispo.hpp"

namespace repargen {

std::vector<std::vector<Expression>> extended_lie_derivatives(const AugmentedSystem& a, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
  std::vector<RationalFunction> rhs;
  for (auto& e : a.rhs) rhs.push_back(e.canonical());
  std::vector<RationalFunction> current;
  for (auto& g : a.outputs) current.push_back(g.canonical());

  std::vector<std::vector<Expression>> out;
  for (int i = 0;; ++i) {
    std::vector<Expression> block;
    for (auto& c : current) block.push_back(Expression::from_canonical(c));
    out.push_back(std::move(block));
    if (i == k_max) break;
    for (auto& c : current) {
      RationalFunction next;
      for (std::size_t v = 0; v < a.size(); ++v) {
        if (rhs[v].is_zero()) continue;
        RationalFunction d = derivative(c, a.vars[v]);
        if (!d.is_zero()) next += d * rhs[v];
      }
      for (auto& chain : a.known_chains)
        for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
          RationalFunction d = derivative(c, chain[j]);
          if (!d.is_zero()) next += d * RationalFunction(chain[j + 1]);
        }
      c = std::move(next);
    }
  }
  return out;
}

OIMatrix build_oi_matrix(const AugmentedSystem& a, int k) {
  OIMatrix m;
  m.columns = a.vars;
  m.k = k;
  for (auto& block : extended_lie_derivatives(a, k))
    for (auto& L : block) {
      std::vector<Expression> row;
      for (Symbol v : a.vars) row.push_back(differentiate(L, v));
      m.rows.push_back(std::move(row));
    }
  return m;
}

Matrix evaluate_matrix(const OIMatrix& m, const RationalPoint& point) {
  Matrix out;
  for (auto& row : m.rows) {
    Vector r;
    for (auto& e : row) r.push_back(evaluate(e.canonical(), point));
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t generic_rank(const OIMatrix& m, int trials, const SamplingOptions& s) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  std::set<Symbol> symbols;
  for (auto& row : m.rows)
    for (auto& e : row) {
      auto f = free_symbols(e.canonical(), true);
      symbols.insert(f.begin(), f.end());
    }
  std::size_t best = 0;
  for (int t = 0; t < trials; ++t) {
    PointSampler sampler(s.seed + static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ULL, s.lo, s.hi);
    for (int attempt = 0;; ++attempt) {
      if (attempt == s.redraws) throw std::runtime_error("generic_rank: redraw budget exhausted");
      RationalPoint p;
      for (Symbol sym : symbols) p[sym] = sampler.draw();
      try {
        best = std::max(best, rank(evaluate_matrix(m, p), m.columns.size()));
        break;
      } catch (const PoleError&) {
      }
    }
  }
  return best;
}

}  // namespace repargen
