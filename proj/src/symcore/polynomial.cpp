#include "repargen/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace repargen {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(Symbol s, int e) {
  if (e < 0) throw std::invalid_argument("negative exponent in monomial");
  if (e > 0) f_.emplace_back(s, e);
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (auto& [s, e] : factors) {
    if (e < 0) throw std::invalid_argument("negative exponent in monomial");
    if (e == 0) continue;
    if (!m.f_.empty() && m.f_.back().first == s)
      m.f_.back().second += e;
    else
      m.f_.emplace_back(s, e);
  }
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (auto& f : f_) d += f.second;
  return d;
}

int Monomial::degree_in(Symbol s) const {
  for (auto& [v, e] : f_)
    if (v == s) return e;
  return 0;
}

bool Monomial::divides(const Monomial& other) const {
  auto it = other.f_.begin();
  for (auto& [s, e] : f_) {
    while (it != other.f_.end() && it->first < s) ++it;
    if (it == other.f_.end() || it->first != s || it->second < e) return false;
  }
  return true;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.f_.reserve(f_.size() + o.f_.size());
  auto a = f_.begin(), b = o.f_.begin();
  while (a != f_.end() && b != o.f_.end()) {
    if (a->first == b->first) {
      r.f_.emplace_back(a->first, a->second + b->second);
      ++a, ++b;
    } else if (a->first < b->first) {
      r.f_.push_back(*a++);
    } else {
      r.f_.push_back(*b++);
    }
  }
  r.f_.insert(r.f_.end(), a, f_.end());
  r.f_.insert(r.f_.end(), b, o.f_.end());
  return r;
}

Monomial Monomial::operator/(const Monomial& o) const {
  Monomial r;
  auto b = o.f_.begin();
  for (auto& [s, e] : f_) {
    int d = e;
    if (b != o.f_.end() && b->first == s) d -= (b++)->second;
    if (d < 0) throw std::invalid_argument("monomial division not exact");
    if (d > 0) r.f_.emplace_back(s, d);
  }
  if (b != o.f_.end()) throw std::invalid_argument("monomial division not exact");
  return r;
}

Monomial Monomial::without(Symbol s) const {
  Monomial r;
  for (auto& f : f_)
    if (f.first != s) r.f_.push_back(f);
  return r;
}

std::string Monomial::to_string() const {
  if (f_.empty()) return "1";
  std::string out;
  for (auto& [s, e] : f_) {
    if (!out.empty()) out += '*';
    if (e == 1) {
      out += s.name();
    } else if (s.is_atom()) {
      out += '(' + s.name() + ")^" + std::to_string(e);
    } else {
      out += s.name() + '^' + std::to_string(e);
    }
  }
  return out;
}

int lex_compare(const Monomial& a, const Monomial& b) {
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  for (; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].first != fb[i].first) return fa[i].first < fb[i].first ? 1 : -1;
    if (fa[i].second != fb[i].second) return fa[i].second > fb[i].second ? 1 : -1;
  }
  if (fa.size() == fb.size()) return 0;
  return fa.size() > fb.size() ? 1 : -1;
}

// -------------------------------------------------------------- Polynomial

namespace {

bool term_greater(const Term& a, const Term& b) { return lex_compare(a.mono, b.mono) > 0; }

// Merge two sorted term lists, b scaled by sign.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = lex_compare(a[i].mono, b[j].mono);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(subtract ? Term{b[j].mono, -b[j].coef} : b[j]);
      ++j;
    } else {
      Rational s = subtract ? Rational(a[i].coef - b[j].coef) : Rational(a[i].coef + b[j].coef);
      if (s != 0) r.push_back(Term{a[i].mono, std::move(s)});
      ++i, ++j;
    }
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  for (; j < b.size(); ++j) r.push_back(subtract ? Term{b[j].mono, -b[j].coef} : b[j]);
  return r;
}

}  // namespace

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) {
    t_.push_back(Term{Monomial(), c});
    t_[0].coef.canonicalize();
  }
}

Polynomial::Polynomial(Symbol s) { t_.push_back(Term{Monomial(s), Rational(1)}); }

Polynomial::Polynomial(const Monomial& m, const Rational& c) {
  if (c != 0) {
    t_.push_back(Term{m, c});
    t_[0].coef.canonicalize();
  }
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Polynomial p;
  for (auto& t : terms) {
    if (!p.t_.empty() && p.t_.back().mono == t.mono) {
      p.t_.back().coef += t.coef;
      if (p.t_.back().coef == 0) p.t_.pop_back();
    } else if (t.coef != 0) {
      p.t_.push_back(std::move(t));
    }
  }
  return p;
}

Rational Polynomial::constant_value() const {
  if (!is_constant()) throw std::logic_error("polynomial is not constant");
  return t_.empty() ? Rational(0) : t_[0].coef;
}

int Polynomial::degree_in(Symbol s) const {
  int d = 0;
  for (auto& t : t_) d = std::max(d, t.mono.degree_in(s));
  return d;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (auto& t : t_) d = std::max(d, t.mono.degree());
  return d;
}

bool Polynomial::contains(Symbol s) const {
  for (auto& t : t_)
    if (t.mono.degree_in(s) > 0) return true;
  return false;
}

std::vector<Symbol> Polynomial::variables() const {
  std::vector<Symbol> v;
  for (auto& t : t_)
    for (auto& f : t.mono.factors()) v.push_back(f.first);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Polynomial> Polynomial::coefficients_in(Symbol s) const {
  std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(degree_in(s)) + 1);
  for (auto& t : t_) buckets[t.mono.degree_in(s)].push_back(Term{t.mono.without(s), t.coef});
  std::vector<Polynomial> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) {
    // Removing one variable keeps lex order among terms sharing its exponent.
    Polynomial p;
    p.t_ = std::move(b);
    out.push_back(std::move(p));
  }
  return out;
}

Polynomial Polynomial::from_coefficients(Symbol s, const std::vector<Polynomial>& coeffs) {
  Polynomial r;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (!coeffs[k].is_zero()) r += coeffs[k].times(Monomial(s, static_cast<int>(k)), 1);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.t_) t.coef = -t.coef;
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r;
  r.t_ = merge(t_, o.t_, false);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r;
  r.t_ = merge(t_, o.t_, true);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (t_.empty() || o.t_.empty()) return {};
  const Polynomial& small = t_.size() <= o.t_.size() ? *this : o;
  const Polynomial& big = t_.size() <= o.t_.size() ? o : *this;
  if (small.t_.size() == 1) return big.times(small.t_[0].mono, small.t_[0].coef);
  std::vector<Term> prod;
  prod.reserve(small.t_.size() * big.t_.size());
  for (auto& a : small.t_)
    for (auto& b : big.t_) prod.push_back(Term{a.mono * b.mono, a.coef * b.coef});
  return from_terms(std::move(prod));
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return {};
  Polynomial r = *this;
  for (auto& t : r.t_) t.coef *= c;
  return r;
}

Polynomial Polynomial::times(const Monomial& m, const Rational& c) const {
  if (c == 0) return {};
  Polynomial r;
  r.t_.reserve(t_.size());
  for (auto& t : t_) r.t_.push_back(Term{t.mono * m, t.coef * c});
  return r;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result(1), base = *this;
  while (n) {
    if (n & 1u) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

Polynomial Polynomial::monic() const {
  if (t_.empty() || t_[0].coef == 1) return *this;
  return scaled(Rational(1) / t_[0].coef);
}

Polynomial Polynomial::derivative(Symbol s) const {
  std::vector<Term> out;
  for (auto& t : t_) {
    int e = t.mono.degree_in(s);
    if (e == 0) continue;
    out.push_back(Term{t.mono / Monomial(s), t.coef * e});
  }
  return from_terms(std::move(out));
}

Rational Polynomial::evaluate(const std::function<Rational(Symbol)>& value) const {
  std::vector<std::pair<Symbol, Rational>> cache;
  auto lookup = [&](Symbol s) -> const Rational& {
    for (auto& c : cache)
      if (c.first == s) return c.second;
    cache.emplace_back(s, value(s));
    return cache.back().second;
  };
  Rational sum = 0;
  for (auto& t : t_) {
    Rational p = t.coef;
    for (auto& [s, e] : t.mono.factors()) p *= pow_int(lookup(s), e);
    sum += p;
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (t_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& t : t_) {
    Rational c = t.coef;
    bool neg = c < 0;
    if (neg) c = -c;
    std::string body;
    if (t.mono.is_one())
      body = c.get_str();
    else if (c == 1)
      body = t.mono.to_string();
    else
      body = c.get_str() + "*" + t.mono.to_string();
    if (first)
      out += neg ? "-" + body : body;
    else
      out += (neg ? " - " : " + ") + body;
    first = false;
  }
  return out;
}

// ------------------------------------------------------------ division/gcd

std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.is_zero()) return Polynomial();
  if (b.is_constant()) return a.scaled(Rational(1) / b.constant_value());
  for (Symbol v : b.variables())
    if (b.degree_in(v) > a.degree_in(v)) return std::nullopt;
  const Term& lb = b.leading();
  if (b.is_monomial()) {
    std::vector<Term> q;
    q.reserve(a.size());
    for (auto& t : a.terms()) {
      if (!lb.mono.divides(t.mono)) return std::nullopt;
      q.push_back(Term{t.mono / lb.mono, t.coef / lb.coef});
    }
    return Polynomial::from_terms(std::move(q));
  }
  Polynomial r = a;
  std::vector<Term> q;
  while (!r.is_zero()) {
    const Term& lr = r.leading();
    if (!lb.mono.divides(lr.mono)) return std::nullopt;
    Term t{lr.mono / lb.mono, lr.coef / lb.coef};
    r -= b.times(t.mono, t.coef);
    q.push_back(std::move(t));
  }
  return Polynomial::from_terms(std::move(q));
}

namespace {

Monomial monomial_content(const Polynomial& p) {
  std::vector<Monomial::Factor> f = p.leading().mono.factors();
  for (auto& t : p.terms()) {
    std::vector<Monomial::Factor> next;
    for (auto& [s, e] : f) {
      int d = std::min(e, t.mono.degree_in(s));
      if (d > 0) next.emplace_back(s, d);
    }
    f = std::move(next);
    if (f.empty()) break;
  }
  return Monomial::from_factors(std::move(f));
}

Polynomial divide_by_monomial(const Polynomial& p, const Monomial& m) {
  if (m.is_one()) return p;
  std::vector<Term> out;
  out.reserve(p.size());
  for (auto& t : p.terms()) out.push_back(Term{t.mono / m, t.coef});
  return Polynomial::from_terms(std::move(out));
}

Polynomial exact(const std::optional<Polynomial>& q) {
  if (!q) throw std::logic_error("gcd: expected exact division");
  return *q;
}

Polynomial content_in(const Polynomial& p, Symbol x) {
  Polynomial g;
  for (auto& c : p.coefficients_in(x)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Polynomial(1);
  }
  return g;
}

Polynomial primitive_part(const Polynomial& p, Symbol x) {
  Polynomial c = content_in(p, x);
  return c.is_constant() ? p.monic() : exact(divide_exact(p, c)).monic();
}

Polynomial pseudo_remainder(Polynomial r, const Polynomial& q, Symbol x) {
  int dq = q.degree_in(x);
  Polynomial lcq = q.coefficients_in(x).back();
  while (!r.is_zero()) {
    int dr = r.degree_in(x);
    if (dr < dq) break;
    Polynomial lcr = r.coefficients_in(x).back();
    Polynomial shift = lcr * q;
    if (dr > dq) shift = shift.times(Monomial(x, dr - dq), 1);
    r = r * lcq - shift;
  }
  return r;
}

// gcd of polynomials without monomial content.
Polynomial gcd_core(const Polynomial& a, const Polynomial& b) {
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a.size() <= b.size()) {
    if (divide_exact(b, a)) return a.monic();
  } else if (divide_exact(a, b)) {
    return b.monic();
  }
  auto va = a.variables(), vb = b.variables();
  auto absent_reduce = [](const Polynomial& p, const Polynomial& other, Symbol x) {
    // gcd(p, other) with x absent from other divides every x-coefficient of p
    Polynomial g = other;
    for (auto& c : p.coefficients_in(x)) {
      if (c.is_zero()) continue;
      g = gcd(g, c);
      if (g.is_constant()) return Polynomial(1);
    }
    return g;
  };
  for (Symbol x : va)
    if (!std::binary_search(vb.begin(), vb.end(), x)) return absent_reduce(a, b, x);
  for (Symbol x : vb)
    if (!std::binary_search(va.begin(), va.end(), x)) return absent_reduce(b, a, x);

  Symbol x = va.front();
  int best = 1 << 30;
  for (Symbol v : va) {
    int d = std::max(a.degree_in(v), b.degree_in(v));
    if (d < best) best = d, x = v;
  }
  Polynomial ca = content_in(a, x), cb = content_in(b, x);
  Polynomial g_content = gcd(ca, cb);
  Polynomial p = ca.is_constant() ? a : exact(divide_exact(a, ca));
  Polynomial q = cb.is_constant() ? b : exact(divide_exact(b, cb));
  if (p.degree_in(x) < q.degree_in(x)) std::swap(p, q);
  while (!q.is_zero()) {
    if (q.degree_in(x) == 0) {
      p = Polynomial(1);
      break;
    }
    Polynomial r = pseudo_remainder(p, q, x);
    p = std::move(q);
    q = r.is_zero() ? r : primitive_part(r, x);
  }
  if (p.degree_in(x) == 0) p = Polynomial(1);
  return (g_content * p).monic();
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a == b) return a.monic();
  Monomial ma = monomial_content(a), mb = monomial_content(b);
  std::vector<Monomial::Factor> common;
  for (auto& [s, e] : ma.factors()) {
    int d = std::min(e, mb.degree_in(s));
    if (d > 0) common.emplace_back(s, d);
  }
  Polynomial g = gcd_core(divide_by_monomial(a, ma), divide_by_monomial(b, mb));
  return g.times(Monomial::from_factors(std::move(common)), 1).monic();
}

std::map<Monomial, SparseRow, MonomialLess> linear_rows(
    const Polynomial& p, const std::function<std::optional<std::size_t>(Symbol)>& unknown_index) {
  std::map<Monomial, SparseRow, MonomialLess> rows;
  for (auto& t : p.terms()) {
    std::optional<std::size_t> idx;
    std::vector<Monomial::Factor> rest;
    for (auto& [s, e] : t.mono.factors()) {
      auto k = unknown_index(s);
      if (!k) {
        rest.emplace_back(s, e);
        continue;
      }
      if (idx || e != 1) throw std::invalid_argument("expression is not linear in the unknowns");
      idx = k;
    }
    if (!idx) throw std::invalid_argument("term free of unknowns: " + t.mono.to_string());
    rows[Monomial::from_factors(std::move(rest))].emplace_back(*idx, t.coef);
  }
  for (auto& [m, row] : rows) std::sort(row.begin(), row.end(), [](auto& x, auto& y) { return x.first < y.first; });
  return rows;
}

}  // namespace repargen
