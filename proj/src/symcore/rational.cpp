#include "repargen/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace repargen {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer ten_pow(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

// Integer r-th root if exact.
std::optional<Integer> exact_root(const Integer& v, unsigned long r) {
  if (v < 0 && r % 2 == 0) return std::nullopt;
  Integer root;
  Integer a = abs(v);
  if (mpz_root(root.get_mpz_t(), a.get_mpz_t(), r) == 0) return std::nullopt;
  return v < 0 ? Integer(-root) : root;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto n = s.substr(0, slash), d = s.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d)) throw std::invalid_argument("bad rational: " + std::string(text));
    Rational q{Integer(std::string(n), 10), Integer(std::string(d), 10)};
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto ex = s.substr(e + 1);
    bool eneg = false;
    if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
      eneg = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (!all_digits(ex) || ex.size() > 6) throw std::invalid_argument("bad exponent: " + std::string(text));
    exp10 = std::stol(std::string(ex));
    if (eneg) exp10 = -exp10;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw std::invalid_argument("bad number: " + std::string(text));
    digits = std::string(ip) + std::string(fp);
    exp10 -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw std::invalid_argument("bad number: " + std::string(text));
    digits = std::string(s);
  }
  Rational q{Integer(digits, 10)};
  if (exp10 > 0) q *= ten_pow(exp10);
  if (exp10 < 0) q /= ten_pow(-exp10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational pow_int(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("zero to a negative power");
    return pow_int(Rational(1) / base, -exponent);
  }
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r{n, d};
  r.canonicalize();
  return r;
}

std::optional<Rational> exact_power(const Rational& base, const Rational& exponent) {
  if (is_integer(exponent)) {
    if (!exponent.get_num().fits_slong_p()) return std::nullopt;
    if (base == 0 && exponent < 0) return std::nullopt;
    return pow_int(base, exponent.get_num().get_si());
  }
  if (base == 0) return exponent > 0 ? std::optional<Rational>(Rational(0)) : std::nullopt;
  if (!exponent.get_den().fits_ulong_p() || !exponent.get_num().fits_slong_p()) return std::nullopt;
  unsigned long r = exponent.get_den().get_ui();
  auto n = exact_root(base.get_num(), r);
  auto d = exact_root(base.get_den(), r);
  if (!n || !d) return std::nullopt;
  Rational root{*n, *d};
  root.canonicalize();
  return pow_int(root, exponent.get_num().get_si());
}

}  // namespace repargen
