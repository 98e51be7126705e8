#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace repargen {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "12", "-3/4", "0.021", "1.5e-3" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

// Exact r-th power when it exists in Q (e.g. (4/9)^(1/2) = 2/3).
std::optional<Rational> exact_power(const Rational& base, const Rational& exponent);

Rational pow_int(const Rational& base, long exponent);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace repargen
