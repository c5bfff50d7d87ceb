#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace oppenheim {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", "p" or "-p/q" into canonical form. Throws ConfigError.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);
bool is_integer(const Rational& value);

/// Exact value of a finite double.
Rational exact(double value);

/// Truncates toward zero, so floor(to_double(x)) == floor(x) whenever the
/// integer part is below 2^53.
double to_double(const Rational& value);

} // namespace oppenheim
