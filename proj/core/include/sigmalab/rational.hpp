#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sigmalab {

// Exact arbitrary-precision rational. All exact modules compute in this type.
using Rational = mpq_class;

// Parses "p", "-p" or "p/q" (q > 0). The result is canonicalized.
// Throws std::invalid_argument on anything else, including decimals.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form; integers print without a denominator.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace sigmalab
