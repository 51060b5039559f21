#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace nft {

using Rational = mpq_class;

/// Formats as "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& q);

/// Parses "num/den", "num", or a decimal literal such as "0.25" (decimals are
/// converted exactly). Throws ParseError on malformed input or a zero
/// denominator.
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite double.
Rational from_double(double v);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace nft
