#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace assouadlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer "p", or a finite decimal "0.125" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form (or "p" when the denominator is 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Natural log of a positive big integer, accurate for values far beyond long double range.
long double log_big(const BigInt& value);

/// Natural log of a positive rational, computed from its numerator and denominator.
long double log_rational(const Rational& value);

/// ceil(value * 2^64) clamped to [0, 2^64]. Used to turn probabilities into integer thresholds
/// so that "u < threshold" with u uniform on 64 bits has probability exactly `value`.
unsigned __int128 probability_threshold(const Rational& value);

BigInt ipow(const BigInt& base, std::uint64_t exponent);

} // namespace assouadlab
