#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace elts {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q" or "p" (q > 0 after normalization). Throws ParseError on junk.
Rational parse_rational(const std::string& text);

// "p/q" in lowest terms, "p" when the denominator is one.
std::string format_rational(const Rational& r);

// The exact rational value of a finite double (doubles are dyadic rationals).
Rational exact_rational(double x);

// Best rational approximation of x with denominator <= max_den, via the
// continued-fraction convergent/semiconvergent construction.
// max_den == 0 returns the exact dyadic value.
Rational rationalize(double x, std::uint64_t max_den);

double to_double(const Rational& r);

}  // namespace elts
