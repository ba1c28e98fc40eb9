#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace pwv {

// Exact rational arithmetic. cpp_rational keeps values canonical (lowest
// terms, positive denominator), which the rest of the code base relies on.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Truncated subtraction: max(a - b, 0).
Rational monus(const Rational& a, const Rational& b);

// Parses "17", "3/4" or an exact decimal like "0.85". Throws
// std::invalid_argument on malformed input or a zero denominator.
Rational rational_from_string(const std::string& text);

// Canonical textual form: "p" for integers, "p/q" otherwise.
std::string rational_to_string(const Rational& q);

double rational_to_double(const Rational& q);

}  // namespace pwv
