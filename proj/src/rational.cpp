#include "pwv/rational.hpp"

#include <stdexcept>

namespace pwv {

Rational monus(const Rational& a, const Rational& b) {
  return a > b ? Rational(a - b) : Rational(0);
}

namespace {

// Integer from decimal digits. Leading zeros are stripped first: the
// multiprecision string constructor would read them as an octal prefix.
Integer int_from_digits(const std::string& digits) {
  std::size_t i = 0;
  while (i + 1 < digits.size() && digits[i] == '0') ++i;
  return Integer(digits.substr(i));
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("malformed rational literal: '" + text + "'");
  };
  if (text.empty()) return fail();
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-') {
    negative = true;
    pos = 1;
  }
  auto read_digits = [&](std::string& out) {
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      out.push_back(text[pos]);
      ++pos;
    }
  };
  std::string whole;
  read_digits(whole);
  if (whole.empty()) return fail();
  Rational value;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::string frac;
    read_digits(frac);
    if (frac.empty() || pos != text.size()) return fail();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = Rational(int_from_digits(whole) * scale + int_from_digits(frac), scale);
  } else if (pos < text.size() && text[pos] == '/') {
    ++pos;
    std::string den;
    read_digits(den);
    if (den.empty() || pos != text.size()) return fail();
    Integer d = int_from_digits(den);
    if (d == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    value = Rational(int_from_digits(whole), d);
  } else {
    if (pos != text.size()) return fail();
    value = Rational(int_from_digits(whole));
  }
  return negative ? Rational(-value) : value;
}

std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double rational_to_double(const Rational& q) {
  return q.convert_to<double>();
}

}  // namespace pwv
