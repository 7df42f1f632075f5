#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "mtypes/errors.hpp"

namespace mtypes {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Natural log of a positive big integer, accurate to a few ulp even when the
/// value does not fit in a double.
inline double log_big(const BigInt& x) {
  if (x <= 0) throw Error(ErrorCode::PreconditionViolated, "log_big needs x > 0");
  const unsigned bits = boost::multiprecision::msb(x);
  if (bits <= 52) return std::log(x.convert_to<double>());
  const BigInt top = x >> (bits - 52);
  return std::log(top.convert_to<double>()) +
         static_cast<double>(bits - 52) * std::numbers::ln2;
}

/// Natural log of a nonnegative rational; -infinity at zero.
inline double log_rational(const Rational& r) {
  if (r < 0) throw Error(ErrorCode::PreconditionViolated, "log_rational needs r >= 0");
  if (r == 0) return -std::numeric_limits<double>::infinity();
  return log_big(boost::multiprecision::numerator(r)) -
         log_big(boost::multiprecision::denominator(r));
}

inline double to_double(const Rational& r) {
  // convert via the log for magnitudes outside double range
  if (r == 0) return 0.0;
  const double l = log_rational(r < 0 ? -r : r);
  if (l > 700.0 || l < -700.0) {
    const double v = std::exp(l);
    return r < 0 ? -v : v;
  }
  return r.convert_to<double>();
}

inline Rational pow_rational(const Rational& base, std::int64_t e) {
  if (e < 0) {
    if (base == 0) throw Error(ErrorCode::PreconditionViolated, "0^negative");
    return Rational(1) / pow_rational(base, -e);
  }
  Rational acc(1), b = base;
  std::int64_t k = e;
  while (k > 0) {
    if (k & 1) acc *= b;
    b *= b;
    k >>= 1;
  }
  return acc;
}

inline std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  std::string s = num.str();
  if (den != 1) s += "/" + den.str();
  return s;
}

/// Parses "3/10", "42", "0.42", "-1.5e-4" into an exact rational.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  if (text.empty()) return std::nullopt;

  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto lhs = parse_rational(text.substr(0, slash));
    auto rhs = parse_rational(text.substr(slash + 1));
    if (!lhs || !rhs || *rhs == 0) return std::nullopt;
    return *lhs / *rhs;
  }

  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
  BigInt mantissa = 0;
  std::int64_t frac_digits = 0;
  bool any = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (is_digit(c)) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      any = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      return std::nullopt;
    }
  }
  if (!any) return std::nullopt;
  std::int64_t exp10 = 0;
  if (i < text.size()) {
    ++i;  // past 'e'
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
    if (i >= text.size()) return std::nullopt;
    for (; i < text.size(); ++i) {
      if (!is_digit(text[i])) return std::nullopt;
      exp10 = exp10 * 10 + (text[i] - '0');
    }
    if (eneg) exp10 = -exp10;
  }
  Rational r(mantissa);
  const std::int64_t shift = exp10 - frac_digits;
  if (shift > 0)
    r *= pow_rational(Rational(10), shift);
  else if (shift < 0)
    r /= pow_rational(Rational(10), -shift);
  return neg ? -r : r;
}

}  // namespace mtypes
