#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "mtypes/errors.hpp"
#include "mtypes/rational.hpp"

namespace mtypes {

/// Nonnegative scalar held in two representations: an exact big rational
/// (when available) and a natural-log value (-inf encodes zero). Multiplicities
/// at n in the hundreds overflow any fixed-width float, while log space alone
/// cannot decide exact ties; both are kept and cross-checked.
struct Weight {
  std::optional<Rational> exact;
  double log_value = -std::numeric_limits<double>::infinity();

  static Weight zero() { return Weight{}; }

  static Weight from_log(double lv) {
    Weight w;
    w.log_value = lv;
    return w;
  }

  /// Builds the dual representation. `independent_log` is expected to come
  /// from a separate computation path (e.g. lgamma); it is validated against
  /// ln(exact) to 1e-10 relative.
  static Weight from_exact(Rational value, double independent_log) {
    if (value < 0) throw Error(ErrorCode::PreconditionViolated, "weight < 0");
    Weight w;
    const double ln = log_rational(value);
    if (value > 0) {
      const double tol = 1e-10 * std::max(1.0, std::fabs(ln));
      if (std::fabs(independent_log - ln) > tol)
        throw Error(ErrorCode::PreconditionViolated,
                    "weight log/exact representations disagree");
    }
    w.exact = std::move(value);
    w.log_value = independent_log;
    return w;
  }

  bool is_zero() const {
    if (exact) return *exact == 0;
    return log_value == -std::numeric_limits<double>::infinity();
  }

  double value() const { return exact ? to_double(*exact) : std::exp(log_value); }

  /// ln of the stored value, preferring the exact representation.
  double log() const { return exact ? log_rational(*exact) : log_value; }
};

inline Weight operator*(const Weight& a, const Weight& b) {
  Weight w;
  w.log_value = a.log_value + b.log_value;
  if (a.is_zero() || b.is_zero()) w.log_value = -std::numeric_limits<double>::infinity();
  if (a.exact && b.exact) w.exact = *a.exact * *b.exact;
  return w;
}

inline Weight operator+(const Weight& a, const Weight& b) {
  Weight w;
  if (a.exact && b.exact) w.exact = *a.exact + *b.exact;
  // log-sum-exp
  if (a.is_zero() && b.is_zero()) return a.exact && b.exact ? w : Weight::zero();
  const double hi = std::max(a.log_value, b.log_value);
  const double lo = std::min(a.log_value, b.log_value);
  w.log_value = hi + std::log1p(std::exp(lo - hi));
  return w;
}

inline Weight operator/(const Weight& a, const Weight& b) {
  if (b.is_zero()) throw Error(ErrorCode::PreconditionViolated, "weight division by zero");
  Weight w;
  w.log_value = a.is_zero() ? -std::numeric_limits<double>::infinity()
                            : a.log_value - b.log_value;
  if (a.exact && b.exact) w.exact = *a.exact / *b.exact;
  return w;
}

/// Three-way comparison; exact when both sides carry rationals, otherwise in
/// log space with relative tie tolerance `log_tie_rtol`.
inline int weight_compare(const Weight& a, const Weight& b, double log_tie_rtol = 1e-12) {
  if (a.exact && b.exact) {
    if (*a.exact < *b.exact) return -1;
    if (*a.exact > *b.exact) return 1;
    return 0;
  }
  if (a.is_zero() && b.is_zero()) return 0;
  if (a.is_zero()) return -1;
  if (b.is_zero()) return 1;
  const double scale = std::max({1.0, std::fabs(a.log_value), std::fabs(b.log_value)});
  if (std::fabs(a.log_value - b.log_value) <= log_tie_rtol * scale) return 0;
  return a.log_value < b.log_value ? -1 : 1;
}

}  // namespace mtypes
