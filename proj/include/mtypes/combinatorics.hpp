#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "mtypes/alphabet.hpp"
#include "mtypes/errors.hpp"
#include "mtypes/ntype.hpp"
#include "mtypes/weight.hpp"

namespace mtypes {

struct CombOptions {
  /// Exact rationals are produced only up to this n (and rational q);
  /// beyond it only the log representation is available.
  std::int64_t exact_cap = 400;
};

namespace detail {

/// Binomial coefficient by the multiplicative route (exact division each step).
inline BigInt binomial(std::int64_t a, std::int64_t b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  BigInt r = 1;
  for (std::int64_t i = 1; i <= b; ++i) {
    r *= a - b + i;
    r /= i;
  }
  return r;
}

inline double log_multinomial(const NType& nu) {
  double lg = std::lgamma(static_cast<double>(nu.n) + 1.0);
  for (auto c : nu.counts) lg -= std::lgamma(static_cast<double>(c) + 1.0);
  return lg;
}

}  // namespace detail

/// Multiplicity Gamma(nu) = n! / prod n_i!: the number of length-n sequences
/// with type nu. Exact value as a running product of binomials; log via lgamma.
inline Weight multiplicity(const NType& nu, const CombOptions& opt = {}) {
  const double lg = detail::log_multinomial(nu);
  if (nu.n > opt.exact_cap) return Weight::from_log(lg);
  BigInt g = 1;
  std::int64_t placed = 0;
  for (auto c : nu.counts) {
    placed += c;
    g *= detail::binomial(placed, c);
  }
  return Weight::from_exact(Rational(g), lg);
}

/// Type probability pi(nu; q) = Gamma(nu) * prod q_i^{n_i}. Exact when q is
/// rational and n is within the cap. Zero-count coordinates are dropped from
/// the product.
inline Weight type_probability(const NType& nu, const Pmf& q, const CombOptions& opt = {}) {
  if (nu.size() != q.size())
    throw Error(ErrorCode::AlphabetMismatch, "type and source sizes differ");
  q.require_source();
  double lg = detail::log_multinomial(nu);
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu.counts[i] > 0) lg += static_cast<double>(nu.counts[i]) * std::log(q.probs[i]);
  if (!q.exact_mode() || nu.n > opt.exact_cap) return Weight::from_log(lg);
  const Weight g = multiplicity(nu, opt);
  Rational pi = *g.exact;
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu.counts[i] > 0) pi *= pow_rational((*q.exact)[i], nu.counts[i]);
  return Weight::from_exact(std::move(pi), lg);
}

/// As type_probability but the exact representation is mandatory.
inline Weight type_probability_exact(const NType& nu, const Pmf& q, const CombOptions& opt = {}) {
  if (!q.exact_mode())
    throw Error(ErrorCode::ExactUnavailable, "source has no exact rational entries");
  if (nu.n > opt.exact_cap)
    throw Error(ErrorCode::ExactUnavailable, "n exceeds the exact cap");
  return type_probability(nu, q, opt);
}

/// I-divergence I(p||q) = sum p_i log(p_i / q_i), natural log, 0 log 0 = 0.
/// Returns +inf when p puts mass where q has none.
inline double i_divergence(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::AlphabetMismatch, "pmf sizes differ");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.probs[i] == 0.0) continue;
    if (q.probs[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
  }
  return std::max(d, 0.0);
}

inline double i_divergence(const std::vector<double>& p, const Pmf& q) {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q.probs[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q.probs[i]);
  }
  return d;
}

/// The bracket (m/n)^m prod (q_i/nu_i)^{n nu_i} < pi(nu;q) <= prod (q_i/nu_i)^{n nu_i},
/// products over nonzero coordinates. Valid from n = 7 on (the factorial
/// inequality behind it needs n > 6).
inline std::pair<Weight, Weight> sanov_bounds(const NType& nu, const Pmf& q,
                                              const CombOptions& opt = {}) {
  if (nu.n < 7) throw Error(ErrorCode::DomainTooSmall, "sanov_bounds needs n >= 7");
  if (nu.size() != q.size())
    throw Error(ErrorCode::AlphabetMismatch, "type and source sizes differ");
  q.require_source();
  const auto m = static_cast<double>(nu.size());
  const auto n = static_cast<double>(nu.n);
  double log_upper = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu.counts[i] == 0) continue;
    log_upper += static_cast<double>(nu.counts[i]) *
                 (std::log(q.probs[i]) - std::log(nu.fraction(i)));
  }
  const double log_lower = log_upper + m * (std::log(m) - std::log(n));
  if (!q.exact_mode() || nu.n > opt.exact_cap)
    return {Weight::from_log(log_lower), Weight::from_log(log_upper)};
  Rational upper(1);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu.counts[i] == 0) continue;
    upper *= pow_rational((*q.exact)[i] * Rational(nu.n, nu.counts[i]), nu.counts[i]);
  }
  Rational lower = upper * pow_rational(Rational(nu.size(), nu.n),
                                        static_cast<std::int64_t>(nu.size()));
  return {Weight::from_exact(std::move(lower), log_lower),
          Weight::from_exact(std::move(upper), log_upper)};
}

/// Right-hand side of the probability-ratio bound
///   pi(nu;q)/pi(nu_dot;q) < (n/m)^m prod (q_i/nu_i)^{n nu_i} / (q_i/nu_dot_i)^{n nu_dot_i}.
inline Weight probability_ratio_bound(const NType& nu, const NType& nu_dot, const Pmf& q,
                                      const CombOptions& opt = {}) {
  if (nu.n != nu_dot.n || nu.size() != nu_dot.size())
    throw Error(ErrorCode::MismatchedTypes, "types must share n and m");
  if (nu.n < 7) throw Error(ErrorCode::DomainTooSmall, "ratio bound needs n >= 7");
  const auto [lo_nu, up_nu] = sanov_bounds(nu, q, opt);
  const auto [lo_dot, up_dot] = sanov_bounds(nu_dot, q, opt);
  // (n/m)^m * upper(nu) / upper(nu_dot)
  const double log_bound =
      -static_cast<double>(nu.size()) *
          (std::log(static_cast<double>(nu.size())) - std::log(static_cast<double>(nu.n))) +
      up_nu.log_value - up_dot.log_value;
  if (!up_nu.exact || !up_dot.exact) return Weight::from_log(log_bound);
  Rational bound = pow_rational(Rational(nu.n, nu.size()),
                                static_cast<std::int64_t>(nu.size())) *
                   *up_nu.exact / *up_dot.exact;
  return Weight::from_exact(std::move(bound), log_bound);
}

}  // namespace mtypes
