#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mtypes/combinatorics.hpp"
#include "mtypes/constraints.hpp"
#include "mtypes/errors.hpp"
#include "mtypes/parallel.hpp"
#include "mtypes/projections.hpp"
#include "mtypes/record.hpp"

namespace mtypes {

enum class BallNorm { Euclidean, Max };

/// Open ball around a pmf. Squared coordinate terms are sorted before
/// summation so that membership is invariant under simultaneous permutation
/// of the type and the center.
struct Ball {
  std::vector<double> center;
  double epsilon = 0.0;
  BallNorm norm = BallNorm::Euclidean;

  Ball() = default;
  Ball(std::vector<double> c, double eps, BallNorm nm = BallNorm::Euclidean)
      : center(std::move(c)), epsilon(eps), norm(nm) {
    if (epsilon <= 0) throw Error(ErrorCode::PreconditionViolated, "ball needs epsilon > 0");
  }

  bool contains(const NType& nu) const {
    if (nu.size() != center.size())
      throw Error(ErrorCode::AlphabetMismatch, "ball center size != type size");
    if (norm == BallNorm::Max) {
      double worst = 0;
      for (std::size_t i = 0; i < center.size(); ++i)
        worst = std::max(worst, std::fabs(nu.fraction(i) - center[i]));
      return worst < epsilon;
    }
    std::vector<double> terms(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double d = nu.fraction(i) - center[i];
      terms[i] = d * d;
    }
    std::sort(terms.begin(), terms.end(), std::greater<>());
    double s = 0;
    for (double t : terms) s += t;
    return s < epsilon * epsilon;
  }

  bool contains_point(const std::vector<double>& p) const {
    std::vector<double> terms(center.size());
    if (norm == BallNorm::Max) {
      double worst = 0;
      for (std::size_t i = 0; i < center.size(); ++i)
        worst = std::max(worst, std::fabs(p[i] - center[i]));
      return worst < epsilon;
    }
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double d = p[i] - center[i];
      terms[i] = d * d;
    }
    std::sort(terms.begin(), terms.end(), std::greater<>());
    double s = 0;
    for (double t : terms) s += t;
    return s < epsilon * epsilon;
  }
};

// ---------------------------------------------------------------------------
// Conditional probabilities over Pi_n
// ---------------------------------------------------------------------------

/// pi(nu in B | nu in Pi_n; q): mass of the feasible types inside the ball
/// over the total feasible mass. Exact when exact weights are available.
inline Weight conditional_ball_probability(std::int64_t n, const ConstraintSet& set,
                                           MembershipMode mode, const Ball& ball, const Pmf& q,
                                           const EnumOptions& eopt = {},
                                           const CombOptions& copt = {}) {
  const auto feasible = enumerate_types(n, set, mode, eopt);
  if (feasible.empty())
    throw Error(ErrorCode::EmptyFeasibleSet, "conditional probability undefined: empty Pi_n");
  Weight total = Weight::zero(), inside = Weight::zero();
  bool first = true;
  for (const auto& nu : feasible) {
    const Weight w = type_probability(nu, q, copt);
    total = first ? w : total + w;
    if (ball.contains(nu)) inside = inside.is_zero() ? w : inside + w;
    first = false;
  }
  if (inside.is_zero()) {
    Weight zero;
    if (total.exact) zero.exact = Rational(0);
    return zero;
  }
  return inside / total;
}

/// Conditional probability of observing a fixed prefix of symbols given the
/// type lands in Pi_n. The prefix-given-type factor uses the exact urn form
/// prod_i (n_i)_(t_i) / (n)_t with falling factorials.
inline Weight egcp_prefix_probability(std::int64_t n, const ConstraintSet& set,
                                      MembershipMode mode, const Pmf& q,
                                      const std::vector<std::size_t>& prefix,
                                      const EnumOptions& eopt = {}, const CombOptions& copt = {}) {
  const auto t = static_cast<std::int64_t>(prefix.size());
  if (t > n) throw Error(ErrorCode::PrefixTooLong, "prefix longer than the sample");
  for (auto s : prefix)
    if (s >= set.m) throw Error(ErrorCode::AlphabetMismatch, "prefix symbol out of range");
  const auto feasible = enumerate_types(n, set, mode, eopt);
  if (feasible.empty())
    throw Error(ErrorCode::EmptyFeasibleSet, "conditional probability undefined: empty Pi_n");

  std::vector<std::int64_t> prefix_counts(set.m, 0);
  for (auto s : prefix) ++prefix_counts[s];
  BigInt den = 1;
  for (std::int64_t k = 0; k < t; ++k) den *= (n - k);

  auto urn = [&](const NType& nu) -> Rational {
    // prod_i n_i (n_i - 1) ...: zero when the type lacks the prefix symbols
    BigInt num = 1;
    for (std::size_t i = 0; i < set.m; ++i)
      for (std::int64_t k = 0; k < prefix_counts[i]; ++k) {
        const std::int64_t f = nu.counts[i] - k;
        if (f <= 0) return Rational(0);
        num *= f;
      }
    return Rational(num) / Rational(den);
  };

  Weight total = Weight::zero(), mass = Weight::zero();
  bool first = true;
  for (const auto& nu : feasible) {
    const Weight w = type_probability(nu, q, copt);
    total = first ? w : total + w;
    first = false;
    const Rational pu = urn(nu);
    if (pu == 0) continue;
    const Weight term = w * Weight::from_exact(pu, log_rational(pu));
    mass = mass.is_zero() ? term : mass + term;
  }
  if (mass.is_zero()) {
    Weight zero;
    if (total.exact) zero.exact = Rational(0);
    return zero;
  }
  return mass / total;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct LawsOptions {
  MembershipMode mode = MembershipMode::Exact();
  EnumOptions enumeration;
  CombOptions combinatorics;
};

/// Per-n, per-projection conditional ball probabilities toward the 1/k limit.
/// Balls must each isolate their center among the given projections.
inline std::vector<ExperimentRecord> icet_experiment(
    const ConstraintSet& set, const Pmf& q, const std::vector<std::int64_t>& schedule,
    double epsilon, const std::vector<std::vector<double>>& projections,
    const LawsOptions& opt = {}, const char* law_tag = "icet",
    BallNorm norm = BallNorm::Euclidean) {
  if (projections.empty())
    throw Error(ErrorCode::PreconditionViolated, "icet needs precomputed projections");
  for (std::size_t a = 0; a < projections.size(); ++a)
    for (std::size_t b = 0; b < projections.size(); ++b) {
      if (a == b) continue;
      if (Ball(projections[a], epsilon, norm).contains_point(projections[b]))
        throw Error(ErrorCode::BallOverlap, "two projections share an epsilon ball");
    }
  const auto k = static_cast<int>(projections.size());
  std::vector<Ball> balls;
  for (const auto& c : projections) balls.emplace_back(c, epsilon, norm);

  std::vector<std::vector<ExperimentRecord>> cells(schedule.size());
  parallel_for_index(schedule.size(), [&](std::size_t idx) {
    const std::int64_t n = schedule[idx];
    const auto start = std::chrono::steady_clock::now();
    std::vector<ExperimentRecord> rows;
    auto base = [&] {
      ExperimentRecord r;
      r.law = law_tag;
      r.n = n;
      r.epsilon = epsilon;
      r.tau = opt.mode.exact ? 0.0 : opt.mode.tau;
      return r;
    };
    const auto feasible = enumerate_types(n, set, opt.mode, opt.enumeration);
    if (feasible.empty()) {
      auto r = base();
      r.empty_feasible = true;
      rows.push_back(std::move(r));
    } else {
      // one enumeration and one weight pass shared by all k balls
      Weight total = Weight::zero();
      std::vector<Weight> inside(static_cast<std::size_t>(k), Weight::zero());
      bool first = true;
      for (const auto& nu : feasible) {
        const Weight w = type_probability(nu, q, opt.combinatorics);
        total = first ? w : total + w;
        first = false;
        for (int j = 0; j < k; ++j)
          if (balls[static_cast<std::size_t>(j)].contains(nu))
            inside[j] = inside[j].is_zero() ? w : inside[j] + w;
      }
      for (int j = 0; j < k; ++j) {
        auto r = base();
        r.j = j + 1;
        if (inside[j].is_zero()) {
          r.value = 0.0;
          if (total.exact) r.value_exact = Rational(0);
        } else {
          const Weight ratio = inside[j] / total;
          r.value = ratio.value();
          r.value_exact = ratio.exact;
        }
        r.reference = 1.0 / k;
        rows.push_back(std::move(r));
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    for (auto& r : rows)
      r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    cells[idx] = std::move(rows);
  });
  std::vector<ExperimentRecord> out;
  for (auto& c : cells)
    for (auto& r : c) out.push_back(std::move(r));
  return out;
}

/// Empirical Sanov rates (1/n) ln pi(Pi_n; q) along a schedule. Empty cells
/// are emitted as distinguished records, never silently dropped.
inline std::vector<ExperimentRecord> sanov_rate(const std::vector<std::int64_t>& schedule,
                                                const ConstraintSet& set, const Pmf& q,
                                                std::optional<double> reference_rate,
                                                const LawsOptions& opt = {}) {
  std::vector<ExperimentRecord> cells(schedule.size());
  parallel_for_index(schedule.size(), [&](std::size_t idx) {
    const std::int64_t n = schedule[idx];
    ExperimentRecord r;
    r.law = "rates";
    r.n = n;
    r.tau = opt.mode.exact ? 0.0 : opt.mode.tau;
    const auto feasible = enumerate_types(n, set, opt.mode, opt.enumeration);
    if (feasible.empty()) {
      r.empty_feasible = true;
    } else {
      Weight total = Weight::zero();
      bool first = true;
      for (const auto& nu : feasible) {
        const Weight w = type_probability(nu, q, opt.combinatorics);
        total = first ? w : total + w;
        first = false;
      }
      r.value = total.log() / static_cast<double>(n);
      r.reference = reference_rate;
    }
    cells[idx] = std::move(r);
  });
  return cells;
}

/// Conditional mass of jointly drawn pairs inside the product-space ball
/// around a pair center; pair weight = pi(nu1;q1) pi(nu2;q2).
inline std::vector<ExperimentRecord> rcwlln_experiment(
    const Pmf& q1, const Pmf& q2, const PairConstraintSet& set,
    const std::vector<std::int64_t>& schedule, double epsilon,
    const std::vector<double>& center1, const std::vector<double>& center2,
    const LawsOptions& opt = {}) {
  std::vector<ExperimentRecord> cells(schedule.size());
  parallel_for_index(schedule.size(), [&](std::size_t idx) {
    const std::int64_t n = schedule[idx];
    ExperimentRecord r;
    r.law = "rcwlln";
    r.n = n;
    r.epsilon = epsilon;
    r.tau = opt.mode.exact ? 0.0 : opt.mode.tau;
    const auto pairs = enumerate_pair_types(n, set, opt.mode, opt.enumeration);
    if (pairs.empty()) {
      r.empty_feasible = true;
      cells[idx] = std::move(r);
      return;
    }
    Weight total = Weight::zero(), inside = Weight::zero();
    bool first = true;
    for (const auto& [nu1, nu2] : pairs) {
      const Weight w =
          type_probability(nu1, q1, opt.combinatorics) * type_probability(nu2, q2, opt.combinatorics);
      total = first ? w : total + w;
      first = false;
      // product-space Euclidean ball: pooled squared terms, sorted for
      // permutation-stable summation
      std::vector<double> terms;
      terms.reserve(nu1.size() + nu2.size());
      for (std::size_t i = 0; i < nu1.size(); ++i) {
        const double d = nu1.fraction(i) - center1[i];
        terms.push_back(d * d);
      }
      for (std::size_t i = 0; i < nu2.size(); ++i) {
        const double d = nu2.fraction(i) - center2[i];
        terms.push_back(d * d);
      }
      std::sort(terms.begin(), terms.end(), std::greater<>());
      double s = 0;
      for (double tv : terms) s += tv;
      if (s < epsilon * epsilon) inside = inside.is_zero() ? w : inside + w;
    }
    const Weight ratio = inside.is_zero() ? Weight::zero() : inside / total;
    r.value = inside.is_zero() ? 0.0 : ratio.value();
    r.value_exact = inside.is_zero() && total.exact ? std::optional<Rational>(Rational(0))
                                                    : ratio.exact;
    r.reference = 1.0;
    cells[idx] = std::move(r);
  });
  return cells;
}

// ---------------------------------------------------------------------------
// Rational concentration (two-point feasible sets at scaled sample sizes)
// ---------------------------------------------------------------------------

struct RationalConcentration {
  std::vector<Rational> ratios;  // r_k = pi(k nu_dot) / pi(k nu)
  Rational gamma;                // certified geometric bound, r_k <= gamma^k
};

/// Exact mass ratios of the initially less probable type against the more
/// probable one at sample sizes k*n, with the certified geometric envelope
/// gamma = prod (nu_i / q_i)^(n_i - ndot_i).
inline RationalConcentration rational_concentration(const NType& nu, const NType& nu_dot,
                                                    const Pmf& q,
                                                    const std::vector<int>& k_schedule) {
  if (nu.size() != nu_dot.size() || nu.n != nu_dot.n)
    throw Error(ErrorCode::MismatchedTypes, "types must share n and m");
  if (!q.exact_mode())
    throw Error(ErrorCode::PreconditionViolated, "rational concentration needs a rational source");
  if (nu == nu_dot)
    throw Error(ErrorCode::PreconditionViolated, "types must be distinct");
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu.counts[i] == 0 && nu_dot.counts[i] != nu.counts[i])
      throw Error(ErrorCode::PreconditionViolated,
                  "bound base needs positive counts where the types differ");

  int kmax = 1;
  for (int k : k_schedule) kmax = std::max(kmax, k);
  CombOptions copt;
  copt.exact_cap = std::max<std::int64_t>(400, static_cast<std::int64_t>(kmax) * nu.n);

  const Weight w_nu = type_probability(nu, q, copt);
  const Weight w_dot = type_probability(nu_dot, q, copt);
  if (!(*w_dot.exact < *w_nu.exact))
    throw Error(ErrorCode::PreconditionViolated,
                "needs pi(nu_dot; q) < pi(nu; q) strictly");

  Rational gamma(1);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const std::int64_t diff = nu.counts[i] - nu_dot.counts[i];
    if (diff == 0) continue;
    gamma *= pow_rational(Rational(nu.counts[i], nu.n) / (*q.exact)[i], diff);
  }

  RationalConcentration out;
  out.gamma = gamma;
  for (int k : k_schedule) {
    if (k < 1) throw Error(ErrorCode::PreconditionViolated, "k must be >= 1");
    std::vector<std::int64_t> c1(nu.counts), c2(nu_dot.counts);
    for (auto& v : c1) v *= k;
    for (auto& v : c2) v *= k;
    const Weight a = type_probability(NType(c2), q, copt);
    const Weight b = type_probability(NType(c1), q, copt);
    Rational rk = *a.exact / *b.exact;
    if (rk > pow_rational(gamma, k))
      throw Error(ErrorCode::PreconditionViolated, "geometric envelope violated");
    out.ratios.push_back(std::move(rk));
  }
  return out;
}

}  // namespace mtypes
