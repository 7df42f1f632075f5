#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mtypes/alphabet.hpp"
#include "mtypes/combinatorics.hpp"
#include "mtypes/errors.hpp"
#include "mtypes/ntype.hpp"

namespace mtypes {

/// Scalar constraint parameter; carries the exact rational when known.
struct Param {
  double value = 0.0;
  std::optional<Rational> exact;

  static Param of(double v) { return Param{v, std::nullopt}; }
  static Param of(const Rational& r) { return Param{to_double(r), r}; }
  static Param of_int(std::int64_t v) { return Param{static_cast<double>(v), Rational(v)}; }
};

enum class ConstraintKind { FullSimplex, Moment, Frequency, GeneralizedFrequency, Union, Line };

/// Algebraic description of a feasible set Pi inside the probability simplex.
/// Every variant implicitly includes sum p_i = 1, p_i >= 0.
class ConstraintSet {
 public:
  ConstraintKind kind = ConstraintKind::FullSimplex;
  std::size_t m = 0;
  std::vector<Param> u;   // Moment weights, or GeneralizedFrequency x values
  Param a;                // Moment / Frequency target
  double alpha = 0.0;     // Frequency / GeneralizedFrequency exponent
  Param b;                // GeneralizedFrequency shift
  std::vector<ConstraintSet> members;  // Union
  std::vector<double> line_offset, line_direction;

  static ConstraintSet full_simplex(std::size_t m) {
    ConstraintSet s;
    s.kind = ConstraintKind::FullSimplex;
    s.m = m;
    return s;
  }

  /// sum p_i u_i = a
  static ConstraintSet moment(std::vector<Param> weights, Param target) {
    ConstraintSet s;
    s.kind = ConstraintKind::Moment;
    s.m = weights.size();
    s.u = std::move(weights);
    s.a = target;
    return s;
  }

  /// sum p_i^alpha = a
  static ConstraintSet frequency(std::size_t m, double alpha, Param target) {
    ConstraintSet s;
    s.kind = ConstraintKind::Frequency;
    s.m = m;
    s.alpha = alpha;
    s.a = target;
    return s;
  }

  /// sum p_i^alpha (x_i - b) = 0
  static ConstraintSet generalized_frequency(std::vector<Param> x, double alpha, Param shift) {
    ConstraintSet s;
    s.kind = ConstraintKind::GeneralizedFrequency;
    s.m = x.size();
    s.u = std::move(x);
    s.alpha = alpha;
    s.b = shift;
    return s;
  }

  static ConstraintSet union_of(std::vector<ConstraintSet> parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidConfig, "empty union");
    ConstraintSet s;
    s.kind = ConstraintKind::Union;
    s.m = parts.front().m;
    for (const auto& p : parts)
      if (p.m != s.m)
        throw Error(ErrorCode::AlphabetMismatch, "union members must share the alphabet");
    s.members = std::move(parts);
    return s;
  }

  /// One-parameter set p(s) = offset + s * direction.
  static ConstraintSet line(std::vector<double> offset, std::vector<double> direction) {
    if (offset.size() != direction.size())
      throw Error(ErrorCode::InvalidConfig, "line offset/direction size mismatch");
    ConstraintSet s;
    s.kind = ConstraintKind::Line;
    s.m = offset.size();
    s.line_offset = std::move(offset);
    s.line_direction = std::move(direction);
    return s;
  }

  bool alpha_is_integer() const {
    return alpha >= 1 && alpha == std::floor(alpha) && alpha <= 64;
  }
};

struct MembershipMode {
  bool exact = true;
  double tau = 0.0;  // |residual| <= tau in tolerance mode

  static MembershipMode Exact() { return MembershipMode{true, 0.0}; }
  static MembershipMode Tolerance(double t) {
    if (t < 0) throw Error(ErrorCode::InvalidConfig, "tau must be >= 0");
    return MembershipMode{false, t};
  }
};

// ---------------------------------------------------------------------------
// Residuals and membership
// ---------------------------------------------------------------------------

/// Absolute constraint residual at a point of the simplex; 0 iff feasible.
/// Union takes the minimum over members; Line takes the largest coordinate
/// deviation after a least-squares parameter fit.
inline double residual(const std::vector<double>& p, const ConstraintSet& set) {
  if (p.size() != set.m)
    throw Error(ErrorCode::AlphabetMismatch, "point size != constraint alphabet");
  switch (set.kind) {
    case ConstraintKind::FullSimplex:
      return 0.0;
    case ConstraintKind::Moment: {
      double s = 0;
      for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * set.u[i].value;
      return std::fabs(s - set.a.value);
    }
    case ConstraintKind::Frequency: {
      double s = 0;
      for (double v : p) s += v > 0 ? std::pow(v, set.alpha) : 0.0;
      return std::fabs(s - set.a.value);
    }
    case ConstraintKind::GeneralizedFrequency: {
      double s = 0;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) s += std::pow(p[i], set.alpha) * (set.u[i].value - set.b.value);
      return std::fabs(s);
    }
    case ConstraintKind::Union: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& mem : set.members) best = std::min(best, residual(p, mem));
      return best;
    }
    case ConstraintKind::Line: {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        num += (p[i] - set.line_offset[i]) * set.line_direction[i];
        den += set.line_direction[i] * set.line_direction[i];
      }
      const double s = den > 0 ? num / den : 0.0;
      double worst = 0;
      for (std::size_t i = 0; i < p.size(); ++i)
        worst = std::max(worst,
                         std::fabs(p[i] - set.line_offset[i] - s * set.line_direction[i]));
      return worst;
    }
  }
  return 0.0;
}

inline double residual(const Pmf& p, const ConstraintSet& set) { return residual(p.probs, set); }

/// Exact rational |residual| of an n-type, when the constraint admits exact
/// evaluation (rational parameters, integer exponent). nullopt otherwise.
inline std::optional<Rational> residual_exact(const NType& nu, const ConstraintSet& set) {
  if (nu.size() != set.m)
    throw Error(ErrorCode::AlphabetMismatch, "type size != constraint alphabet");
  auto abs_r = [](Rational r) { return r < 0 ? -r : r; };
  switch (set.kind) {
    case ConstraintKind::FullSimplex:
      return Rational(0);
    case ConstraintKind::Moment: {
      if (!set.a.exact) return std::nullopt;
      Rational s(0);
      for (std::size_t i = 0; i < nu.size(); ++i) {
        if (!set.u[i].exact) return std::nullopt;
        s += nu.fraction_exact(i) * *set.u[i].exact;
      }
      return abs_r(s - *set.a.exact);
    }
    case ConstraintKind::Frequency: {
      if (!set.a.exact || !set.alpha_is_integer()) return std::nullopt;
      const auto e = static_cast<std::int64_t>(set.alpha);
      Rational s(0);
      for (std::size_t i = 0; i < nu.size(); ++i)
        if (nu.counts[i] > 0) s += pow_rational(nu.fraction_exact(i), e);
      return abs_r(s - *set.a.exact);
    }
    case ConstraintKind::GeneralizedFrequency: {
      if (!set.b.exact || !set.alpha_is_integer()) return std::nullopt;
      const auto e = static_cast<std::int64_t>(set.alpha);
      Rational s(0);
      for (std::size_t i = 0; i < nu.size(); ++i) {
        if (!set.u[i].exact) return std::nullopt;
        if (nu.counts[i] > 0)
          s += pow_rational(nu.fraction_exact(i), e) * (*set.u[i].exact - *set.b.exact);
      }
      return abs_r(s);
    }
    case ConstraintKind::Union: {
      std::optional<Rational> best;
      for (const auto& mem : set.members) {
        auto r = residual_exact(nu, mem);
        if (!r) return std::nullopt;
        if (!best || *r < *best) best = std::move(r);
      }
      return best;
    }
    case ConstraintKind::Line:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Membership in Pi_n = Pi intersect P_n. Exact mode requires a residual that
/// can be evaluated in rational arithmetic and be exactly zero; tolerance mode
/// accepts |residual| <= tau (evaluated exactly whenever possible, so that
/// enumeration output is bit-for-bit reproducible).
inline bool contains(const NType& nu, const ConstraintSet& set, MembershipMode mode) {
  auto exact_res = residual_exact(nu, set);
  if (mode.exact) {
    if (!exact_res)
      throw Error(ErrorCode::ExactUnavailable,
                  "exact membership needs rational parameters and integer exponent");
    return *exact_res == 0;
  }
  if (exact_res) return *exact_res <= Rational(mode.tau);
  return residual(nu.fractions(), set) <= mode.tau;
}

// ---------------------------------------------------------------------------
// Enumeration of feasible n-types
// ---------------------------------------------------------------------------

struct EnumOptions {
  std::uint64_t budget = 100000000ULL;  // candidate compositions
};

namespace detail {

inline BigInt compositions_count(std::int64_t n, std::size_t m) {
  return binomial(n + static_cast<std::int64_t>(m) - 1, static_cast<std::int64_t>(m) - 1);
}

/// Interval bounds over completions of a partial count assignment: can the
/// constraint statistic still land inside the target band? Bounds must never
/// exclude a feasible completion; the leaf membership test decides for real.
class Pruner {
 public:
  Pruner(const ConstraintSet& set, MembershipMode mode, std::int64_t n)
      : set_(set), n_(n), band_(mode.exact ? Rational(0) : Rational(mode.tau)),
        band_f_(mode.exact ? 0.0 : mode.tau) {
    for (const auto& mem : set.members) subs_.emplace_back(mem, mode, n);
  }

  bool can_complete(const std::vector<std::int64_t>& counts, std::size_t filled,
                    std::int64_t remaining) const {
    switch (set_.kind) {
      case ConstraintKind::FullSimplex:
      case ConstraintKind::Line:
        return true;
      case ConstraintKind::Union: {
        for (const auto& s : subs_)
          if (s.can_complete(counts, filled, remaining)) return true;
        return false;
      }
      case ConstraintKind::Moment:
        return moment_window(counts, filled, remaining);
      case ConstraintKind::Frequency:
        return frequency_window(counts, filled, remaining);
      case ConstraintKind::GeneralizedFrequency:
        return genfreq_window(counts, filled, remaining);
    }
    return true;
  }

 private:
  bool exact_moment_params() const {
    if (!set_.a.exact) return false;
    for (const auto& w : set_.u)
      if (!w.exact) return false;
    return true;
  }

  bool moment_window(const std::vector<std::int64_t>& counts, std::size_t filled,
                     std::int64_t r) const {
    if (exact_moment_params()) {
      Rational s(0);
      for (std::size_t i = 0; i < filled; ++i)
        if (counts[i] != 0) s += Rational(counts[i], n_) * *set_.u[i].exact;
      Rational lo = s, hi = s;
      if (r > 0) {
        if (filled == set_.m) return false;
        const Rational* wlo = &*set_.u[filled].exact;
        const Rational* whi = wlo;
        for (std::size_t i = filled + 1; i < set_.m; ++i) {
          if (*set_.u[i].exact < *wlo) wlo = &*set_.u[i].exact;
          if (*set_.u[i].exact > *whi) whi = &*set_.u[i].exact;
        }
        lo += Rational(r, n_) * *wlo;
        hi += Rational(r, n_) * *whi;
      }
      return !(hi < *set_.a.exact - band_ || lo > *set_.a.exact + band_);
    }
    double s = 0;
    for (std::size_t i = 0; i < filled; ++i)
      s += static_cast<double>(counts[i]) / static_cast<double>(n_) * set_.u[i].value;
    double lo = s, hi = s;
    if (r > 0) {
      if (filled == set_.m) return false;
      double wlo = set_.u[filled].value, whi = wlo;
      for (std::size_t i = filled + 1; i < set_.m; ++i) {
        wlo = std::min(wlo, set_.u[i].value);
        whi = std::max(whi, set_.u[i].value);
      }
      lo += static_cast<double>(r) / static_cast<double>(n_) * wlo;
      hi += static_cast<double>(r) / static_cast<double>(n_) * whi;
    }
    const double slack = band_f_ + 1e-9 * std::max(1.0, std::fabs(set_.a.value));
    return hi >= set_.a.value - slack && lo <= set_.a.value + slack;
  }

  bool frequency_window(const std::vector<std::int64_t>& counts, std::size_t filled,
                        std::int64_t r) const {
    const std::size_t slots = set_.m - filled;
    if (set_.a.exact && set_.alpha_is_integer()) {
      const auto e = static_cast<std::int64_t>(set_.alpha);
      Rational s(0);
      for (std::size_t i = 0; i < filled; ++i)
        if (counts[i] > 0) s += pow_rational(Rational(counts[i], n_), e);
      Rational lo = s, hi = s;
      if (r > 0) {
        if (slots == 0) return false;
        // t^e convex: min at the balanced integer split, max fully concentrated
        const auto k = static_cast<std::int64_t>(slots);
        const std::int64_t base = r / k, extra = r % k;
        Rational balanced =
            Rational(extra) * pow_rational(Rational(base + 1, n_), e) +
            Rational(k - extra) * pow_rational(Rational(base, n_), e);
        lo += balanced;
        hi += pow_rational(Rational(r, n_), e);
      }
      return !(hi < *set_.a.exact - band_ || lo > *set_.a.exact + band_);
    }
    if (set_.alpha <= 0) return true;
    double s = 0;
    for (std::size_t i = 0; i < filled; ++i)
      if (counts[i] > 0) s += std::pow(static_cast<double>(counts[i]) / n_, set_.alpha);
    double lo = s, hi = s;
    if (r > 0) {
      if (slots == 0) return false;
      const double frac = static_cast<double>(r) / static_cast<double>(n_);
      const double balanced =
          static_cast<double>(slots) * std::pow(frac / static_cast<double>(slots), set_.alpha);
      const double conc = std::pow(frac, set_.alpha);
      lo += std::min(balanced, conc);
      hi += std::max(balanced, conc);
    }
    const double slack = band_f_ + 1e-9 * std::max(1.0, std::fabs(set_.a.value));
    return hi >= set_.a.value - slack && lo <= set_.a.value + slack;
  }

  bool genfreq_window(const std::vector<std::int64_t>& counts, std::size_t filled,
                      std::int64_t r) const {
    if (!set_.b.exact || !set_.alpha_is_integer()) return true;
    for (const auto& w : set_.u)
      if (!w.exact) return true;
    const auto e = static_cast<std::int64_t>(set_.alpha);
    Rational s(0);
    for (std::size_t i = 0; i < filled; ++i)
      if (counts[i] > 0)
        s += pow_rational(Rational(counts[i], n_), e) * (*set_.u[i].exact - *set_.b.exact);
    Rational lo = s, hi = s;
    if (r > 0) {
      if (filled == set_.m) return false;
      // each remaining term w_i nu_i^e is bounded by w_i (r/n)^e in magnitude
      const Rational cap = pow_rational(Rational(r, n_), e);
      Rational neg(0), pos(0);
      for (std::size_t i = filled; i < set_.m; ++i) {
        const Rational w = *set_.u[i].exact - *set_.b.exact;
        if (w < 0) neg += w;
        if (w > 0) pos += w;
      }
      lo += neg * cap;
      hi += pos * cap;
    }
    return !(hi < -band_ || lo > band_);
  }

  const ConstraintSet& set_;
  std::int64_t n_;
  Rational band_;
  double band_f_;
  std::vector<Pruner> subs_;
};

}  // namespace detail

/// All feasible n-types, in lexicographic count order. An empty result is a
/// valid outcome, not an error.
inline std::vector<NType> enumerate_types(std::int64_t n, const ConstraintSet& set,
                                          MembershipMode mode, const EnumOptions& opt = {}) {
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "enumeration needs n >= 1");
  if (detail::compositions_count(n, set.m) > opt.budget)
    throw Error(ErrorCode::BudgetExceeded, "composition space exceeds the enumeration budget");

  detail::Pruner pruner(set, mode, n);
  std::vector<NType> out;
  std::vector<std::int64_t> counts(set.m, 0);

  std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t r) {
    if (i + 1 == set.m) {
      counts[i] = r;
      NType nu(counts);
      if (contains(nu, set, mode)) out.push_back(std::move(nu));
      counts[i] = 0;
      return;
    }
    for (std::int64_t c = 0; c <= r; ++c) {
      counts[i] = c;
      if (pruner.can_complete(counts, i + 1, r - c)) walk(i + 1, r - c);
    }
    counts[i] = 0;
  };
  walk(0, n);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Pairs (joint affine constraint over two independent types)
// ---------------------------------------------------------------------------

/// sum nu1_i x_i + sum nu2_j y_j = a, with both components on the simplex.
struct PairConstraintSet {
  std::vector<Param> x, y;  // support values of the two components
  Param a;

  std::size_t mx() const { return x.size(); }
  std::size_t my() const { return y.size(); }
};

/// All feasible pairs, deterministic (nu1, nu2) lexicographic order. The
/// second component is enumerated against the affine slack left by the first.
inline std::vector<std::pair<NType, NType>> enumerate_pair_types(
    std::int64_t n, const PairConstraintSet& set, MembershipMode mode,
    const EnumOptions& opt = {}) {
  if (set.mx() < 2 || set.my() < 2)
    throw Error(ErrorCode::InvalidConfig, "pair constraint needs two alphabets");
  if (detail::compositions_count(n, set.mx()) * detail::compositions_count(n, set.my()) >
      opt.budget)
    throw Error(ErrorCode::BudgetExceeded, "pair composition space exceeds the budget");

  std::vector<std::pair<NType, NType>> out;
  std::vector<std::int64_t> c1(set.mx(), 0);

  std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t r) {
    if (i + 1 == set.mx()) {
      c1[i] = r;
      NType nu1(c1);
      Param target;
      if (set.a.exact) {
        Rational dot(0);
        bool ok = true;
        for (std::size_t k = 0; k < set.mx(); ++k) {
          if (!set.x[k].exact) { ok = false; break; }
          dot += nu1.fraction_exact(k) * *set.x[k].exact;
        }
        if (ok) target = Param::of(*set.a.exact - dot);
      }
      if (!target.exact) {
        double dot = 0;
        for (std::size_t k = 0; k < set.mx(); ++k) dot += nu1.fraction(k) * set.x[k].value;
        target = Param::of(set.a.value - dot);
      }
      ConstraintSet inner = ConstraintSet::moment(set.y, target);
      for (auto& nu2 : enumerate_types(n, inner, mode, opt))
        out.emplace_back(nu1, std::move(nu2));
      c1[i] = 0;
      return;
    }
    for (std::int64_t c = 0; c <= r; ++c) {
      c1[i] = c;
      walk(i + 1, r - c);
    }
    c1[i] = 0;
  };
  walk(0, n);
  std::sort(out.begin(), out.end(), [](const auto& A, const auto& B) {
    if (A.first.counts != B.first.counts) return A.first.counts < B.first.counts;
    return A.second.counts < B.second.counts;
  });
  return out;
}

}  // namespace mtypes
