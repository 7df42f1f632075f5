#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "mtypes/combinatorics.hpp"
#include "mtypes/constraints.hpp"
#include "mtypes/errors.hpp"
#include "mtypes/weight.hpp"

namespace mtypes {

enum class ProjectionKind { I, Mu, Tau, Gme };

struct LagrangeSolution {
  double lambda = 0.0;
  double normalizer = 1.0;  // k(lambda)
};

struct SolverDiagnostics {
  int starts = 0;
  int converged = 0;
  double max_constraint_residual = 0.0;
  /// stationary points that lost the global filter, with their objectives
  std::vector<std::pair<std::vector<double>, double>> local_optima;
};

struct ProjectionResult {
  ProjectionKind kind = ProjectionKind::I;
  std::vector<std::vector<double>> points;
  double objective = 0.0;
  std::vector<bool> proper;
  SolverDiagnostics diagnostics;
};

namespace detail {

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Dense Gaussian elimination with partial pivoting; A is row-major k x k.
inline bool linsolve(std::vector<double>& A, std::vector<double>& rhs, std::size_t k) {
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(A[r * k + col]) > std::fabs(A[piv * k + col])) piv = r;
    if (std::fabs(A[piv * k + col]) < 1e-300) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(A[col * k + c], A[piv * k + c]);
      std::swap(rhs[col], rhs[piv]);
    }
    const double d = A[col * k + col];
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = A[r * k + col] / d;
      if (f == 0) continue;
      for (std::size_t c = col; c < k; ++c) A[r * k + c] -= f * A[col * k + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t ri = k; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t c = ri + 1; c < k; ++c) s -= A[ri * k + c] * rhs[c];
    rhs[ri] = s / A[ri * k + ri];
  }
  return true;
}

/// Smooth scalar function of a simplex point with separable derivatives.
struct Separable {
  std::function<double(const std::vector<double>&)> value;
  std::function<double(double, std::size_t)> dvalue;   // d/dp_i at p_i
  std::function<double(double, std::size_t)> d2value;  // d^2/dp_i^2 at p_i
};

inline Separable i_objective(const Pmf& q) {
  auto probs = q.probs;
  return Separable{
      [probs](const std::vector<double>& p) {
        double f = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
          if (p[i] > 0) f += p[i] * std::log(p[i] / probs[i]);
        return f;
      },
      [probs](double pi, std::size_t i) { return std::log(pi / probs[i]) + 1.0; },
      [](double pi, std::size_t) { return 1.0 / pi; }};
}

/// Negative Tsallis entropy (sum p^a - 1)/(a - 1); Shannon form at a = 1.
inline Separable neg_tsallis_objective(double a) {
  if (a == 1.0) {
    return Separable{
        [](const std::vector<double>& p) {
          double f = 0;
          for (double v : p)
            if (v > 0) f += v * std::log(v);
          return f;
        },
        [](double pi, std::size_t) { return std::log(pi) + 1.0; },
        [](double pi, std::size_t) { return 1.0 / pi; }};
  }
  return Separable{
      [a](const std::vector<double>& p) {
        double s = 0;
        for (double v : p)
          if (v > 0) s += std::pow(v, a);
        return (s - 1.0) / (a - 1.0);
      },
      [a](double pi, std::size_t) { return a * std::pow(pi, a - 1.0) / (a - 1.0); },
      [a](double pi, std::size_t) { return a * std::pow(pi, a - 2.0); }};
}

inline Separable constraint_function(const ConstraintSet& set) {
  switch (set.kind) {
    case ConstraintKind::Frequency: {
      const double a = set.a.value, al = set.alpha;
      return Separable{
          [a, al](const std::vector<double>& p) {
            double s = 0;
            for (double v : p)
              if (v > 0) s += std::pow(v, al);
            return s - a;
          },
          [al](double pi, std::size_t) { return al * std::pow(pi, al - 1.0); },
          [al](double pi, std::size_t) { return al * (al - 1.0) * std::pow(pi, al - 2.0); }};
    }
    case ConstraintKind::GeneralizedFrequency: {
      std::vector<double> w(set.m);
      for (std::size_t i = 0; i < set.m; ++i) w[i] = set.u[i].value - set.b.value;
      const double al = set.alpha;
      return Separable{
          [w, al](const std::vector<double>& p) {
            double s = 0;
            for (std::size_t i = 0; i < p.size(); ++i)
              if (p[i] > 0) s += std::pow(p[i], al) * w[i];
            return s;
          },
          [w, al](double pi, std::size_t i) { return al * std::pow(pi, al - 1.0) * w[i]; },
          [w, al](double pi, std::size_t i) {
            return al * (al - 1.0) * std::pow(pi, al - 2.0) * w[i];
          }};
    }
    case ConstraintKind::Moment: {
      std::vector<double> w(set.m);
      for (std::size_t i = 0; i < set.m; ++i) w[i] = set.u[i].value;
      const double a = set.a.value;
      return Separable{
          [w, a](const std::vector<double>& p) {
            double s = 0;
            for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * w[i];
            return s - a;
          },
          [w](double, std::size_t i) { return w[i]; },
          [](double, std::size_t) { return 0.0; }};
    }
    default:
      throw Error(ErrorCode::InvalidConfig, "constraint has no smooth scalar form");
  }
}

/// Damped Newton on the KKT system of  min f  s.t.  g = 0, sum p = 1, p > 0.
inline bool kkt_newton(const Separable& f, const Separable& g, std::vector<double>& p,
                       double& lam, double& mu, int max_iter = 300, double tol = 1e-12) {
  const std::size_t m = p.size();
  const std::size_t k = m + 2;
  std::vector<double> F(k), A(k * k), step(k), trial(m), Ft(k);

  auto eval_F = [&](const std::vector<double>& pt, double l, double u, std::vector<double>& out) {
    for (std::size_t i = 0; i < m; ++i)
      out[i] = f.dvalue(pt[i], i) + l * g.dvalue(pt[i], i) + u;
    out[m] = g.value(pt);
    out[m + 1] = std::accumulate(pt.begin(), pt.end(), 0.0) - 1.0;
  };
  auto norm_inf = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
  };

  eval_F(p, lam, mu, F);
  double fn = norm_inf(F);
  for (int it = 0; it < max_iter; ++it) {
    if (fn <= tol) return true;
    std::fill(A.begin(), A.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      A[i * k + i] = f.d2value(p[i], i) + lam * g.d2value(p[i], i);
      A[i * k + m] = g.dvalue(p[i], i);
      A[i * k + (m + 1)] = 1.0;
      A[m * k + i] = g.dvalue(p[i], i);
      A[(m + 1) * k + i] = 1.0;
    }
    for (std::size_t i = 0; i < k; ++i) step[i] = -F[i];
    if (!linsolve(A, step, k)) return false;

    double t = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      while (t > 1e-14 && p[i] + t * step[i] <= 1e-13) t *= 0.5;
    bool accepted = false;
    for (; t > 1e-14; t *= 0.5) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = p[i] + t * step[i];
      eval_F(trial, lam + t * step[m], mu + t * step[m + 1], Ft);
      const double fnt = norm_inf(Ft);
      if (fnt < fn || fnt <= tol) {
        p = trial;
        lam += t * step[m];
        mu += t * step[m + 1];
        F = Ft;
        fn = fnt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return fn <= tol;
  }
  return fn <= tol;
}

inline std::int64_t factorial_small(std::size_t m) {
  std::int64_t f = 1;
  for (std::size_t i = 2; i <= m; ++i) f *= static_cast<std::int64_t>(i);
  return f;
}

/// Index permutations that fix both the source and the constraint set.
inline std::vector<std::vector<std::size_t>> symmetry_permutations(const Pmf& q,
                                                                   const ConstraintSet& set) {
  const std::size_t m = q.size();
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  if (m > 8 || set.kind == ConstraintKind::Line) return {perm};

  auto q_equal = [&](std::size_t i, std::size_t j) {
    if (q.exact) return (*q.exact)[i] == (*q.exact)[j];
    return q.probs[i] == q.probs[j];
  };
  auto param_equal = [](const Param& x, const Param& y) {
    if (x.exact && y.exact) return *x.exact == *y.exact;
    return x.value == y.value;
  };
  std::function<bool(const ConstraintSet&, const std::vector<std::size_t>&)> fixes =
      [&](const ConstraintSet& s, const std::vector<std::size_t>& pm) -> bool {
    switch (s.kind) {
      case ConstraintKind::FullSimplex:
      case ConstraintKind::Frequency:
        return true;
      case ConstraintKind::Moment:
      case ConstraintKind::GeneralizedFrequency:
        for (std::size_t i = 0; i < m; ++i)
          if (!param_equal(s.u[i], s.u[pm[i]])) return false;
        return true;
      case ConstraintKind::Union:
        // the permutation must map every member onto some member
        for (const auto& mem : s.members) {
          bool mapped = false;
          for (const auto& other : s.members) {
            if (other.kind != mem.kind || !param_equal(other.a, mem.a)) continue;
            bool match = true;
            for (std::size_t i = 0; i < m && match; ++i)
              if (!mem.u.empty()) match = param_equal(mem.u[i], other.u[pm[i]]);
            if (match) { mapped = true; break; }
          }
          if (!mapped) return false;
        }
        return true;
      case ConstraintKind::Line:
        return false;
    }
    return false;
  };

  do {
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) ok = q_equal(i, perm[i]);
    if (ok && fixes(set, perm)) perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return perms;
}

/// Multi-start damped-Newton KKT search for all global minimizers of f on
/// {g = 0} inside the simplex, with orbit completion and clustering (1e-7).
inline ProjectionResult kkt_multistart(const Separable& f, const Separable& g, const Pmf& q,
                                       const ConstraintSet& set, int starts,
                                       ProjectionKind kind) {
  const std::size_t m = q.size();
  if (starts <= 0) starts = 20 * static_cast<int>(factorial_small(std::min<std::size_t>(m, 8)));

  std::mt19937_64 rng(0x6d74797065736dULL);  // fixed seed: reruns are identical
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ProjectionResult res;
  res.kind = kind;
  res.diagnostics.starts = starts;

  std::vector<std::vector<double>> found;
  std::vector<double> objectives;

  for (int s = 0; s < starts; ++s) {
    std::vector<double> p(m);
    double tot = 0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = -std::log(1.0 - unif(rng));
      tot += p[i];
    }
    for (auto& v : p) v = std::max(v / tot, 1e-9);

    // least-squares multipliers from the stationarity residual
    double lam = 0, mu = 0;
    {
      double a11 = 0, a12 = 0, a22 = static_cast<double>(m), b1 = 0, b2 = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = g.dvalue(p[i], i), fi = f.dvalue(p[i], i);
        a11 += gi * gi;
        a12 += gi;
        b1 += -fi * gi;
        b2 += -fi;
      }
      const double det = a11 * a22 - a12 * a12;
      if (std::fabs(det) > 1e-12) {
        lam = (b1 * a22 - b2 * a12) / det;
        mu = (a11 * b2 - a12 * b1) / det;
      }
    }

    if (!kkt_newton(f, g, p, lam, mu)) continue;
    if (std::fabs(g.value(p)) > 1e-9) continue;
    bool interior = true;
    for (double v : p) interior = interior && v > 0;
    if (!interior) continue;
    ++res.diagnostics.converged;
    res.diagnostics.max_constraint_residual =
        std::max(res.diagnostics.max_constraint_residual, std::fabs(g.value(p)));
    objectives.push_back(f.value(p));
    found.push_back(std::move(p));
  }
  if (found.empty())
    throw Error(ErrorCode::NoConvergence, "no start converged to a stationary point");

  const double best = *std::min_element(objectives.begin(), objectives.end());
  const auto perms = symmetry_permutations(q, set);

  std::vector<std::vector<double>> globals;
  auto push_unique = [](std::vector<std::vector<double>>& list,
                        const std::vector<double>& p) -> bool {
    for (const auto& rep : list)
      if (dist2(rep, p) < 1e-14) return false;  // clustering radius 1e-7
    list.push_back(p);
    return true;
  };
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (objectives[i] > best + 1e-9) {
      bool fresh = true;
      for (const auto& [pt, obj] : res.diagnostics.local_optima)
        if (dist2(pt, found[i]) < 1e-14) { fresh = false; break; }
      if (fresh) res.diagnostics.local_optima.emplace_back(found[i], objectives[i]);
      continue;
    }
    for (const auto& perm : perms) {
      std::vector<double> image(m);
      for (std::size_t j = 0; j < m; ++j) image[perm[j]] = found[i][j];
      push_unique(globals, image);
    }
  }
  std::sort(globals.begin(), globals.end());
  res.points = std::move(globals);
  res.objective = best;
  return res;
}

/// Restores p onto {g = 0, sum = 1} by Newton steps within span{grad g, 1}.
inline bool restore_feasibility(const Separable& g, std::vector<double>& p) {
  const std::size_t m = p.size();
  for (int it = 0; it < 60; ++it) {
    const double gv = g.value(p);
    double sv = std::accumulate(p.begin(), p.end(), 0.0) - 1.0;
    if (std::fabs(gv) <= 1e-12 && std::fabs(sv) <= 1e-13) return true;
    std::vector<double> gg(m);
    for (std::size_t i = 0; i < m; ++i) gg[i] = g.dvalue(p[i], i);
    // solve [<gg,gg> <gg,1>; <gg,1> m] [a;b] = -[gv; sv]
    double a11 = 0, a12 = 0;
    for (double v : gg) {
      a11 += v * v;
      a12 += v;
    }
    std::vector<double> A{a11, a12, a12, static_cast<double>(m)};
    std::vector<double> rhs{-gv, -sv};
    if (!linsolve(A, rhs, 2)) return false;
    bool positive = true;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] += rhs[0] * gg[i] + rhs[1];
      positive = positive && p[i] > 0;
    }
    if (!positive) return false;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Proper-projection probe
// ---------------------------------------------------------------------------

/// A projection is proper when it is not an isolated point of the set: at
/// every probe radius down to 1e-6 a distinct feasible point must exist in
/// the ball (affine sets step along the tangent; curved sets step and restore).
inline bool is_proper_projection(const std::vector<double>& p, const ConstraintSet& set) {
  const std::size_t m = p.size();
  const double radii[] = {1e-3, 1e-4, 1e-5, 1e-6};

  std::function<bool(const ConstraintSet&, double)> feasible_neighbor =
      [&](const ConstraintSet& s, double radius) -> bool {
    switch (s.kind) {
      case ConstraintKind::FullSimplex: {
        for (std::size_t i = 0; i + 1 < m; ++i) {
          double step = radius / 2;
          step = std::min({step, p[i] / 2 + 1e-300, 1.0});
          if (p[i] - step * 0.5 <= 0) continue;
          return true;  // move mass between two coordinates
        }
        return false;
      }
      case ConstraintKind::Line: {
        double norm = 0;
        for (double v : s.line_direction) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0) return false;
        for (double sign : {1.0, -1.0}) {
          const double t = sign * radius / (2 * norm);
          bool ok = true;
          for (std::size_t i = 0; i < m; ++i)
            ok = ok && p[i] + t * s.line_direction[i] > 0;
          if (ok) return true;
        }
        return false;
      }
      case ConstraintKind::Moment: {
        // tangent: orthogonal to 1 and u
        std::vector<double> ones(m, 1.0), u(m);
        for (std::size_t i = 0; i < m; ++i) u[i] = s.u[i].value;
        for (std::size_t seed = 0; seed < m; ++seed) {
          std::vector<double> v(m, 0.0);
          v[seed] = 1.0;
          // Gram-Schmidt against {1, u}
          for (const auto& basis : {ones, u}) {
            double bb = 0, vb = 0;
            for (std::size_t i = 0; i < m; ++i) {
              bb += basis[i] * basis[i];
              vb += v[i] * basis[i];
            }
            if (bb > 0)
              for (std::size_t i = 0; i < m; ++i) v[i] -= vb / bb * basis[i];
          }
          // re-orthogonalize u against 1 first would be cleaner; a second pass fixes drift
          for (const auto& basis : {ones, u}) {
            double bb = 0, vb = 0;
            for (std::size_t i = 0; i < m; ++i) {
              bb += basis[i] * basis[i];
              vb += v[i] * basis[i];
            }
            if (bb > 0)
              for (std::size_t i = 0; i < m; ++i) v[i] -= vb / bb * basis[i];
          }
          double norm = 0;
          for (double x : v) norm += x * x;
          if (norm < 1e-20) continue;
          norm = std::sqrt(norm);
          for (double sign : {1.0, -1.0}) {
            bool ok = true;
            for (std::size_t i = 0; i < m; ++i)
              ok = ok && p[i] + sign * radius / 2 * v[i] / norm > 0;
            if (ok) return true;
          }
        }
        return false;
      }
      case ConstraintKind::Frequency:
      case ConstraintKind::GeneralizedFrequency: {
        const auto g = detail::constraint_function(s);
        std::mt19937_64 rng(0x70726f62ULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int attempt = 0; attempt < 32; ++attempt) {
          std::vector<double> v(m);
          for (auto& x : v) x = gauss(rng);
          // project out grad g and 1
          std::vector<double> gg(m);
          for (std::size_t i = 0; i < m; ++i) gg[i] = g.dvalue(p[i], i);
          for (int pass = 0; pass < 2; ++pass) {
            double s1 = 0, sg = 0, g2 = 0;
            for (std::size_t i = 0; i < m; ++i) {
              s1 += v[i];
              sg += v[i] * gg[i];
              g2 += gg[i] * gg[i];
            }
            for (std::size_t i = 0; i < m; ++i) {
              v[i] -= s1 / static_cast<double>(m);
              if (g2 > 0) v[i] -= sg / g2 * gg[i];
            }
          }
          double norm = 0;
          for (double x : v) norm += x * x;
          if (norm < 1e-16) continue;
          norm = std::sqrt(norm);
          std::vector<double> trial(m);
          for (std::size_t i = 0; i < m; ++i) trial[i] = p[i] + radius / 2 * v[i] / norm;
          bool positive = true;
          for (double x : trial) positive = positive && x > 0;
          if (!positive) continue;
          if (!detail::restore_feasibility(g, trial)) continue;
          positive = true;
          for (double x : trial) positive = positive && x > 0;
          const double d = std::sqrt(detail::dist2(trial, p));
          if (positive && d < radius && d > radius / 16) return true;
        }
        return false;
      }
      case ConstraintKind::Union: {
        for (const auto& mem : s.members)
          if (residual(p, mem) <= 1e-9 && feasible_neighbor(mem, radius)) return true;
        return false;
      }
    }
    return false;
  };

  for (double r : radii)
    if (!feasible_neighbor(set, r)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// I-projection on a single moment constraint (exponential family)
// ---------------------------------------------------------------------------

/// Unique I-projection of q on {p : sum p_i u_i = a}; p_i = k(l) q_i e^{-l u_i}.
/// The mean map is strictly monotone in l, so a bracketed bisection suffices.
inline ProjectionResult i_projection_moment(const Pmf& q, const std::vector<double>& u, double a,
                                            LagrangeSolution* lagrange = nullptr) {
  q.require_source();
  if (u.size() != q.size()) throw Error(ErrorCode::AlphabetMismatch, "u size != pmf size");
  const double umin = *std::min_element(u.begin(), u.end());
  const double umax = *std::max_element(u.begin(), u.end());
  if (!(a > umin && a < umax))
    throw Error(ErrorCode::InfeasibleMoment, "target mean outside the open value range");

  const std::size_t m = q.size();
  auto tilt = [&](double lam, std::vector<double>& p) {
    double tmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) tmax = std::max(tmax, -lam * u[i]);
    double z = 0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = q.probs[i] * std::exp(-lam * u[i] - tmax);
      z += p[i];
    }
    double mean = 0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] /= z;
      mean += p[i] * u[i];
    }
    return mean;
  };

  std::vector<double> p(m);
  double lo = 0, hi = 0;
  double mean0 = tilt(0, p);
  if (mean0 > a) {  // mean decreases in lambda
    hi = 1;
    while (tilt(hi, p) > a) {
      hi *= 2;
      if (hi > 1e8) throw Error(ErrorCode::NoConvergence, "mean bracket expansion failed");
    }
  } else if (mean0 < a) {
    lo = -1;
    while (tilt(lo, p) < a) {
      lo *= 2;
      if (lo < -1e8) throw Error(ErrorCode::NoConvergence, "mean bracket expansion failed");
    }
  }
  double lam = 0;
  if (mean0 != a) {
    for (int it = 0; it < 200; ++it) {
      lam = 0.5 * (lo + hi);
      const double mean = tilt(lam, p);
      if (mean > a)
        lo = lam;
      else
        hi = lam;
    }
    lam = 0.5 * (lo + hi);
  }
  const double mean = tilt(lam, p);
  const double scale = std::max({1.0, std::fabs(a)});
  if (std::fabs(mean - a) > 1e-12 * scale)
    throw Error(ErrorCode::NoConvergence, "moment residual above tolerance");

  if (lagrange) {
    double z = 0;
    for (std::size_t i = 0; i < m; ++i) z += q.probs[i] * std::exp(-lam * u[i]);
    *lagrange = LagrangeSolution{lam, 1.0 / z};
  }

  std::vector<Param> uw;
  uw.reserve(m);
  for (double v : u) uw.push_back(Param::of(v));
  const auto set = ConstraintSet::moment(uw, Param::of(a));

  ProjectionResult res;
  res.kind = ProjectionKind::I;
  res.objective = i_divergence(p, q);
  res.proper = {is_proper_projection(p, set)};
  res.points = {std::move(p)};
  res.diagnostics.converged = 1;
  res.diagnostics.starts = 1;
  res.diagnostics.max_constraint_residual = std::fabs(mean - a);
  return res;
}

// ---------------------------------------------------------------------------
// I-projections on a frequency constraint (non-convex, possibly several)
// ---------------------------------------------------------------------------

/// All global minimizers of I(p||q) on {sum p_i^alpha = a}.
inline ProjectionResult i_projections_frequency(const Pmf& q, double alpha, double a,
                                                int starts = 0) {
  q.require_source();
  const std::size_t m = q.size();
  if (alpha > 1) {
    const double amin = std::pow(static_cast<double>(m), 1.0 - alpha);
    if (a < amin - 1e-12 || a > 1.0 + 1e-12)
      throw Error(ErrorCode::FeasibilityError, "frequency target outside [m^(1-alpha), 1]");
    if (std::fabs(a - amin) <= 1e-12) {  // constraint pins the uniform point
      ProjectionResult res;
      res.kind = ProjectionKind::I;
      res.points = {std::vector<double>(m, 1.0 / static_cast<double>(m))};
      res.objective = i_divergence(res.points[0], q);
      res.proper = {false};
      return res;
    }
  }
  const auto set = ConstraintSet::frequency(m, alpha, Param::of(a));
  auto res = detail::kkt_multistart(detail::i_objective(q), detail::constraint_function(set), q,
                                    set, starts, ProjectionKind::I);
  res.proper.clear();
  for (const auto& pt : res.points) res.proper.push_back(is_proper_projection(pt, set));
  return res;
}

// ---------------------------------------------------------------------------
// Projections on a one-parameter line segment
// ---------------------------------------------------------------------------

namespace detail {

/// Feasible parameter interval of offset + s * direction inside the simplex.
inline std::pair<double, double> line_range(const ConstraintSet& line) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double osum = 0, dsum = 0;
  for (std::size_t i = 0; i < line.m; ++i) {
    osum += line.line_offset[i];
    dsum += line.line_direction[i];
    const double o = line.line_offset[i], d = line.line_direction[i];
    if (d > 0)
      lo = std::max(lo, -o / d);
    else if (d < 0)
      hi = std::min(hi, -o / d);
    else if (o < 0)
      throw Error(ErrorCode::EmptyIntersection, "line misses the simplex");
  }
  if (std::fabs(osum - 1.0) > 1e-9 || std::fabs(dsum) > 1e-9)
    throw Error(ErrorCode::InvalidConfig, "line must keep sum p_i = 1");
  if (!(lo < hi)) throw Error(ErrorCode::EmptyIntersection, "line misses the simplex");
  return {lo, hi};
}

/// Golden-section narrowing followed by bisection on the monotone derivative
/// of a convex 1-D objective; function comparisons alone cannot resolve the
/// flat region around the minimum.
inline double minimize_on_segment(const std::function<double(double)>& f,
                                  const std::function<double(double)>& df, double lo, double hi,
                                  double tol = 1e-10) {
  if (df(lo) >= 0) return lo;  // convex: minimum sits at the boundary
  if (df(hi) <= 0) return hi;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  const double coarse = std::max(tol * 1e4, (hi - lo) * 1e-4);
  for (int it = 0; it < 60 && b - a > coarse; ++it) {
    const double x1 = b - gr * (b - a);
    const double x2 = a + gr * (b - a);
    if (f(x1) < f(x2))
      b = x2;
    else
      a = x1;
  }
  if (df(a) > 0) a = lo;  // golden drift: restore a straddling bracket
  if (df(b) < 0) b = hi;
  for (int it = 0; it < 200 && b - a > tol * 1e-4; ++it) {
    const double mid = 0.5 * (a + b);
    if (df(mid) < 0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

inline std::vector<double> line_point(const ConstraintSet& line, double s) {
  std::vector<double> p(line.m);
  for (std::size_t i = 0; i < line.m; ++i)
    p[i] = std::max(line.line_offset[i] + s * line.line_direction[i], 0.0);
  return p;
}

}  // namespace detail

/// Unique I-projection of q on a segment {offset + s * direction} of the simplex.
inline ProjectionResult i_projection_line(const Pmf& q, const ConstraintSet& line) {
  q.require_source();
  if (line.kind != ConstraintKind::Line)
    throw Error(ErrorCode::InvalidConfig, "i_projection_line needs a Line set");
  auto [lo, hi] = detail::line_range(line);
  const double pad = (hi - lo) * 1e-12;
  auto f = [&](double s) { return i_divergence(detail::line_point(line, s), q); };
  auto df = [&](double s) {
    const auto p = detail::line_point(line, s);
    double d = 0;
    for (std::size_t i = 0; i < line.m; ++i) {
      if (p[i] <= 0) continue;
      d += line.line_direction[i] * (std::log(p[i] / q.probs[i]) + 1.0);
    }
    return d;
  };
  const double s = detail::minimize_on_segment(f, df, lo + pad, hi - pad);
  ProjectionResult res;
  res.kind = ProjectionKind::I;
  res.objective = f(s);
  auto p = detail::line_point(line, s);
  res.proper = {is_proper_projection(p, line)};
  res.points = {std::move(p)};
  return res;
}

// ---------------------------------------------------------------------------
// tau-projection: Tsallis entropy maximization on a set
// ---------------------------------------------------------------------------

/// All maximizers of S_alpha = (1 - sum p_i^alpha)/(alpha - 1) on the set.
/// The reported objective is the entropy value.
inline ProjectionResult tau_projection(const Pmf& q, const ConstraintSet& set,
                                       double alpha_entropy, int starts = 0) {
  q.require_source();
  if (set.kind == ConstraintKind::Frequency && alpha_entropy == set.alpha)
    throw Error(ErrorCode::FeasibilityError,
                "the entropy is constant on this set: every feasible point maximizes it");
  const std::size_t m = set.m;
  auto neg = detail::neg_tsallis_objective(alpha_entropy);

  if (set.kind == ConstraintKind::FullSimplex) {
    ProjectionResult res;
    res.kind = ProjectionKind::Tau;
    res.points = {std::vector<double>(m, 1.0 / static_cast<double>(m))};
    res.objective = -neg.value(res.points[0]);
    res.proper = {is_proper_projection(res.points[0], set)};
    return res;
  }
  if (set.kind == ConstraintKind::Line) {
    auto [lo, hi] = detail::line_range(set);
    const double pad = (hi - lo) * 1e-12;
    auto f = [&](double s) { return neg.value(detail::line_point(set, s)); };
    auto df = [&](double s) {
      const auto p = detail::line_point(set, s);
      double d = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (p[i] > 0) d += set.line_direction[i] * neg.dvalue(p[i], i);
      return d;
    };
    const double s = detail::minimize_on_segment(f, df, lo + pad, hi - pad);
    ProjectionResult res;
    res.kind = ProjectionKind::Tau;
    res.objective = -f(s);
    auto p = detail::line_point(set, s);
    res.proper = {is_proper_projection(p, set)};
    res.points = {std::move(p)};
    return res;
  }

  auto res = detail::kkt_multistart(neg, detail::constraint_function(set), q, set, starts,
                                    ProjectionKind::Tau);
  res.objective = -res.objective;
  res.proper.clear();
  for (const auto& pt : res.points) res.proper.push_back(is_proper_projection(pt, set));
  return res;
}

// ---------------------------------------------------------------------------
// mu-projection: the most probable feasible n-types
// ---------------------------------------------------------------------------

struct MuProjection {
  std::vector<NType> types;  // all argmax types, lexicographic order
  Weight probability;        // the common supremal pi value
  bool empty_feasible = false;
};

/// All maximizers of pi(nu; q) over Pi_n. Comparison is exact when exact
/// weights are available, otherwise log-space with relative tie tolerance.
inline MuProjection mu_projection(const Pmf& q, std::int64_t n, const ConstraintSet& set,
                                  MembershipMode mode, const EnumOptions& eopt = {},
                                  const CombOptions& copt = {}) {
  MuProjection out;
  auto feasible = enumerate_types(n, set, mode, eopt);
  if (feasible.empty()) {
    out.empty_feasible = true;
    return out;
  }
  std::vector<Weight> ws;
  ws.reserve(feasible.size());
  for (const auto& nu : feasible) ws.push_back(type_probability(nu, q, copt));
  std::size_t best = 0;
  for (std::size_t i = 1; i < ws.size(); ++i)
    if (weight_compare(ws[i], ws[best]) > 0) best = i;
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (weight_compare(ws[i], ws[best]) == 0) out.types.push_back(feasible[i]);
  out.probability = ws[best];
  return out;
}

// ---------------------------------------------------------------------------
// GME pair projection (joint affine constraint, shared multiplier)
// ---------------------------------------------------------------------------

struct PairProjectionResult {
  std::vector<double> first, second;
  double objective = 0.0;  // I(p1||q1) + I(p2||q2)
  LagrangeSolution lagrange;
};

/// Minimizer of I(p1||q1) + I(p2||q2) over {mean1 + mean2 = a}: both
/// components are exponential tilts with one shared multiplier.
inline PairProjectionResult gme_pair_projection(const Pmf& q1, const Pmf& q2,
                                                const PairConstraintSet& set) {
  q1.require_source();
  q2.require_source();
  if (set.mx() != q1.size() || set.my() != q2.size())
    throw Error(ErrorCode::AlphabetMismatch, "pair constraint sizes mismatch");
  std::vector<double> x(set.mx()), y(set.my());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = set.x[i].value;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = set.y[j].value;
  const double lo = *std::min_element(x.begin(), x.end()) +
                    *std::min_element(y.begin(), y.end());
  const double hi = *std::max_element(x.begin(), x.end()) +
                    *std::max_element(y.begin(), y.end());
  const double a = set.a.value;
  if (!(a > lo && a < hi))
    throw Error(ErrorCode::InfeasibleMoment, "pair target outside the open range");

  auto tilt = [](const Pmf& q, const std::vector<double>& u, double lam,
                 std::vector<double>& p) {
    double tmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) tmax = std::max(tmax, -lam * u[i]);
    double z = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      p[i] = q.probs[i] * std::exp(-lam * u[i] - tmax);
      z += p[i];
    }
    double mean = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      p[i] /= z;
      mean += p[i] * u[i];
    }
    return mean;
  };

  std::vector<double> p1(x.size()), p2(y.size());
  auto joint_mean = [&](double lam) { return tilt(q1, x, lam, p1) + tilt(q2, y, lam, p2); };

  double llo = 0, lhi = 0;
  const double m0 = joint_mean(0);
  if (m0 > a) {
    lhi = 1;
    while (joint_mean(lhi) > a) {
      lhi *= 2;
      if (lhi > 1e8) throw Error(ErrorCode::NoConvergence, "pair bracket expansion failed");
    }
  } else if (m0 < a) {
    llo = -1;
    while (joint_mean(llo) < a) {
      llo *= 2;
      if (llo < -1e8) throw Error(ErrorCode::NoConvergence, "pair bracket expansion failed");
    }
  }
  double lam = 0;
  if (m0 != a) {
    for (int it = 0; it < 200; ++it) {
      lam = 0.5 * (llo + lhi);
      if (joint_mean(lam) > a)
        llo = lam;
      else
        lhi = lam;
    }
    lam = 0.5 * (llo + lhi);
  }
  const double mean = joint_mean(lam);
  if (std::fabs(mean - a) > 1e-12 * std::max(1.0, std::fabs(a)))
    throw Error(ErrorCode::NoConvergence, "pair moment residual above tolerance");

  PairProjectionResult res;
  res.first = p1;
  res.second = p2;
  res.objective = i_divergence(p1, q1) + i_divergence(p2, q2);
  double z = 0;
  for (std::size_t i = 0; i < x.size(); ++i) z += q1.probs[i] * std::exp(-lam * x[i]);
  res.lagrange = LagrangeSolution{lam, 1.0 / z};
  return res;
}

}  // namespace mtypes
