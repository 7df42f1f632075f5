// Acceptance suite: one check per shipped guarantee, each printed as a
// single PASS/FAIL line with the measured numbers. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtypes/laws.hpp"
#include "mtypes/runner.hpp"

using namespace mtypes;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void run(const std::string& label, const std::function<std::string()>& body) {
    ++index;
    std::string detail;
    bool ok = true;
    try {
      detail = body();  // empty string means pass; otherwise the failure text
      ok = detail.empty();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << index << ": " << label;
    if (!ok) std::cout << " -- " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

std::string fail(const std::string& msg) { return msg; }

ConstraintSet ex1_set() { return ConstraintSet::frequency(3, 2.0, Param::of(Rational(21, 50))); }

ConstraintSet mean_set(const Rational& a) {
  return ConstraintSet::moment({Param::of_int(1), Param::of_int(2), Param::of_int(3)},
                               Param::of(a));
}

std::set<std::vector<std::int64_t>> orbit_keys(const std::vector<NType>& types) {
  std::set<std::vector<std::int64_t>> keys;
  for (const auto& t : types) {
    auto sorted = t.counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    keys.insert(sorted);
  }
  return keys;
}

double coord_gap(const std::vector<double>& p, const std::vector<double>& ref) {
  double g = 0;
  for (std::size_t i = 0; i < p.size(); ++i) g = std::max(g, std::fabs(p[i] - ref[i]));
  return g;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  Harness h;
  const Pmf q3 = Pmf::uniform(3);
  const auto freq = ex1_set();
  const auto proj = i_projections_frequency(q3, 2.0, 0.42);
  const auto& p1 = proj.points.back();  // [0.5737 0.2131 0.2131]

  h.run("exact enumeration finds the two orbits of 12 types at n=30 in under 1 s", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto types = enumerate_types(30, freq, MembershipMode::Exact());
    const double ms = ms_since(t0);
    if (types.size() != 12) return fail("count " + std::to_string(types.size()));
    if (orbit_keys(types) !=
        std::set<std::vector<std::int64_t>>{{17, 8, 5}, {15, 12, 3}})
      return fail("unexpected orbits");
    if (ms >= 1000.0) return fail("took " + fmt12(ms) + " ms");
    return std::string{};
  });

  h.run("tolerance 1e-4 enumeration finds the four orbits of 24 types at n=330 in under 5 s",
        [&] {
          const auto t0 = std::chrono::steady_clock::now();
          const auto types = enumerate_types(330, freq, MembershipMode::Tolerance(1e-4));
          const double ms = ms_since(t0);
          if (types.size() != 24) return fail("count " + std::to_string(types.size()));
          if (orbit_keys(types) != std::set<std::vector<std::int64_t>>{{156, 143, 31},
                                                                       {165, 132, 33},
                                                                       {187, 88, 55},
                                                                       {189, 77, 64}})
            return fail("unexpected orbits");
          if (ms >= 5000.0) return fail("took " + fmt12(ms) + " ms");
          return std::string{};
        });

  h.run("three projections within 5e-4 of the quoted coordinates, objective spread <= 1e-9",
        [&] {
          if (proj.points.size() != 3)
            return fail("found " + std::to_string(proj.points.size()) + " points");
          const std::vector<std::vector<double>> paper{{0.2131, 0.2131, 0.5737},
                                                       {0.2131, 0.5737, 0.2131},
                                                       {0.5737, 0.2131, 0.2131}};
          for (int j = 0; j < 3; ++j)
            if (coord_gap(proj.points[j], paper[j]) > 5e-4)
              return fail("coordinate gap " + fmt12(coord_gap(proj.points[j], paper[j])));
          double lo = 1e300, hi = -1e300;
          for (const auto& p : proj.points) {
            const double v = i_divergence(p, q3);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          if (hi - lo > 1e-9) return fail("objective spread " + fmt12(hi - lo));
          return std::string{};
        });

  h.run("the wider ball at n=30 carries conditional probability exactly 1/3", [&] {
    for (const double eps2 : {0.06, 0.09, 0.12}) {
      const auto w = conditional_ball_probability(30, freq, MembershipMode::Exact(),
                                                  Ball(p1, std::sqrt(eps2)), q3);
      if (!w.exact || *w.exact != Rational(1, 3))
        return fail("eps^2 = " + fmt12(eps2) + " gave " +
                    (w.exact ? rational_to_string(*w.exact) : std::string("inexact")));
    }
    return std::string{};
  });

  h.run("closest-types values: 0.2287 exactly at n=30 (0.2304 quoted), 0.261 at n=330, risen",
        [&] {
          const auto w30 = conditional_ball_probability(30, freq, MembershipMode::Exact(),
                                                        Ball(p1, std::sqrt(0.03)), q3);
          if (!w30.exact || *w30.exact != Rational(99, 433))
            return fail("n=30 exact value is not 99/433");
          if (std::fabs(w30.value() - 99.0 / 433.0) > 1e-12)
            return fail("n=30 float/exact drift");
          if (std::fabs(w30.value() - 0.2304) > 0.01)
            return fail("n=30 value " + fmt12(w30.value()));
          const auto w330 =
              conditional_ball_probability(330, freq, MembershipMode::Tolerance(1e-4),
                                           Ball(p1, std::sqrt(0.003)), q3);
          if (std::fabs(w330.value() - 0.261) > 0.01)
            return fail("n=330 value " + fmt12(w330.value()));
          if (!(w330.value() > w30.value())) return fail("probability did not rise");
          return std::string{};
        });

  h.run("equi-concentration trend: nondecreasing j=1 value ending within 0.08 of 1/3, equal js",
        [&] {
          std::vector<std::int64_t> schedule;
          for (std::int64_t n = 30; n <= 330; n += 30) schedule.push_back(n);
          LawsOptions opt;
          opt.mode = MembershipMode::Tolerance(1e-4);
          const auto recs =
              icet_experiment(freq, q3, schedule, std::sqrt(0.03), proj.points, opt);
          double prev = -1, last = 0;
          for (const auto& r : recs) {
            if (r.j != 1) continue;
            if (!r.value) return fail("missing value at n=" + std::to_string(r.n));
            if (prev >= 0 && *r.value < prev - 5e-3)
              return fail("decrease at n=" + std::to_string(r.n));
            prev = *r.value;
            last = *r.value;
          }
          if (std::fabs(last - 1.0 / 3.0) > 0.08) return fail("final value " + fmt12(last));
          for (std::size_t i = 0; i < recs.size(); i += 3) {
            if (!(recs[i].value_exact && recs[i + 1].value_exact && recs[i + 2].value_exact &&
                  *recs[i].value_exact == *recs[i + 1].value_exact &&
                  *recs[i + 1].value_exact == *recs[i + 2].value_exact))
              return fail("j-values differ at n=" + std::to_string(recs[i].n));
          }
          return std::string{};
        });

  h.run("union-of-means example: both ball probabilities exactly 1/2 whenever feasible, n<=200",
        [&] {
          const auto set = ConstraintSet::union_of(
              {mean_set(Rational(5, 2)), mean_set(Rational(3, 2))});
          const auto [centers, obj] = detail::i_projection_points(set, q3, 0);
          if (centers.size() != 2) return fail("projection count");
          LawsOptions opt;
          int measured = 0;
          for (std::int64_t n = 1; n <= 200; ++n) {
            std::vector<ExperimentRecord> recs;
            recs = icet_experiment(set, q3, {n}, 0.5, centers, opt);
            for (const auto& r : recs) {
              if (r.empty_feasible) {
                if (n % 2 == 0) return fail("even n=" + std::to_string(n) + " came up empty");
                continue;
              }
              ++measured;
              if (!r.value_exact || *r.value_exact != Rational(1, 2))
                return fail("n=" + std::to_string(n) + " j=" + std::to_string(r.j) +
                            " is not exactly 1/2");
            }
          }
          if (measured != 200) return fail("measured " + std::to_string(measured));
          return std::string{};
        });

  h.run("reduced quadratic set: projection and Tsallis-2 maximizer distinct but 5e-4-accurate",
        [&] {
          const double c = 1.0 + std::sqrt(2.0);
          const auto line = ConstraintSet::line({0.0, 1.0, 0.0}, {1.0, -c, std::sqrt(2.0)});
          const auto ip = i_projection_line(q3, line);
          const auto tp = tau_projection(q3, line, 2.0);
          if (coord_gap(ip.points[0], {0.2748, 0.3366, 0.3886}) > 5e-4)
            return fail("projection gap");
          if (coord_gap(tp.points[0], {0.2735, 0.3398, 0.3867}) > 5e-4)
            return fail("maximizer gap");
          const double d = std::sqrt(detail::dist2(ip.points[0], tp.points[0]));
          if (!(d > 2e-3)) return fail("distance " + fmt12(d));
          return std::string{};
        });

  h.run("prefix law on the union example: gap <= 0.02 at n=160, decreasing; sums exactly 1",
        [&] {
          const auto set = ConstraintSet::union_of(
              {mean_set(Rational(5, 2)), mean_set(Rational(3, 2))});
          const auto [centers, obj] = detail::i_projection_points(set, q3, 0);
          double prev = 1e9, last = 0;
          for (std::int64_t n : {40, 80, 160}) {
            double gap = 0;
            for (std::size_t s = 0; s < 3; ++s) {
              const auto w = egcp_prefix_probability(n, set, MembershipMode::Exact(), q3, {s});
              const double ref = 0.5 * (centers[0][s] + centers[1][s]);
              gap = std::max(gap, std::fabs(w.value() - ref));
            }
            if (!(gap < prev)) return fail("gap not decreasing at n=" + std::to_string(n));
            prev = gap;
            last = gap;
          }
          if (last > 0.02) return fail("gap at n=160 is " + fmt12(last));
          for (int t = 1; t <= 3; ++t) {
            Rational sum(0);
            std::size_t count = 1;
            for (int i = 0; i < t; ++i) count *= 3;
            for (std::size_t flat = 0; flat < count; ++flat) {
              std::vector<std::size_t> prefix(t);
              std::size_t ix = flat;
              for (int pos = t - 1; pos >= 0; --pos) {
                prefix[pos] = ix % 3;
                ix /= 3;
              }
              sum += *egcp_prefix_probability(60, set, MembershipMode::Exact(), q3, prefix).exact;
            }
            if (sum != 1) return fail("prefix sum at t=" + std::to_string(t));
          }
          return std::string{};
        });

  h.run("single-mean rate: |(1/n) ln pi(Pi_n) + I| <= 3 ln(n+1)/n + 0.01 for even n <= 300",
        [&] {
          const auto set = mean_set(Rational(5, 2));
          const auto [centers, obj] = detail::i_projection_points(set, q3, 0);
          std::vector<std::int64_t> schedule;
          for (std::int64_t n = 10; n <= 300; n += 2) schedule.push_back(n);
          LawsOptions opt;
          const auto recs = sanov_rate(schedule, set, q3, -obj, opt);
          for (const auto& r : recs) {
            if (r.empty_feasible) return fail("unexpected empty at n=" + std::to_string(r.n));
            const double nn = static_cast<double>(r.n);
            const double bound = 3.0 * std::log(nn + 1.0) / nn + 0.01;
            const double gap = std::fabs(*r.value + obj);
            if (gap > bound)
              return fail("n=" + std::to_string(r.n) + " gap " + fmt12(gap) + " > " +
                          fmt12(bound));
          }
          return std::string{};
        });

  h.run("ratio bound and the factorial sandwich hold for 1000 pairs, n in [7,100], m in 2..4",
        [&] {
          std::mt19937_64 rng(20240809);
          const std::vector<std::vector<Rational>> sources = {
              {Rational(1, 2), Rational(1, 2)},
              {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
              {Rational(2, 5), Rational(3, 10), Rational(1, 5), Rational(1, 10)}};
          for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t m = 2 + trial % 3;
            const std::int64_t lo = 7 * static_cast<std::int64_t>(m);
            const std::int64_t n = lo + static_cast<std::int64_t>(rng() % (101 - lo));
            // counts of at least 7 keep each per-component factorial bound valid
            std::vector<std::int64_t> a(m, 7), b(m, 7);
            std::int64_t extra = n - lo;
            for (std::int64_t e = 0; e < extra; ++e) {
              a[rng() % m] += 1;
              b[rng() % m] += 1;
            }
            const Pmf q = Pmf::from_rationals(sources[m - 2]);
            const NType nu(a), dot(b);
            const auto bound = probability_ratio_bound(nu, dot, q);
            const Rational ratio =
                *type_probability(nu, q).exact / *type_probability(dot, q).exact;
            if (!(ratio < *bound.exact)) return fail("ratio bound violated");

            double lhs = 0, pa = 0, pb = 0, la = 0, lb = 0;
            for (std::size_t i = 0; i < m; ++i) {
              lhs += std::lgamma(static_cast<double>(a[i]) + 1) -
                     std::lgamma(static_cast<double>(b[i]) + 1);
              const double fa = static_cast<double>(a[i]) / static_cast<double>(n);
              const double fb = static_cast<double>(b[i]) / static_cast<double>(n);
              pa += fa * std::log(fa);
              pb += fb * std::log(fb);
              la += std::log(fa);
              lb += std::log(fb);
            }
            lhs /= static_cast<double>(n);
            const double mn = static_cast<double>(m) / static_cast<double>(n) *
                              std::log(static_cast<double>(n));
            const double lower = pa - mn - pb - lb / static_cast<double>(n);
            const double upper = mn + pa + la / static_cast<double>(n) - pb;
            if (!(lower < lhs && lhs < upper)) return fail("factorial sandwich violated");
          }
          return std::string{};
        });

  h.run("most-probable types sit within 0.05 of the projections at n=330, closer than at n=30",
        [&] {
          auto dist = [&](std::int64_t n) {
            const auto mu =
                mu_projection(q3, n, freq, MembershipMode::Tolerance(1e-4));
            double worst = 0;
            for (const auto& t : mu.types) {
              double best = 1e300;
              for (const auto& p : proj.points) {
                double d = 0;
                for (int i = 0; i < 3; ++i)
                  d += (t.fraction(i) - p[i]) * (t.fraction(i) - p[i]);
                best = std::min(best, std::sqrt(d));
              }
              worst = std::max(worst, best);
            }
            return worst;
          };
          const double d30 = dist(30), d330 = dist(330);
          if (d330 > 0.05) return fail("d(330) = " + fmt12(d330));
          if (d330 > d30) return fail("d(330) exceeds d(30)");
          return std::string{};
        });

  h.run("two-point rational set: exact ratios below a certified gamma^k, strictly decreasing",
        [&] {
          const Pmf q2 = Pmf::uniform(2);
          std::vector<int> ks;
          for (int k = 1; k <= 20; ++k) ks.push_back(k);
          const auto conc = rational_concentration(NType({6, 4}), NType({9, 1}), q2, ks);
          if (!(conc.gamma < 1)) return fail("gamma = " + rational_to_string(conc.gamma));
          for (int k = 1; k <= 20; ++k) {
            if (!(conc.ratios[k - 1] <= pow_rational(conc.gamma, k)))
              return fail("envelope violated at k=" + std::to_string(k));
            if (k > 1 && !(conc.ratios[k - 1] < conc.ratios[k - 2]))
              return fail("not strictly decreasing at k=" + std::to_string(k));
          }
          return std::string{};
        });

  h.run("normalization: type probabilities sum to 1 exactly (n<=20, m<=4); log agreement 1e-10",
        [&] {
          const std::vector<std::vector<Rational>> sources = {
              {Rational(1, 2), Rational(1, 2)},
              {Rational(3, 10), Rational(7, 10)},
              {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
              {Rational(1, 2), Rational(3, 10), Rational(1, 5)},
              {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)},
              {Rational(2, 5), Rational(3, 10), Rational(1, 5), Rational(1, 10)}};
          for (const auto& src : sources) {
            const Pmf q = Pmf::from_rationals(src);
            for (std::int64_t n = 1; n <= 20; ++n) {
              Rational sum(0);
              for (const auto& t :
                   enumerate_types(n, ConstraintSet::full_simplex(q.size()),
                                   MembershipMode::Exact()))
                sum += *type_probability(t, q).exact;
              if (sum != 1)
                return fail("sum != 1 at n=" + std::to_string(n) + ", m=" +
                            std::to_string(q.size()));
            }
          }
          std::mt19937_64 rng(5);
          const Pmf q = Pmf::from_rationals({Rational(1, 2), Rational(3, 10), Rational(1, 5)});
          for (int trial = 0; trial < 100; ++trial) {
            const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 200);
            std::vector<std::int64_t> counts(3, 0);
            for (std::int64_t i = 0; i < n; ++i) counts[rng() % 3] += 1;
            const auto w = type_probability(NType(counts), q);
            const double ln = log_rational(*w.exact);
            if (std::fabs(w.log_value - ln) > 1e-10 * std::max(1.0, std::fabs(ln)))
              return fail("dual representations drift at n=" + std::to_string(n));
          }
          return std::string{};
        });

  h.run("determinism: byte-identical preset outputs across reruns and worker counts 1 and 4",
        [&] {
          for (const auto& name : preset_names()) {
            setenv("MTYPES_WORKERS", "1", 1);
            const auto a = reproduce(name, "csv");
            const auto a2 = reproduce(name, "csv");
            setenv("MTYPES_WORKERS", "4", 1);
            const auto b = reproduce(name, "csv");
            unsetenv("MTYPES_WORKERS");
            if (a.data != a2.data || a.table != a2.table)
              return fail(name + ": rerun differs");
            if (a.data != b.data || a.table != b.table)
              return fail(name + ": worker count changes the output");
            if (a.table.find("[FAIL]") != std::string::npos)
              return fail(name + ": preset reports a failed comparison");
          }
          return std::string{};
        });

  std::cout << (h.failures == 0 ? "all criteria passed\n"
                                : std::to_string(h.failures) + " criteria failed\n");
  return h.failures == 0 ? 0 : 1;
}
