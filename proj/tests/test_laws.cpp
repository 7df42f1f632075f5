#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mtypes/laws.hpp"
#include "mtypes/runner.hpp"
#include "oracles.hpp"

using namespace mtypes;

namespace {

ConstraintSet ex1_set() { return ConstraintSet::frequency(3, 2.0, Param::of(Rational(21, 50))); }

ConstraintSet mean_set(const Rational& a) {
  return ConstraintSet::moment({Param::of_int(1), Param::of_int(2), Param::of_int(3)},
                               Param::of(a));
}

ConstraintSet ex2_set() {
  return ConstraintSet::union_of({mean_set(Rational(5, 2)), mean_set(Rational(3, 2))});
}

std::vector<double> ex1_p1() {
  const Pmf q = Pmf::uniform(3);
  const auto proj = i_projections_frequency(q, 2.0, 0.42);
  return proj.points.back();  // lexicographically largest: [0.5737 0.2131 0.2131]
}

}  // namespace

TEST_CASE("conditional_ball_probability: wider ball carries exactly 1/3") {
  const Pmf q = Pmf::uniform(3);
  const auto w =
      conditional_ball_probability(30, ex1_set(), MembershipMode::Exact(),
                                   Ball(ex1_p1(), std::sqrt(0.09)), q);
  REQUIRE(w.exact.has_value());
  CHECK(*w.exact == Rational(1, 3));
}

TEST_CASE("conditional_ball_probability: ball covering the whole set gives 1") {
  const Pmf q = Pmf::uniform(3);
  const auto w = conditional_ball_probability(30, ex1_set(), MembershipMode::Exact(),
                                              Ball(ex1_p1(), 10.0), q);
  CHECK(*w.exact == 1);
}

TEST_CASE("conditional_ball_probability: closest-types value is 99/433") {
  const Pmf q = Pmf::uniform(3);
  const auto w = conditional_ball_probability(30, ex1_set(), MembershipMode::Exact(),
                                              Ball(ex1_p1(), std::sqrt(0.03)), q);
  REQUIRE(w.exact.has_value());
  CHECK(*w.exact == Rational(99, 433));
  // independent route: 2 G1 / (6 G1 + 6 G2) with factorial multiplicities
  const Rational g1(oracle::multinomial_factorial({17, 8, 5}));
  const Rational g2(oracle::multinomial_factorial({15, 12, 3}));
  CHECK(*w.exact == 2 * g1 / (6 * g1 + 6 * g2));
}

TEST_CASE("conditional_ball_probability: empty feasible set is an error") {
  const Pmf q = Pmf::uniform(3);
  CHECK_THROWS_AS(conditional_ball_probability(7, ex1_set(), MembershipMode::Exact(),
                                               Ball(ex1_p1(), 0.1), q),
                  Error);
}

TEST_CASE("partition of the feasible set: ball masses plus remainder sum to 1") {
  const Pmf q = Pmf::uniform(3);
  const auto proj = i_projections_frequency(q, 2.0, 0.42);
  const double eps = std::sqrt(0.03);
  const auto feasible = enumerate_types(30, ex1_set(), MembershipMode::Exact());
  std::vector<Ball> balls;
  for (const auto& p : proj.points) balls.emplace_back(p, eps);
  Rational total(0), parts(0);
  std::vector<Rational> mass(balls.size() + 1, Rational(0));
  for (const auto& nu : feasible) {
    const auto w = *type_probability(nu, q).exact;
    total += w;
    bool placed = false;
    for (std::size_t b = 0; b < balls.size() && !placed; ++b) {
      if (balls[b].contains(nu)) {
        mass[b] += w;
        placed = true;
      }
    }
    if (!placed) mass.back() += w;
  }
  Rational sum(0);
  for (const auto& msk : mass) sum += msk / total;
  CHECK(sum == 1);
}

TEST_CASE("icet_experiment: the union example is exactly 1/2 at every even n") {
  const Pmf q = Pmf::uniform(3);
  const auto [centers, obj] = detail::i_projection_points(ex2_set(), q, 0);
  REQUIRE(centers.size() == 2);
  LawsOptions opt;
  auto recs = icet_experiment(ex2_set(), q, {10, 20, 50, 77, 100}, 0.5, centers, opt);
  int measured = 0, empty = 0;
  for (const auto& r : recs) {
    if (r.empty_feasible) {
      ++empty;
      CHECK(r.n == 77);  // odd n: no type hits either mean exactly
    } else {
      ++measured;
      REQUIRE(r.value_exact.has_value());
      CHECK(*r.value_exact == Rational(1, 2));
    }
  }
  CHECK(measured == 8);
  CHECK(empty == 1);
}

TEST_CASE("icet_experiment: overlapping balls are rejected") {
  const Pmf q = Pmf::uniform(3);
  const auto [centers, obj] = detail::i_projection_points(ex2_set(), q, 0);
  LawsOptions opt;
  CHECK_THROWS_AS(icet_experiment(ex2_set(), q, {10}, 0.9, centers, opt), Error);
}

TEST_CASE("icet_experiment: convex case concentrates on the single projection") {
  const Pmf q = Pmf::uniform(3);
  const auto set = mean_set(Rational(5, 2));
  const auto [centers, obj] = detail::i_projection_points(set, q, 0);
  REQUIRE(centers.size() == 1);
  LawsOptions opt;
  auto recs = icet_experiment(set, q, {20, 50, 100, 200}, 0.1, centers, opt, "cwlln");
  REQUIRE(recs.size() == 4);
  double prev = 0;
  for (const auto& r : recs) {
    REQUIRE(r.value.has_value());
    CHECK(*r.value >= prev);
    prev = *r.value;
  }
  CHECK(prev >= 0.99);
}

TEST_CASE("egcp_prefix_probability: empty prefix has probability one") {
  const Pmf q = Pmf::uniform(3);
  const auto w = egcp_prefix_probability(30, ex1_set(), MembershipMode::Exact(), q, {});
  CHECK(*w.exact == 1);
}

TEST_CASE("egcp_prefix_probability: singleton set reduces to the urn first draw") {
  const Pmf q = Pmf::uniform(3);
  const auto set = ConstraintSet::moment(
      {Param::of_int(1), Param::of_int(2), Param::of_int(3)}, Param::of(Rational(6, 5)));
  // the single feasible 5-type is [4, 1, 0]
  CHECK(*egcp_prefix_probability(5, set, MembershipMode::Exact(), q, {0}).exact ==
        Rational(4, 5));
  CHECK(*egcp_prefix_probability(5, set, MembershipMode::Exact(), q, {1}).exact ==
        Rational(1, 5));
  CHECK(*egcp_prefix_probability(5, set, MembershipMode::Exact(), q, {2}).exact == 0);
}

TEST_CASE("egcp_prefix_probability: prefix longer than the sample") {
  const Pmf q = Pmf::uniform(3);
  CHECK_THROWS_AS(
      egcp_prefix_probability(2, ex2_set(), MembershipMode::Exact(), q, {0, 1, 2}), Error);
}

TEST_CASE("egcp_prefix_probability: approaches the mixture of the projections") {
  const Pmf q = Pmf::uniform(3);
  const auto set = ex2_set();
  const auto [centers, obj] = detail::i_projection_points(set, q, 0);
  REQUIRE(centers.size() == 2);

  double prev1 = 1e9, prev2 = 1e9;
  for (std::int64_t n : {40, 80, 160}) {
    double gap1 = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      const auto w = egcp_prefix_probability(n, set, MembershipMode::Exact(), q, {s});
      const double ref = 0.5 * (centers[0][s] + centers[1][s]);
      gap1 = std::max(gap1, std::fabs(w.value() - ref));
    }
    CHECK(gap1 < prev1);
    prev1 = gap1;

    double gap2 = 0;
    for (std::size_t s1 = 0; s1 < 3; ++s1)
      for (std::size_t s2 = 0; s2 < 3; ++s2) {
        const auto w = egcp_prefix_probability(n, set, MembershipMode::Exact(), q, {s1, s2});
        const double ref =
            0.5 * (centers[0][s1] * centers[0][s2] + centers[1][s1] * centers[1][s2]);
        gap2 = std::max(gap2, std::fabs(w.value() - ref));
      }
    CHECK(gap2 < prev2);
    prev2 = gap2;
  }
  CHECK(prev1 <= 0.02);
}

TEST_CASE("egcp_prefix_probability: prefixes of each length sum to one exactly") {
  const Pmf q = Pmf::uniform(3);
  for (const auto& set : {ex2_set(), mean_set(Rational(5, 2))}) {
    for (std::int64_t n : {20, 60}) {
      for (int t = 1; t <= 3; ++t) {
        Rational sum(0);
        std::size_t count = 1;
        for (int i = 0; i < t; ++i) count *= 3;
        for (std::size_t flat = 0; flat < count; ++flat) {
          std::vector<std::size_t> prefix(t);
          std::size_t ix = flat;
          for (int iposition = t - 1; iposition >= 0; --iposition) {
            prefix[iposition] = ix % 3;
            ix /= 3;
          }
          sum += *egcp_prefix_probability(n, set, MembershipMode::Exact(), q, prefix).exact;
        }
        REQUIRE(sum == 1);
      }
    }
  }
}

TEST_CASE("sanov_rate: full simplex has rate zero at every n") {
  const Pmf q = Pmf::uniform(3);
  LawsOptions opt;
  const auto recs = sanov_rate({5, 20, 60}, ConstraintSet::full_simplex(3), q, 0.0, opt);
  for (const auto& r : recs) {
    REQUIRE(r.value.has_value());
    CHECK(std::fabs(*r.value) <= 1e-12);
  }
}

TEST_CASE("sanov_rate: frequency-set rate approaches the divergence") {
  const Pmf q = Pmf::uniform(3);
  const auto proj = i_projections_frequency(q, 2.0, 0.42);
  LawsOptions opt;
  opt.mode = MembershipMode::Tolerance(1e-4);
  const auto recs = sanov_rate({30, 330}, ex1_set(), q, -proj.objective, opt);
  const double gap30 = std::fabs(*recs[0].value + proj.objective);
  const double gap330 = std::fabs(*recs[1].value + proj.objective);
  CHECK(gap330 <= 0.15);
  CHECK(gap330 < gap30);
}

TEST_CASE("sanov_rate: empirical value sits inside the assembled bracket") {
  const Pmf q = Pmf::uniform(3);
  const auto set = mean_set(Rational(5, 2));
  LawsOptions opt;
  for (std::int64_t n : {60, 120, 240}) {
    const auto recs = sanov_rate({n}, set, q, std::nullopt, opt);
    REQUIRE(recs[0].value.has_value());
    const double rate = *recs[0].value;
    // bracket from the per-type bounds: pi(Pi_n) > max lower over valid types,
    // pi(Pi_n) < (n+1)^m max upper over all types
    double best_lower = -std::numeric_limits<double>::infinity();
    double best_upper = -std::numeric_limits<double>::infinity();
    for (const auto& nu : enumerate_types(n, set, MembershipMode::Exact())) {
      const auto [lo, up] = sanov_bounds(nu, q);
      best_upper = std::max(best_upper, up.log_value);
      bool in_domain = true;
      for (auto cnt : nu.counts) in_domain = in_domain && cnt >= 7;
      if (in_domain) best_lower = std::max(best_lower, lo.log_value);
    }
    const double nn = static_cast<double>(n);
    CHECK(rate > best_lower / nn);
    CHECK(rate < (3.0 * std::log(nn + 1.0) + best_upper) / nn);
  }
}

TEST_CASE("rcwlln_experiment: covering ball and infeasible set") {
  const Pmf q = Pmf::uniform(3);
  PairConstraintSet pset;
  pset.x = {Param::of_int(1), Param::of_int(2), Param::of_int(3)};
  pset.y = pset.x;
  pset.a = Param::of_int(4);
  LawsOptions opt;
  const std::vector<double> u{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto covered = rcwlln_experiment(q, q, pset, {12}, 10.0, u, u, opt);
  REQUIRE(covered[0].value_exact.has_value());
  CHECK(*covered[0].value_exact == 1);

  PairConstraintSet bad = pset;
  bad.a = Param::of_int(7);
  auto empty = rcwlln_experiment(q, q, bad, {12}, 0.2, u, u, opt);
  CHECK(empty[0].empty_feasible);
}

TEST_CASE("rcwlln_experiment: concentration grows along the schedule") {
  const Pmf q = Pmf::uniform(3);
  PairConstraintSet pset;
  pset.x = {Param::of_int(1), Param::of_int(2), Param::of_int(3)};
  pset.y = pset.x;
  pset.a = Param::of_int(4);
  const auto gme = gme_pair_projection(q, q, pset);
  LawsOptions opt;
  auto recs = rcwlln_experiment(q, q, pset, {20, 40, 100}, 0.15, gme.first, gme.second, opt);
  REQUIRE(recs.size() == 3);
  CHECK(*recs[0].value < *recs[1].value);
  CHECK(*recs[1].value < *recs[2].value);
  CHECK(*recs[2].value > 0.5);
}

TEST_CASE("rational_concentration: identical types are rejected") {
  const Pmf q = Pmf::uniform(2);
  CHECK_THROWS_AS(rational_concentration(NType({2, 2}), NType({2, 2}), q, {1, 2}), Error);
}

TEST_CASE("rational_concentration: balanced vs skewed pair decays geometrically") {
  const Pmf q = Pmf::uniform(2);
  const auto conc = rational_concentration(NType({2, 2}), NType({3, 1}), q,
                                           {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  // with a uniform source the ratio reduces to a pure multiplicity ratio
  for (int k = 1; k <= 10; ++k) {
    const Rational expect = Rational(oracle::multinomial_factorial({3 * k, k})) /
                            Rational(oracle::multinomial_factorial({2 * k, 2 * k}));
    CHECK(conc.ratios[k - 1] == expect);
    if (k > 1) CHECK(conc.ratios[k - 1] < conc.ratios[k - 2]);
    CHECK(conc.ratios[k - 1] <= pow_rational(conc.gamma, k));
  }
  CHECK(conc.gamma == 1);  // the certified envelope is trivial for this pair
}

TEST_CASE("rational_concentration: certified envelope below one") {
  const Pmf q = Pmf::uniform(2);
  std::vector<int> ks;
  for (int k = 1; k <= 20; ++k) ks.push_back(k);
  const auto conc = rational_concentration(NType({6, 4}), NType({9, 1}), q, ks);
  CHECK(conc.gamma == Rational(8, 27));
  for (int k = 1; k <= 20; ++k) {
    CHECK(conc.ratios[k - 1] <= pow_rational(conc.gamma, k));
    if (k > 1) CHECK(conc.ratios[k - 1] < conc.ratios[k - 2]);
    const Rational expect = Rational(oracle::multinomial_factorial({9 * k, k})) /
                            Rational(oracle::multinomial_factorial({6 * k, 4 * k}));
    CHECK(conc.ratios[k - 1] == expect);
  }
}

TEST_CASE("rational_concentration: ordering precondition is enforced") {
  const Pmf q = Pmf::uniform(2);
  // pi([9,1]) < pi([6,4]) under the uniform source, so the swapped call fails
  CHECK_THROWS_AS(rational_concentration(NType({9, 1}), NType({6, 4}), q, {1}), Error);
}

TEST_CASE("ball: membership is stable under simultaneous permutation") {
  const std::vector<double> center{0.5737, 0.2131, 0.2131};
  const std::vector<double> center_p{0.2131, 0.5737, 0.2131};
  const Ball b1(center, 0.22), b2(center_p, 0.22);
  const NType t1({15, 12, 3}), t2({12, 15, 3});
  CHECK(b1.contains(t1) == b2.contains(t2));
}
