#include <cstdlib>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pktsched/engine.hpp"
#include "pktsched/errors.hpp"

using namespace pktsched;

namespace {

Instance three_packets() { return Instance::create({{"a", 1, 2, 1}, {"b", 1, 3, 2}, {"c", 2, 3, 2}}); }

}  // namespace

TEST_CASE("three-packet regression values") {
  const Instance inst = three_packets();
  CHECK(instance_opt(inst) == Rational(4));

  const RunReport r = run_policy(inst, PolicyKind::mg_prime);
  CHECK(r.total_gain == Rational(4));
  CHECK(r.ratio == Rational(1));
  REQUIRE(r.per_step.size() == 2);
  CHECK(r.per_step[0].e == 0);
  CHECK(r.per_step[0].h == 1);
  CHECK(r.per_step[0].transmitted == 1);

  const ExactResult ex = run_rg_exact(inst);
  CHECK(ex.expected_gain == Rational(7, 2));
  CHECK(ex.probability_mass == Rational(1));
  CHECK(ex.leaves == 2);
  CHECK(gain_ratio(Rational(4), ex.expected_gain) == Rational(8, 7));

  CHECK(policy_gain(inst, PolicyKind::greedy_weight) == Rational(4));
  CHECK(policy_gain(inst, PolicyKind::edf_nondominated) == Rational(3));
  CHECK_THROWS_AS(run_policy(inst, PolicyKind::rg), ValidationError);
}

TEST_CASE("gain ratio conventions") {
  CHECK(gain_ratio(Rational(0), Rational(0)) == Rational(1));
  CHECK(gain_ratio(Rational(3), Rational(2)) == Rational(3, 2));
  CHECK_THROWS_AS(gain_ratio(Rational(1), Rational(0)), InvariantViolation);
}

TEST_CASE("deterministic runs match the brute-force simulator") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    const Instance inst = oracle::random_instance(rng, 7, 4, 3, {1, 2, 3, 5, 8});
    for (auto k : {PolicyKind::mg, PolicyKind::mg_prime, PolicyKind::greedy_weight, PolicyKind::edf_nondominated}) {
      const RunReport r = run_policy(inst, k);
      CHECK(r.total_gain == oracle::simulate(inst, k));
      CHECK(r.total_gain <= r.opt_value);
      CHECK(r.opt_value == oracle::opt_value({inst.packets().begin(), inst.packets().end()}, 1));
    }
  }
}

TEST_CASE("exact rg expectation matches unmemoized branching") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const Instance inst = oracle::random_instance(rng, 7, 4, 3, {1, 2, 3, 5, 8});
    const auto leaves = oracle::rg_leaves(inst);
    Rational expected(0), mass(0);
    for (const auto& leaf : leaves) {
      expected += leaf.probability * leaf.gain;
      mass += leaf.probability;
    }
    CHECK(mass == Rational(1));
    const ExactResult memo = run_rg_exact(inst);
    const ExactResult plain = run_rg_exact(inst, ExactOptions{kDefaultExactCap, false, {}});
    CHECK(memo.expected_gain == expected);
    CHECK(plain.expected_gain == expected);
    CHECK(memo.leaves == leaves.size());
    CHECK(memo.probability_mass == Rational(1));
  }
}

TEST_CASE("exact mode cap") {
  const Instance inst = three_packets();
  CHECK_THROWS_AS(run_rg_exact(inst, ExactOptions{1, true, {}}), CapExceeded);
  CHECK_NOTHROW(run_rg_exact(inst, ExactOptions{2, true, {}}));
  setenv("SCHED_EXACT_CAP", "17", 1);
  CHECK(exact_cap_from_env() == 17);
  setenv("SCHED_EXACT_CAP", "junk", 1);
  CHECK_THROWS_AS(exact_cap_from_env(), ValidationError);
  unsetenv("SCHED_EXACT_CAP");
  CHECK(exact_cap_from_env() == kDefaultExactCap);
}

TEST_CASE("lottery observer sees the per-step bound") {
  std::mt19937_64 rng(43);
  int lotteries = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance inst = oracle::random_instance(rng, 7, 4, 2, {1, 2, 3, 5, 8});
    ExactOptions opts;
    opts.observer = [&](const ObliviousSchedule& o, const PolicyDecision& d) {
      if (o.e == o.h) return;
      ++lotteries;
      const Rational we = o.e.weight, wh = o.h.weight;
      CHECK(d.expected_gain() == (we * we - we * wh + wh * wh) / wh);
      CHECK(4 * d.expected_gain() >= 3 * wh);
    };
    run_rg_exact(inst, opts);
  }
  CHECK(lotteries > 0);
}

TEST_CASE("draw threshold is exact") {
  CHECK(draw_hits(0, Rational(1, 2)));
  CHECK(draw_hits((std::uint64_t{1} << 63) - 1, Rational(1, 2)));
  CHECK_FALSE(draw_hits(std::uint64_t{1} << 63, Rational(1, 2)));
  CHECK(draw_hits(~std::uint64_t{0}, Rational(1)));
  CHECK_FALSE(draw_hits(0, Rational(0)));
}

TEST_CASE("monte carlo is reproducible and independent of jobs") {
  const Instance inst = three_packets();
  const MonteCarloResult a = run_rg_mc(inst, 4000, 99, 1);
  const MonteCarloResult b = run_rg_mc(inst, 4000, 99, 3);
  CHECK(a.exact_mean == b.exact_mean);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(run_rg_mc(inst, 4000, 100, 1).exact_mean != a.exact_mean);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Rational g = rg_sample_gain(inst, 99, i);
    CHECK((g == Rational(3) || g == Rational(4)));
  }
}
