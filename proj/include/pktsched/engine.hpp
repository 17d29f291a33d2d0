#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pktsched/model.hpp"
#include "pktsched/offline.hpp"
#include "pktsched/policies.hpp"

namespace pktsched {

struct StepRecord {
  Step step = 0;
  std::vector<PacketId> oblivious;  // members of O_t in schedule order
  Rational oblivious_weight;
  PacketId e = 0;
  PacketId h = 0;
  PacketId transmitted = 0;
  Rational gain;
};

struct RunReport {
  PolicyKind policy = PolicyKind::mg_prime;
  std::vector<StepRecord> per_step;
  Rational total_gain;
  Rational opt_value;
  Rational ratio{1};  // opt / gain; 1 when opt is 0
};

/// opt / gain with the convention that a zero optimum has ratio 1.
/// Throws InvariantViolation if opt > 0 while gain is 0.
Rational gain_ratio(const Rational& opt, const Rational& gain);

/// Optimal offline value of the whole instance.
Rational instance_opt(const Instance& inst);

/// Simulates a deterministic policy. Throws ValidationError for rg.
RunReport run_policy(const Instance& inst, PolicyKind policy);

/// Total gain of a deterministic policy without building a report.
Rational policy_gain(const Instance& inst, PolicyKind policy);

inline constexpr std::uint64_t kDefaultExactCap = std::uint64_t{1} << 20;

/// SCHED_EXACT_CAP if set to a positive integer, else the default cap.
std::uint64_t exact_cap_from_env();

using LotteryObserver = std::function<void(const ObliviousSchedule&, const PolicyDecision&)>;

struct ExactOptions {
  std::uint64_t leaf_cap = kDefaultExactCap;
  bool memoize = true;
  /// Called for every distinct (step, buffer) state the evaluation visits.
  LotteryObserver observer;
};

struct ExactResult {
  Rational expected_gain;
  std::uint64_t leaves = 0;  // root-to-leaf outcome paths of the branching tree
  Rational probability_mass;  // sum of leaf probabilities; always exactly 1
};

/// Exact expected gain of RG by branching on every lottery.
/// Throws CapExceeded when the tree has more than leaf_cap leaves.
ExactResult run_rg_exact(const Instance& inst, const ExactOptions& options = {});

struct MonteCarloResult {
  double mean = 0;
  double std_error = 0;
  Rational exact_mean;  // sample mean before rounding
  std::uint64_t trials = 0;
};

/// Trial i draws from a generator seeded by (seed, i) only, so results do not
/// depend on `jobs` or the platform.
MonteCarloResult run_rg_mc(const Instance& inst, std::uint64_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Gain of one RG trajectory driven by trial `trial` of `seed`.
Rational rg_sample_gain(const Instance& inst, std::uint64_t seed, std::uint64_t trial);

/// Whether a uniform 64-bit draw u selects an event of probability p, i.e.
/// u < p * 2^64, compared exactly.
bool draw_hits(std::uint64_t u, const Rational& p);

}  // namespace pktsched
