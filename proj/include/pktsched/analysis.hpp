#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pktsched/engine.hpp"

namespace pktsched {

// ---------------------------------------------------------------------------
// Competitive ratio

/// opt / gain for deterministic policies, opt / E[gain] for rg (exact mode).
/// An instance with zero optimum has ratio 1.
Rational competitive_ratio(const Instance& inst, PolicyKind policy, std::uint64_t exact_cap = kDefaultExactCap);

// ---------------------------------------------------------------------------
// Instance generators

enum class Family { agreeable_random, two_bounded, s_uniform, golden_chain };

Family parse_family(std::string_view name);
std::string_view family_name(Family f);

struct GeneratorSpec {
  Family family = Family::agreeable_random;
  Step steps = 4;                // release steps 1..steps
  int packets_per_step = 2;      // up to this many per step, uniformly
  std::vector<Rational> weights{Rational(1), Rational(2), Rational(3), Rational(5), Rational(8)};
  std::optional<Rational> geometric_ratio;  // when set, weights are ratio^0 .. ratio^(levels-1)
  int geometric_levels = 4;
  Step max_lifespan = 3;         // agreeable-random only
  Step s = 1;                    // s-uniform only
  int chain_length = 2;          // golden-chain only
  Rational chain_ratio{987, 610};
  std::uint64_t seed = 0;
};

/// Deterministic in the seed. Throws ValidationError on bad parameters.
Instance generate(const GeneratorSpec& spec);

/// Two-bounded chain: step t in 1..k releases a tight packet (d = t+1) of
/// weight g^(t-1) followed by a flexible one (d = t+2) of weight g^t.
Instance golden_chain(int k, const Rational& g = Rational(987, 610));

// ---------------------------------------------------------------------------
// Adversary search

struct SearchOptions {
  PolicyKind policy = PolicyKind::mg_prime;
  int depth = 2;                 // number of injection steps
  std::vector<Rational> menu{Rational(1), Rational(2)};
  int branching = 2;             // max packets injected per step
  std::uint64_t node_budget = 0;  // 0 = unlimited
  std::uint64_t exact_cap = kDefaultExactCap;  // max support of rg's buffer distribution
  std::size_t beam_width = 0;    // 0 = exhaustive
  unsigned jobs = 1;
};

struct SearchResult {
  Instance witness;
  PolicyKind policy = PolicyKind::mg_prime;
  Rational ratio{1};
  std::uint64_t nodes = 0;
  bool partial = false;  // budget or cap cut part of the tree
};

/// Searches two-bounded injections (hence agreeable) for the largest
/// opt / (expected) gain. The result does not depend on `jobs`; ties keep the
/// lexicographically first witness.
SearchResult adversary_search(const SearchOptions& options);

// ---------------------------------------------------------------------------
// Structural checks

using ObliviousMutation = std::function<ObliviousSchedule(const ObliviousSchedule&, std::span<const Packet> pending)>;

/// Removes the member at `position` (mod size) of O_t at step `at`.
ObliviousMutation drop_packet_mutation(Step at, std::size_t position);

struct FactsOptions {
  ObliviousMutation mutate;  // applied to O_t before the checks, not to the run
};

struct StepFacts {
  Step step = 0;
  bool oblivious_optimal = true;  // O_t is an optimal order-schedule of the buffer
  bool containment = true;        // C* is clairvoyant and its pending part lies in O_t
  bool first_packet = true;       // order-earlier members of O_t are lighter than C*(t)
  bool monotone = true;           // lighter earlier member in C* forces the heavier one in
  bool reordering = true;         // e not in C*: moving h to the front stays feasible
  bool reordering_applicable = false;
  std::string detail;

  bool passed() const { return oblivious_optimal && containment && first_packet && monotone && reordering; }
};

struct FactsReport {
  std::vector<StepFacts> steps;

  bool passed() const;
  std::size_t failures() const;
};

/// Runs MG' over the instance and, at every nonempty step, builds O_t and a
/// conforming clairvoyant schedule and checks the structural properties.
/// Throws ValidationError on non-agreeable input.
FactsReport check_facts(const Instance& inst, const FactsOptions& options = {});

}  // namespace pktsched
