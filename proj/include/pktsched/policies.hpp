#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pktsched/offline.hpp"

namespace pktsched {

/// x >= phi, decided exactly (phi is irrational, so x != phi for rational x).
bool at_least_phi(const Rational& x);
/// x <= phi, decided exactly as x^2 <= x + 1 for x >= 0.
bool at_most_phi(const Rational& x);

/// phi * w_e >= w_h, i.e. w_h^2 <= w_h * w_e + w_e^2.
/// Throws ValidationError on non-positive weights.
bool golden_test(const Rational& w_e, const Rational& w_h);

struct LotteryTicket {
  Packet packet;
  Rational probability;
};

/// A single packet, or a lottery over at most two distinct packets.
class PolicyDecision {
 public:
  static PolicyDecision certain(const Packet& p);
  /// Collapses to certain(e) when e and h coincide.
  static PolicyDecision lottery(const Packet& e, const Rational& p_e, const Packet& h);

  bool is_deterministic() const { return tickets_.size() == 1; }
  /// Throws std::logic_error on a lottery.
  const Packet& packet() const;
  std::span<const LotteryTicket> tickets() const { return tickets_; }
  Rational expected_gain() const;

 private:
  std::vector<LotteryTicket> tickets_;
};

enum class PolicyKind { mg, mg_prime, rg, greedy_weight, edf_nondominated };

/// mg, mg-prime, rg, greedy-weight, edf-nondominated. Throws ValidationError.
PolicyKind parse_policy(std::string_view name);
std::string_view policy_name(PolicyKind kind);
inline bool is_deterministic(PolicyKind kind) { return kind != PolicyKind::rg; }

Packet mg_choose(const ObliviousSchedule& o);
Packet mg_prime_choose(const ObliviousSchedule& o);
PolicyDecision rg_distribution(const ObliviousSchedule& o);

enum class Baseline { greedy_weight, edf_nondominated };
Baseline parse_baseline(std::string_view name);
Packet baseline_choose(Baseline which, const ObliviousSchedule& o);

/// Uniform entry point over all policies.
PolicyDecision decide(PolicyKind kind, const ObliviousSchedule& o);

}  // namespace pktsched
