#include "pktsched/policies.hpp"

#include <stdexcept>

#include "pktsched/errors.hpp"

namespace pktsched {

bool at_least_phi(const Rational& x) {
  if (x.sign() <= 0) return false;
  return x * x >= x + Rational(1);
}

bool at_most_phi(const Rational& x) {
  if (x.sign() <= 0) return true;
  return x * x <= x + Rational(1);
}

bool golden_test(const Rational& w_e, const Rational& w_h) {
  if (w_e.sign() <= 0 || w_h.sign() <= 0) throw ValidationError("golden_test: weights must be positive");
  return w_h * w_h <= w_h * w_e + w_e * w_e;
}

PolicyDecision PolicyDecision::certain(const Packet& p) {
  PolicyDecision d;
  d.tickets_.push_back({p, Rational(1)});
  return d;
}

PolicyDecision PolicyDecision::lottery(const Packet& e, const Rational& p_e, const Packet& h) {
  if (e.arrival == h.arrival || p_e == Rational(1)) return certain(e);
  if (p_e.sign() == 0) return certain(h);
  if (p_e.sign() < 0 || p_e > Rational(1)) throw InvariantViolation("lottery probability outside [0,1]");
  PolicyDecision d;
  d.tickets_.push_back({e, p_e});
  d.tickets_.push_back({h, Rational(1) - p_e});
  return d;
}

const Packet& PolicyDecision::packet() const {
  if (!is_deterministic()) throw std::logic_error("PolicyDecision::packet on a lottery");
  return tickets_.front().packet;
}

Rational PolicyDecision::expected_gain() const {
  Rational sum;
  for (const auto& t : tickets_) sum += t.probability * t.packet.weight;
  return sum;
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "mg") return PolicyKind::mg;
  if (name == "mg-prime") return PolicyKind::mg_prime;
  if (name == "rg") return PolicyKind::rg;
  if (name == "greedy-weight") return PolicyKind::greedy_weight;
  if (name == "edf-nondominated") return PolicyKind::edf_nondominated;
  throw ValidationError("unknown policy '" + std::string(name) + "'");
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::mg: return "mg";
    case PolicyKind::mg_prime: return "mg-prime";
    case PolicyKind::rg: return "rg";
    case PolicyKind::greedy_weight: return "greedy-weight";
    case PolicyKind::edf_nondominated: return "edf-nondominated";
  }
  return "?";
}

namespace {

void require_nonempty(const ObliviousSchedule& o) {
  if (o.schedule.empty()) throw InvariantViolation("policy asked to choose from an empty oblivious schedule");
}

}  // namespace

Packet mg_choose(const ObliviousSchedule& o) {
  require_nonempty(o);
  if (golden_test(o.e.weight, o.h.weight)) return o.e;
  const Rational& w_e = o.e.weight;
  for (const auto& s : o.schedule.slots()) {
    const Rational& w = s.packet.weight;
    // w >= phi * w_e  <=>  w^2 >= w * w_e + w_e^2
    if (w * w >= w * w_e + w_e * w_e && golden_test(w, o.h.weight)) return s.packet;
  }
  throw InvariantViolation("mg_choose: no candidate, yet h always qualifies");
}

Packet mg_prime_choose(const ObliviousSchedule& o) {
  require_nonempty(o);
  return golden_test(o.e.weight, o.h.weight) ? o.e : o.h;
}

PolicyDecision rg_distribution(const ObliviousSchedule& o) {
  require_nonempty(o);
  return PolicyDecision::lottery(o.e, o.e.weight / o.h.weight, o.h);
}

Baseline parse_baseline(std::string_view name) {
  if (name == "greedy-weight") return Baseline::greedy_weight;
  if (name == "edf-nondominated") return Baseline::edf_nondominated;
  throw ValidationError("unknown baseline '" + std::string(name) + "'");
}

Packet baseline_choose(Baseline which, const ObliviousSchedule& o) {
  require_nonempty(o);
  return which == Baseline::greedy_weight ? o.h : o.e;
}

PolicyDecision decide(PolicyKind kind, const ObliviousSchedule& o) {
  switch (kind) {
    case PolicyKind::mg: return PolicyDecision::certain(mg_choose(o));
    case PolicyKind::mg_prime: return PolicyDecision::certain(mg_prime_choose(o));
    case PolicyKind::rg: return rg_distribution(o);
    case PolicyKind::greedy_weight: return PolicyDecision::certain(baseline_choose(Baseline::greedy_weight, o));
    case PolicyKind::edf_nondominated:
      return PolicyDecision::certain(baseline_choose(Baseline::edf_nondominated, o));
  }
  throw std::logic_error("unreachable policy kind");
}

}  // namespace pktsched
