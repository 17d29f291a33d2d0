#include "pktsched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <thread>

#include "pktsched/errors.hpp"

namespace pktsched {

Rational gain_ratio(const Rational& opt, const Rational& gain) {
  if (opt.sign() == 0) return Rational(1);
  if (gain.sign() <= 0) throw InvariantViolation("positive optimum but zero gain");
  return opt / gain;
}

Rational instance_opt(const Instance& inst) { return opt_schedule(inst.packets(), 1).value; }

namespace {

const Packet& checked_member(const ObliviousSchedule& o, const Packet& p) {
  if (!o.contains(p.arrival)) throw InvariantViolation("policy transmitted a dominated packet");
  return p;
}

// Steps through a run of a deterministic policy, invoking on_step for each
// nonempty step.
template <class OnStep>
Rational simulate(const Instance& inst, PolicyKind policy, OnStep&& on_step) {
  if (!is_deterministic(policy)) throw ValidationError("rg is randomized; use the exact or Monte Carlo runner");
  Buffer buf;
  buf.current_step = inst.first_release() - 1;
  Rational gain;
  for (Step t = inst.first_release(); t <= inst.horizon(); ++t) {
    buf = advance_buffer(buf, t, inst.arrivals_at(t));
    if (buf.pending.empty()) continue;
    const ObliviousSchedule o = oblivious_schedule(buf.pending, t);
    const Packet sent = checked_member(o, decide(policy, o).packet());
    gain += sent.weight;
    on_step(o, sent);
    remove_pending(buf, sent.arrival);
  }
  return gain;
}

}  // namespace

RunReport run_policy(const Instance& inst, PolicyKind policy) {
  RunReport report;
  report.policy = policy;
  report.total_gain = simulate(inst, policy, [&](const ObliviousSchedule& o, const Packet& sent) {
    StepRecord rec;
    rec.step = o.step;
    for (const auto& s : o.schedule.slots()) rec.oblivious.push_back(s.packet.arrival);
    rec.oblivious_weight = o.schedule.weight();
    rec.e = o.e.arrival;
    rec.h = o.h.arrival;
    rec.transmitted = sent.arrival;
    rec.gain = sent.weight;
    report.per_step.push_back(std::move(rec));
  });
  report.opt_value = instance_opt(inst);
  if (report.total_gain > report.opt_value) throw InvariantViolation("online gain exceeds the offline optimum");
  report.ratio = gain_ratio(report.opt_value, report.total_gain);
  return report;
}

Rational policy_gain(const Instance& inst, PolicyKind policy) {
  return simulate(inst, policy, [](const ObliviousSchedule&, const Packet&) {});
}

std::uint64_t exact_cap_from_env() {
  const char* raw = std::getenv("SCHED_EXACT_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultExactCap;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) throw ValidationError("SCHED_EXACT_CAP must be a positive integer");
  return v;
}

namespace {

struct Node {
  Rational expected;
  std::uint64_t leaves = 0;
  Rational mass;
};

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s < a ? UINT64_MAX : s;
}

class ExactEvaluator {
 public:
  ExactEvaluator(const Instance& inst, const ExactOptions& opt) : inst_(inst), opt_(opt) {}

  // Expected gain from step t+1 on, given the packets left after step t.
  Node eval(Step t, std::vector<Packet> left) {
    std::erase_if(left, [t](const Packet& p) { return p.deadline <= t + 1; });
    if (left.empty()) {
      // Jump over idle stretches straight to the next release.
      auto later = inst_.released_after(t);
      if (later.empty()) return Node{Rational(0), 1, Rational(1)};
      t = later.front().release - 1;
    }
    if (t >= inst_.horizon()) return Node{Rational(0), 1, Rational(1)};

    std::vector<PacketId> key;
    if (opt_.memoize) {
      key.reserve(left.size() + 1);
      for (const auto& p : left) key.push_back(p.arrival);
      std::sort(key.begin(), key.end());
      auto it = memo_.find({t, key});
      if (it != memo_.end()) return it->second;
    }

    const Buffer buf = advance_buffer(Buffer{std::move(left), t}, t + 1, inst_.arrivals_at(t + 1));
    Node node;
    if (buf.pending.empty()) {
      node = eval(t + 1, {});
    } else {
      const ObliviousSchedule o = oblivious_schedule(buf.pending, t + 1);
      const PolicyDecision d = rg_distribution(o);
      if (opt_.observer) opt_.observer(o, d);
      for (const auto& ticket : d.tickets()) {
        Buffer next = buf;
        remove_pending(next, checked_member(o, ticket.packet).arrival);
        Node child = eval(t + 1, std::move(next.pending));
        node.expected += ticket.probability * (ticket.packet.weight + child.expected);
        node.mass += ticket.probability * child.mass;
        node.leaves = saturating_add(node.leaves, child.leaves);
      }
    }
    if (node.leaves > opt_.leaf_cap) {
      throw CapExceeded("instance too large for exact mode: more than " + std::to_string(opt_.leaf_cap) +
                        " branching leaves");
    }
    if (opt_.memoize) memo_.emplace(std::make_pair(t, std::move(key)), node);
    return node;
  }

 private:
  const Instance& inst_;
  const ExactOptions& opt_;
  std::map<std::pair<Step, std::vector<PacketId>>, Node> memo_;
};

}  // namespace

ExactResult run_rg_exact(const Instance& inst, const ExactOptions& options) {
  ExactEvaluator ev(inst, options);
  const Node root = ev.eval(inst.first_release() - 1, {});
  return ExactResult{root.expected, root.leaves, root.mass};
}

bool draw_hits(std::uint64_t u, const Rational& p) {
  if (p.sign() <= 0) return false;
  if (p >= Rational(1)) return true;
  const mpq_class q = p.to_mpq();
  mpz_class lhs(static_cast<unsigned long>(u));
  lhs *= q.get_den();
  mpz_class rhs = q.get_num();
  rhs <<= 64;
  return lhs < rhs;
}

Rational rg_sample_gain(const Instance& inst, std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 rng(seq);
  Buffer buf;
  buf.current_step = inst.first_release() - 1;
  Rational gain;
  for (Step t = inst.first_release(); t <= inst.horizon(); ++t) {
    buf = advance_buffer(buf, t, inst.arrivals_at(t));
    if (buf.pending.empty()) continue;
    const ObliviousSchedule o = oblivious_schedule(buf.pending, t);
    const PolicyDecision d = rg_distribution(o);
    const Packet* sent = &d.tickets().front().packet;
    if (!d.is_deterministic() && !draw_hits(rng(), d.tickets().front().probability)) {
      sent = &d.tickets()[1].packet;
    }
    gain += sent->weight;
    remove_pending(buf, sent->arrival);
  }
  return gain;
}

MonteCarloResult run_rg_mc(const Instance& inst, std::uint64_t trials, std::uint64_t seed, unsigned jobs) {
  if (trials == 0) throw ValidationError("run_rg_mc: trials must be >= 1");
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<std::uint64_t>(trials, 256))));

  struct Partial {
    Rational sum;
    Rational sum_sq;
  };
  std::vector<Partial> partials(jobs);
  auto work = [&](unsigned w) {
    const std::uint64_t lo = trials * w / jobs;
    const std::uint64_t hi = trials * (w + 1) / jobs;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Rational g = rg_sample_gain(inst, seed, i);
      partials[w].sum += g;
      partials[w].sum_sq += g * g;
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
  }
  // Exact sums make the merge order irrelevant.
  Rational sum, sum_sq;
  for (const auto& p : partials) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const Rational n(static_cast<std::int64_t>(trials));
  MonteCarloResult out;
  out.trials = trials;
  out.exact_mean = sum / n;
  out.mean = out.exact_mean.to_double();
  if (trials > 1) {
    const Rational var = (sum_sq - sum * out.exact_mean) / (n - Rational(1));
    out.std_error = std::sqrt((var / n).to_double());
  }
  return out;
}

}  // namespace pktsched
