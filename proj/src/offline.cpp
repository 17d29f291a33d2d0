#include "pktsched/offline.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "pktsched/errors.hpp"

namespace pktsched {

std::vector<SchedulabilityGraph::Edge> SchedulabilityGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t j = 0; j < adjacency.size(); ++j) {
    for (Step t : adjacency[j]) out.push_back({j, t});
  }
  return out;
}

SchedulabilityGraph build_graph(std::span<const Packet> packets, Step t0, Step t1) {
  SchedulabilityGraph g;
  g.packets.assign(packets.begin(), packets.end());
  g.first_step = t0;
  g.last_step = t1;
  g.adjacency.resize(packets.size());
  for (std::size_t j = 0; j < packets.size(); ++j) {
    const Step lo = std::max(t0, packets[j].release);
    const Step hi = std::min(t1, packets[j].deadline - 1);
    if (hi >= lo) g.adjacency[j].reserve(static_cast<std::size_t>(hi - lo + 1));
    for (Step t = lo; t <= hi; ++t) g.adjacency[j].push_back(t);
  }
  return g;
}

namespace {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// Hungarian method with potentials. `cost` is row-major. Returns the column of
// each row.
template <typename T>
std::vector<std::size_t> hungarian(const std::vector<T>& cost, std::size_t n, std::size_t cols) {
  std::vector<T> u(n + 1, T(0)), v(cols + 1, T(0)), minv(cols + 1, T(0));
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);  // match[col] = row (1-based), 0 = free
  std::vector<bool> used(cols + 1), has_min(cols + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t j0 = 0;
    std::fill(used.begin(), used.end(), false);
    std::fill(has_min.begin(), has_min.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      T delta(0);
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        T cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (!has_min[j] || cur < minv[j]) {
          minv[j] = std::move(cur);
          has_min[j] = true;
          way[j] = j0;
        }
        if (j1 == 0 || minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw InvariantViolation("hungarian: no free column");
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> column_of(n);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (match[j] != 0) column_of[match[j] - 1] = j - 1;
  }
  return column_of;
}

// Weights scaled to integers by the common denominator, if every potential
// the solver can reach stays far from overflow.
std::optional<std::vector<std::int64_t>> integer_weights(std::span<const Packet> packets) {
  constexpr std::int64_t kLimit = std::int64_t{1} << 40;
  std::int64_t scale = 1;
  for (const auto& p : packets) {
    if (!p.weight.is_small()) return std::nullopt;
    const std::int64_t den = p.weight.small_den();
    if (den > kLimit) return std::nullopt;
    scale = std::lcm(scale, den);
    if (scale > kLimit) return std::nullopt;
  }
  std::vector<std::int64_t> out;
  out.reserve(packets.size());
  std::int64_t total = 0;
  for (const auto& p : packets) {
    const __int128 w = static_cast<__int128>(p.weight.small_num()) * (scale / p.weight.small_den());
    if (w > kLimit) return std::nullopt;
    total += static_cast<std::int64_t>(w);
    if (total > kLimit) return std::nullopt;
    out.push_back(static_cast<std::int64_t>(w));
  }
  return out;
}

template <typename T>
std::vector<std::size_t> solve(const SchedulabilityGraph& g, const std::vector<T>& weights, Step t0,
                               std::size_t cols) {
  std::vector<T> cost(weights.size() * cols, T(0));
  for (std::size_t j = 0; j < weights.size(); ++j) {
    for (Step t : g.adjacency[j]) cost[j * cols + static_cast<std::size_t>(t - t0)] = -weights[j];
  }
  return hungarian(cost, weights.size(), cols);
}

}  // namespace

OptResult opt_schedule(std::span<const Packet> packets, Step t0) {
  OptResult result;
  if (packets.empty()) return result;
  Step last = t0 - 1;
  for (const auto& p : packets) last = std::max(last, p.deadline - 1);
  const SchedulabilityGraph g = build_graph(packets, t0, last);
  const std::size_t n = packets.size();
  const std::size_t steps = g.step_count();
  // A packet assigned to a non-adjacent column costs 0 and stays unscheduled,
  // so padding the steps up to n columns lets every vertex stay unmatched.
  const std::size_t cols = std::max(steps, n);
  std::vector<std::size_t> column_of;
  if (auto ints = integer_weights(packets)) {
    column_of = solve(g, *ints, t0, cols);
  } else {
    std::vector<Rational> weights;
    for (const auto& p : packets) weights.push_back(p.weight);
    column_of = solve(g, weights, t0, cols);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t c = column_of[j];
    const Step t = t0 + static_cast<Step>(c);
    if (c < steps && packets[j].pending_at(t)) result.schedule.assign(t, packets[j]);
  }
  result.value = result.schedule.weight();
  return result;
}

EH select_e_h(const Schedule& oblivious) {
  if (oblivious.empty()) throw InvariantViolation("select_e_h: empty oblivious schedule");
  auto slots = oblivious.slots();
  EH out{slots.front().packet, slots.front().packet};
  for (const auto& s : slots) {
    if (precedes(s.packet, out.e)) out.e = s.packet;
    if (s.packet.weight > out.h.weight || (s.packet.weight == out.h.weight && precedes(s.packet, out.h))) {
      out.h = s.packet;
    }
  }
  return out;
}

ObliviousSchedule make_oblivious(Schedule schedule, std::span<const Packet> pending, Step t) {
  ObliviousSchedule o;
  o.step = t;
  if (!schedule.empty()) {
    auto [e, h] = select_e_h(schedule);
    o.e = e;
    o.h = h;
  }
  for (const auto& p : pending) {
    if (!schedule.contains(p.arrival)) o.dominated.push_back(p);
  }
  o.schedule = std::move(schedule);
  return o;
}

void TwoBoundedOpt::add_step(std::span<const Packet> arrivals) {
  const Step t = step_ + 1;
  for (const auto& p : arrivals) {
    if (p.release != t) throw ValidationError("TwoBoundedOpt: arrival not released at step " + std::to_string(t));
    if (p.lifespan() != 1 && p.lifespan() != 2) throw ValidationError("TwoBoundedOpt: lifespan must be 1 or 2");
  }
  std::vector<State> next;
  auto offer = [&next](const Rational& carried, const Rational& value) {
    for (auto& s : next) {
      if (s.carried == carried) {
        if (value > s.value) s.value = value;
        return;
      }
    }
    next.push_back({carried, value});
  };
  for (const auto& s : states_) {
    // Send nothing or the carried packet, then carry any lifespan-2 arrival.
    for (const Rational& sent : {Rational(0), s.carried}) {
      offer(Rational(0), s.value + sent);
      for (const auto& q : arrivals) {
        if (q.lifespan() == 2) offer(q.weight, s.value + sent);
      }
    }
    // Send an arrival, carrying another lifespan-2 arrival or nothing.
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
      offer(Rational(0), s.value + arrivals[i].weight);
      for (std::size_t j = 0; j < arrivals.size(); ++j) {
        if (j != i && arrivals[j].lifespan() == 2) offer(arrivals[j].weight, s.value + arrivals[i].weight);
      }
    }
  }
  states_ = std::move(next);
  step_ = t;
}

Rational TwoBoundedOpt::value() const {
  Rational best(0);
  for (const auto& s : states_) best = std::max(best, s.value + s.carried);
  return best;
}

ObliviousSchedule oblivious_schedule(std::span<const Packet> pending, Step t) {
  if (pending.empty()) throw InvariantViolation("oblivious_schedule: empty buffer");
  std::vector<Packet> candidates(pending.begin(), pending.end());
  std::sort(candidates.begin(), candidates.end(), [](const Packet& a, const Packet& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return precedes(a, b);
  });
  // Kept deadlines stay sorted; the k-th (0-based) must be at least t + k + 1.
  std::vector<Packet> kept;
  std::vector<Step> deadlines;
  for (const auto& p : candidates) {
    if (!p.pending_at(t)) throw InvariantViolation("oblivious_schedule: packet not pending at step");
    auto pos = std::upper_bound(deadlines.begin(), deadlines.end(), p.deadline);
    const auto idx = static_cast<Step>(pos - deadlines.begin());
    bool ok = p.deadline >= t + idx + 1;
    for (auto it = pos; ok && it != deadlines.end(); ++it) {
      ok = *it >= t + static_cast<Step>(it - deadlines.begin()) + 2;
    }
    if (!ok) continue;
    deadlines.insert(pos, p.deadline);
    kept.push_back(p);
  }
  return make_oblivious(to_edf_schedule(kept, t), pending, t);
}

namespace {

// Mutable step -> packet assignment used while repairing a clairvoyant schedule.
struct Assignment {
  std::vector<std::pair<Step, Packet>> slots;

  std::optional<std::size_t> find_packet(PacketId id) const {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k].second.arrival == id) return k;
    }
    return std::nullopt;
  }
};

}  // namespace

ClairvoyantSchedule conforming_clairvoyant(std::span<const Packet> pending, std::span<const Packet> future, Step t,
                                           const ObliviousSchedule& o) {
  std::vector<Packet> universe(pending.begin(), pending.end());
  universe.insert(universe.end(), future.begin(), future.end());
  const OptResult opt = opt_schedule(universe, t);

  Assignment c;
  for (const auto& s : opt.schedule.slots()) c.slots.emplace_back(s.step, s.packet);

  auto is_pending = [t](const Packet& p) { return p.release <= t; };

  // Alternating-path repair: each round swaps one pending packet outside `o`
  // for a member of `o` of equal weight.
  for (;;) {
    std::optional<std::size_t> start;
    for (std::size_t k = 0; k < c.slots.size(); ++k) {
      const Packet& p = c.slots[k].second;
      if (is_pending(p) && !o.contains(p.arrival)) {
        start = k;
        break;
      }
    }
    if (!start) break;
    const Packet removed = c.slots[*start].second;
    std::vector<std::size_t> path;  // slot indices of c along the path
    std::size_t k = *start;
    Packet end;
    for (;;) {
      if (path.size() > c.slots.size()) throw InvariantViolation("alternating path does not terminate");
      path.push_back(k);
      const Packet* replacement = o.schedule.at(c.slots[k].first);
      if (replacement == nullptr) {
        throw InvariantViolation("odd alternating path: oblivious schedule is not optimal");
      }
      auto next = c.find_packet(replacement->arrival);
      if (!next) {
        end = *replacement;
        break;
      }
      k = *next;
    }
    if (end.weight != removed.weight) {
      throw InvariantViolation("alternating path endpoints differ in weight");
    }
    for (std::size_t idx : path) c.slots[idx].second = *o.schedule.at(c.slots[idx].first);
  }

  std::vector<Packet> chosen;
  chosen.reserve(c.slots.size());
  for (const auto& s : c.slots) chosen.push_back(s.second);
  Schedule ordered = to_edf_schedule_with_releases(chosen, t);

  const Packet* first = ordered.at(t);
  if (first == nullptr) {
    if (!o.schedule.empty()) throw InvariantViolation("clairvoyant schedule idles at a nonempty step");
    return {std::move(ordered)};
  }
  const Packet j = *first;
  std::optional<Packet> swap_in;
  for (const auto& s : o.schedule.slots()) {
    if (s.packet.weight == j.weight && (!swap_in || precedes(s.packet, *swap_in))) swap_in = s.packet;
  }
  if (!swap_in) throw InvariantViolation("first clairvoyant packet has no equal-weight oblivious member");
  if (swap_in->arrival == j.arrival) return {std::move(ordered)};

  Schedule result;
  for (const auto& s : ordered.slots()) result.assign(s.step, s.step == t ? *swap_in : s.packet);
  return {std::move(result)};
}

}  // namespace pktsched
