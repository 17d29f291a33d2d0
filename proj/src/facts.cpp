#include <algorithm>
#include <sstream>

#include "pktsched/analysis.hpp"
#include "pktsched/errors.hpp"

namespace pktsched {

bool FactsReport::passed() const {
  return std::all_of(steps.begin(), steps.end(), [](const StepFacts& s) { return s.passed(); });
}

std::size_t FactsReport::failures() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const StepFacts& s) { return !s.passed(); }));
}

ObliviousMutation drop_packet_mutation(Step at, std::size_t position) {
  return [at, position](const ObliviousSchedule& o, std::span<const Packet> pending) {
    if (o.step != at || o.schedule.empty()) return o;
    const auto slots = o.schedule.slots();
    const std::size_t victim = position % slots.size();
    Schedule kept;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (k != victim) kept.assign(slots[k].step, slots[k].packet);
    }
    return make_oblivious(std::move(kept), pending, o.step);
  };
}

namespace {

bool in(std::span<const Packet> set, PacketId id) {
  return std::any_of(set.begin(), set.end(), [id](const Packet& p) { return p.arrival == id; });
}

// O_t must be an optimal order-schedule of the buffer on consecutive steps
// from t, with e, h and the dominated set derived from it.
bool oblivious_is_optimal(const ObliviousSchedule& o, std::span<const Packet> pending, Step t, std::string& why) {
  const auto slots = o.schedule.slots();
  if (slots.empty()) {
    why = "empty oblivious schedule for a nonempty buffer";
    return false;
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Packet& p = slots[k].packet;
    if (slots[k].step != t + static_cast<Step>(k) || !in(pending, p.arrival) || !p.pending_at(slots[k].step)) {
      why = "oblivious schedule is not a feasible layout from step t";
      return false;
    }
    if (k > 0 && !precedes(slots[k - 1].packet, p)) {
      why = "oblivious schedule is out of order";
      return false;
    }
  }
  if (o.schedule.weight() != opt_schedule(pending, t).value) {
    why = "oblivious schedule weight is below the optimum";
    return false;
  }
  const EH eh = select_e_h(o.schedule);
  if (!(o.e == eh.e) || !(o.h == eh.h)) {
    why = "e/h do not match the schedule";
    return false;
  }
  if (o.dominated.size() + slots.size() != pending.size()) {
    why = "dominated set does not complement the schedule";
    return false;
  }
  for (const auto& p : o.dominated) {
    if (o.contains(p.arrival) || !in(pending, p.arrival)) {
      why = "dominated set does not complement the schedule";
      return false;
    }
  }
  return true;
}

// Pending part first (keeping relative order), then h moved to the front,
// laid out greedily from t.
bool reordering_holds(const Schedule& c, const ObliviousSchedule& o, Step t, std::string& why) {
  std::vector<Packet> seq = c.packets();
  std::stable_partition(seq.begin(), seq.end(), [t](const Packet& p) { return p.release <= t; });
  auto h_pos = std::find(seq.begin(), seq.end(), o.h);
  if (h_pos == seq.end()) {
    why = "h missing from the clairvoyant schedule";
    return false;
  }
  std::rotate(seq.begin(), h_pos, h_pos + 1);
  Schedule moved;
  Step prev = t - 1;
  for (const auto& p : seq) {
    const Step at = std::max(prev + 1, p.release);
    if (at >= p.deadline) {
      why = "moving h to the front makes a packet miss its deadline";
      return false;
    }
    moved.assign(at, p);
    prev = at;
  }
  const Packet* first = moved.at(t);
  if (first == nullptr || !(*first == o.h) || moved.weight() != c.weight() || !moved.feasible()) {
    why = "reordered schedule does not start with h at equal weight";
    return false;
  }
  return true;
}

StepFacts check_step(std::span<const Packet> pending, std::span<const Packet> future, Step t,
                     const ObliviousSchedule& o) {
  StepFacts f;
  f.step = t;
  std::string why;
  f.oblivious_optimal = oblivious_is_optimal(o, pending, t, why);
  std::ostringstream detail;
  if (!why.empty()) detail << why << "; ";

  Schedule c;
  try {
    c = conforming_clairvoyant(pending, future, t, o).schedule;
  } catch (const InvariantViolation& ex) {
    f.containment = f.first_packet = f.monotone = false;
    detail << "conforming schedule: " << ex.what();
    f.detail = detail.str();
    return f;
  }

  std::vector<Packet> universe(pending.begin(), pending.end());
  universe.insert(universe.end(), future.begin(), future.end());
  const bool optimal = c.weight() == opt_schedule(universe, t).value;
  const bool order_schedule = is_order_schedule(c) && (c.empty() || c.slots().front().step >= t);
  bool inside = true;
  for (const auto& s : c.slots()) {
    if (s.packet.release <= t && !o.contains(s.packet.arrival)) inside = false;
  }
  f.containment = optimal && order_schedule && inside;
  if (!f.containment) detail << "clairvoyant schedule not optimal/ordered/contained; ";

  const Packet* first = c.at(t);
  if (first == nullptr) {
    f.first_packet = false;
    detail << "clairvoyant schedule idles at step t; ";
  } else {
    for (const auto& s : o.schedule.slots()) {
      if (precedes(s.packet, *first) && !(s.packet.weight < first->weight)) f.first_packet = false;
    }
    if (!f.first_packet) detail << "an order-earlier oblivious member is not lighter than C(t); ";
  }

  const auto members = o.schedule.slots();
  for (const auto& i : members) {
    for (const auto& j : members) {
      if (i.packet.weight < j.packet.weight && precedes(i.packet, j.packet) && c.contains(i.packet.arrival) &&
          !c.contains(j.packet.arrival)) {
        f.monotone = false;
      }
    }
  }
  if (!f.monotone) detail << "lighter earlier member scheduled without the heavier later one; ";

  if (!o.schedule.empty() && !c.contains(o.e.arrival)) {
    f.reordering_applicable = true;
    std::string reorder_why;
    f.reordering = reordering_holds(c, o, t, reorder_why);
    if (!f.reordering) detail << reorder_why << "; ";
  }
  f.detail = detail.str();
  return f;
}

}  // namespace

FactsReport check_facts(const Instance& inst, const FactsOptions& options) {
  if (!inst.agreeable()) throw ValidationError("check_facts requires agreeable deadlines");
  FactsReport report;
  Buffer buf;
  buf.current_step = inst.first_release() - 1;
  for (Step t = inst.first_release(); t <= inst.horizon(); ++t) {
    buf = advance_buffer(buf, t, inst.arrivals_at(t));
    if (buf.pending.empty()) continue;
    const ObliviousSchedule o = oblivious_schedule(buf.pending, t);
    const std::vector<Packet> future = inst.released_after(t);
    const ObliviousSchedule checked = options.mutate ? options.mutate(o, buf.pending) : o;
    report.steps.push_back(check_step(buf.pending, future, t, checked));
    remove_pending(buf, mg_prime_choose(o).arrival);
  }
  return report;
}

}  // namespace pktsched
