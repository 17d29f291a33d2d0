#pragma once

#include <span>
#include <vector>

#include "pktsched/model.hpp"

namespace pktsched {

/// Bipartite graph between packets and the steps first_step..last_step; packet
/// j is adjacent to step t iff r_j <= t < d_j, with edge weight w_j.
struct SchedulabilityGraph {
  struct Edge {
    std::size_t packet;  // position in `packets`
    Step step;
  };

  std::vector<Packet> packets;
  Step first_step = 1;
  Step last_step = 0;
  std::vector<std::vector<Step>> adjacency;  // per packet, ascending

  std::vector<Edge> edges() const;
  std::size_t step_count() const { return last_step >= first_step ? static_cast<std::size_t>(last_step - first_step + 1) : 0; }
};

SchedulabilityGraph build_graph(std::span<const Packet> packets, Step t0, Step t1);

struct OptResult {
  Schedule schedule;
  Rational value;
};

/// Maximum-weight schedule of the packets over steps t0..(max deadline - 1),
/// computed as a maximum-weight matching of the schedulability graph with
/// the Hungarian method. Packets and steps may stay unmatched.
OptResult opt_schedule(std::span<const Packet> packets, Step t0);

/// Offline optimum of a 2-bounded instance fed one step at a time. After a
/// step at most one lifespan-2 packet can still be scheduled, so the state is
/// the weight of that packet (zero for none) with the best value so far.
class TwoBoundedOpt {
 public:
  /// Packets released at the next step; each lifespan must be 1 or 2.
  void add_step(std::span<const Packet> arrivals);
  Rational value() const;
  Step step() const { return step_; }

 private:
  struct State {
    Rational carried;
    Rational value;
  };
  Step step_ = 0;
  std::vector<State> states_{State{}};
};

/// The canonical oblivious schedule at step t.
struct ObliviousSchedule {
  Step step = 1;
  Schedule schedule;  // order-schedule on consecutive steps from `step`
  Packet e;           // schedule(step)
  Packet h;           // order-minimal among the heaviest scheduled packets
  std::vector<Packet> dominated;

  std::vector<Packet> members() const { return schedule.packets(); }
  bool contains(PacketId id) const { return schedule.contains(id); }
};

/// Greedy by weight (ties by the order) keeping a packet iff the kept set
/// stays feasible at t, then laid out in order from t. Pending must be
/// nonempty and every packet pending at t.
ObliviousSchedule oblivious_schedule(std::span<const Packet> pending, Step t);

/// Builds an ObliviousSchedule around an arbitrary schedule: e, h and the
/// dominated set are derived from it. Used to inject corrupted schedules.
ObliviousSchedule make_oblivious(Schedule schedule, std::span<const Packet> pending, Step t);

struct EH {
  Packet e;
  Packet h;
};

/// Throws InvariantViolation on an empty schedule.
EH select_e_h(const Schedule& oblivious);
inline EH select_e_h(const ObliviousSchedule& o) { return select_e_h(o.schedule); }

struct ClairvoyantSchedule {
  Schedule schedule;
};

/// A clairvoyant schedule conforming with `o`: an optimal order-schedule over
/// pending plus future packets whose already-pending part lies inside `o` and
/// whose first packet outweighs every order-earlier member of `o`.
/// Throws InvariantViolation when the construction breaks down, which can
/// only happen if `o` is not an optimal oblivious schedule.
ClairvoyantSchedule conforming_clairvoyant(std::span<const Packet> pending, std::span<const Packet> future, Step t,
                                           const ObliviousSchedule& o);

}  // namespace pktsched
