#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pktsched/rational.hpp"

namespace pktsched {

/// 1-based time step. A packet with deadline d may be sent at steps < d.
using Step = std::int64_t;

/// Identity of a packet inside its instance: its global arrival index.
using PacketId = std::uint32_t;

struct Packet {
  Step release = 1;
  Step deadline = 2;
  Rational weight{1};
  PacketId arrival = 0;

  bool pending_at(Step t) const { return release <= t && t < deadline; }
  Step lifespan() const { return deadline - release; }

  friend bool operator==(const Packet& a, const Packet& b) { return a.arrival == b.arrival; }
};

enum class Order { before, after };

/// The deadline-first linear order: earlier deadline, then heavier, then
/// earlier arrival.
bool precedes(const Packet& i, const Packet& j);
Order order_cmp(const Packet& i, const Packet& j);

/// Comparator functor for std::sort and friends.
struct ByOrder {
  bool operator()(const Packet& i, const Packet& j) const { return precedes(i, j); }
};

/// Unvalidated packet description, as read from a file or built in code.
struct PacketSpec {
  std::string id;
  Step release = 1;
  Step deadline = 2;
  Rational weight{1};
};

/// Arrival-ordered packet list. Packets are numbered 0..n-1 in arrival order
/// and that number is their arrival index.
class Instance {
 public:
  Instance() = default;

  /// Validates every packet and assigns arrival indices in list order.
  /// Throws ValidationError naming the offending (1-based) entry.
  static Instance create(std::vector<PacketSpec> specs);

  std::span<const Packet> packets() const { return packets_; }
  const Packet& packet(PacketId id) const { return packets_.at(id); }
  const std::string& label(PacketId id) const { return labels_.at(id); }
  std::size_t size() const { return packets_.size(); }
  bool empty() const { return packets_.empty(); }

  /// Last usable step (max deadline - 1); 0 for the empty instance.
  Step horizon() const { return horizon_; }
  /// Earliest release; 1 for the empty instance.
  Step first_release() const;
  bool agreeable() const { return agreeable_; }

  /// Packets released exactly at step t, in arrival order.
  std::span<const Packet> arrivals_at(Step t) const;
  /// Packets with release > t.
  std::vector<Packet> released_after(Step t) const;

  std::vector<PacketSpec> specs() const;

 private:
  std::vector<Packet> packets_;
  std::vector<std::string> labels_;
  Step horizon_ = 0;
  bool agreeable_ = true;
};

/// r_i < r_j implies d_i <= d_j for every pair.
bool is_agreeable(std::span<const Packet> packets);
inline bool is_agreeable(const Instance& inst) { return inst.agreeable(); }

struct Slot {
  Step step;
  Packet packet;
};

/// Partial injective map from steps to packets, kept sorted by step.
class Schedule {
 public:
  Schedule() = default;

  /// Throws InvariantViolation if the step or packet is already used.
  void assign(Step step, const Packet& packet);

  std::span<const Slot> slots() const { return slots_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

  const Packet* at(Step step) const;
  std::optional<Step> step_of(PacketId id) const;
  bool contains(PacketId id) const { return step_of(id).has_value(); }

  /// Packets in step order.
  std::vector<Packet> packets() const;
  Rational weight() const;

  /// Every slot satisfies r <= step < d and no packet repeats.
  bool feasible() const;

 private:
  std::vector<Slot> slots_;
};

struct Buffer {
  std::vector<Packet> pending;
  Step current_step = 0;
};

/// Moves the buffer to step t: drops packets with d <= t and adds arrivals.
/// Throws ValidationError if t is not the next step or an arrival has r != t.
Buffer advance_buffer(const Buffer& buf, Step t, std::span<const Packet> arrivals);

/// Removes a transmitted packet. Throws InvariantViolation if it is absent.
void remove_pending(Buffer& buf, PacketId id);

/// Whether the packets fit into distinct steps t0, t0+1, ... before their
/// deadlines (release times ignored).
bool is_feasible_set(std::span<const Packet> packets, Step t0);

/// The unique deadline-order schedule of a feasible set on consecutive steps
/// from t0. Throws InvariantViolation if the set is infeasible.
Schedule to_edf_schedule(std::span<const Packet> packets, Step t0);

/// Release-aware variant: at every step from t0 on, sends the order-minimal
/// released packet of the set. Throws InvariantViolation if a packet misses
/// its deadline, which happens exactly when the set has no feasible schedule.
Schedule to_edf_schedule_with_releases(std::span<const Packet> packets, Step t0);

/// Whether the schedule sends, at each occupied step, the order-minimal packet
/// among its own packets that are released and unsent by then.
bool is_order_schedule(const Schedule& s);

Rational total_weight(std::span<const Packet> packets);

}  // namespace pktsched
