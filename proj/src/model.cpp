#include "pktsched/model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

#include "pktsched/errors.hpp"

namespace pktsched {

bool precedes(const Packet& i, const Packet& j) {
  if (i.deadline != j.deadline) return i.deadline < j.deadline;
  if (i.weight != j.weight) return i.weight > j.weight;
  return i.arrival < j.arrival;
}

Order order_cmp(const Packet& i, const Packet& j) { return precedes(i, j) ? Order::before : Order::after; }

Instance Instance::create(std::vector<PacketSpec> specs) {
  Instance inst;
  inst.packets_.reserve(specs.size());
  inst.labels_.reserve(specs.size());
  std::unordered_set<std::string> seen;
  Step last_release = 0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    auto& s = specs[k];
    const std::string where = ", entry " + std::to_string(k + 1);
    if (s.id.empty()) s.id = "p" + std::to_string(k);
    if (!seen.insert(s.id).second) throw ValidationError("duplicate id '" + s.id + "'" + where);
    if (s.release < 1) throw ValidationError("release must be >= 1" + where);
    if (s.deadline <= s.release) throw ValidationError("empty lifespan" + where);
    if (s.weight.sign() <= 0) throw ValidationError("non-positive weight" + where);
    if (s.release < last_release) throw ValidationError("arrivals out of release order" + where);
    if (k > std::numeric_limits<PacketId>::max()) throw ValidationError("too many packets");
    last_release = s.release;
    inst.packets_.push_back(Packet{s.release, s.deadline, s.weight, static_cast<PacketId>(k)});
    inst.labels_.push_back(std::move(s.id));
    inst.horizon_ = std::max(inst.horizon_, s.deadline - 1);
  }
  inst.agreeable_ = is_agreeable(inst.packets_);
  return inst;
}

Step Instance::first_release() const { return packets_.empty() ? 1 : packets_.front().release; }

std::span<const Packet> Instance::arrivals_at(Step t) const {
  auto lo = std::lower_bound(packets_.begin(), packets_.end(), t,
                             [](const Packet& p, Step v) { return p.release < v; });
  auto hi = std::upper_bound(lo, packets_.end(), t, [](Step v, const Packet& p) { return v < p.release; });
  return {lo, hi};
}

std::vector<Packet> Instance::released_after(Step t) const {
  auto lo = std::upper_bound(packets_.begin(), packets_.end(), t,
                             [](Step v, const Packet& p) { return v < p.release; });
  return {lo, packets_.end()};
}

std::vector<PacketSpec> Instance::specs() const {
  std::vector<PacketSpec> out;
  out.reserve(packets_.size());
  for (const auto& p : packets_) out.push_back({labels_[p.arrival], p.release, p.deadline, p.weight});
  return out;
}

bool is_agreeable(std::span<const Packet> packets) {
  std::vector<std::pair<Step, Step>> rd;
  rd.reserve(packets.size());
  for (const auto& p : packets) rd.emplace_back(p.release, p.deadline);
  std::sort(rd.begin(), rd.end());
  // Max deadline over strictly earlier releases must not exceed any later deadline.
  Step earlier_max = std::numeric_limits<Step>::min();
  std::size_t k = 0;
  while (k < rd.size()) {
    std::size_t group_end = k;
    Step group_max = rd[k].second;
    while (group_end < rd.size() && rd[group_end].first == rd[k].first) {
      if (rd[group_end].second < earlier_max) return false;
      group_max = std::max(group_max, rd[group_end].second);
      ++group_end;
    }
    earlier_max = std::max(earlier_max, group_max);
    k = group_end;
  }
  return true;
}

void Schedule::assign(Step step, const Packet& packet) {
  for (const auto& s : slots_) {
    if (s.step == step) throw InvariantViolation("step " + std::to_string(step) + " assigned twice");
    if (s.packet.arrival == packet.arrival) throw InvariantViolation("packet scheduled twice");
  }
  auto pos = std::upper_bound(slots_.begin(), slots_.end(), step,
                              [](Step v, const Slot& s) { return v < s.step; });
  slots_.insert(pos, Slot{step, packet});
}

const Packet* Schedule::at(Step step) const {
  auto it = std::lower_bound(slots_.begin(), slots_.end(), step,
                             [](const Slot& s, Step v) { return s.step < v; });
  if (it == slots_.end() || it->step != step) return nullptr;
  return &it->packet;
}

std::optional<Step> Schedule::step_of(PacketId id) const {
  for (const auto& s : slots_) {
    if (s.packet.arrival == id) return s.step;
  }
  return std::nullopt;
}

std::vector<Packet> Schedule::packets() const {
  std::vector<Packet> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.packet);
  return out;
}

Rational Schedule::weight() const {
  Rational sum;
  for (const auto& s : slots_) sum += s.packet.weight;
  return sum;
}

bool Schedule::feasible() const {
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (!slots_[k].packet.pending_at(slots_[k].step)) return false;
    if (k > 0 && slots_[k - 1].step == slots_[k].step) return false;
    for (std::size_t m = 0; m < k; ++m) {
      if (slots_[m].packet.arrival == slots_[k].packet.arrival) return false;
    }
  }
  return true;
}

Buffer advance_buffer(const Buffer& buf, Step t, std::span<const Packet> arrivals) {
  if (t != buf.current_step + 1) {
    throw ValidationError("buffer advanced from step " + std::to_string(buf.current_step) + " to " +
                          std::to_string(t));
  }
  Buffer next;
  next.current_step = t;
  next.pending.reserve(buf.pending.size() + arrivals.size());
  for (const auto& p : buf.pending) {
    if (p.deadline > t) next.pending.push_back(p);
  }
  for (const auto& p : arrivals) {
    if (p.release != t) {
      throw ValidationError("malformed instance: packet with release " + std::to_string(p.release) +
                            " arrived at step " + std::to_string(t));
    }
    next.pending.push_back(p);
  }
  return next;
}

void remove_pending(Buffer& buf, PacketId id) {
  auto it = std::find_if(buf.pending.begin(), buf.pending.end(), [id](const Packet& p) { return p.arrival == id; });
  if (it == buf.pending.end()) throw InvariantViolation("transmitted packet is not pending");
  buf.pending.erase(it);
}

bool is_feasible_set(std::span<const Packet> packets, Step t0) {
  std::vector<Step> deadlines;
  deadlines.reserve(packets.size());
  for (const auto& p : packets) deadlines.push_back(p.deadline);
  std::sort(deadlines.begin(), deadlines.end());
  for (std::size_t k = 0; k < deadlines.size(); ++k) {
    if (deadlines[k] < t0 + static_cast<Step>(k) + 1) return false;
  }
  return true;
}

Schedule to_edf_schedule(std::span<const Packet> packets, Step t0) {
  std::vector<Packet> sorted(packets.begin(), packets.end());
  std::sort(sorted.begin(), sorted.end(), ByOrder{});
  Schedule s;
  Step t = t0;
  for (const auto& p : sorted) {
    if (p.deadline <= t) throw InvariantViolation("to_edf_schedule: infeasible packet set");
    s.assign(t++, p);
  }
  return s;
}

Schedule to_edf_schedule_with_releases(std::span<const Packet> packets, Step t0) {
  std::vector<Packet> by_release(packets.begin(), packets.end());
  std::sort(by_release.begin(), by_release.end(),
            [](const Packet& a, const Packet& b) { return a.release < b.release; });
  std::set<Packet, ByOrder> ready;
  Schedule s;
  std::size_t next = 0;
  Step t = t0;
  while (next < by_release.size() || !ready.empty()) {
    if (ready.empty() && by_release[next].release > t) t = by_release[next].release;
    while (next < by_release.size() && by_release[next].release <= t) ready.insert(by_release[next++]);
    auto first = ready.begin();
    if (first->deadline <= t) throw InvariantViolation("edf with releases: packet misses its deadline");
    s.assign(t, *first);
    ready.erase(first);
    ++t;
  }
  return s;
}

bool is_order_schedule(const Schedule& s) {
  if (!s.feasible()) return false;
  auto slots = s.slots();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Step t = slots[k].step;
    for (std::size_t m = k + 1; m < slots.size(); ++m) {
      const Packet& later = slots[m].packet;
      if (later.release <= t && precedes(later, slots[k].packet)) return false;
    }
    // No idling while some scheduled packet is already released.
    if (k + 1 < slots.size()) {
      const Step gap_end = slots[k + 1].step;
      for (std::size_t m = k + 1; m < slots.size(); ++m) {
        if (slots[m].packet.release <= t + 1 && t + 1 < gap_end) return false;
      }
    }
  }
  return true;
}

Rational total_weight(std::span<const Packet> packets) {
  Rational sum;
  for (const auto& p : packets) sum += p.weight;
  return sum;
}

}  // namespace pktsched
