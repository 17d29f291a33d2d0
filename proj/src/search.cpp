#include <algorithm>
#include <thread>

#include "pktsched/analysis.hpp"
#include "pktsched/errors.hpp"
#include "pktsched/offline.hpp"

namespace pktsched {
namespace {

struct PacketType {
  Step lifespan;
  Rational weight;
};

using Injection = std::vector<std::size_t>;  // indices into the type table, nondecreasing

struct Branch {
  std::vector<Packet> pending;
  Rational probability;
};

struct GameState {
  std::vector<Packet> packets;
  std::vector<std::uint32_t> path;  // chosen injection per step
  Step step = 0;
  std::vector<Branch> dist{Branch{{}, Rational(1)}};
  Rational gain;
  TwoBoundedOpt opt;
};

struct Best {
  Rational ratio;
  std::vector<std::uint32_t> path;
  std::vector<Packet> packets;

  bool beaten_by(const Rational& r, const std::vector<std::uint32_t>& p) const {
    return r > ratio || (r == ratio && p < path);
  }
};

void merge_best(std::optional<Best>& into, const std::optional<Best>& other) {
  if (!other) return;
  if (!into || into->beaten_by(other->ratio, other->path)) into = other;
}

std::vector<PacketId> key_of(const std::vector<Packet>& pending) {
  std::vector<PacketId> key;
  key.reserve(pending.size());
  for (const auto& p : pending) key.push_back(p.arrival);
  std::sort(key.begin(), key.end());
  return key;
}

class Game {
 public:
  explicit Game(const SearchOptions& opt) : opt_(opt) {
    if (opt.depth < 1) throw ValidationError("search depth must be >= 1");
    if (opt.menu.empty()) throw ValidationError("weight menu is empty");
    if (opt.branching < 1) throw ValidationError("branching must be >= 1");
    for (const auto& w : opt.menu) {
      if (w.sign() <= 0) throw ValidationError("weight menu has a non-positive weight");
    }
    for (Step life : {Step{1}, Step{2}}) {
      for (const auto& w : opt.menu) types_.push_back({life, w});
    }
    Injection current;
    enumerate_injections(0, current);
  }

  const std::vector<Injection>& injections() const { return injections_; }

  /// Injects option `index` at the next step and lets the policy act.
  /// Returns false when the buffer distribution outgrows the cap.
  bool advance(GameState& s, std::uint32_t index) const {
    const Step t = s.step + 1;
    const std::size_t first_new = s.packets.size();
    for (std::size_t type : injections_[index]) {
      const auto id = static_cast<PacketId>(s.packets.size());
      s.packets.push_back(Packet{t, t + types_[type].lifespan, types_[type].weight, id});
    }
    s.path.push_back(index);
    std::span<const Packet> arrivals(s.packets.data() + first_new, s.packets.size() - first_new);
    s.opt.add_step(arrivals);
    return step(s, arrivals);
  }

  /// Ratio if the adversary stops injecting now.
  Rational stop_ratio(const GameState& s) const {
    GameState tail = s;
    while (std::any_of(tail.dist.begin(), tail.dist.end(), [](const Branch& b) { return !b.pending.empty(); })) {
      if (!step(tail, {})) throw CapExceeded("buffer distribution outgrew the cap");
    }
    return gain_ratio(s.opt.value(), tail.gain);
  }

 private:
  void enumerate_injections(std::size_t min_type, Injection& current) {
    injections_.push_back(current);
    if (current.size() == static_cast<std::size_t>(opt_.branching)) return;
    for (std::size_t type = min_type; type < types_.size(); ++type) {
      current.push_back(type);
      enumerate_injections(type, current);
      current.pop_back();
    }
  }

  bool step(GameState& s, std::span<const Packet> arrivals) const {
    const Step t = s.step + 1;
    std::vector<Branch> next;
    for (auto& b : s.dist) {
      Buffer buf = advance_buffer(Buffer{std::move(b.pending), t - 1}, t, arrivals);
      if (buf.pending.empty()) {
        next.push_back({{}, b.probability});
        continue;
      }
      const ObliviousSchedule o = oblivious_schedule(buf.pending, t);
      const PolicyDecision d = decide(opt_.policy, o);
      for (const auto& ticket : d.tickets()) {
        const Rational p = b.probability * ticket.probability;
        s.gain += p * ticket.packet.weight;
        Branch child{{}, p};
        child.pending.reserve(buf.pending.size());
        for (const auto& q : buf.pending) {
          if (q.arrival != ticket.packet.arrival && q.deadline > t + 1) child.pending.push_back(q);
        }
        next.push_back(std::move(child));
      }
    }
    s.step = t;
    if (next.size() > 1) {
      std::vector<std::pair<std::vector<PacketId>, std::size_t>> keyed;
      keyed.reserve(next.size());
      for (std::size_t k = 0; k < next.size(); ++k) keyed.emplace_back(key_of(next[k].pending), k);
      std::sort(keyed.begin(), keyed.end());
      std::vector<Branch> merged;
      for (std::size_t k = 0; k < keyed.size(); ++k) {
        if (k > 0 && keyed[k].first == keyed[k - 1].first) {
          merged.back().probability += next[keyed[k].second].probability;
        } else {
          merged.push_back(std::move(next[keyed[k].second]));
        }
      }
      next = std::move(merged);
    }
    s.dist = std::move(next);
    return s.dist.size() <= opt_.exact_cap;
  }

  const SearchOptions& opt_;
  std::vector<PacketType> types_;
  std::vector<Injection> injections_;  // index 0 is the empty injection
};

struct WorkerResult {
  std::optional<Best> best;
  std::uint64_t nodes = 0;
  bool partial = false;
};

class Explorer {
 public:
  Explorer(const Game& game, const SearchOptions& opt, std::uint64_t budget)
      : game_(game), opt_(opt), budget_(budget) {}

  void dfs(const GameState& s, int level) {
    if (budget_ != 0 && out.nodes >= budget_) {
      out.partial = true;
      return;
    }
    ++out.nodes;
    if (level == opt_.depth) {
      consider(s);
      return;
    }
    const auto count = static_cast<std::uint32_t>(game_.injections().size());
    for (std::uint32_t i = 0; i < count; ++i) {
      GameState child = s;
      if (!game_.advance(child, i)) {
        out.partial = true;
        continue;
      }
      dfs(child, level + 1);
    }
  }

  void consider(const GameState& s) {
    Rational r;
    try {
      r = game_.stop_ratio(s);
    } catch (const CapExceeded&) {
      out.partial = true;
      return;
    }
    if (!out.best || out.best->beaten_by(r, s.path)) out.best = Best{r, s.path, s.packets};
  }

  WorkerResult out;

 private:
  const Game& game_;
  const SearchOptions& opt_;
  std::uint64_t budget_;
};

Instance witness_instance(const std::vector<Packet>& packets) {
  std::vector<PacketSpec> specs;
  specs.reserve(packets.size());
  for (const auto& p : packets) specs.push_back({"a" + std::to_string(p.arrival), p.release, p.deadline, p.weight});
  return Instance::create(std::move(specs));
}

WorkerResult exhaustive(const Game& game, const SearchOptions& opt) {
  // Subtrees are keyed by the first injection; an empty first step only
  // shifts a shorter instance in time, so it is skipped.
  const auto first_count = static_cast<std::uint32_t>(game.injections().size());
  const std::uint64_t per_subtree = opt.node_budget == 0 ? 0 : std::max<std::uint64_t>(1, opt.node_budget / (first_count - 1));
  std::vector<WorkerResult> results(first_count);
  auto run_subtree = [&](std::uint32_t i) {
    Explorer ex(game, opt, per_subtree);
    GameState root;
    if (!game.advance(root, i)) {
      ex.out.partial = true;
    } else {
      ex.dfs(root, 1);
    }
    results[i] = std::move(ex.out);
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    for (std::uint32_t i = 1; i < first_count; ++i) run_subtree(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint32_t i = 1 + w; i < first_count; i += jobs) run_subtree(i);
      });
    }
  }
  WorkerResult total;
  for (const auto& r : results) {
    merge_best(total.best, r.best);
    total.nodes += r.nodes;
    total.partial = total.partial || r.partial;
  }
  return total;
}

WorkerResult beam(const Game& game, const SearchOptions& opt) {
  struct Scored {
    Rational score;
    GameState state;
  };
  WorkerResult out;
  std::vector<GameState> frontier(1);
  for (int level = 0; level < opt.depth && !frontier.empty(); ++level) {
    std::vector<Scored> children;
    for (const auto& parent : frontier) {
      const auto count = static_cast<std::uint32_t>(game.injections().size());
      for (std::uint32_t i = level == 0 ? 1 : 0; i < count; ++i) {
        if (opt.node_budget != 0 && out.nodes >= opt.node_budget) {
          out.partial = true;
          break;
        }
        ++out.nodes;
        GameState child = parent;
        if (!game.advance(child, i)) {
          out.partial = true;
          continue;
        }
        Rational r;
        try {
          r = game.stop_ratio(child);
        } catch (const CapExceeded&) {
          out.partial = true;
          continue;
        }
        if (!out.best || out.best->beaten_by(r, child.path)) out.best = Best{r, child.path, child.packets};
        children.push_back({r, std::move(child)});
      }
    }
    std::sort(children.begin(), children.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.state.path < b.state.path;
    });
    if (children.size() > opt.beam_width) children.resize(opt.beam_width);
    frontier.clear();
    for (auto& c : children) frontier.push_back(std::move(c.state));
  }
  return out;
}

}  // namespace

SearchResult adversary_search(const SearchOptions& options) {
  const Game game(options);
  WorkerResult r = options.beam_width == 0 ? exhaustive(game, options) : beam(game, options);
  SearchResult result;
  result.policy = options.policy;
  result.nodes = r.nodes;
  result.partial = r.partial;
  if (r.best) {
    result.ratio = r.best->ratio;
    result.witness = witness_instance(r.best->packets);
  }
  return result;
}

}  // namespace pktsched
