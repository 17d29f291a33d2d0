#include <algorithm>

#include "pktsched/analysis.hpp"
#include "pktsched/errors.hpp"
#include "pktsched/random.hpp"

namespace pktsched {

Rational competitive_ratio(const Instance& inst, PolicyKind policy, std::uint64_t exact_cap) {
  const Rational opt = instance_opt(inst);
  if (policy == PolicyKind::rg) {
    ExactOptions options;
    options.leaf_cap = exact_cap;
    return gain_ratio(opt, run_rg_exact(inst, options).expected_gain);
  }
  return gain_ratio(opt, policy_gain(inst, policy));
}

Family parse_family(std::string_view name) {
  if (name == "agreeable-random") return Family::agreeable_random;
  if (name == "two-bounded") return Family::two_bounded;
  if (name == "s-uniform") return Family::s_uniform;
  if (name == "golden-chain") return Family::golden_chain;
  throw ValidationError("unknown family '" + std::string(name) + "'");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::agreeable_random: return "agreeable-random";
    case Family::two_bounded: return "two-bounded";
    case Family::s_uniform: return "s-uniform";
    case Family::golden_chain: return "golden-chain";
  }
  return "?";
}

Instance golden_chain(int k, const Rational& g) {
  if (k < 2) throw ValidationError("golden_chain: k must be >= 2");
  if (g.sign() <= 0) throw ValidationError("golden_chain: ratio must be positive");
  std::vector<PacketSpec> specs;
  Rational tight(1);
  for (int t = 1; t <= k; ++t) {
    const Rational flexible = tight * g;
    specs.push_back({"tight" + std::to_string(t), t, t + 1, tight});
    specs.push_back({"flex" + std::to_string(t), t, t + 2, flexible});
    tight = flexible;
  }
  return Instance::create(std::move(specs));
}

namespace {

std::vector<Rational> weight_grid(const GeneratorSpec& spec) {
  if (spec.geometric_ratio) {
    if (spec.geometric_ratio->sign() <= 0 || spec.geometric_levels < 1) {
      throw ValidationError("geometric weights need a positive ratio and at least one level");
    }
    std::vector<Rational> out;
    Rational w(1);
    for (int k = 0; k < spec.geometric_levels; ++k) {
      out.push_back(w);
      w *= *spec.geometric_ratio;
    }
    return out;
  }
  if (spec.weights.empty()) throw ValidationError("weight grid is empty");
  for (const auto& w : spec.weights) {
    if (w.sign() <= 0) throw ValidationError("weight grid has a non-positive weight");
  }
  return spec.weights;
}

void check_family(const Instance& inst, const GeneratorSpec& spec) {
  if (!inst.agreeable()) throw InvariantViolation("generator emitted a non-agreeable instance");
  for (const auto& p : inst.packets()) {
    if (spec.family == Family::two_bounded && (p.lifespan() < 1 || p.lifespan() > 2)) {
      throw InvariantViolation("two-bounded generator emitted lifespan " + std::to_string(p.lifespan()));
    }
    if (spec.family == Family::s_uniform && p.lifespan() != spec.s) {
      throw InvariantViolation("s-uniform generator emitted lifespan " + std::to_string(p.lifespan()));
    }
  }
}

}  // namespace

Instance generate(const GeneratorSpec& spec) {
  if (spec.family == Family::golden_chain) {
    Instance inst = golden_chain(spec.chain_length, spec.chain_ratio);
    check_family(inst, spec);
    return inst;
  }
  if (spec.steps < 1) throw ValidationError("steps must be >= 1");
  if (spec.packets_per_step < 1) throw ValidationError("packets per step must be >= 1");
  if (spec.family == Family::s_uniform && spec.s < 1) throw ValidationError("s must be >= 1");
  if (spec.family == Family::agreeable_random && spec.max_lifespan < 1) {
    throw ValidationError("max lifespan must be >= 1");
  }
  const std::vector<Rational> grid = weight_grid(spec);

  std::mt19937_64 rng(spec.seed);
  std::vector<PacketSpec> specs;
  Step earlier_max_deadline = 0;
  for (Step t = 1; t <= spec.steps; ++t) {
    const auto count = uniform_below(rng, static_cast<std::uint64_t>(spec.packets_per_step) + 1);
    Step step_max = earlier_max_deadline;
    for (std::uint64_t k = 0; k < count; ++k) {
      Step d = t + 1;
      switch (spec.family) {
        case Family::two_bounded:
          d = t + 1 + static_cast<Step>(uniform_below(rng, 2));
          break;
        case Family::s_uniform:
          d = t + spec.s;
          break;
        case Family::agreeable_random: {
          const Step lo = std::max(t + 1, earlier_max_deadline);
          const Step hi = std::max(lo, t + spec.max_lifespan);
          d = lo + static_cast<Step>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
          break;
        }
        case Family::golden_chain:
          break;
      }
      const Rational& w = grid[uniform_below(rng, grid.size())];
      specs.push_back({"p" + std::to_string(specs.size()), t, d, w});
      step_max = std::max(step_max, d);
    }
    earlier_max_deadline = step_max;
  }
  Instance inst = Instance::create(std::move(specs));
  check_family(inst, spec);
  return inst;
}

}  // namespace pktsched
