// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "pktsched/analysis.hpp"
#include "pktsched/engine.hpp"
#include "pktsched/policies.hpp"

using namespace pktsched;

namespace {

// Pinned parameters and tolerances.
const std::vector<Rational> kMenu{1, 2, 3, 5, 8};
constexpr int kEnumSteps = 4;
constexpr int kEnumPerStep = 2;
constexpr std::uint64_t kEnumExpectedCount = 18'687'240;
constexpr int kGridSide = 100;                  // 10^4 grid pairs
constexpr int kRandomRuns = 1000;
constexpr int kMutationTrials = 100;
constexpr std::uint64_t kMcTrials = 100'000;
constexpr std::uint64_t kMcSeed = 20240611;
constexpr double kMcSigmas = 4.0;
constexpr int kSearchDepth = 4;
const Rational kPhiLowerWitness(8, 7);
const Rational kRgBound(4, 3);

struct Line {
  bool pass = false;
  std::string detail;
};

std::string show(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (~%.6f)", r.to_double());
  return r.str() + buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Per-step lottery bound, shared by the enumeration and the random suite.

struct PairTally {
  std::uint64_t observations = 0;
  std::uint64_t violations = 0;
  std::set<std::pair<Rational, Rational>> distinct;
  std::string first_violation;

  void observe(const ObliviousSchedule& o, const PolicyDecision& d) {
    if (o.e == o.h) return;
    ++observations;
    const Rational we = o.e.weight, wh = o.h.weight;
    const Rational formula = (we * we - we * wh + wh * wh) / wh;
    const Rational e = d.expected_gain();
    if (e != formula || e < Rational(3, 4) * wh) {
      if (violations++ == 0) first_violation = "w_e=" + we.str() + " w_h=" + wh.str() + " E=" + e.str();
    }
    distinct.emplace(we, wh);
  }

  void merge(const PairTally& o) {
    observations += o.observations;
    if (violations == 0 && o.violations != 0) first_violation = o.first_violation;
    violations += o.violations;
    distinct.insert(o.distinct.begin(), o.distinct.end());
  }
};

// ---------------------------------------------------------------------------
// Exhaustive enumeration of small two-bounded instances.

struct EnumTally {
  std::uint64_t instances = 0;
  std::uint64_t mg_violations = 0;
  std::uint64_t rg_violations = 0;
  std::uint64_t facts_failures = 0;
  std::uint64_t facts_steps = 0;
  Rational mg_max{1};
  Rational rg_max{1};
  std::string first_problem;
  PairTally pairs;

  void note(const std::string& what, const std::vector<PacketSpec>& specs) {
    if (!first_problem.empty()) return;
    std::ostringstream s;
    s << what << " on";
    for (const auto& p : specs) s << " (" << p.release << "," << p.deadline << "," << p.weight.str() << ")";
    first_problem = s.str();
  }

  void merge(const EnumTally& o) {
    instances += o.instances;
    mg_violations += o.mg_violations;
    rg_violations += o.rg_violations;
    facts_failures += o.facts_failures;
    facts_steps += o.facts_steps;
    mg_max = std::max(mg_max, o.mg_max);
    rg_max = std::max(rg_max, o.rg_max);
    if (first_problem.empty()) first_problem = o.first_problem;
    pairs.merge(o.pairs);
  }
};

// Checks one agreeable instance against criteria 2, 3 and 6.
void evaluate(const std::vector<PacketSpec>& specs, EnumTally& tally) {
  const Instance inst = Instance::create(specs);
  ++tally.instances;
  const Rational opt = instance_opt(inst);

  const Rational mg = gain_ratio(opt, policy_gain(inst, PolicyKind::mg_prime));
  tally.mg_max = std::max(tally.mg_max, mg);
  if (!at_most_phi(mg)) {
    ++tally.mg_violations;
    tally.note("mg-prime ratio " + mg.str(), specs);
  }

  ExactOptions opts;
  opts.observer = [&](const ObliviousSchedule& o, const PolicyDecision& d) { tally.pairs.observe(o, d); };
  const ExactResult ex = run_rg_exact(inst, opts);
  const Rational rg = gain_ratio(opt, ex.expected_gain);
  tally.rg_max = std::max(tally.rg_max, rg);
  if (rg > kRgBound || ex.probability_mass != Rational(1)) {
    ++tally.rg_violations;
    tally.note("rg ratio " + rg.str(), specs);
  }

  const FactsReport facts = check_facts(inst);
  tally.facts_steps += facts.steps.size();
  if (!facts.passed()) {
    ++tally.facts_failures;
    for (const auto& s : facts.steps) {
      if (!s.passed()) {
        tally.note("facts at step " + std::to_string(s.step) + ": " + s.detail, specs);
        break;
      }
    }
  }
}

class Enumerator {
 public:
  Enumerator() {
    for (Step life : {Step{1}, Step{2}}) {
      for (const auto& w : kMenu) types_.push_back({life, w});
    }
    std::vector<std::size_t> current;
    build(0, current);
  }

  std::size_t option_count() const { return options_.size(); }

  // Every instance whose first release step is 1, starting with option
  // `first` (nonempty) at step 1; leading and trailing empty steps are
  // time shifts of shorter instances and are not repeated.
  void run_subtree(std::size_t first, EnumTally& tally) const {
    std::vector<PacketSpec> specs;
    push(first, 1, specs);
    evaluate(specs, tally);
    descend(2, specs, tally);
  }

 private:
  struct Type {
    Step lifespan;
    Rational weight;
  };

  void build(std::size_t min_type, std::vector<std::size_t>& current) {
    options_.push_back(current);
    if (current.size() == static_cast<std::size_t>(kEnumPerStep)) return;
    for (std::size_t t = min_type; t < types_.size(); ++t) {
      current.push_back(t);
      build(t, current);
      current.pop_back();
    }
  }

  void push(std::size_t option, Step step, std::vector<PacketSpec>& specs) const {
    for (std::size_t t : options_[option]) {
      specs.push_back({"", step, step + types_[t].lifespan, types_[t].weight});
    }
  }

  void descend(Step step, std::vector<PacketSpec>& specs, EnumTally& tally) const {
    if (step > kEnumSteps) return;
    for (std::size_t o = 0; o < options_.size(); ++o) {
      const std::size_t before = specs.size();
      push(o, step, specs);
      if (!options_[o].empty()) evaluate(specs, tally);
      descend(step + 1, specs, tally);
      specs.resize(before);
    }
  }

  std::vector<Type> types_;
  std::vector<std::vector<std::size_t>> options_;  // index 0 is empty
};

EnumTally run_enumeration() {
  const Enumerator en;
  const std::size_t n = en.option_count();
  std::vector<EnumTally> per_first(n);
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = 1 + w; i < n; i += jobs) en.run_subtree(i, per_first[i]);
      });
    }
  }
  EnumTally total;
  for (std::size_t i = 1; i < n; ++i) total.merge(per_first[i]);
  return total;
}

// ---------------------------------------------------------------------------
// Random agreeable suite (criteria 3 and 6).

// Seeds yielding an empty instance are skipped.
std::vector<Instance> random_suite() {
  std::vector<Instance> out;
  for (std::uint64_t seed = 1000; out.size() < static_cast<std::size_t>(kRandomRuns); ++seed) {
    GeneratorSpec spec;
    spec.family = Family::agreeable_random;
    spec.steps = 5;
    spec.packets_per_step = 2;
    spec.max_lifespan = 4;
    spec.seed = seed;
    if (seed % 2 == 1) spec.geometric_ratio = Rational(987, 610);
    Instance inst = generate(spec);
    if (!inst.empty()) out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------------------

Line criterion1(const PairTally& observed) {
  PairTally grid;
  std::uint64_t grid_pairs = 0;
  Rational tightest{2};
  for (int i = 1; i <= kGridSide; ++i) {
    for (int j = 1; j <= kGridSide; ++j) {
      Rational a(i, 37), b(j, 41);
      if (b < a) std::swap(a, b);
      ++grid_pairs;
      std::vector<Packet> pending{{1, 2, a, 0}, {1, 3, b, 1}};
      const ObliviousSchedule o = oblivious_schedule(pending, 1);
      const PolicyDecision d = rg_distribution(o);
      const Rational formula = (a * a - a * b + b * b) / b;
      const Rational e = d.expected_gain();
      if (e != formula || e < Rational(3, 4) * b) {
        if (grid.violations++ == 0) grid.first_violation = "w_e=" + a.str() + " w_h=" + b.str();
      }
      tightest = std::min(tightest, e / b);
    }
  }
  Line l;
  l.pass = grid.violations == 0 && observed.violations == 0 && observed.observations > 0;
  std::ostringstream s;
  s << "grid pairs " << grid_pairs << ", run lotteries " << observed.observations << " (" << observed.distinct.size()
    << " distinct pairs), violations " << grid.violations + observed.violations << ", min E/w_h on grid "
    << show(tightest);
  if (!grid.first_violation.empty()) s << "; first: " << grid.first_violation;
  if (!observed.first_violation.empty()) s << "; first: " << observed.first_violation;
  l.detail = s.str();
  return l;
}

Line criterion2(const EnumTally& t, const SearchResult& search) {
  Line l;
  l.pass = t.instances == kEnumExpectedCount && t.mg_violations == 0;
  std::ostringstream s;
  s << "instances " << t.instances << " (expected " << kEnumExpectedCount << "), violations " << t.mg_violations
    << ", max ratio " << show(t.mg_max) << (search.ratio == t.mg_max ? ", equals search maximum" : ", search maximum differs");
  if (t.mg_violations != 0) s << "; " << t.first_problem;
  l.detail = s.str();
  l.pass = l.pass && search.ratio == t.mg_max;
  return l;
}

Line criterion3(const EnumTally& t, const std::vector<Instance>& suite, PairTally& pairs, const SearchResult& search) {
  std::uint64_t violations = t.rg_violations;
  Rational suite_max{1};
  std::size_t max_packets = 0;
  for (const auto& inst : suite) {
    max_packets = std::max(max_packets, inst.size());
    ExactOptions opts;
    opts.observer = [&](const ObliviousSchedule& o, const PolicyDecision& d) { pairs.observe(o, d); };
    const ExactResult ex = run_rg_exact(inst, opts);
    const Rational r = gain_ratio(instance_opt(inst), ex.expected_gain);
    suite_max = std::max(suite_max, r);
    if (r > kRgBound || !inst.agreeable()) ++violations;
  }
  Line l;
  l.pass = violations == 0 && t.instances == kEnumExpectedCount && max_packets <= 10 && search.ratio == t.rg_max;
  std::ostringstream s;
  s << "enumeration max " << show(t.rg_max) << (search.ratio == t.rg_max ? " (equals search maximum)" : " (search differs)")
    << ", random suite " << suite.size() << " instances (<= " << max_packets << " packets) max " << show(suite_max)
    << ", violations " << violations;
  if (t.rg_violations != 0) s << "; " << t.first_problem;
  l.detail = s.str();
  return l;
}

Line criterion4() {
  std::mt19937_64 rng(404);
  const std::vector<Rational> weights{1, 2, 3, 5, 8, Rational(1, 2), Rational(987, 610), Rational(7, 3)};
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Instance inst = oracle::random_instance(rng, 8, 6, 4, weights);
    const OptResult r = opt_schedule(inst.packets(), 1);
    const Rational brute = oracle::opt_value({inst.packets().begin(), inst.packets().end()}, 1);
    if (r.value != brute || !r.schedule.feasible() || r.schedule.weight() != r.value) ++mismatches;
  }
  return {mismatches == 0, "1000 random instances (<= 8 packets), mismatches " + std::to_string(mismatches)};
}

Line criterion5() {
  std::mt19937_64 rng(505);
  const std::vector<Rational> weights{1, 2, 2, 3, 5, 8, Rational(3, 2)};
  int mismatches = 0, invalid = 0;
  for (int i = 0; i < 1000; ++i) {
    const Step t = 1 + static_cast<Step>(rng() % 5);
    const auto pending = oracle::random_pending(rng, 8, t, 5, weights);
    const ObliviousSchedule o = oblivious_schedule(pending, t);
    if (o.schedule.weight() != opt_schedule(pending, t).value) ++mismatches;
    bool valid = o.schedule.feasible() && is_order_schedule(o.schedule);
    auto slots = o.schedule.slots();
    for (std::size_t k = 0; k < slots.size(); ++k) {
      valid = valid && slots[k].step == t + static_cast<Step>(k);
      if (k > 0) valid = valid && precedes(slots[k - 1].packet, slots[k].packet);
    }
    if (!valid) ++invalid;
  }
  return {mismatches == 0 && invalid == 0, "1000 random pending sets (<= 8 packets), weight mismatches " +
                                               std::to_string(mismatches) + ", invalid order-schedules " +
                                               std::to_string(invalid)};
}

Line criterion6(const EnumTally& t, const std::vector<Instance>& suite) {
  std::uint64_t suite_failures = 0, suite_steps = 0;
  for (const auto& inst : suite) {
    const FactsReport r = check_facts(inst);
    suite_steps += r.steps.size();
    if (!r.passed()) ++suite_failures;
  }
  int detected = 0, by_containment = 0, by_first = 0, by_monotone = 0, by_reorder = 0;
  for (int i = 0; i < kMutationTrials; ++i) {
    const Instance& inst = suite[static_cast<std::size_t>(i)];
    const FactsReport clean = check_facts(inst);
    const auto& target = clean.steps[static_cast<std::size_t>(i) % clean.steps.size()];
    const FactsReport bad = check_facts(inst, FactsOptions{drop_packet_mutation(target.step, static_cast<std::size_t>(i))});
    if (!bad.passed()) ++detected;
    bool c = false, f = false, m = false, r = false;
    for (const auto& s : bad.steps) {
      c = c || !s.containment;
      f = f || !s.first_packet;
      m = m || !s.monotone;
      r = r || !s.reordering;
    }
    by_containment += c;
    by_first += f;
    by_monotone += m;
    by_reorder += r;
  }
  Line l;
  l.pass = t.facts_failures == 0 && suite_failures == 0 && detected == kMutationTrials &&
           t.instances == kEnumExpectedCount;
  std::ostringstream s;
  s << "enumeration " << t.instances << " instances / " << t.facts_steps << " steps, failures " << t.facts_failures
    << "; random suite " << suite.size() << " instances / " << suite_steps << " steps, failures " << suite_failures
    << "; mutations detected " << detected << "/" << kMutationTrials << " (containment " << by_containment
    << ", first-packet " << by_first << ", monotone " << by_monotone << ", reordering " << by_reorder << ")";
  if (t.facts_failures != 0) s << "; " << t.first_problem;
  l.detail = s.str();
  return l;
}

Instance three_packets() { return Instance::create({{"a", 1, 2, 1}, {"b", 1, 3, 2}, {"c", 2, 3, 2}}); }

Line criterion7() {
  const Instance inst = three_packets();
  const Rational opt = instance_opt(inst);
  const Rational brute_opt = oracle::opt_value({inst.packets().begin(), inst.packets().end()}, 1);
  const ExactResult ex = run_rg_exact(inst);
  Rational brute_e(0);
  for (const auto& leaf : oracle::rg_leaves(inst)) brute_e += leaf.probability * leaf.gain;
  const Rational ratio = competitive_ratio(inst, PolicyKind::rg);
  const bool pass = opt == Rational(4) && brute_opt == opt && ex.expected_gain == Rational(7, 2) &&
                    brute_e == ex.expected_gain && ratio == Rational(8, 7);
  return {pass, "OPT " + opt.str() + " (brute force " + brute_opt.str() + "), E[G_RG] " + ex.expected_gain.str() +
                    " (brute force " + brute_e.str() + "), rg ratio " + ratio.str()};
}

Line criterion8(const SearchResult& mg, const SearchResult& rg, double secs) {
  const bool mg_ok = mg.ratio >= kPhiLowerWitness && competitive_ratio(mg.witness, PolicyKind::mg_prime) == mg.ratio;
  const bool rg_ok = rg.ratio > Rational(1) && rg.ratio <= kRgBound &&
                     competitive_ratio(rg.witness, PolicyKind::rg) == rg.ratio;
  std::ostringstream s;
  s << "mg-prime depth " << kSearchDepth << ": " << show(mg.ratio) << " over " << mg.nodes << " nodes"
    << (mg.partial ? " (partial)" : "") << "; rg depth " << kSearchDepth << ": " << show(rg.ratio) << " over "
    << rg.nodes << " nodes" << (rg.partial ? " (partial)" : "") << "; witnesses replay; " << static_cast<int>(secs)
    << " s";
  return {mg_ok && rg_ok, s.str()};
}

Line criterion9() {
  const Instance inst = three_packets();
  const MonteCarloResult a = run_rg_mc(inst, kMcTrials, kMcSeed, 1);
  const MonteCarloResult b = run_rg_mc(inst, kMcTrials, kMcSeed, 1);
  const MonteCarloResult c = run_rg_mc(inst, kMcTrials, kMcSeed, 4);
  const double dev = std::abs(a.mean - 3.5);
  const bool within = dev <= kMcSigmas * a.std_error;
  const bool identical = a.exact_mean == b.exact_mean && a.mean == b.mean && a.std_error == b.std_error &&
                         a.exact_mean == c.exact_mean && a.mean == c.mean && a.std_error == c.std_error;
  char buf[200];
  std::snprintf(buf, sizeof buf, "mean %.6f, std error %.6f, |mean - 3.5| = %.2f std errors; reruns %s", a.mean,
                a.std_error, a.std_error > 0 ? dev / a.std_error : 0.0,
                identical ? "bit-identical (1 and 4 workers)" : "DIFFER");
  return {within && identical && a.trials == kMcTrials, buf};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, Line>> lines;

  std::cerr << "enumerating two-bounded instances...\n";
  const EnumTally en = run_enumeration();
  std::cerr << "  done in " << static_cast<int>(seconds_since(start)) << " s\n";

  std::cerr << "adversary search...\n";
  const auto search_start = std::chrono::steady_clock::now();
  SearchOptions so;
  so.depth = kSearchDepth;
  so.menu = kMenu;
  so.jobs = std::max(1u, std::thread::hardware_concurrency());
  so.policy = PolicyKind::mg_prime;
  const SearchResult mg_search = adversary_search(so);
  so.policy = PolicyKind::rg;
  const SearchResult rg_search = adversary_search(so);
  const double search_secs = seconds_since(search_start);

  const std::vector<Instance> suite = random_suite();
  PairTally pairs = en.pairs;
  const Line c3 = criterion3(en, suite, pairs, rg_search);

  lines.emplace_back("1 per-step lottery bound", criterion1(pairs));
  lines.emplace_back("2 mg-prime within phi", criterion2(en, mg_search));
  lines.emplace_back("3 rg within 4/3", c3);
  lines.emplace_back("4 offline oracle equivalence", criterion4());
  lines.emplace_back("5 oblivious schedule optimality", criterion5());
  lines.emplace_back("6 structural facts", criterion6(en, suite));
  lines.emplace_back("7 regression values", criterion7());
  lines.emplace_back("8 adversary search power", criterion8(mg_search, rg_search, search_secs));
  lines.emplace_back("9 monte carlo consistency", criterion9());

  int failed = 0;
  for (const auto& [name, line] : lines) {
    std::cout << (line.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << line.detail << "\n";
    failed += !line.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria FAILED") << " in "
            << static_cast<int>(seconds_since(start)) << " s\n";
  return failed == 0 ? 0 : 1;
}
