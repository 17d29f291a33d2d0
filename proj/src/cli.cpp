#include "pktsched/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pktsched/analysis.hpp"
#include "pktsched/errors.hpp"
#include "pktsched/io.hpp"

namespace pktsched {
namespace {

std::string approx(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", r.to_double());
  return buf;
}

std::string show(const Rational& r) { return r.str() + " (≈ " + approx(r) + ")"; }

std::vector<Rational> parse_menu(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(Rational::parse(item));
  if (out.empty()) throw ValidationError("empty weight list");
  return out;
}

Instance load_agreeable(const std::string& path) {
  Instance inst = parse_instance_file(path);
  if (!inst.agreeable()) throw ValidationError("instance '" + path + "' does not have agreeable deadlines");
  return inst;
}

void maybe_write_report(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write report '" + path + "'");
  out << j.dump(2) << '\n';
}

struct Options {
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string policy;
  std::string instance;
  std::string report;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 0;
  // gen
  std::string family = "agreeable-random";
  std::string out;
  Step steps = 4;
  int per_step = 2;
  std::string weights = "1,2,3,5,8";
  std::string geometric;
  int levels = 4;
  Step max_lifespan = 3;
  Step s = 1;
  int k = 2;
  std::string chain_ratio = "987/610";
  // search
  int depth = 2;
  std::string menu = "1,2";
  int branching = 2;
  std::uint64_t budget = 0;
  std::size_t beam = 0;
};

int cmd_run(const Options& o, std::ostream& out) {
  const Instance inst = load_agreeable(o.instance);
  const PolicyKind policy = parse_policy(o.policy);
  if (policy == PolicyKind::rg) {
    const std::uint64_t trials = o.trials.value_or(10000);
    const MonteCarloResult mc = run_rg_mc(inst, trials, o.seed, o.jobs);
    const Rational opt = instance_opt(inst);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f +/- %.6f", mc.mean, mc.std_error);
    out << "policy = rg (Monte Carlo, trials = " << trials << ", seed = " << o.seed << ")\n";
    out << "mean gain = " << buf << "\n";
    out << "opt = " << show(opt) << "\n";
    maybe_write_report(o.report, {{"policy", "rg"},
                                  {"trials", trials},
                                  {"seed", o.seed},
                                  {"mean", mc.mean},
                                  {"std_error", mc.std_error},
                                  {"exact_mean", rational_json(mc.exact_mean)},
                                  {"opt_value", rational_json(opt)}});
    return kExitOk;
  }
  if (o.trials) throw ValidationError("--trials applies to rg only");
  const RunReport report = run_policy(inst, policy);
  out << "policy = " << policy_name(policy) << "\n";
  for (const auto& s : report.per_step) {
    out << "step " << s.step << ": e=" << inst.label(s.e) << " h=" << inst.label(s.h)
        << " sent=" << inst.label(s.transmitted) << " gain=" << s.gain.str() << "\n";
  }
  out << "total gain = " << show(report.total_gain) << "\n";
  out << "opt = " << show(report.opt_value) << "\n";
  out << "ratio = " << show(report.ratio) << "\n";
  maybe_write_report(o.report, report_json(report, inst));
  return kExitOk;
}

int cmd_opt(const Options& o, std::ostream& out) {
  const Instance inst = parse_instance_file(o.instance);
  const OptResult opt = opt_schedule(inst.packets(), 1);
  out << "opt = " << show(opt.value) << "\n";
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : opt.schedule.slots()) {
    out << "step " << s.step << ": " << inst.label(s.packet.arrival) << " (w=" << s.packet.weight.str() << ")\n";
    slots.push_back({{"step", s.step}, {"packet", inst.label(s.packet.arrival)}});
  }
  maybe_write_report(o.report, {{"opt_value", rational_json(opt.value)}, {"schedule", slots}});
  return kExitOk;
}

int cmd_ratio(const Options& o, std::ostream& out) {
  const Instance inst = load_agreeable(o.instance);
  const PolicyKind policy = parse_policy(o.policy);
  const Rational r = competitive_ratio(inst, policy, exact_cap_from_env());
  out << "ratio = " << show(r) << "\n";
  maybe_write_report(o.report, {{"policy", std::string(policy_name(policy))}, {"ratio", rational_json(r)}});
  return kExitOk;
}

int cmd_expected(const Options& o, std::ostream& out) {
  const Instance inst = load_agreeable(o.instance);
  ExactOptions options;
  options.leaf_cap = exact_cap_from_env();
  const ExactResult res = run_rg_exact(inst, options);
  const Rational opt = instance_opt(inst);
  out << "E[gain] = " << show(res.expected_gain) << "\n";
  out << "leaves = " << res.leaves << "\n";
  out << "opt = " << show(opt) << "\n";
  out << "ratio = " << show(gain_ratio(opt, res.expected_gain)) << "\n";
  maybe_write_report(o.report, exact_json(res, opt));
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  GeneratorSpec spec;
  spec.family = parse_family(o.family);
  spec.steps = o.steps;
  spec.packets_per_step = o.per_step;
  spec.weights = parse_menu(o.weights);
  if (!o.geometric.empty()) spec.geometric_ratio = Rational::parse(o.geometric);
  spec.geometric_levels = o.levels;
  spec.max_lifespan = o.max_lifespan;
  spec.s = o.s;
  spec.chain_length = o.k;
  spec.chain_ratio = Rational::parse(o.chain_ratio);
  spec.seed = o.seed;
  const Instance inst = generate(spec);
  write_instance_file(o.out, inst);
  out << "wrote " << inst.size() << " packets to " << o.out << "\n";
  return kExitOk;
}

int cmd_search(const Options& o, std::ostream& out) {
  SearchOptions opt;
  opt.policy = parse_policy(o.policy);
  opt.depth = o.depth;
  opt.menu = parse_menu(o.menu);
  opt.branching = o.branching;
  opt.node_budget = o.budget;
  opt.exact_cap = exact_cap_from_env();
  opt.beam_width = o.beam;
  opt.jobs = o.jobs;
  const SearchResult res = adversary_search(opt);
  out << "policy = " << policy_name(res.policy) << "\n";
  out << "ratio = " << show(res.ratio) << "\n";
  out << "nodes = " << res.nodes << (res.partial ? " (partial: budget or cap reached)" : "") << "\n";
  out << "witness:\n";
  write_instance(out, res.witness);
  if (!o.out.empty()) write_instance_file(o.out, res.witness);
  maybe_write_report(o.report, search_json(res));
  return kExitOk;
}

int cmd_check_facts(const Options& o, std::ostream& out) {
  const Instance inst = load_agreeable(o.instance);
  const FactsReport report = check_facts(inst);
  for (const auto& s : report.steps) {
    out << "step " << s.step << ": " << (s.passed() ? "pass" : "FAIL") << "  oblivious="
        << (s.oblivious_optimal ? "ok" : "bad") << " containment=" << (s.containment ? "ok" : "bad")
        << " first=" << (s.first_packet ? "ok" : "bad") << " monotone=" << (s.monotone ? "ok" : "bad")
        << " reorder=" << (!s.reordering_applicable ? "n/a" : s.reordering ? "ok" : "bad");
    if (!s.detail.empty()) out << "  (" << s.detail << ")";
    out << "\n";
  }
  out << (report.passed() ? "all checks passed" : "checks FAILED") << " (" << report.steps.size() << " steps, "
      << report.failures() << " failing)\n";
  maybe_write_report(o.report, facts_json(report));
  return report.passed() ? kExitOk : kExitInvariant;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Online packet scheduling workbench for agreeable deadlines", "pktsched"};
  app.require_subcommand(1);
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  const auto policies = CLI::IsMember({"mg", "mg-prime", "rg", "greedy-weight", "edf-nondominated"});

  auto* run = app.add_subcommand("run", "Simulate a policy (rg uses Monte Carlo)");
  run->add_option("--policy", o.policy)->required()->check(policies);
  run->add_option("--instance", o.instance)->required();
  run->add_option("--trials", o.trials, "Monte Carlo trials (rg)");
  run->add_option("--seed", o.seed);
  run->add_option("--report", o.report, "Write a JSON report");

  auto* opt = app.add_subcommand("opt", "Offline optimum");
  opt->add_option("--instance", o.instance)->required();
  opt->add_option("--report", o.report);

  auto* ratio = app.add_subcommand("ratio", "Exact competitive ratio on one instance");
  ratio->add_option("--policy", o.policy)->required()->check(policies);
  ratio->add_option("--instance", o.instance)->required();
  ratio->add_option("--report", o.report);

  auto* expected = app.add_subcommand("expected", "Exact expected gain of rg");
  expected->add_option("--instance", o.instance)->required();
  expected->add_option("--report", o.report);

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--family", o.family)
      ->check(CLI::IsMember({"agreeable-random", "two-bounded", "s-uniform", "golden-chain"}));
  gen->add_option("--seed", o.seed);
  gen->add_option("--out", o.out)->required();
  gen->add_option("--steps", o.steps);
  gen->add_option("--per-step", o.per_step);
  gen->add_option("--weights", o.weights, "Comma-separated weight grid");
  gen->add_option("--geometric", o.geometric, "Geometric weight ratio (overrides --weights)");
  gen->add_option("--levels", o.levels);
  gen->add_option("--max-lifespan", o.max_lifespan);
  gen->add_option("--s", o.s);
  gen->add_option("--k", o.k, "golden-chain length");
  gen->add_option("--chain-ratio", o.chain_ratio);

  auto* search = app.add_subcommand("search", "Adversarial instance search");
  search->add_option("--policy", o.policy)->required()->check(policies);
  search->add_option("--depth", o.depth)->required();
  search->add_option("--menu", o.menu)->required();
  search->add_option("--branching", o.branching);
  search->add_option("--budget", o.budget, "Node budget (0 = unlimited)");
  search->add_option("--beam", o.beam, "Beam width (0 = exhaustive)");
  search->add_option("--out", o.out, "Write the witness instance");
  search->add_option("--report", o.report);

  auto* facts = app.add_subcommand("check-facts", "Check the structural schedule properties");
  facts->add_option("--instance", o.instance)->required();
  facts->add_option("--report", o.report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (opt->parsed()) return cmd_opt(o, out);
    if (ratio->parsed()) return cmd_ratio(o, out);
    if (expected->parsed()) return cmd_expected(o, out);
    if (gen->parsed()) return cmd_gen(o, out);
    if (search->parsed()) return cmd_search(o, out);
    if (facts->parsed()) return cmd_check_facts(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << " (raise SCHED_EXACT_CAP to allow more)\n";
    return kExitInvalid;
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  }
  err << app.help();
  return kExitInvalid;
}

}  // namespace pktsched
