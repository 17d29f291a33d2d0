#include "pktsched/io.hpp"

#include <fstream>
#include <sstream>

#include "pktsched/errors.hpp"

namespace pktsched {

using nlohmann::json;

namespace {

std::int64_t step_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(std::string("missing field '") + key + "'" + where);
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer" + where);
  return v.get<std::int64_t>();
}

Rational weight_field(const json& obj, const std::string& where) {
  if (!obj.contains("w")) throw ValidationError("missing field 'w'" + where);
  const json& v = obj.at("w");
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + where);
  }
  throw ValidationError("field 'w' must be a \"num/den\" string" + where);
}

}  // namespace

Instance parse_instance(std::istream& in) {
  std::vector<PacketSpec> specs;
  std::string line;
  std::size_t line_no = 0;
  Step last_release = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = ", line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw ValidationError("malformed JSON" + where);
    }
    if (!obj.is_object()) throw ValidationError("expected a JSON object" + where);
    PacketSpec spec;
    if (obj.contains("id")) {
      if (!obj.at("id").is_string()) throw ValidationError("field 'id' must be a string" + where);
      spec.id = obj.at("id").get<std::string>();
    }
    spec.release = step_field(obj, "r", where);
    spec.deadline = step_field(obj, "d", where);
    spec.weight = weight_field(obj, where);
    if (spec.release < 1) throw ValidationError("release must be >= 1" + where);
    if (spec.deadline <= spec.release) throw ValidationError("empty lifespan" + where);
    if (spec.weight.sign() <= 0) throw ValidationError("non-positive weight" + where);
    if (spec.release < last_release) throw ValidationError("release decreases (lines must be in arrival order)" + where);
    last_release = spec.release;
    specs.push_back(std::move(spec));
  }
  return Instance::create(std::move(specs));
}

Instance parse_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read instance file '" + path.string() + "'");
  return parse_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
  for (const auto& p : inst.packets()) {
    json obj = {{"id", inst.label(p.arrival)}, {"r", p.release}, {"d", p.deadline}, {"w", p.weight.str()}};
    out << obj.dump() << '\n';
  }
}

void write_instance_file(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  write_instance(out, inst);
}

json rational_json(const Rational& r) { return {{"exact", r.str()}, {"approx", r.to_double()}}; }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_object() && j.contains("exact") && j.at("exact").is_string()) {
    return Rational::parse(j.at("exact").get<std::string>());
  }
  throw ValidationError("expected an exact rational");
}

json report_json(const RunReport& report, const Instance& inst) {
  json steps = json::array();
  for (const auto& s : report.per_step) {
    json members = json::array();
    for (PacketId id : s.oblivious) members.push_back(inst.label(id));
    steps.push_back({{"step", s.step},
                     {"oblivious", members},
                     {"oblivious_weight", rational_json(s.oblivious_weight)},
                     {"e", inst.label(s.e)},
                     {"h", inst.label(s.h)},
                     {"transmitted", inst.label(s.transmitted)},
                     {"gain", rational_json(s.gain)}});
  }
  return {{"policy", std::string(policy_name(report.policy))},
          {"steps", steps},
          {"total_gain", rational_json(report.total_gain)},
          {"opt_value", rational_json(report.opt_value)},
          {"ratio", rational_json(report.ratio)}};
}

json exact_json(const ExactResult& result, const Rational& opt) {
  return {{"policy", "rg"},
          {"expected_gain", rational_json(result.expected_gain)},
          {"leaves", result.leaves},
          {"opt_value", rational_json(opt)},
          {"ratio", rational_json(gain_ratio(opt, result.expected_gain))}};
}

json search_json(const SearchResult& result) {
  std::ostringstream witness;
  write_instance(witness, result.witness);
  json packets = json::array();
  std::istringstream lines(witness.str());
  for (std::string line; std::getline(lines, line);) packets.push_back(json::parse(line));
  return {{"policy", std::string(policy_name(result.policy))},
          {"ratio", rational_json(result.ratio)},
          {"nodes", result.nodes},
          {"partial", result.partial},
          {"witness", packets}};
}

json facts_json(const FactsReport& report) {
  json steps = json::array();
  for (const auto& s : report.steps) {
    json entry = {{"step", s.step},
                  {"oblivious_optimal", s.oblivious_optimal},
                  {"containment", s.containment},
                  {"first_packet", s.first_packet},
                  {"monotone", s.monotone},
                  {"reordering", s.reordering_applicable ? json(s.reordering) : json(nullptr)},
                  {"passed", s.passed()}};
    if (!s.detail.empty()) entry["detail"] = s.detail;
    steps.push_back(entry);
  }
  return {{"passed", report.passed()}, {"failures", report.failures()}, {"steps", steps}};
}

}  // namespace pktsched
