#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <json.hpp>

#include "pktsched/analysis.hpp"

namespace pktsched {

/// JSON Lines, one packet per line: {"id": "a", "r": 1, "d": 2, "w": "1/1"}.
/// Line order is arrival order; blank lines are skipped. Errors name the line.
Instance parse_instance(std::istream& in);
Instance parse_instance_file(const std::filesystem::path& path);

/// Weights are written in lowest terms as "num/den".
void write_instance(std::ostream& out, const Instance& inst);
void write_instance_file(const std::filesystem::path& path, const Instance& inst);

/// {"exact": "p/q", "approx": 0.75}. Only "exact" is authoritative.
nlohmann::json rational_json(const Rational& r);
/// Reads the "exact" field back (or a bare "p/q" string).
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json report_json(const RunReport& report, const Instance& inst);
nlohmann::json exact_json(const ExactResult& result, const Rational& opt);
nlohmann::json search_json(const SearchResult& result);
nlohmann::json facts_json(const FactsReport& report);

}  // namespace pktsched
