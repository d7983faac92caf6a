#pragma once

#include "dpdp/simulation.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dpdp {

/// Shortest decimal rendering that round-trips (17 significant digits).
std::string format_double(double value);
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

/// Every ScenarioConfig field as key=value, in a fixed order. Times are
/// rendered in seconds.
std::vector<std::pair<std::string, std::string>> scenario_config_entries(const ScenarioConfig& config);

/// Sets one ScenarioConfig field by key. Returns false when `key` is not a
/// scenario key; throws std::invalid_argument on a malformed value.
bool set_scenario_key(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Splits "key=value" (whitespace around both trimmed). Returns false for
/// blank lines and '#' comments.
bool split_key_value(std::string_view line, std::string& key, std::string& value);

}  // namespace dpdp
