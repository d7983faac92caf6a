#include "dpdp/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace dpdp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string seconds(Millis t) { return format_double(to_seconds(t)); }

}  // namespace

std::string format_double(double value) {
  // Shortest text that parses back to the same double.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw std::invalid_argument("bad number for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

long long parse_integer(std::string_view text, std::string_view what) {
  const std::string_view s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string_view s = trim(text);
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw std::invalid_argument("bad boolean for " + std::string(what) + ": '" + std::string(s) + "'");
}

bool split_key_value(std::string_view line, std::string& key, std::string& value) {
  line = trim(line);
  if (line.empty() || line.front() == '#') return false;
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got '" + std::string(line) + "'");
  key = std::string(trim(line.substr(0, eq)));
  value = std::string(trim(line.substr(eq + 1)));
  return true;
}

std::vector<std::pair<std::string, std::string>> scenario_config_entries(const ScenarioConfig& c) {
  return {
      {"horizon_s", seconds(c.horizon)},
      {"interval_min", format_double(c.interval_minutes)},
      {"arrival_prob", format_double(c.arrival_prob)},
      {"max_order_size", std::to_string(c.max_order_size)},
      {"equalize_request_rate", c.equalize_request_rate ? "1" : "0"},
      {"deadline_s", seconds(c.deadline_offset)},
      {"num_stores", std::to_string(c.num_stores)},
      {"num_vehicles", std::to_string(c.num_vehicles)},
      {"depot_x", format_double(c.depot.x)},
      {"depot_y", format_double(c.depot.y)},
      {"square_side", format_double(c.square_side)},
      {"speed", format_double(c.metric.speed)},
      {"penalty_fixed", format_double(c.penalty.fixed)},
      {"penalty_rate", format_double(c.penalty.rate)},
      {"epoch_min_gap_s", seconds(c.epoch_min_gap)},
      {"epoch_max_gap_s", seconds(c.epoch_max_gap)},
      {"seed", std::to_string(c.seed)},
  };
}

bool set_scenario_key(ScenarioConfig& c, std::string_view key, std::string_view value) {
  const auto num = [&] { return parse_double(value, key); };
  const auto integer = [&] { return static_cast<int>(parse_integer(value, key)); };
  if (key == "horizon_s") c.horizon = from_seconds(num());
  else if (key == "interval_min") c.interval_minutes = num();
  else if (key == "arrival_prob") c.arrival_prob = num();
  else if (key == "max_order_size") c.max_order_size = integer();
  else if (key == "equalize_request_rate") c.equalize_request_rate = parse_bool(value, key);
  else if (key == "deadline_s") c.deadline_offset = from_seconds(num());
  else if (key == "num_stores") c.num_stores = integer();
  else if (key == "num_vehicles") c.num_vehicles = integer();
  else if (key == "depot_x") c.depot.x = num();
  else if (key == "depot_y") c.depot.y = num();
  else if (key == "square_side") c.square_side = num();
  else if (key == "speed") c.metric.speed = num();
  else if (key == "penalty_fixed") c.penalty.fixed = num();
  else if (key == "penalty_rate") c.penalty.rate = num();
  else if (key == "epoch_min_gap_s") c.epoch_min_gap = from_seconds(num());
  else if (key == "epoch_max_gap_s") c.epoch_max_gap = from_seconds(num());
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_integer(value, key));
  else return false;
  return true;
}

}  // namespace dpdp
