#include "dpdp/experiments.hpp"

#include "dpdp/config.hpp"
#include "dpdp/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dpdp {

ScenarioConfig base_system_config() {
  ScenarioConfig c;
  c.horizon = 8 * 3600 * kMillisPerSecond;
  c.interval_minutes = 4.0;
  c.arrival_prob = 0.2;
  c.max_order_size = 1;
  c.equalize_request_rate = true;
  c.deadline_offset = 2 * 3600 * kMillisPerSecond;
  c.num_stores = 10;
  c.num_vehicles = 2;
  c.depot = {500.0, 500.0};
  c.square_side = 1000.0;
  c.metric = {0.4};
  c.penalty = {50.0, 100.0};
  c.epoch_min_gap = 120 * kMillisPerSecond;
  c.epoch_max_gap = 300 * kMillisPerSecond;
  return c;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(item, what));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  policy.params.validate();
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
  if (policy.liml_m < 1) throw std::invalid_argument("liml_m must be at least 1");
  if (!(bin_width_min > 0)) throw std::invalid_argument("bin_width_min must be positive");
  if (alpha_grid.empty() || beta_grid.empty()) throw std::invalid_argument("grids must be non-empty");
}

std::vector<std::pair<std::string, std::string>> experiment_config_entries(const ExperimentConfig& c) {
  auto out = scenario_config_entries(c.scenario);
  const CfaParams& p = c.policy.params;
  const std::vector<std::pair<std::string, std::string>> rest{
      {"policy", to_string(c.policy.kind)},
      {"alpha", format_double(p.alpha)},
      {"beta", format_double(p.beta)},
      {"liml_m", std::to_string(c.policy.liml_m)},
      {"big_m", format_double(p.big_m)},
      {"urgency_h0", format_double(p.urgency.intercept)},
      {"urgency_h1", format_double(p.urgency.slope)},
      {"alpha_includes_first_leg", p.alpha_includes_first_leg ? "1" : "0"},
      {"pricing_rounds", std::to_string(p.rounds)},
      {"pricing_samples", std::to_string(p.samples)},
      {"pricing_keep", std::to_string(p.keep)},
      {"columns_per_round", std::to_string(p.columns_per_round)},
      {"integer_time_limit_s", format_double(p.integer_time_limit_s)},
      {"pool_capacity", std::to_string(p.pool_capacity)},
      {"replications", std::to_string(c.replications)},
      {"seed_base", std::to_string(c.seed_base)},
      {"max_epochs", std::to_string(c.max_epochs)},
      {"threads", std::to_string(c.threads)},
      {"alpha_grid", join(c.alpha_grid)},
      {"beta_grid", join(c.beta_grid)},
      {"bin_width_min", format_double(c.bin_width_min)},
      {"output_csv", c.output_csv},
      {"output_jsonl", c.output_jsonl},
      {"surface_csv", c.surface_csv},
      {"density_csv", c.density_csv},
      {"trace", c.trace_path},
  };
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void write_experiment_config(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& [k, v] : experiment_config_entries(config)) out << k << (v.empty() ? " =" : " = ") << v << '\n';
}

void set_experiment_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (set_scenario_key(c.scenario, key, value)) return;
  CfaParams& p = c.policy.params;
  const auto num = [&] { return parse_double(value, key); };
  const auto integer = [&] { return parse_integer(value, key); };
  if (key == "policy") c.policy.kind = parse_policy_kind(value);
  else if (key == "alpha") p.alpha = num();
  else if (key == "beta") p.beta = num();
  else if (key == "liml_m") c.policy.liml_m = static_cast<int>(integer());
  else if (key == "big_m") p.big_m = num();
  else if (key == "urgency_h0") p.urgency.intercept = num();
  else if (key == "urgency_h1") p.urgency.slope = num();
  else if (key == "alpha_includes_first_leg") p.alpha_includes_first_leg = parse_bool(value, key);
  else if (key == "pricing_rounds") p.rounds = static_cast<int>(integer());
  else if (key == "pricing_samples") p.samples = static_cast<int>(integer());
  else if (key == "pricing_keep") p.keep = static_cast<int>(integer());
  else if (key == "columns_per_round") p.columns_per_round = static_cast<int>(integer());
  else if (key == "integer_time_limit_s") p.integer_time_limit_s = num();
  else if (key == "pool_capacity") p.pool_capacity = static_cast<std::size_t>(integer());
  else if (key == "replications") c.replications = static_cast<int>(integer());
  else if (key == "seed_base") c.seed_base = static_cast<std::uint64_t>(integer());
  else if (key == "max_epochs") c.max_epochs = static_cast<int>(integer());
  else if (key == "threads") c.threads = static_cast<int>(integer());
  else if (key == "alpha_grid") c.alpha_grid = parse_list(value, key);
  else if (key == "beta_grid") c.beta_grid = parse_list(value, key);
  else if (key == "bin_width_min") c.bin_width_min = num();
  else if (key == "output_csv") c.output_csv = value;
  else if (key == "output_jsonl") c.output_jsonl = value;
  else if (key == "surface_csv") c.surface_csv = value;
  else if (key == "density_csv") c.density_csv = value;
  else if (key == "trace") c.trace_path = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig read_experiment_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string key;
    std::string value;
    try {
      if (!split_key_value(line, key, value)) continue;
      set_experiment_key(base, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

std::uint64_t scenario_seed(const ExperimentConfig& config, int replication) {
  return config.seed_base + static_cast<std::uint64_t>(replication);
}

std::uint64_t policy_seed(const ExperimentConfig& config, int replication) {
  return mix_seed(scenario_seed(config, replication), 1);
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  const auto n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  e.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

template <class Field>
Estimate over_rows(const std::vector<ReplicationRow>& rows, Field field) {
  std::vector<double> xs;
  xs.reserve(rows.size());
  for (const ReplicationRow& r : rows) xs.push_back(r.*field);
  return estimate(xs);
}

}  // namespace

Estimate AggregateReport::penalty_per_request() const { return over_rows(rows, &ReplicationRow::penalty_per_request); }
Estimate AggregateReport::pct_late() const { return over_rows(rows, &ReplicationRow::pct_late); }
Estimate AggregateReport::total_travel_min() const { return over_rows(rows, &ReplicationRow::total_travel_min); }

Estimate AggregateReport::mean_lateness_min() const {
  std::vector<double> per_rep;
  double weighted = 0;
  double late = 0;
  for (const ReplicationRow& r : rows) {
    if (r.late == 0) continue;
    per_rep.push_back(r.mean_lateness_min);
    weighted += static_cast<double>(r.late) * r.mean_lateness_min;
    late += static_cast<double>(r.late);
  }
  Estimate e = estimate(per_rep);
  e.mean = late > 0 ? weighted / late : 0.0;
  return e;
}

ReplicationRow make_row(int replication, std::uint64_t seed, const KpiReport& k) {
  ReplicationRow r;
  r.replication = replication;
  r.seed = seed;
  r.requests = k.request_count;
  r.late = static_cast<std::size_t>(
      std::count_if(k.delivery_delta_samples.begin(), k.delivery_delta_samples.end(), [](double d) { return d > 0; }));
  r.penalty_per_request = k.penalty_per_request;
  r.pct_late = k.pct_late;
  r.mean_lateness_min = k.mean_lateness_min;
  r.total_travel_min = k.total_travel_min;
  r.delivery_delta_samples = k.delivery_delta_samples;
  return r;
}

// ---------------------------------------------------------------------------
// Batch runs

namespace {

struct BatchOutcome {
  AggregateReport report;
  std::vector<int> aborted;
};

/// With `stop_on_abort`, replications not yet started are skipped after the
/// first abort; their rows stay default-initialized.
BatchOutcome execute_batch(const ExperimentConfig& config, const BatchHooks& hooks, bool stop_on_abort) {
  config.validate();
  const int n = config.replications;
  BatchOutcome out;
  out.report.label = config.policy.label();
  out.report.rows.resize(static_cast<std::size_t>(n));
  std::vector<char> aborted(static_cast<std::size_t>(n), 0);

  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::mutex lock;
  std::exception_ptr error;

  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n || stop.load()) return;
      try {
        ScenarioConfig sc = config.scenario;
        sc.seed = scenario_seed(config, i);
        const Scenario scenario = generate_scenario(sc);
        auto policy = make_policy(config.policy, sc, policy_seed(config, i));
        const EpisodeResult result = run_episode(scenario, *policy, {config.max_epochs});
        out.report.rows[static_cast<std::size_t>(i)] = make_row(i, sc.seed, result.kpis);
        if (hooks.on_episode) {
          std::lock_guard guard(lock);
          hooks.on_episode(i, *policy, result);
        }
      } catch (const EpisodeAborted&) {
        aborted[static_cast<std::size_t>(i)] = 1;
        if (stop_on_abort) stop = true;
      } catch (...) {
        std::lock_guard guard(lock);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };

  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  for (int i = 0; i < n; ++i) {
    if (aborted[static_cast<std::size_t>(i)]) out.aborted.push_back(i);
  }
  return out;
}

}  // namespace

AggregateReport run_batch(const ExperimentConfig& config, const BatchHooks& hooks) {
  BatchOutcome outcome = execute_batch(config, hooks, false);
  if (!outcome.aborted.empty()) {
    std::string which;
    for (int i : outcome.aborted) which += (which.empty() ? "" : ",") + std::to_string(i);
    throw BatchFailed(config.policy.label() + ": " + std::to_string(outcome.aborted.size()) +
                      " episode(s) hit the epoch cap of " + std::to_string(config.max_epochs) +
                      " (replications " + which + ")");
  }
  return std::move(outcome.report);
}

GridResult grid_search(const ExperimentConfig& config, std::vector<double> alphas, std::vector<double> betas,
                       const std::function<void(const SurfacePoint&)>& progress) {
  if (alphas.empty() || betas.empty()) throw std::invalid_argument("grid_search: grids must be non-empty");
  std::sort(alphas.begin(), alphas.end());
  std::sort(betas.begin(), betas.end());
  GridResult grid;
  double best = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    for (double b : betas) {
      ExperimentConfig point = config;
      point.policy.params.alpha = a;
      point.policy.params.beta = b;
      BatchOutcome outcome = execute_batch(point, {}, true);
      SurfacePoint sp;
      sp.alpha = a;
      sp.beta = b;
      sp.failed = !outcome.aborted.empty();
      if (!sp.failed) sp.report = std::move(outcome.report);
      sp.report.label = point.policy.label();
      if (sp.objective() < best) {
        best = sp.objective();
        grid.best_alpha = a;
        grid.best_beta = b;
        grid.found = true;
      }
      if (progress) progress(sp);
      grid.surface.push_back(std::move(sp));
    }
  }
  return grid;
}

const SurfacePoint* best_for_alpha(const GridResult& grid, double alpha) {
  const SurfacePoint* best = nullptr;
  for (const SurfacePoint& p : grid.surface) {
    if (p.alpha != alpha || p.failed) continue;
    if (!best || p.objective() < best->objective()) best = &p;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Export

namespace {

const char* const kReportHeader =
    "label,replication,seed,requests,late,penalty_per_request,pct_late,mean_lateness_min,total_travel_min,"
    "delivery_delta_s";

std::string join_samples(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void export_report(std::ostream& out, const AggregateReport& report, ReportFormat format) {
  if (report.label.find_first_of(",\n\"") != std::string::npos) {
    throw std::invalid_argument("report label must not contain commas, quotes or newlines");
  }
  if (format == ReportFormat::Csv) {
    out << kReportHeader << '\n';
    for (const ReplicationRow& r : report.rows) {
      out << report.label << ',' << r.replication << ',' << r.seed << ',' << r.requests << ',' << r.late << ','
          << format_double(r.penalty_per_request) << ',' << format_double(r.pct_late) << ','
          << format_double(r.mean_lateness_min) << ',' << format_double(r.total_travel_min) << ','
          << join_samples(r.delivery_delta_samples) << '\n';
    }
    return;
  }
  for (const ReplicationRow& r : report.rows) {
    nlohmann::ordered_json j;
    j["label"] = report.label;
    j["replication"] = r.replication;
    j["seed"] = r.seed;
    j["requests"] = r.requests;
    j["late"] = r.late;
    j["penalty_per_request"] = r.penalty_per_request;
    j["pct_late"] = r.pct_late;
    j["mean_lateness_min"] = r.mean_lateness_min;
    j["total_travel_min"] = r.total_travel_min;
    j["delivery_delta_s"] = r.delivery_delta_samples;
    out << j.dump() << '\n';
  }
}

AggregateReport parse_report(std::istream& in, ReportFormat format) {
  AggregateReport report;
  std::string line;
  int number = 0;
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("report line " + std::to_string(number) + ": " + why);
  };
  const auto take_label = [&](const std::string& label) {
    if (report.rows.empty()) report.label = label;
    else if (label != report.label) fail("mixed labels '" + report.label + "' and '" + label + "'");
  };
  while (std::getline(in, line)) {
    ++number;
    if (format == ReportFormat::Csv) {
      if (number == 1) {
        if (line != kReportHeader) fail("unexpected header");
        continue;
      }
      const auto f = split(line, ',');
      if (f.size() != 10) fail("expected 10 fields, got " + std::to_string(f.size()));
      ReplicationRow r;
      take_label(f[0]);
      r.replication = static_cast<int>(parse_integer(f[1], "replication"));
      r.seed = static_cast<std::uint64_t>(parse_integer(f[2], "seed"));
      r.requests = static_cast<std::size_t>(parse_integer(f[3], "requests"));
      r.late = static_cast<std::size_t>(parse_integer(f[4], "late"));
      r.penalty_per_request = parse_double(f[5], "penalty_per_request");
      r.pct_late = parse_double(f[6], "pct_late");
      r.mean_lateness_min = parse_double(f[7], "mean_lateness_min");
      r.total_travel_min = parse_double(f[8], "total_travel_min");
      if (!f[9].empty()) {
        for (const std::string& s : split(f[9], ';')) r.delivery_delta_samples.push_back(parse_double(s, "delivery_delta_s"));
      }
      report.rows.push_back(std::move(r));
    } else {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        ReplicationRow r;
        take_label(j.at("label").get<std::string>());
        r.replication = j.at("replication").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.requests = j.at("requests").get<std::size_t>();
        r.late = j.at("late").get<std::size_t>();
        r.penalty_per_request = j.at("penalty_per_request").get<double>();
        r.pct_late = j.at("pct_late").get<double>();
        r.mean_lateness_min = j.at("mean_lateness_min").get<double>();
        r.total_travel_min = j.at("total_travel_min").get<double>();
        r.delivery_delta_samples = j.at("delivery_delta_s").get<std::vector<double>>();
        report.rows.push_back(std::move(r));
      } catch (const nlohmann::json::exception& e) {
        fail(e.what());
      }
    }
  }
  if (format == ReportFormat::Csv && number == 0) fail("missing header");
  return report;
}

ReportFormat report_format_for(const std::string& path) {
  const auto ends_with = [&](const std::string& suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".jsonl") || ends_with(".json")) return ReportFormat::JsonLines;
  return ReportFormat::Csv;
}

void write_summary(std::ostream& out, const std::vector<AggregateReport>& reports) {
  out << "label,replications,penalty_per_request,penalty_per_request_se,pct_late,pct_late_se,mean_lateness_min,"
         "mean_lateness_min_se,total_travel_min,total_travel_min_se\n";
  for (const AggregateReport& r : reports) {
    out << r.label << ',' << r.replications();
    for (const Estimate& e : {r.penalty_per_request(), r.pct_late(), r.mean_lateness_min(), r.total_travel_min()}) {
      out << ',' << format_double(e.mean) << ',' << format_double(e.se);
    }
    out << '\n';
  }
}

void write_surface(std::ostream& out, const GridResult& grid) {
  out << "alpha,beta,failed,replications,penalty_per_request,penalty_per_request_se,pct_late,mean_lateness_min,"
         "total_travel_min\n";
  for (const SurfacePoint& p : grid.surface) {
    out << format_double(p.alpha) << ',' << format_double(p.beta) << ',' << (p.failed ? 1 : 0) << ','
        << p.report.replications();
    if (p.failed) {
      out << ",inf,nan,nan,nan,nan\n";
      continue;
    }
    const Estimate pen = p.report.penalty_per_request();
    out << ',' << format_double(pen.mean) << ',' << format_double(pen.se) << ','
        << format_double(p.report.pct_late().mean) << ',' << format_double(p.report.mean_lateness_min().mean) << ','
        << format_double(p.report.total_travel_min().mean) << '\n';
  }
}

std::vector<DensityBin> delivery_density(const std::vector<AggregateReport>& reports, double bin_width_min) {
  if (!(bin_width_min > 0)) throw std::invalid_argument("bin width must be positive");
  std::vector<double> minutes;
  for (const AggregateReport& r : reports) {
    for (const ReplicationRow& row : r.rows) {
      for (double s : row.delivery_delta_samples) minutes.push_back(s / 60.0);
    }
  }
  if (minutes.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(minutes.begin(), minutes.end());
  const auto first = static_cast<long long>(std::floor(*lo_it / bin_width_min));
  const auto last = static_cast<long long>(std::floor(*hi_it / bin_width_min));
  std::vector<double> counts(static_cast<std::size_t>(last - first + 1), 0.0);
  for (double m : minutes) counts[static_cast<std::size_t>(static_cast<long long>(std::floor(m / bin_width_min)) - first)] += 1;
  std::vector<DensityBin> bins;
  const double norm = static_cast<double>(minutes.size()) * bin_width_min;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    bins.push_back({(static_cast<double>(first + static_cast<long long>(k)) + 0.5) * bin_width_min, counts[k] / norm});
  }
  return bins;
}

void write_density(std::ostream& out, const std::vector<DensityBin>& bins) {
  out << "bin_center_min,density\n";
  for (const DensityBin& b : bins) out << format_double(b.center_min) << ',' << format_double(b.density) << '\n';
}

double late_mass(const std::vector<AggregateReport>& reports) {
  std::size_t late = 0;
  std::size_t total = 0;
  for (const AggregateReport& r : reports) {
    for (const ReplicationRow& row : r.rows) {
      total += row.delivery_delta_samples.size();
      late += row.late;
    }
  }
  return total ? static_cast<double>(late) / static_cast<double>(total) : 0.0;
}

}  // namespace dpdp
