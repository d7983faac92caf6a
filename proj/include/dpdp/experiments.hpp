#pragma once

#include "dpdp/policies.hpp"
#include "dpdp/simulation.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace dpdp {

/// The base system: 1000 x 1000 square, lambda = 4 min, probability 0.2,
/// n = 1, two-hour deadline, speed 0.4, penalty 50 + 100/h, two vehicles,
/// eight-hour horizon, epoch gaps of 2 and 5 minutes.
ScenarioConfig base_system_config();

struct ExperimentConfig {
  ScenarioConfig scenario = base_system_config();  // `seed` is used by `generate` only
  PolicySpec policy;
  int replications = 1;
  std::uint64_t seed_base = 1;  // replication i uses scenario seed seed_base + i
  int max_epochs = 100000;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<double> alpha_grid{0.005, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2};
  std::vector<double> beta_grid{0.5, 1, 2, 4, 8, 16, 32, 64};
  double bin_width_min = 5.0;
  std::string output_csv;
  std::string output_jsonl;
  std::string surface_csv;
  std::string density_csv;
  std::string trace_path;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Every key, in a fixed order, as written by write_experiment_config.
std::vector<std::pair<std::string, std::string>> experiment_config_entries(const ExperimentConfig& config);
void write_experiment_config(std::ostream& out, const ExperimentConfig& config);
/// Applies key=value lines on top of `base`. Unknown keys and malformed
/// values throw std::invalid_argument naming the line.
ExperimentConfig read_experiment_config(std::istream& in, ExperimentConfig base = {});
void set_experiment_key(ExperimentConfig& config, const std::string& key, const std::string& value);

std::uint64_t scenario_seed(const ExperimentConfig& config, int replication);
std::uint64_t policy_seed(const ExperimentConfig& config, int replication);

struct ReplicationRow {
  int replication = 0;
  std::uint64_t seed = 0;
  std::size_t requests = 0;
  std::size_t late = 0;
  double penalty_per_request = 0;
  double pct_late = 0;
  double mean_lateness_min = 0;
  double total_travel_min = 0;
  std::vector<double> delivery_delta_samples;  // delivery - deadline, seconds

  friend bool operator==(const ReplicationRow&, const ReplicationRow&) = default;
};

struct Estimate {
  double mean = 0;
  double se = 0;  // standard error
};

struct AggregateReport {
  std::string label;
  std::vector<ReplicationRow> rows;

  std::size_t replications() const { return rows.size(); }
  Estimate penalty_per_request() const;
  Estimate pct_late() const;
  /// Pooled over late deliveries: sum(late * lateness) / sum(late). The
  /// standard error is taken over replications with at least one late request.
  Estimate mean_lateness_min() const;
  Estimate total_travel_min() const;
};

ReplicationRow make_row(int replication, std::uint64_t seed, const KpiReport& kpis);

struct BatchHooks {
  /// Called once per finished episode, serialized under a lock.
  std::function<void(int replication, Policy&, const EpisodeResult&)> on_episode;
};

class BatchFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `replications` episodes in parallel; rows come back in replication
/// order whatever the scheduling. Throws BatchFailed if any episode aborts.
AggregateReport run_batch(const ExperimentConfig& config, const BatchHooks& hooks = {});

struct SurfacePoint {
  double alpha = 0;
  double beta = 0;
  bool failed = false;  // some replication hit the epoch cap
  AggregateReport report;

  double objective() const {
    return failed ? std::numeric_limits<double>::infinity() : report.penalty_per_request().mean;
  }
};

struct GridResult {
  double best_alpha = 0;
  double best_beta = 0;
  bool found = false;  // false when every point failed
  std::vector<SurfacePoint> surface;  // alpha-major, both grids ascending
};

/// Evaluates every (alpha, beta) on common scenario and policy seeds. Best is
/// the smallest mean penalty per request, ties to smaller alpha then beta.
GridResult grid_search(const ExperimentConfig& config, std::vector<double> alphas, std::vector<double> betas,
                       const std::function<void(const SurfacePoint&)>& progress = {});

/// Surface point with the smallest objective among those with `alpha`.
const SurfacePoint* best_for_alpha(const GridResult& grid, double alpha);

enum class ReportFormat { Csv, JsonLines };

/// One line per replication. CSV starts with a fixed header.
void export_report(std::ostream& out, const AggregateReport& report, ReportFormat format);
AggregateReport parse_report(std::istream& in, ReportFormat format);
ReportFormat report_format_for(const std::string& path);

/// label, replications, then mean and standard error of each KPI.
void write_summary(std::ostream& out, const std::vector<AggregateReport>& reports);
void write_surface(std::ostream& out, const GridResult& grid);

struct DensityBin {
  double center_min = 0;
  double density = 0;
};

/// Histogram of pooled (delivery - deadline) samples in minutes, normalized
/// so that sum(density) * bin_width = 1. Bins are aligned to multiples of the
/// width.
std::vector<DensityBin> delivery_density(const std::vector<AggregateReport>& reports, double bin_width_min = 5.0);
void write_density(std::ostream& out, const std::vector<DensityBin>& bins);
/// Probability mass on strictly positive (late) deliveries.
double late_mass(const std::vector<AggregateReport>& reports);

}  // namespace dpdp
