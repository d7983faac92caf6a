#pragma once

#include "dpdp/core.hpp"
#include "dpdp/kpi.hpp"
#include "dpdp/paths.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpdp {

/// Parameters of the stochastic system. Defaults are the base system.
struct ScenarioConfig {
  Millis horizon = 8 * 3600 * kMillisPerSecond;  // order-arrival horizon
  double interval_minutes = 4.0;                 // lambda
  double arrival_prob = 0.2;                     // per interval and order kind
  int max_order_size = 1;                        // n
  bool equalize_request_rate = true;             // scale arrival_prob by 2 / (n + 1)
  Millis deadline_offset = 2 * 3600 * kMillisPerSecond;  // d-bar
  int num_stores = 10;
  int num_vehicles = 2;
  Location depot{500.0, 500.0};
  double square_side = 1000.0;
  TravelMetric metric{0.4};
  PenaltySpec penalty{50.0, 100.0};
  Millis epoch_min_gap = 120 * kMillisPerSecond;
  Millis epoch_max_gap = 300 * kMillisPerSecond;  // delta-max
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  double effective_arrival_prob() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// One sampled realization: store locations and the time-ordered orders.
struct Scenario {
  ScenarioConfig config;
  std::vector<Location> stores;
  std::vector<Order> arrivals;

  std::size_t num_requests() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario generate_scenario(const ScenarioConfig& config);

/// Line-oriented text format; see README for the grammar.
void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in);

struct VehicleState {
  Millis free_at = 0;
  Location position;                  // last customer of the current path
  std::optional<VehiclePath> inflight;
};

/// Pre-decision state at a decision epoch.
struct State {
  int epoch = 0;
  Millis time = 0;
  std::vector<Request> unassigned;
  std::vector<VehicleState> vehicles;
  std::size_t next_order = 0;  // index of the first order not yet revealed

  bool is_idle(VehicleId v) const { return vehicles[static_cast<std::size_t>(v)].free_at <= time; }
  std::vector<VehicleId> idle_vehicles() const;
};

/// All vehicles idle at the depot at time zero, nothing revealed.
State initial_state(const Scenario& scenario);

struct Assignment {
  VehicleId vehicle = 0;
  VehiclePath path;
};

struct Decision {
  std::vector<Assignment> assignments;
  bool empty() const { return assignments.empty(); }
};

class DecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeliveryRecord {
  RequestId request = 0;
  VehicleId vehicle = 0;
  Millis order_time = 0;
  Millis deadline = 0;
  Millis delivery = 0;
  double penalty = 0;
};

struct EpisodeLog {
  std::vector<DeliveryRecord> deliveries;  // in assignment order
  std::vector<double> vehicle_distance;
  std::vector<Millis> epoch_times;
  std::size_t arrived_requests = 0;
  double total_cost = 0;

  /// Canonical text rendering, used for byte-level replay comparisons.
  std::string serialize() const;
};

/// Validates `decision` against the decision space at `state` and applies it.
/// Returns the post-decision state and the realized penalty cost, always
/// recomputed from the true penalty function. Throws DecisionError.
std::pair<State, double> apply_decision(const State& state, const Decision& decision, const ScenarioConfig& config,
                                        EpisodeLog* log = nullptr);

/// Time of the next decision epoch, or nullopt once nothing is left to happen.
std::optional<Millis> next_epoch_time(const State& state, const Scenario& scenario);

/// Reveals every order arriving up to `until` and advances the clock.
State incorporate_arrivals(const State& post_state, const Scenario& scenario, Millis until);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const State& state) = 0;
  virtual std::string name() const = 0;
};

class EpisodeAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeOptions {
  int max_epochs = 100000;
};

struct EpisodeResult {
  EpisodeLog log;
  KpiReport kpis;
};

EpisodeResult run_episode(const Scenario& scenario, Policy& policy, const EpisodeOptions& options = {});

}  // namespace dpdp
