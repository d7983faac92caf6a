#pragma once

#include "dpdp/lp.hpp"
#include "dpdp/paths.hpp"
#include "dpdp/random.hpp"
#include "dpdp/simulation.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

namespace dpdp {

/// Set packing with urgency charges (CFA, LIML) or set partitioning with
/// big-M slacks (direct scheduling).
enum class MasterMode { SetPacking, SetPartitioning };

struct CfaParams {
  double alpha = 0.02;
  double beta = 8.0;
  UrgencySpec urgency{1.0, 1.0};
  bool alpha_includes_first_leg = true;
  int rounds = 10;               // pricing rounds per epoch
  int samples = 250;             // randomized constructions per idle vehicle per round
  int keep = 1000;               // best candidates kept per pricing call
  int columns_per_round = 1000;  // columns admitted per round, all vehicles together
  double integer_time_limit_s = 20.0;
  std::size_t pool_capacity = 20000;  // per vehicle
  int max_path_requests = 0;          // 0 = unlimited
  MasterMode mode = MasterMode::SetPacking;
  double big_m = 1e7;
  std::uint64_t seed = 1;

  void validate() const;
};

using PathHandle = std::shared_ptr<const VehiclePath>;

/// Per-vehicle restricted path sets carried between epochs.
class ColumnPool {
 public:
  explicit ColumnPool(std::size_t capacity_per_vehicle = 20000) : capacity_(capacity_per_vehicle) {}

  /// Adds `path` unless the same (vehicle, node sequence) is present.
  bool add(PathHandle path);
  bool contains(const VehiclePath& path) const;
  std::vector<PathHandle> paths(VehicleId vehicle) const;
  std::vector<PathHandle> all() const;
  std::size_t size() const;
  std::size_t size(VehicleId vehicle) const;
  std::size_t capacity() const { return capacity_; }

  /// Evicts the largest-modified-cost paths of every over-full vehicle.
  void enforce_capacity(const CostModel& model);
  void clear();

 private:
  using Key = std::vector<std::int32_t>;
  static Key key_of(const VehiclePath& path);

  std::size_t capacity_;
  std::map<VehicleId, std::vector<PathHandle>> paths_;
  std::map<VehicleId, std::set<Key>> keys_;
};

/// Restricted master problem of one epoch and its linear relaxation.
///
/// Variable layout: one auxiliary variable per request first (eta_r for set
/// packing, the big-M slack for partitioning), then one y per column, so
/// appending columns keeps every existing index stable.
/// Row layout: idle-vehicle rows, then cover rows, then (set packing only)
/// urgency rows  -beta*h_r*sum(delta*y) - eta_r <= -beta*h_r.
struct RmpModel {
  MasterMode mode = MasterMode::SetPacking;
  double alpha = 0;
  double beta = 0;
  double big_m = 0;
  Millis time = 0;
  std::vector<VehicleId> vehicles;
  std::vector<Request> requests;
  std::vector<double> urgency;  // h_r, aligned with `requests`
  std::vector<PathHandle> columns;
  std::vector<double> column_cost;  // modified cost
  lp::LinearProgram<double> lp;
  std::unordered_map<RequestId, int> request_index;
  std::unordered_map<VehicleId, int> vehicle_index;

  lp::Index num_aux() const { return static_cast<lp::Index>(requests.size()); }
  lp::Index column_var(std::size_t c) const { return num_aux() + static_cast<lp::Index>(c); }
  lp::Index vehicle_row(int v) const { return v; }
  lp::Index cover_row(int r) const { return static_cast<lp::Index>(vehicles.size()) + r; }
  lp::Index urgency_row(int r) const { return static_cast<lp::Index>(vehicles.size() + requests.size()) + r; }

  RequestValues urgencies() const;
  DualPrices duals(const lp::LpSolution<double>& solution) const;
  /// Reduced cost of column c straight from the LP data: c - A^T u.
  double lp_reduced_cost(std::size_t c, const lp::LpSolution<double>& solution) const;
  /// Objective of selecting `chosen` columns with the auxiliaries at their
  /// cheapest feasible values.
  double selection_objective(std::span<const std::size_t> chosen) const;
  bool admits(const VehiclePath& path) const;
  void add_columns(std::span<const PathHandle> paths, const CostModel& model);
};

struct EngineContext {
  CostModel model;
  Millis deadline_offset = 0;
  UrgencySpec urgency;
};

EngineContext make_context(const ScenarioConfig& config, const CfaParams& params);

/// Builds the RMP over the idle vehicles of `state`, the `requests` under
/// consideration and every admissible pool column.
RmpModel build_rmp(const State& state, std::span<const Request> requests, const ColumnPool& pool,
                   const CfaParams& params, const EngineContext& context);

/// Randomized cheapest-insertion pricing for one vehicle. Returns at most
/// `params.keep` distinct paths, each of reduced cost below -1e-6, most
/// negative first.
std::vector<VehiclePath> price_columns(const State& state, const RmpModel& rmp, const DualPrices& duals,
                                       VehicleId vehicle, const CfaParams& params, const EngineContext& context,
                                       Rng& rng);

class EngineFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation hook for each solved relaxation inside column generation.
struct RoundView {
  const RmpModel& rmp;
  const lp::LpSolution<double>& relaxation;
  const DualPrices& duals;
  const std::vector<VehiclePath>& priced;  // pricing output under `duals`
};
using RoundObserver = std::function<void(const RoundView&)>;

struct ColumnGenerationResult {
  lp::LpSolution<double> relaxation;  // over every column of `rmp`
  int rounds = 0;
  std::size_t columns_added = 0;
  std::vector<double> objective_history;
};

/// Runs at most `params.rounds` pricing rounds, adding new columns to both
/// `rmp` and `pool`. Throws EngineFailure if a relaxation is not optimal.
ColumnGenerationResult generate_columns(const State& state, RmpModel& rmp, ColumnPool& pool, const CfaParams& params,
                                        const EngineContext& context, Rng& rng, const RoundObserver& observer = {});

struct IntegerResult {
  Decision decision;
  std::vector<std::size_t> chosen;  // column indices into rmp.columns
  double objective = 0;
  std::size_t nodes = 0;
  bool proven_optimal = false;
};

/// Depth-first branch-and-bound over the RMP columns (most fractional
/// variable, 1-branch first). The root relaxation may be passed in to avoid a
/// re-solve. Always returns a feasible decision; the empty one at worst.
IntegerResult solve_integer_rmp(const RmpModel& rmp, double time_limit_s,
                                const lp::LpSolution<double>* root = nullptr);

/// Drops stale paths and re-anchors survivors to the current state.
void carry_over_pool(ColumnPool& pool, const State& state, const EngineContext& context);

/// One line of the per-epoch trace.
struct EpochTrace {
  Millis time = 0;
  std::size_t idle_vehicles = 0;
  std::size_t unassigned = 0;
  int rounds = 0;
  std::size_t columns_added = 0;
  double relaxation_objective = 0;
  double integer_objective = 0;
  bool fallback = false;
};

/// Assigns every considered request to the idle vehicles greedily by cheapest
/// insertion (the direct-scheduling behavior without an LP).
Decision greedy_assign_all(const State& state, std::span<const Request> requests, const EngineContext& context,
                           int max_path_requests = 0);

/// The per-epoch dynamic procedure: carry over the pool, build the RMP,
/// generate columns, solve the integer RMP.
class CfaEngine {
 public:
  CfaEngine(const ScenarioConfig& config, const CfaParams& params);

  Decision decide(const State& state);
  Decision decide(const State& state, std::span<const Request> considered);

  const CfaParams& params() const { return params_; }
  const EngineContext& context() const { return context_; }
  const ColumnPool& pool() const { return pool_; }
  const std::vector<EpochTrace>& trace() const { return trace_; }
  void set_round_observer(RoundObserver observer) { observer_ = std::move(observer); }

 private:
  CfaParams params_;
  EngineContext context_;
  ColumnPool pool_;
  Rng rng_;
  RoundObserver observer_;
  std::vector<EpochTrace> trace_;
};

void write_trace(std::ostream& out, const std::vector<EpochTrace>& trace);

}  // namespace dpdp
