#pragma once

#include "dpdp/core.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dpdp {

enum class StopKind : std::uint8_t { Pickup, Delivery };

struct Stop {
  RequestId request = 0;
  StopKind kind = StopKind::Pickup;
  Location location;
  Millis deadline = 0;

  friend bool operator==(const Stop&, const Stop&) = default;
};

inline Stop pickup_of(const Request& r) { return {r.id, StopKind::Pickup, r.store, r.deadline}; }
inline Stop delivery_of(const Request& r) { return {r.id, StopKind::Delivery, r.customer, r.deadline}; }

/// A scheduled vehicle path (one column of the master problem). Immutable once
/// built by `schedule_path`.
struct VehiclePath {
  VehicleId vehicle = 0;
  Location start_pos;
  Millis start_time = 0;
  std::vector<Stop> nodes;
  std::vector<Millis> arrivals;
  std::vector<RequestId> covered;  // sorted ascending
  double length = 0;               // includes the leg from start_pos
  double first_leg = 0;
  double true_cost = 0;            // sum of delivery penalties

  bool empty() const { return nodes.empty(); }
  std::size_t num_requests() const { return covered.size(); }
  Millis end_time() const { return arrivals.empty() ? start_time : arrivals.back(); }
  Location end_position() const { return nodes.empty() ? start_pos : nodes.back().location; }
  bool covers(RequestId id) const;
};

/// Which path feasibility condition a node sequence violates.
enum class PathDefect { UnpairedStop, DeliveryBeforePickup, DuplicateStop };

class PathError : public std::invalid_argument {
 public:
  PathError(PathDefect defect, const std::string& what) : std::invalid_argument(what), defect_(defect) {}
  PathDefect defect() const { return defect_; }

 private:
  PathDefect defect_;
};

/// Static ingredients of path costing.
struct CostModel {
  TravelMetric metric;
  PenaltySpec penalty;
  double alpha = 0.0;
  bool alpha_includes_first_leg = true;
};

/// Computes arrival times, length and true penalty cost of visiting `nodes`
/// in order from `start_pos` at `start_time`. Throws PathError when a request
/// is not visited exactly once as a pickup followed by its delivery.
VehiclePath schedule_path(const TravelMetric& metric, const PenaltySpec& penalty, VehicleId vehicle,
                          const Location& start_pos, Millis start_time, std::vector<Stop> nodes);

VehiclePath schedule_path(const CostModel& model, VehicleId vehicle, const Location& start_pos,
                          Millis start_time, std::vector<Stop> nodes);

/// true cost + alpha * length, where the initial repositioning leg is counted
/// unless `include_first_leg` is false.
double modified_cost(const VehiclePath& path, double alpha, bool include_first_leg = true);
double modified_cost(const VehiclePath& path, const CostModel& model);

using RequestValues = std::unordered_map<RequestId, double>;

/// Row duals of the restricted master problem under the solver's convention
/// (minimization, `<=` rows have nonpositive duals).
struct DualPrices {
  std::unordered_map<VehicleId, double> vehicle;  // lambda
  RequestValues cover;                            // pi
  RequestValues urgency;                          // mu, <= 0
};

/// c~ - lambda_v - sum over covered r of (pi_r - beta * h_r * mu_r).
/// Throws std::out_of_range if a covered request has no dual or urgency.
double reduced_cost(const VehiclePath& path, const CostModel& model, const DualPrices& duals, double beta,
                    const RequestValues& urgencies);

/// Per-request share of the reduced cost, pi_r - beta * h_r * mu_r.
double request_prize(RequestId id, const DualPrices& duals, double beta, const RequestValues& urgencies);

/// Objective minimized by cheapest insertion: the modified cost minus an
/// optional per-request prize (the dual part of the reduced cost) and minus
/// the vehicle dual. Without duals it is just the modified cost.
struct PathObjective {
  CostModel model;
  const DualPrices* duals = nullptr;
  double beta = 0.0;
  const RequestValues* urgencies = nullptr;

  double evaluate(const VehiclePath& path) const;
  double prize(RequestId id) const;
};

struct Insertion {
  VehiclePath path;
  double delta = 0.0;  // objective(new path) - objective(old path)
  std::size_t pickup_pos = 0;
  std::size_t delivery_pos = 0;  // position of the delivery in the new sequence
};

/// Inserts the request's pickup and delivery at the pair of positions that
/// minimizes `objective`; ties go to the earliest pickup, then the earliest
/// delivery. The request must not be covered by `path` yet.
Insertion cheapest_insertion(const VehiclePath& path, const Request& request, const PathObjective& objective);

/// Same search, returning only the best delta and positions (no path built).
struct InsertionMove {
  double delta = 0.0;
  std::size_t pickup_pos = 0;
  std::size_t delivery_pos = 0;
};
InsertionMove best_insertion_move(const VehiclePath& path, const Stop& pickup, const Stop& delivery,
                                  const CostModel& model);

/// Re-runs the schedule of `path`'s node sequence from a new anchor.
VehiclePath reanchor(const VehiclePath& path, const CostModel& model, const Location& start_pos,
                     Millis start_time);

}  // namespace dpdp
