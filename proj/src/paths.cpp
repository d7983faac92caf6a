#include "dpdp/paths.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace dpdp {

bool VehiclePath::covers(RequestId id) const { return std::binary_search(covered.begin(), covered.end(), id); }

VehiclePath schedule_path(const TravelMetric& metric, const PenaltySpec& penalty_spec, VehicleId vehicle,
                          const Location& start_pos, Millis start_time, std::vector<Stop> nodes) {
  // 0 = unseen, 1 = picked up, 2 = delivered
  std::unordered_map<RequestId, int> progress;
  progress.reserve(nodes.size());
  for (const Stop& stop : nodes) {
    int& state = progress[stop.request];
    if (stop.kind == StopKind::Pickup) {
      if (state != 0) throw PathError(PathDefect::DuplicateStop, "request " + std::to_string(stop.request) + " picked up twice");
      state = 1;
    } else {
      if (state == 0) {
        throw PathError(PathDefect::DeliveryBeforePickup,
                        "request " + std::to_string(stop.request) + " delivered before pickup");
      }
      if (state == 2) throw PathError(PathDefect::DuplicateStop, "request " + std::to_string(stop.request) + " delivered twice");
      state = 2;
    }
  }
  VehiclePath path;
  for (const auto& [id, state] : progress) {
    if (state != 2) throw PathError(PathDefect::UnpairedStop, "request " + std::to_string(id) + " has no delivery");
    path.covered.push_back(id);
  }
  std::sort(path.covered.begin(), path.covered.end());

  path.vehicle = vehicle;
  path.start_pos = start_pos;
  path.start_time = start_time;
  path.arrivals.reserve(nodes.size());
  Location here = start_pos;
  Millis clock = start_time;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double leg = distance(here, nodes[k].location);
    if (k == 0) path.first_leg = leg;
    path.length += leg;
    clock += from_seconds(leg / metric.speed);
    path.arrivals.push_back(clock);
    if (nodes[k].kind == StopKind::Delivery) path.true_cost += penalty(penalty_spec, nodes[k].deadline, clock);
    here = nodes[k].location;
  }
  path.nodes = std::move(nodes);
  return path;
}

VehiclePath schedule_path(const CostModel& model, VehicleId vehicle, const Location& start_pos, Millis start_time,
                          std::vector<Stop> nodes) {
  return schedule_path(model.metric, model.penalty, vehicle, start_pos, start_time, std::move(nodes));
}

double modified_cost(const VehiclePath& path, double alpha, bool include_first_leg) {
  const double priced_length = include_first_leg ? path.length : path.length - path.first_leg;
  return path.true_cost + alpha * priced_length;
}

double modified_cost(const VehiclePath& path, const CostModel& model) {
  return modified_cost(path, model.alpha, model.alpha_includes_first_leg);
}

double request_prize(RequestId id, const DualPrices& duals, double beta, const RequestValues& urgencies) {
  // Row duals follow the <=-in-minimization convention, so mu <= 0 and a
  // covered urgent request lowers the reduced cost by beta * h * |mu|.
  return duals.cover.at(id) - beta * urgencies.at(id) * duals.urgency.at(id);
}

double reduced_cost(const VehiclePath& path, const CostModel& model, const DualPrices& duals, double beta,
                    const RequestValues& urgencies) {
  double value = modified_cost(path, model) - duals.vehicle.at(path.vehicle);
  for (RequestId id : path.covered) value -= request_prize(id, duals, beta, urgencies);
  return value;
}

double PathObjective::evaluate(const VehiclePath& path) const {
  if (duals == nullptr) return modified_cost(path, model);
  return reduced_cost(path, model, *duals, beta, *urgencies);
}

double PathObjective::prize(RequestId id) const {
  return duals == nullptr ? 0.0 : request_prize(id, *duals, beta, *urgencies);
}

InsertionMove best_insertion_move(const VehiclePath& path, const Stop& pickup, const Stop& delivery,
                                  const CostModel& model) {
  const std::size_t q = path.nodes.size();
  // State just before node k is visited.
  std::vector<Millis> time_before(q + 1);
  std::vector<double> cost_before(q + 1);
  std::vector<double> length_before(q + 1);
  time_before[0] = path.start_time;
  for (std::size_t k = 0; k < q; ++k) {
    time_before[k + 1] = path.arrivals[k];
    const double leg = distance(k == 0 ? path.start_pos : path.nodes[k - 1].location, path.nodes[k].location);
    length_before[k + 1] = length_before[k] + leg;
    cost_before[k + 1] = cost_before[k] + (path.nodes[k].kind == StopKind::Delivery
                                               ? penalty(model.penalty, path.nodes[k].deadline, path.arrivals[k])
                                               : 0.0);
  }
  const double old_cost = modified_cost(path, model);

  InsertionMove best{std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t i = 0; i <= q; ++i) {
    for (std::size_t j = i; j <= q; ++j) {
      Millis clock = time_before[i];
      Location here = i == 0 ? path.start_pos : path.nodes[i - 1].location;
      double cost = cost_before[i];
      double length = length_before[i];
      double first_leg = path.first_leg;
      bool first = i == 0;
      const auto visit = [&](const Stop& stop) {
        const double leg = distance(here, stop.location);
        if (first) {
          first_leg = leg;
          first = false;
        }
        length += leg;
        clock += from_seconds(leg / model.metric.speed);
        if (stop.kind == StopKind::Delivery) cost += penalty(model.penalty, stop.deadline, clock);
        here = stop.location;
      };
      visit(pickup);
      for (std::size_t k = i; k < j; ++k) visit(path.nodes[k]);
      visit(delivery);
      for (std::size_t k = j; k < q; ++k) visit(path.nodes[k]);
      const double priced = model.alpha_includes_first_leg ? length : length - first_leg;
      const double delta = cost + model.alpha * priced - old_cost;
      if (delta < best.delta) best = {delta, i, j + 1};
    }
  }
  return best;
}

Insertion cheapest_insertion(const VehiclePath& path, const Request& request, const PathObjective& objective) {
  if (path.covers(request.id)) throw std::invalid_argument("request already on path");
  const Stop pickup = pickup_of(request);
  const Stop delivery = delivery_of(request);
  const InsertionMove move = best_insertion_move(path, pickup, delivery, objective.model);

  std::vector<Stop> nodes;
  nodes.reserve(path.nodes.size() + 2);
  nodes.insert(nodes.end(), path.nodes.begin(), path.nodes.begin() + static_cast<std::ptrdiff_t>(move.pickup_pos));
  nodes.push_back(pickup);
  nodes.insert(nodes.end(), path.nodes.begin() + static_cast<std::ptrdiff_t>(move.pickup_pos),
               path.nodes.begin() + static_cast<std::ptrdiff_t>(move.delivery_pos - 1));
  nodes.push_back(delivery);
  nodes.insert(nodes.end(), path.nodes.begin() + static_cast<std::ptrdiff_t>(move.delivery_pos - 1), path.nodes.end());

  Insertion out;
  out.path = schedule_path(objective.model, path.vehicle, path.start_pos, path.start_time, std::move(nodes));
  out.delta = objective.evaluate(out.path) - objective.evaluate(path);
  out.pickup_pos = move.pickup_pos;
  out.delivery_pos = move.delivery_pos;
  return out;
}

VehiclePath reanchor(const VehiclePath& path, const CostModel& model, const Location& start_pos, Millis start_time) {
  return schedule_path(model, path.vehicle, start_pos, start_time, path.nodes);
}

}  // namespace dpdp
