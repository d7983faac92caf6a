#include "dpdp/simulation.hpp"

#include "dpdp/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

namespace dpdp {

void ScenarioConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scenario config: ") + what);
  };
  require(horizon >= 0, "horizon must be nonnegative");
  require(interval_minutes > 0, "interval must be positive");
  require(arrival_prob >= 0 && arrival_prob <= 1, "arrival_prob must lie in [0, 1]");
  require(max_order_size >= 1, "max_order_size must be at least 1");
  require(deadline_offset > 0, "deadline offset must be positive");
  require(num_stores >= 1, "num_stores must be at least 1");
  require(num_vehicles >= 1, "num_vehicles must be at least 1");
  require(square_side > 0, "square_side must be positive");
  require(metric.speed > 0, "speed must be positive");
  require(penalty.fixed >= 0 && penalty.rate >= 0, "penalty terms must be nonnegative");
  require(epoch_min_gap >= 0 && epoch_min_gap <= epoch_max_gap, "need 0 <= epoch_min_gap <= epoch_max_gap");
  require(epoch_max_gap > 0, "epoch_max_gap must be positive");
}

double ScenarioConfig::effective_arrival_prob() const {
  if (!equalize_request_rate) return arrival_prob;
  return arrival_prob * 2.0 / (max_order_size + 1.0);
}

std::size_t Scenario::num_requests() const {
  std::size_t n = 0;
  for (const Order& o : arrivals) n += o.requests.size();
  return n;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Scenario s;
  s.config = config;
  const auto point = [&] { return Location{rng.uniform(0.0, config.square_side), rng.uniform(0.0, config.square_side)}; };
  for (int d = 0; d < config.num_stores; ++d) s.stores.push_back(point());

  const Millis interval = from_seconds(config.interval_minutes * 60.0);
  const double prob = config.effective_arrival_prob();
  for (Millis begin = 0; begin < config.horizon; begin += interval) {
    const Millis end = std::min(begin + interval, config.horizon);
    for (OrderKind kind : {OrderKind::OneToN, OrderKind::NToOne}) {
      if (!rng.bernoulli(prob)) continue;
      Order order;
      order.kind = kind;
      order.arrival_time = rng.between(begin + 1, end);
      const auto size = rng.between(1, config.max_order_size);
      const Location shared = kind == OrderKind::OneToN ? s.stores[rng.below(s.stores.size())] : point();
      for (std::int64_t i = 0; i < size; ++i) {
        Request r;
        r.order_time = order.arrival_time;
        r.deadline = order.arrival_time + config.deadline_offset;
        if (kind == OrderKind::OneToN) {
          r.store = shared;
          r.customer = point();
        } else {
          r.store = s.stores[rng.below(s.stores.size())];
          r.customer = shared;
        }
        order.requests.push_back(r);
      }
      s.arrivals.push_back(std::move(order));
    }
  }
  std::stable_sort(s.arrivals.begin(), s.arrivals.end(),
                   [](const Order& a, const Order& b) { return a.arrival_time < b.arrival_time; });
  RequestId next_request = 0;
  for (std::size_t k = 0; k < s.arrivals.size(); ++k) {
    Order& o = s.arrivals[k];
    o.id = static_cast<OrderId>(k);
    for (Request& r : o.requests) {
      r.order = o.id;
      r.id = next_request++;
    }
  }
  return s;
}

std::vector<VehicleId> State::idle_vehicles() const {
  std::vector<VehicleId> out;
  for (std::size_t v = 0; v < vehicles.size(); ++v) {
    if (vehicles[v].free_at <= time) out.push_back(static_cast<VehicleId>(v));
  }
  return out;
}

State initial_state(const Scenario& scenario) {
  State s;
  s.vehicles.assign(static_cast<std::size_t>(scenario.config.num_vehicles), VehicleState{0, scenario.config.depot, {}});
  return s;
}

std::pair<State, double> apply_decision(const State& state, const Decision& decision, const ScenarioConfig& config,
                                        EpisodeLog* log) {
  std::unordered_map<RequestId, const Request*> open;
  for (const Request& r : state.unassigned) open.emplace(r.id, &r);

  State post = state;
  std::set<VehicleId> used_vehicles;
  std::set<RequestId> covered;
  double cost = 0;
  for (const Assignment& a : decision.assignments) {
    const std::string who = "vehicle " + std::to_string(a.vehicle) + ": ";
    if (a.vehicle < 0 || a.vehicle >= static_cast<VehicleId>(state.vehicles.size())) {
      throw DecisionError(who + "no such vehicle");
    }
    if (!used_vehicles.insert(a.vehicle).second) throw DecisionError(who + "assigned more than one path");
    if (!state.is_idle(a.vehicle)) throw DecisionError(who + "is busy");
    const VehicleState& vehicle = state.vehicles[static_cast<std::size_t>(a.vehicle)];
    const VehiclePath& path = a.path;
    if (path.empty()) throw DecisionError(who + "empty path");
    if (path.vehicle != a.vehicle) throw DecisionError(who + "path built for another vehicle");
    if (!(path.start_pos == vehicle.position) || path.start_time != state.time) {
      throw DecisionError(who + "path does not depart from the vehicle's current position and time");
    }
    for (const Stop& stop : path.nodes) {
      const auto it = open.find(stop.request);
      if (it == open.end()) throw DecisionError(who + "request " + std::to_string(stop.request) + " is not open");
      const Request& r = *it->second;
      const Location& expected = stop.kind == StopKind::Pickup ? r.store : r.customer;
      if (!(stop.location == expected) || stop.deadline != r.deadline) {
        throw DecisionError(who + "stop data does not match request " + std::to_string(r.id));
      }
    }
    VehiclePath actual;
    try {
      actual = schedule_path(config.metric, config.penalty, a.vehicle, vehicle.position, state.time, path.nodes);
    } catch (const PathError& e) {
      throw DecisionError(who + e.what());
    }
    if (actual.arrivals != path.arrivals) throw DecisionError(who + "arrival times inconsistent with travel times");
    for (RequestId id : actual.covered) {
      if (!covered.insert(id).second) throw DecisionError("request " + std::to_string(id) + " covered twice");
    }
    cost += actual.true_cost;

    VehicleState& next = post.vehicles[static_cast<std::size_t>(a.vehicle)];
    next.free_at = actual.end_time();
    next.position = actual.end_position();
    if (log) {
      for (std::size_t k = 0; k < actual.nodes.size(); ++k) {
        const Stop& stop = actual.nodes[k];
        if (stop.kind != StopKind::Delivery) continue;
        const Request& r = *open.at(stop.request);
        log->deliveries.push_back({r.id, a.vehicle, r.order_time, r.deadline, actual.arrivals[k],
                                   penalty(config.penalty, r.deadline, actual.arrivals[k])});
      }
      log->vehicle_distance[static_cast<std::size_t>(a.vehicle)] += actual.length;
      log->total_cost += actual.true_cost;
    }
    next.inflight = std::move(actual);
  }
  std::erase_if(post.unassigned, [&](const Request& r) { return covered.count(r.id) > 0; });
  return {std::move(post), cost};
}

std::optional<Millis> next_epoch_time(const State& state, const Scenario& scenario) {
  std::optional<Millis> next;
  const auto consider = [&](Millis t) {
    if (!next || t < *next) next = t;
  };
  bool any_idle = false;
  for (const VehicleState& v : state.vehicles) {
    if (v.free_at > state.time) {
      consider(v.free_at);
    } else {
      any_idle = true;
    }
  }
  if (state.next_order < scenario.arrivals.size()) consider(scenario.arrivals[state.next_order].arrival_time);
  if (any_idle && !state.unassigned.empty()) {
    const ScenarioConfig& c = scenario.config;
    consider(state.time + std::max(c.epoch_max_gap, c.epoch_min_gap));
  }
  return next;
}

State incorporate_arrivals(const State& post_state, const Scenario& scenario, Millis until) {
  if (until < post_state.time) throw std::invalid_argument("cannot move the clock backwards");
  State next = post_state;
  next.time = until;
  ++next.epoch;
  while (next.next_order < scenario.arrivals.size() && scenario.arrivals[next.next_order].arrival_time <= until) {
    const Order& order = scenario.arrivals[next.next_order++];
    next.unassigned.insert(next.unassigned.end(), order.requests.begin(), order.requests.end());
  }
  for (VehicleState& v : next.vehicles) {
    if (v.free_at <= until) {
      v.free_at = until;
      v.inflight.reset();
    }
  }
  return next;
}

EpisodeResult run_episode(const Scenario& scenario, Policy& policy, const EpisodeOptions& options) {
  EpisodeResult result;
  EpisodeLog& log = result.log;
  log.vehicle_distance.assign(static_cast<std::size_t>(scenario.config.num_vehicles), 0.0);
  log.arrived_requests = scenario.num_requests();

  State state = initial_state(scenario);
  for (int k = 0;; ++k) {
    if (k >= options.max_epochs) {
      throw EpisodeAborted("episode exceeded " + std::to_string(options.max_epochs) + " epochs at t=" +
                           std::to_string(state.time) + " ms with " + std::to_string(state.unassigned.size()) +
                           " open requests (policy " + policy.name() + ")");
    }
    log.epoch_times.push_back(state.time);
    const Decision decision = policy.decide(state);
    State post = apply_decision(state, decision, scenario.config, &log).first;
    const std::optional<Millis> next = next_epoch_time(post, scenario);
    if (!next) break;
    state = incorporate_arrivals(post, scenario, *next);
  }
  result.kpis = compute_kpis(log, scenario.config.metric);
  return result;
}

std::string EpisodeLog::serialize() const {
  std::ostringstream out;
  char buf[64];
  out << "arrived " << arrived_requests << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", total_cost);
  out << "total_cost " << buf << '\n';
  out << "epochs " << epoch_times.size() << '\n';
  for (Millis t : epoch_times) out << "epoch " << t << '\n';
  for (std::size_t v = 0; v < vehicle_distance.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g", vehicle_distance[v]);
    out << "vehicle " << v << ' ' << buf << '\n';
  }
  for (const DeliveryRecord& d : deliveries) {
    std::snprintf(buf, sizeof buf, "%.17g", d.penalty);
    out << "delivery " << d.request << ' ' << d.vehicle << ' ' << d.order_time << ' ' << d.deadline << ' '
        << d.delivery << ' ' << buf << '\n';
  }
  return out.str();
}

}  // namespace dpdp
