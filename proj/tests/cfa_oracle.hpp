#pragma once

// Exhaustive oracles for the master problem: every feasible path over a small
// request set, and brute-force minimization over column combinations.

#include "dpdp/cfa.hpp"
#include "dpdp/random.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

namespace dpdp::oracle {

/// Every pickup/delivery sequence over every nonempty subset of `requests`.
inline std::vector<VehiclePath> all_paths(const CostModel& model, VehicleId vehicle, const Location& start, Millis t,
                                          const std::vector<Request>& requests) {
  std::vector<VehiclePath> out;
  const std::size_t n = requests.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Stop> stops;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask & (1u << r)) {
        stops.push_back(pickup_of(requests[r]));
        stops.push_back(delivery_of(requests[r]));
      }
    }
    std::vector<int> idx(stops.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<int>(k);
    do {
      bool ok = true;
      std::vector<bool> picked(n * 2, false);
      for (int k : idx) {
        const Stop& s = stops[static_cast<std::size_t>(k)];
        if (s.kind == StopKind::Pickup) {
          picked[static_cast<std::size_t>(s.request)] = true;
        } else if (!picked[static_cast<std::size_t>(s.request)]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::vector<Stop> seq;
      for (int k : idx) seq.push_back(stops[static_cast<std::size_t>(k)]);
      out.push_back(schedule_path(model, vehicle, start, t, seq));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return out;
}

/// Minimum over all feasible column selections of
/// sum(modified cost) + sum over uncovered r of charge[r].
inline double brute_force_selection(const std::vector<VehiclePath>& columns, const CostModel& model,
                                    const std::vector<RequestId>& requests, const std::vector<double>& charge,
                                    const std::vector<VehicleId>& vehicles) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<RequestId> covered;
  std::function<void(std::size_t, double)> rec = [&](std::size_t vi, double cost) {
    if (vi == vehicles.size()) {
      double total = cost;
      for (std::size_t r = 0; r < requests.size(); ++r) {
        if (std::find(covered.begin(), covered.end(), requests[r]) == covered.end()) total += charge[r];
      }
      best = std::min(best, total);
      return;
    }
    rec(vi + 1, cost);  // this vehicle takes nothing
    for (const VehiclePath& p : columns) {
      if (p.vehicle != vehicles[vi]) continue;
      const bool clash = std::any_of(p.covered.begin(), p.covered.end(), [&](RequestId id) {
        return std::find(covered.begin(), covered.end(), id) != covered.end();
      });
      if (clash) continue;
      const std::size_t mark = covered.size();
      covered.insert(covered.end(), p.covered.begin(), p.covered.end());
      rec(vi + 1, cost + modified_cost(p, model));
      covered.resize(mark);
    }
  };
  rec(0, 0.0);
  return best;
}

/// Random idle-fleet instance with drawn engine weights.
struct Micro {
  ScenarioConfig config;
  State state;
  CfaParams params;
  EngineContext context;
};

inline Location random_point(Rng& rng) { return {rng.uniform(0, 1000), rng.uniform(0, 1000)}; }

inline Micro random_micro(Rng& rng, int vehicles, int requests, MasterMode mode) {
  Micro m;
  m.config.num_vehicles = vehicles;
  m.state.time = 3 * 3600 * 1000 + rng.between(0, 3600 * 1000);
  for (int v = 0; v < vehicles; ++v) m.state.vehicles.push_back({m.state.time, random_point(rng), {}});
  for (int r = 0; r < requests; ++r) {
    const Millis order = m.state.time - rng.between(0, 3 * 3600 * 1000);
    m.state.unassigned.push_back({r, r, random_point(rng), random_point(rng), order, order + m.config.deadline_offset});
  }
  const double alphas[] = {0.0, 0.02, 0.1};
  const double betas[] = {0.5, 8.0, 64.0};
  m.params.alpha = alphas[rng.below(3)];
  m.params.beta = betas[rng.below(3)];
  m.params.mode = mode;
  m.params.big_m = 1e5;
  m.context = make_context(m.config, m.params);
  return m;
}

/// Every path of every idle vehicle over all unassigned requests.
inline ColumnPool exhaustive_pool(const Micro& m) {
  ColumnPool pool;
  for (VehicleId v : m.state.idle_vehicles()) {
    for (VehiclePath& p : all_paths(m.context.model, v, m.state.vehicles[static_cast<std::size_t>(v)].position,
                                    m.state.time, m.state.unassigned)) {
      pool.add(std::make_shared<const VehiclePath>(std::move(p)));
    }
  }
  return pool;
}

/// Brute-force optimum of the master problem over the columns of `rmp`; an
/// uncovered request costs beta*h (set packing) or big-M (partitioning).
inline double brute_force_master(const RmpModel& rmp, const CostModel& model) {
  std::vector<RequestId> ids;
  std::vector<double> charge;
  for (std::size_t r = 0; r < rmp.requests.size(); ++r) {
    ids.push_back(rmp.requests[r].id);
    charge.push_back(rmp.mode == MasterMode::SetPacking ? rmp.beta * rmp.urgency[r] : rmp.big_m);
  }
  std::vector<VehiclePath> columns;
  for (const PathHandle& p : rmp.columns) columns.push_back(*p);
  return brute_force_selection(columns, model, ids, charge, rmp.vehicles);
}

}  // namespace dpdp::oracle
