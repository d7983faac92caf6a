#pragma once

// Independent recomputations for vehicle paths: a plain fold over legs and
// exhaustive enumeration of every pickup/delivery insertion pair.

#include "dpdp/paths.hpp"
#include "dpdp/random.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace dpdp::oracle {

struct Fold {
  std::vector<Millis> arrivals;
  double length = 0;
  double first_leg = 0;
  double penalty = 0;
};

inline Fold fold_legs(const CostModel& model, const Location& start, Millis start_time,
                      const std::vector<Stop>& nodes) {
  Fold f;
  double x = start.x;
  double y = start.y;
  Millis t = start_time;
  for (const Stop& s : nodes) {
    const double dx = s.location.x - x;
    const double dy = s.location.y - y;
    const double leg = std::sqrt(dx * dx + dy * dy);
    if (f.arrivals.empty()) f.first_leg = leg;
    f.length += leg;
    t += static_cast<Millis>(std::llround(leg / model.metric.speed * 1000.0));
    f.arrivals.push_back(t);
    if (s.kind == StopKind::Delivery && t > s.deadline) {
      f.penalty += model.penalty.fixed + model.penalty.rate * static_cast<double>(t - s.deadline) / 3.6e6;
    }
    x = s.location.x;
    y = s.location.y;
  }
  return f;
}

inline double fold_modified_cost(const CostModel& model, const Location& start, Millis start_time,
                                 const std::vector<Stop>& nodes) {
  const Fold f = fold_legs(model, start, start_time, nodes);
  return f.penalty + model.alpha * (model.alpha_includes_first_leg ? f.length : f.length - f.first_leg);
}

struct EnumeratedInsertion {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<Stop> nodes;
};

/// Builds every sequence with the pickup before the delivery and keeps the
/// cheapest by modified cost (first found wins ties, in lexicographic order).
inline EnumeratedInsertion exhaustive_insertion(const CostModel& model, const VehiclePath& path,
                                                const Request& request) {
  EnumeratedInsertion best;
  const std::size_t q = path.nodes.size();
  for (std::size_t i = 0; i <= q; ++i) {
    for (std::size_t j = i + 1; j <= q + 1; ++j) {
      std::vector<Stop> seq = path.nodes;
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(i), pickup_of(request));
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(j), delivery_of(request));
      const double c = fold_modified_cost(model, path.start_pos, path.start_time, seq);
      if (c < best.cost) best = {c, seq};
    }
  }
  return best;
}

inline Location random_location(Rng& rng, double side = 1000.0) { return {rng.uniform(0, side), rng.uniform(0, side)}; }

inline Request random_request(Rng& rng, RequestId id, Millis now) {
  Request r;
  r.id = id;
  r.order = id;
  r.store = random_location(rng);
  r.customer = random_location(rng);
  r.order_time = now - rng.between(0, 7'200'000);
  r.deadline = r.order_time + 7'200'000;
  return r;
}

/// Random feasible node sequence over `requests` (random interleaving).
inline std::vector<Stop> random_sequence(Rng& rng, const std::vector<Request>& requests) {
  std::vector<Stop> seq;
  for (const Request& r : requests) {
    const auto i = static_cast<std::ptrdiff_t>(rng.below(seq.size() + 1));
    seq.insert(seq.begin() + i, pickup_of(r));
    const auto j = i + 1 + static_cast<std::ptrdiff_t>(rng.below(seq.size() - static_cast<std::size_t>(i)));
    seq.insert(seq.begin() + j, delivery_of(r));
  }
  return seq;
}

}  // namespace dpdp::oracle
