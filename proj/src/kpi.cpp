#include "dpdp/kpi.hpp"

#include "dpdp/simulation.hpp"

namespace dpdp {

KpiReport compute_kpis(const EpisodeLog& log, const TravelMetric& metric) {
  KpiReport k;
  k.request_count = log.deliveries.size();
  double distance = 0;
  for (double d : log.vehicle_distance) distance += d;
  k.total_travel_min = distance / metric.speed / 60.0;
  if (k.request_count == 0) return k;

  double total_penalty = 0;
  double lateness = 0;
  std::size_t late = 0;
  k.delivery_delta_samples.reserve(k.request_count);
  for (const DeliveryRecord& d : log.deliveries) {
    total_penalty += d.penalty;
    const Millis delta = d.delivery - d.deadline;
    k.delivery_delta_samples.push_back(to_seconds(delta));
    if (delta > 0) {
      ++late;
      lateness += to_seconds(delta);
    }
  }
  const auto n = static_cast<double>(k.request_count);
  k.penalty_per_request = total_penalty / n;
  k.pct_late = 100.0 * static_cast<double>(late) / n;
  k.mean_lateness_min = late ? lateness / static_cast<double>(late) / 60.0 : 0.0;
  return k;
}

}  // namespace dpdp
