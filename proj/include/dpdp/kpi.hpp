#pragma once

#include "dpdp/core.hpp"

#include <cstddef>
#include <vector>

namespace dpdp {

struct EpisodeLog;

/// Per-episode performance measures.
struct KpiReport {
  double penalty_per_request = 0;  // cost units
  double pct_late = 0;             // percent of requests delivered after the deadline
  double mean_lateness_min = 0;    // minutes, over late requests only
  double total_travel_min = 0;     // minutes, all vehicles
  std::size_t request_count = 0;
  std::vector<double> delivery_delta_samples;  // delivery - deadline, seconds
};

KpiReport compute_kpis(const EpisodeLog& log, const TravelMetric& metric);

}  // namespace dpdp
