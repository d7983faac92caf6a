#include "dpdp/core.hpp"

#include <algorithm>
#include <cmath>

namespace dpdp {

Millis from_seconds(double seconds) { return static_cast<Millis>(std::llround(seconds * 1000.0)); }

double distance(const Location& a, const Location& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double travel_time(const TravelMetric& metric, const Location& a, const Location& b) {
  return distance(a, b) / metric.speed;
}

Millis travel_millis(const TravelMetric& metric, const Location& a, const Location& b) {
  return from_seconds(travel_time(metric, a, b));
}

double penalty(const PenaltySpec& spec, double deadline, double delivery) {
  if (delivery <= deadline) return 0.0;
  return spec.fixed + spec.rate * (delivery - deadline) / 3600.0;
}

double penalty(const PenaltySpec& spec, Millis deadline, Millis delivery) {
  if (delivery <= deadline) return 0.0;
  return spec.fixed + spec.rate * to_seconds(delivery - deadline) / 3600.0;
}

double urgency(const UrgencySpec& spec, double now, double deadline, double horizon) {
  const double release = deadline - horizon;
  return std::max(0.0, spec.intercept + spec.slope * (now - release) / horizon);
}

const char* to_string(OrderKind kind) { return kind == OrderKind::OneToN ? "1toN" : "Nto1"; }

bool is_well_formed(const Order& order) {
  if (order.requests.empty()) return false;
  const Request& first = order.requests.front();
  return std::all_of(order.requests.begin(), order.requests.end(), [&](const Request& r) {
    if (r.order_time != order.arrival_time || r.order != order.id) return false;
    return order.kind == OrderKind::OneToN ? r.store == first.store : r.customer == first.customer;
  });
}

}  // namespace dpdp
