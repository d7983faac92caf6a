#pragma once

#include <cstdint>
#include <vector>

namespace dpdp {

/// Simulation clock: integer milliseconds since the start of the episode.
using Millis = std::int64_t;

using RequestId = std::int32_t;
using OrderId = std::int32_t;
using VehicleId = std::int32_t;

constexpr Millis kMillisPerSecond = 1000;

inline double to_seconds(Millis t) { return static_cast<double>(t) / 1000.0; }
Millis from_seconds(double seconds);

struct Location {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

double distance(const Location& a, const Location& b);

/// Constant-speed Euclidean travel.
struct TravelMetric {
  double speed = 0.4;  // distance units per second

  friend bool operator==(const TravelMetric&, const TravelMetric&) = default;
};

/// Travel time in seconds.
double travel_time(const TravelMetric& metric, const Location& a, const Location& b);

/// Travel time rounded to the simulation clock resolution.
Millis travel_millis(const TravelMetric& metric, const Location& a, const Location& b);

/// Indicator-affine lateness penalty: zero on time, `fixed` plus `rate` per
/// hour of lateness afterwards.
struct PenaltySpec {
  double fixed = 50.0;
  double rate = 100.0;  // cost units per hour late

  friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;
};

/// Penalty of delivering at `delivery` against `deadline`, both in seconds.
double penalty(const PenaltySpec& spec, double deadline, double delivery);
double penalty(const PenaltySpec& spec, Millis deadline, Millis delivery);

/// Linear urgency with intercept; see `urgency`.
struct UrgencySpec {
  double intercept = 1.0;
  double slope = 1.0;

  friend bool operator==(const UrgencySpec&, const UrgencySpec&) = default;
};

/// max(0, h0 + h1 * (now - release) / horizon) where release = deadline - horizon.
/// Equals the intercept when the request arrives and intercept + slope at its
/// deadline. All arguments in seconds; `horizon` must be positive.
double urgency(const UrgencySpec& spec, double now, double deadline, double horizon);

/// One product moving from a store to a customer.
struct Request {
  RequestId id = 0;
  OrderId order = 0;
  Location store;
  Location customer;
  Millis order_time = 0;
  Millis deadline = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

enum class OrderKind { OneToN, NToOne };

const char* to_string(OrderKind kind);

struct Order {
  OrderId id = 0;
  OrderKind kind = OrderKind::OneToN;
  Millis arrival_time = 0;
  std::vector<Request> requests;

  friend bool operator==(const Order&, const Order&) = default;
};

/// Checks the shared-endpoint and shared-arrival invariants of an order.
bool is_well_formed(const Order& order);

}  // namespace dpdp
