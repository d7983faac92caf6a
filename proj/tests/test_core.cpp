#include "dpdp/core.hpp"
#include "dpdp/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dpdp;

TEST(Penalty, ZeroOnTheDeadline) { EXPECT_EQ(penalty(PenaltySpec{50, 100}, 7200.0, 7200.0), 0.0); }

TEST(Penalty, OneHourLateOnBaseSpec) { EXPECT_DOUBLE_EQ(penalty(PenaltySpec{50, 100}, 7200.0, 10800.0), 150.0); }

TEST(Penalty, NegligibleFixedCostVariant) { EXPECT_DOUBLE_EQ(penalty(PenaltySpec{1, 100}, 0.0, 1800.0), 51.0); }

TEST(Penalty, MillisOverloadAgrees) {
  EXPECT_DOUBLE_EQ(penalty(PenaltySpec{50, 100}, Millis{7'200'000}, Millis{10'800'000}), 150.0);
  EXPECT_EQ(penalty(PenaltySpec{50, 100}, Millis{5}, Millis{5}), 0.0);
}

TEST(Penalty, PropertiesOverRandomInputs) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const PenaltySpec spec{rng.uniform(0, 100), rng.uniform(0, 200)};
    const double deadline = rng.uniform(0, 30000);
    const double a = rng.uniform(0, 40000);
    const double b = a + rng.uniform(0, 5000);
    EXPECT_GE(penalty(spec, deadline, a), 0.0);
    EXPECT_LE(penalty(spec, deadline, a), penalty(spec, deadline, b));
    if (a <= deadline) EXPECT_EQ(penalty(spec, deadline, a), 0.0);
    if (a > deadline && (spec.fixed > 0 || spec.rate > 0)) EXPECT_GT(penalty(spec, deadline, a), 0.0);
  }
}

TEST(Penalty, JumpOfExactlyFixedAtDeadline) {
  const PenaltySpec spec{50, 100};
  EXPECT_NEAR(penalty(spec, 100.0, 100.0 + 1e-9), 50.0, 1e-9);
}

TEST(TravelTime, HandComputedLegs) {
  const TravelMetric m{0.4};
  EXPECT_EQ(travel_time(m, {0, 0}, {0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(travel_time(m, {0, 0}, {0, 400}), 1000.0);
  EXPECT_DOUBLE_EQ(travel_time(m, {0, 0}, {300, 400}), 1250.0);
  EXPECT_EQ(travel_millis(m, {0, 0}, {300, 400}), 1'250'000);
}

TEST(TravelTime, IsAMetric) {
  Rng rng(5);
  const TravelMetric m{0.4};
  for (int i = 0; i < 2000; ++i) {
    const Location a{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    const Location b{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    const Location c{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    EXPECT_GE(travel_time(m, a, b), 0.0);
    EXPECT_EQ(travel_time(m, a, a), 0.0);
    EXPECT_DOUBLE_EQ(travel_time(m, a, b), travel_time(m, b, a));
    EXPECT_LE(travel_time(m, a, c), travel_time(m, a, b) + travel_time(m, b, c) + 1e-9);
  }
}

TEST(Urgency, LinearWithPositiveIntercept) {
  const UrgencySpec h{1, 1};
  const double dbar = 7200;
  const double deadline = 10000;
  EXPECT_DOUBLE_EQ(urgency(h, deadline - dbar, deadline, dbar), 1.0);
  EXPECT_DOUBLE_EQ(urgency(h, deadline, deadline, dbar), 2.0);
  EXPECT_DOUBLE_EQ(urgency(h, deadline + dbar, deadline, dbar), 3.0);
}

TEST(Urgency, NonnegativeAndNondecreasing) {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const UrgencySpec h{rng.uniform(0, 3), rng.uniform(0, 3)};
    const double deadline = rng.uniform(0, 40000);
    const double t = rng.uniform(-20000, 60000);
    const double dt = rng.uniform(0, 3000);
    EXPECT_GE(urgency(h, t, deadline, 7200), 0.0);
    EXPECT_LE(urgency(h, t, deadline, 7200), urgency(h, t + dt, deadline, 7200));
  }
}

TEST(Order, WellFormedChecksSharedEndpoint) {
  Order o;
  o.id = 3;
  o.kind = OrderKind::OneToN;
  o.arrival_time = 10;
  o.requests = {Request{0, 3, {1, 1}, {5, 5}, 10, 20}, Request{1, 3, {1, 1}, {6, 6}, 10, 20}};
  EXPECT_TRUE(is_well_formed(o));
  o.kind = OrderKind::NToOne;
  EXPECT_FALSE(is_well_formed(o));
  o.requests.clear();
  EXPECT_FALSE(is_well_formed(o));
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.between(1, 3);
    EXPECT_EQ(x, b.between(1, 3));
    EXPECT_GE(x, 1);
    EXPECT_LE(x, 3);
    const double u = a.uniform01();
    EXPECT_EQ(u, b.uniform01());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
