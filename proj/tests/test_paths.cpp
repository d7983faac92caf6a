#include "dpdp/paths.hpp"

#include "path_oracle.hpp"

#include <gtest/gtest.h>

using namespace dpdp;

namespace {

CostModel base_model(double alpha = 0.0) { return CostModel{TravelMetric{0.4}, PenaltySpec{50, 100}, alpha, true}; }

Request line_request(Millis deadline) {
  Request r;
  r.id = 7;
  r.store = {0, 400};
  r.customer = {0, 800};
  r.deadline = deadline;
  return r;
}

}  // namespace

TEST(SchedulePath, EmptySequence) {
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {});
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.true_cost, 0.0);
  EXPECT_EQ(p.length, 0.0);
  EXPECT_EQ(p.end_time(), 0);
}

TEST(SchedulePath, OnTimeSingleRequest) {
  const Request r = line_request(3'000'000);
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  ASSERT_EQ(p.arrivals.size(), 2u);
  EXPECT_EQ(p.arrivals[0], 1'000'000);
  EXPECT_EQ(p.arrivals[1], 2'000'000);
  EXPECT_EQ(p.true_cost, 0.0);
  EXPECT_DOUBLE_EQ(p.length, 800.0);
  EXPECT_EQ(p.covered, std::vector<RequestId>{7});
}

TEST(SchedulePath, LateSingleRequest) {
  const Request r = line_request(1'000'000);
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  EXPECT_NEAR(p.true_cost, 50.0 + 100.0 * 1000.0 / 3600.0, 1e-12);
  EXPECT_NEAR(p.true_cost, 77.78, 0.005);
}

TEST(SchedulePath, RejectsInfeasibleSequences) {
  const Request r = line_request(0);
  const auto defect = [&](std::vector<Stop> nodes) {
    try {
      schedule_path(base_model(), 0, {0, 0}, 0, std::move(nodes));
    } catch (const PathError& e) {
      return static_cast<int>(e.defect());
    }
    return -1;
  };
  EXPECT_EQ(defect({pickup_of(r)}), static_cast<int>(PathDefect::UnpairedStop));
  EXPECT_EQ(defect({delivery_of(r), pickup_of(r)}), static_cast<int>(PathDefect::DeliveryBeforePickup));
  EXPECT_EQ(defect({pickup_of(r), pickup_of(r), delivery_of(r)}), static_cast<int>(PathDefect::DuplicateStop));
}

TEST(SchedulePath, MatchesLegFold) {
  Rng rng(17);
  const CostModel model = base_model(0.03);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Request> reqs;
    const auto k = rng.between(0, 4);
    for (RequestId i = 0; i < k; ++i) reqs.push_back(oracle::random_request(rng, i, 3'600'000));
    const auto seq = oracle::random_sequence(rng, reqs);
    const Location start = oracle::random_location(rng);
    const auto path = schedule_path(model, 1, start, 3'600'000, seq);
    const auto fold = oracle::fold_legs(model, start, 3'600'000, seq);
    EXPECT_EQ(path.arrivals, fold.arrivals);
    EXPECT_NEAR(path.length, fold.length, 1e-9);
    EXPECT_NEAR(path.true_cost, fold.penalty, 1e-9);
  }
}

TEST(ModifiedCost, AffineInAlpha) {
  const Request r = line_request(3'000'000);
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  EXPECT_EQ(modified_cost(p, 0.0), p.true_cost);
  EXPECT_DOUBLE_EQ(modified_cost(p, 1.0), 800.0);
  const double slope1 = modified_cost(p, 1.0) - modified_cost(p, 0.0);
  const double slope2 = modified_cost(p, 2.0) - modified_cost(p, 1.0);
  EXPECT_DOUBLE_EQ(slope1, p.length);
  EXPECT_DOUBLE_EQ(slope2, p.length);
  EXPECT_DOUBLE_EQ(modified_cost(p, 1.0, false), 400.0);
}

TEST(ModifiedCost, LengthTwoThousandAtUnitAlpha) {
  Request r;
  r.id = 1;
  r.store = {0, 1000};
  r.customer = {0, 2000};
  r.deadline = 1'000'000'000;
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  EXPECT_DOUBLE_EQ(modified_cost(p, 1.0), 2000.0);
}

TEST(ReducedCost, HandExamples) {
  // One request on a path of modified cost 10.
  Request r;
  r.id = 4;
  r.store = {0, 0};
  r.customer = {0, 0};
  r.deadline = 0;
  CostModel model = base_model(0.0);
  model.penalty = PenaltySpec{10, 0};
  r.deadline = -1;  // delivered at 0 > -1 ms: pays exactly the fixed 10
  const auto p = schedule_path(model, 2, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  ASSERT_DOUBLE_EQ(modified_cost(p, model), 10.0);

  DualPrices zero;
  zero.vehicle[2] = 0;
  zero.cover[4] = 0;
  zero.urgency[4] = 0;
  RequestValues h{{4, 2.0}};
  EXPECT_DOUBLE_EQ(reduced_cost(p, model, zero, 123.0, h), 10.0);

  DualPrices tight = zero;
  tight.vehicle[2] = 10;
  EXPECT_DOUBLE_EQ(reduced_cost(p, model, tight, 5.0, h), 0.0);

  // c~ = 10, lambda = 2, pi = 3, mu = -1, beta * h = 4  ->  10 - 2 - (3 + 4) = 1
  DualPrices d;
  d.vehicle[2] = 2;
  d.cover[4] = 3;
  d.urgency[4] = -1;
  EXPECT_DOUBLE_EQ(reduced_cost(p, model, d, 2.0, h), 1.0);

  d.cover.clear();
  EXPECT_THROW(reduced_cost(p, model, d, 2.0, h), std::out_of_range);
}

TEST(CheapestInsertion, IntoEmptyPath) {
  const Request r = line_request(3'000'000);
  const auto empty = schedule_path(base_model(), 0, {0, 0}, 0, {});
  const auto ins = cheapest_insertion(empty, r, PathObjective{base_model(0.01)});
  ASSERT_EQ(ins.path.nodes.size(), 2u);
  EXPECT_EQ(ins.path.nodes[0], pickup_of(r));
  EXPECT_EQ(ins.path.nodes[1], delivery_of(r));
  EXPECT_DOUBLE_EQ(ins.delta, 8.0);
}

TEST(CheapestInsertion, CoincidentLocationsMatchEnumeration) {
  const CostModel model = base_model(0.02);
  Request a;
  a.id = 1;
  a.store = {100, 100};
  a.customer = {700, 300};
  a.deadline = 2'000'000;
  Request b = a;
  b.id = 2;
  const auto path = schedule_path(model, 0, {0, 0}, 0, {pickup_of(a), delivery_of(a)});
  const auto ins = cheapest_insertion(path, b, PathObjective{model});
  const auto best = oracle::exhaustive_insertion(model, path, b);
  EXPECT_NEAR(modified_cost(ins.path, model), best.cost, 1e-9);
  EXPECT_NEAR(ins.delta, best.cost - modified_cost(path, model), 1e-9);
  EXPECT_EQ(ins.path.nodes, best.nodes);
}

TEST(CheapestInsertion, NeverWorseThanAppending) {
  Rng rng(23);
  const CostModel model = base_model(0.05);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Request> reqs;
    for (RequestId i = 0; i < 3; ++i) reqs.push_back(oracle::random_request(rng, i, 0));
    const auto path = schedule_path(model, 0, oracle::random_location(rng), 0, oracle::random_sequence(rng, reqs));
    const Request extra = oracle::random_request(rng, 9, 0);
    auto appended = path.nodes;
    appended.push_back(pickup_of(extra));
    appended.push_back(delivery_of(extra));
    const auto ins = cheapest_insertion(path, extra, PathObjective{model});
    EXPECT_LE(modified_cost(ins.path, model), oracle::fold_modified_cost(model, path.start_pos, 0, appended) + 1e-9);
  }
}

TEST(CheapestInsertion, DeltaIncludesDualPrize) {
  const CostModel model = base_model(0.01);
  const Request r = line_request(3'000'000);
  const auto empty = schedule_path(model, 0, {0, 0}, 0, {});
  DualPrices d;
  d.vehicle[0] = -1.5;
  d.cover[7] = 4;
  d.urgency[7] = -0.5;
  RequestValues h{{7, 2.0}};
  const PathObjective obj{model, &d, 3.0, &h};
  const auto ins = cheapest_insertion(empty, r, obj);
  // 8 (alpha * 800) - (4 - 3 * 2 * -0.5) = 8 - 7
  EXPECT_DOUBLE_EQ(ins.delta, 1.0);
  EXPECT_DOUBLE_EQ(obj.evaluate(ins.path), 1.0 + 1.5);
}

TEST(CheapestInsertion, RejectsCoveredRequest) {
  const Request r = line_request(0);
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  EXPECT_THROW(cheapest_insertion(p, r, PathObjective{base_model()}), std::invalid_argument);
}

TEST(Reanchor, RecomputesArrivals) {
  const Request r = line_request(3'000'000);
  const auto p = schedule_path(base_model(), 0, {0, 0}, 0, {pickup_of(r), delivery_of(r)});
  const auto q = reanchor(p, base_model(), {0, 0}, 500'000);
  EXPECT_EQ(q.arrivals[1], 2'500'000);
  EXPECT_EQ(q.nodes, p.nodes);
}
