#include "dpdp/cfa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace dpdp {

namespace {

constexpr double kNegativeReducedCost = -1e-6;
constexpr double kIntegrality = 1e-6;

std::vector<Stop> with_insertion(const std::vector<Stop>& nodes, const Stop& pickup, const Stop& delivery,
                                 const InsertionMove& move) {
  std::vector<Stop> out;
  out.reserve(nodes.size() + 2);
  const auto at = [&](std::size_t k) { return nodes.begin() + static_cast<std::ptrdiff_t>(k); };
  out.insert(out.end(), nodes.begin(), at(move.pickup_pos));
  out.push_back(pickup);
  out.insert(out.end(), at(move.pickup_pos), at(move.delivery_pos - 1));
  out.push_back(delivery);
  out.insert(out.end(), at(move.delivery_pos - 1), nodes.end());
  return out;
}

std::vector<std::int32_t> sequence_key(const VehiclePath& path) {
  std::vector<std::int32_t> key;
  key.reserve(path.nodes.size());
  for (const Stop& s : path.nodes) key.push_back(2 * s.request + (s.kind == StopKind::Delivery ? 1 : 0));
  return key;
}

}  // namespace

void CfaParams::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid CFA parameters: ") + what);
  };
  require(alpha >= 0 && beta >= 0, "alpha and beta must be nonnegative");
  require(rounds >= 1 && samples >= 1 && keep >= 1 && columns_per_round >= 1, "round counts must be positive");
  require(integer_time_limit_s > 0, "integer time limit must be positive");
  require(pool_capacity >= 1, "pool capacity must be positive");
  require(max_path_requests >= 0, "path size cap must be nonnegative");
  require(big_m > 0, "big_m must be positive");
}

// ---------------------------------------------------------------- pool

ColumnPool::Key ColumnPool::key_of(const VehiclePath& path) { return sequence_key(path); }

bool ColumnPool::add(PathHandle path) {
  if (!keys_[path->vehicle].insert(key_of(*path)).second) return false;
  paths_[path->vehicle].push_back(std::move(path));
  return true;
}

bool ColumnPool::contains(const VehiclePath& path) const {
  const auto it = keys_.find(path.vehicle);
  return it != keys_.end() && it->second.count(key_of(path)) > 0;
}

std::vector<PathHandle> ColumnPool::paths(VehicleId vehicle) const {
  const auto it = paths_.find(vehicle);
  return it == paths_.end() ? std::vector<PathHandle>{} : it->second;
}

std::vector<PathHandle> ColumnPool::all() const {
  std::vector<PathHandle> out;
  for (const auto& [v, list] : paths_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::size_t ColumnPool::size() const {
  std::size_t n = 0;
  for (const auto& [v, list] : paths_) n += list.size();
  return n;
}

std::size_t ColumnPool::size(VehicleId vehicle) const {
  const auto it = paths_.find(vehicle);
  return it == paths_.end() ? 0 : it->second.size();
}

void ColumnPool::enforce_capacity(const CostModel& model) {
  for (auto& [v, list] : paths_) {
    if (list.size() <= capacity_) continue;
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(list.size());
    for (std::size_t k = 0; k < list.size(); ++k) order.emplace_back(modified_cost(*list[k], model), k);
    std::stable_sort(order.begin(), order.end());
    std::vector<bool> keep(list.size(), false);
    for (std::size_t k = 0; k < capacity_; ++k) keep[order[k].second] = true;
    std::vector<PathHandle> kept;
    std::set<Key> keys;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (!keep[k]) continue;
      keys.insert(key_of(*list[k]));
      kept.push_back(std::move(list[k]));
    }
    list = std::move(kept);
    keys_[v] = std::move(keys);
  }
}

void ColumnPool::clear() {
  paths_.clear();
  keys_.clear();
}

// ---------------------------------------------------------------- RMP

EngineContext make_context(const ScenarioConfig& config, const CfaParams& params) {
  EngineContext c;
  c.model = {config.metric, config.penalty, params.alpha, params.alpha_includes_first_leg};
  c.deadline_offset = config.deadline_offset;
  c.urgency = params.urgency;
  return c;
}

RequestValues RmpModel::urgencies() const {
  RequestValues out;
  for (std::size_t r = 0; r < requests.size(); ++r) out.emplace(requests[r].id, urgency[r]);
  return out;
}

DualPrices RmpModel::duals(const lp::LpSolution<double>& solution) const {
  DualPrices d;
  for (std::size_t v = 0; v < vehicles.size(); ++v) d.vehicle.emplace(vehicles[v], solution.dual(vehicle_row(static_cast<int>(v))));
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const int i = static_cast<int>(r);
    d.cover.emplace(requests[r].id, solution.dual(cover_row(i)));
    d.urgency.emplace(requests[r].id, mode == MasterMode::SetPacking ? solution.dual(urgency_row(i)) : 0.0);
  }
  return d;
}

double RmpModel::lp_reduced_cost(std::size_t c, const lp::LpSolution<double>& solution) const {
  const lp::Index j = column_var(c);
  return lp.objective(j) - lp.coefficients.col(j).dot(solution.dual);
}

double RmpModel::selection_objective(std::span<const std::size_t> chosen) const {
  std::vector<bool> covered(requests.size(), false);
  double total = 0;
  for (std::size_t c : chosen) {
    total += column_cost[c];
    for (RequestId id : columns[c]->covered) covered[static_cast<std::size_t>(request_index.at(id))] = true;
  }
  for (std::size_t r = 0; r < requests.size(); ++r) {
    if (covered[r]) continue;
    total += mode == MasterMode::SetPacking ? beta * urgency[r] : big_m;
  }
  return total;
}

bool RmpModel::admits(const VehiclePath& path) const {
  if (path.empty() || !vehicle_index.count(path.vehicle)) return false;
  return std::all_of(path.covered.begin(), path.covered.end(),
                     [&](RequestId id) { return request_index.count(id) > 0; });
}

void RmpModel::add_columns(std::span<const PathHandle> paths, const CostModel& model) {
  if (paths.empty()) return;
  const lp::Index old_n = lp.num_vars();
  const auto added = static_cast<lp::Index>(paths.size());
  const lp::Index n = old_n + added;
  lp.objective.conservativeResize(n);
  lp.lower.conservativeResize(n);
  lp.upper.conservativeResize(n);
  lp.coefficients.conservativeResize(Eigen::NoChange, n);
  lp.coefficients.rightCols(added).setZero();
  for (lp::Index k = 0; k < added; ++k) {
    const VehiclePath& p = *paths[static_cast<std::size_t>(k)];
    const lp::Index j = old_n + k;
    const double cost = modified_cost(p, model);
    lp.objective(j) = cost;
    lp.lower(j) = 0;
    lp.upper(j) = std::numeric_limits<double>::infinity();
    lp.coefficients(vehicle_row(vehicle_index.at(p.vehicle)), j) = 1;
    for (RequestId id : p.covered) {
      const int r = request_index.at(id);
      lp.coefficients(cover_row(r), j) = 1;
      if (mode == MasterMode::SetPacking) lp.coefficients(urgency_row(r), j) = -beta * urgency[static_cast<std::size_t>(r)];
    }
    columns.push_back(paths[static_cast<std::size_t>(k)]);
    column_cost.push_back(cost);
  }
}

RmpModel build_rmp(const State& state, std::span<const Request> requests, const ColumnPool& pool,
                   const CfaParams& params, const EngineContext& context) {
  RmpModel m;
  m.mode = params.mode;
  m.alpha = params.alpha;
  m.beta = params.beta;
  m.big_m = params.big_m;
  m.time = state.time;
  m.vehicles = state.idle_vehicles();
  m.requests.assign(requests.begin(), requests.end());
  const double horizon = to_seconds(context.deadline_offset);
  for (std::size_t r = 0; r < m.requests.size(); ++r) {
    m.request_index.emplace(m.requests[r].id, static_cast<int>(r));
    m.urgency.push_back(urgency(context.urgency, to_seconds(state.time), to_seconds(m.requests[r].deadline), horizon));
  }
  for (std::size_t v = 0; v < m.vehicles.size(); ++v) m.vehicle_index.emplace(m.vehicles[v], static_cast<int>(v));

  const auto num_requests = static_cast<lp::Index>(m.requests.size());
  const auto num_vehicles = static_cast<lp::Index>(m.vehicles.size());
  lp::LinearProgram<double> lp(num_requests);
  lp.objective.setConstant(m.mode == MasterMode::SetPacking ? 1.0 : m.big_m);
  const lp::Index rows = num_vehicles + num_requests * (m.mode == MasterMode::SetPacking ? 2 : 1);
  lp.coefficients = Eigen::MatrixXd::Zero(rows, num_requests);
  lp.rhs = Eigen::VectorXd::Zero(rows);
  lp.relations.assign(static_cast<std::size_t>(rows), lp::Relation::LessEqual);
  for (lp::Index v = 0; v < num_vehicles; ++v) lp.rhs(m.vehicle_row(static_cast<int>(v))) = 1;
  for (lp::Index r = 0; r < num_requests; ++r) {
    const int i = static_cast<int>(r);
    lp.rhs(m.cover_row(i)) = 1;
    if (m.mode == MasterMode::SetPacking) {
      lp.coefficients(m.urgency_row(i), r) = -1;
      lp.rhs(m.urgency_row(i)) = -m.beta * m.urgency[static_cast<std::size_t>(r)];
    } else {
      lp.coefficients(m.cover_row(i), r) = 1;
      lp.relations[static_cast<std::size_t>(m.cover_row(i))] = lp::Relation::Equal;
    }
  }
  m.lp = std::move(lp);

  std::vector<PathHandle> admitted;
  for (VehicleId v : m.vehicles) {
    for (PathHandle& p : pool.paths(v)) {
      if (p->start_time != state.time) continue;
      if (params.max_path_requests > 0 && p->num_requests() > static_cast<std::size_t>(params.max_path_requests)) continue;
      if (m.admits(*p)) admitted.push_back(std::move(p));
    }
  }
  m.add_columns(admitted, context.model);
  return m;
}

// ---------------------------------------------------------------- pricing

std::vector<VehiclePath> price_columns(const State& state, const RmpModel& rmp, const DualPrices& duals,
                                       VehicleId vehicle, const CfaParams& params, const EngineContext& context,
                                       Rng& rng) {
  const std::size_t n = rmp.requests.size();
  if (n == 0 || !rmp.vehicle_index.count(vehicle)) return {};
  const RequestValues urgencies = rmp.urgencies();
  std::vector<double> prize(n);
  std::vector<Stop> pickups(n);
  std::vector<Stop> deliveries(n);
  for (std::size_t r = 0; r < n; ++r) {
    prize[r] = request_prize(rmp.requests[r].id, duals, rmp.beta, urgencies);
    pickups[r] = pickup_of(rmp.requests[r]);
    deliveries[r] = delivery_of(rmp.requests[r]);
  }
  const VehicleState& vs = state.vehicles[static_cast<std::size_t>(vehicle)];
  const std::size_t cap = params.max_path_requests > 0 ? static_cast<std::size_t>(params.max_path_requests) : n;

  std::map<std::vector<std::int32_t>, std::pair<double, VehiclePath>> found;
  std::set<std::vector<std::uint32_t>> tried;
  std::vector<std::uint32_t> order(n);
  for (int s = 0; s < params.samples; ++s) {
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(order));
    // Construction is deterministic given the order, so a repeated order adds nothing.
    if (!tried.insert(order).second) continue;

    VehiclePath path = schedule_path(context.model, vehicle, vs.position, state.time, {});
    for (std::uint32_t r : order) {
      if (path.num_requests() >= cap) break;
      const InsertionMove move = best_insertion_move(path, pickups[r], deliveries[r], context.model);
      if (move.delta - prize[r] >= 0) continue;
      path = schedule_path(context.model, vehicle, vs.position, state.time,
                           with_insertion(path.nodes, pickups[r], deliveries[r], move));
      const double rc = reduced_cost(path, context.model, duals, rmp.beta, urgencies);
      if (rc >= kNegativeReducedCost) continue;
      auto key = sequence_key(path);
      if (!found.count(key)) found.emplace(std::move(key), std::make_pair(rc, path));
    }
  }

  std::vector<std::pair<double, const std::vector<std::int32_t>*>> ranked;
  ranked.reserve(found.size());
  for (const auto& [key, entry] : found) ranked.emplace_back(entry.first, &key);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (ranked.size() > static_cast<std::size_t>(params.keep)) ranked.resize(static_cast<std::size_t>(params.keep));
  std::vector<VehiclePath> out;
  out.reserve(ranked.size());
  for (const auto& [rc, key] : ranked) out.push_back(std::move(found.at(*key).second));
  return out;
}

// ---------------------------------------------------------------- column generation

ColumnGenerationResult generate_columns(const State& state, RmpModel& rmp, ColumnPool& pool, const CfaParams& params,
                                        const EngineContext& context, Rng& rng, const RoundObserver& observer) {
  ColumnGenerationResult out;
  lp::Basis basis;
  bool stale = true;
  for (int round = 0; round < params.rounds; ++round) {
    out.relaxation = lp::solve_lp(rmp.lp, {}, basis);
    stale = false;
    if (out.relaxation.status != lp::Status::Optimal) {
      throw EngineFailure(std::string("RMP relaxation not optimal: ") + lp::to_string(out.relaxation.status));
    }
    ++out.rounds;
    out.objective_history.push_back(out.relaxation.objective_value);
    basis = out.relaxation.basis;
    const DualPrices duals = rmp.duals(out.relaxation);
    const RequestValues urgencies = rmp.urgencies();

    struct Candidate {
      double rc;
      VehicleId vehicle;
      std::size_t index;
    };
    std::vector<std::vector<VehiclePath>> priced;
    std::vector<Candidate> candidates;
    for (VehicleId v : rmp.vehicles) {
      priced.push_back(price_columns(state, rmp, duals, v, params, context, rng));
      const auto& list = priced.back();
      for (std::size_t k = 0; k < list.size(); ++k) {
        candidates.push_back({reduced_cost(list[k], context.model, duals, rmp.beta, urgencies), v, k});
      }
    }
    if (observer) {
      std::vector<VehiclePath> flat;
      for (const auto& list : priced) flat.insert(flat.end(), list.begin(), list.end());
      observer({rmp, out.relaxation, duals, flat});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.rc < b.rc; });

    std::vector<PathHandle> fresh;
    for (const Candidate& c : candidates) {
      if (fresh.size() >= static_cast<std::size_t>(params.columns_per_round)) break;
      const auto v = static_cast<std::size_t>(rmp.vehicle_index.at(c.vehicle));
      auto handle = std::make_shared<const VehiclePath>(std::move(priced[v][c.index]));
      if (pool.add(handle)) fresh.push_back(std::move(handle));
    }
    if (fresh.empty()) break;

    const lp::Index old_n = rmp.lp.num_vars();
    rmp.add_columns(fresh, context.model);
    const lp::Index shift = rmp.lp.num_vars() - old_n;
    for (lp::Index& b : basis) {
      if (b >= old_n) b += shift;
    }
    out.columns_added += fresh.size();
    stale = true;
  }
  if (stale) {
    out.relaxation = lp::solve_lp(rmp.lp, {}, basis);
    if (out.relaxation.status != lp::Status::Optimal) {
      throw EngineFailure(std::string("RMP relaxation not optimal: ") + lp::to_string(out.relaxation.status));
    }
    out.objective_history.push_back(out.relaxation.objective_value);
  }
  return out;
}

// ---------------------------------------------------------------- branch and bound

IntegerResult solve_integer_rmp(const RmpModel& rmp, double time_limit_s, const lp::LpSolution<double>* root) {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration<double>(time_limit_s);
  const std::size_t num_columns = rmp.columns.size();

  IntegerResult best;
  best.objective = rmp.selection_objective({});
  best.proven_optimal = true;

  // Each node is a list of (column, value) fixings.
  using Fixings = std::vector<std::pair<std::size_t, int>>;
  std::vector<Fixings> stack{{}};
  while (!stack.empty()) {
    if (Clock::now() > deadline) {
      best.proven_optimal = false;
      break;
    }
    Fixings fix = std::move(stack.back());
    stack.pop_back();
    ++best.nodes;

    lp::LpSolution<double> sol;
    if (fix.empty() && root && root->status == lp::Status::Optimal) {
      sol = *root;
    } else {
      lp::LinearProgram<double> node = rmp.lp;
      for (const auto& [c, value] : fix) {
        node.lower(rmp.column_var(c)) = value;
        node.upper(rmp.column_var(c)) = value;
      }
      sol = lp::solve_lp(node);
    }
    if (sol.status == lp::Status::Infeasible) continue;
    if (sol.status != lp::Status::Optimal) {
      best.proven_optimal = false;
      continue;
    }
    if (sol.objective_value >= best.objective - 1e-9) continue;

    std::size_t branch = num_columns;
    double most = kIntegrality;
    for (std::size_t c = 0; c < num_columns; ++c) {
      const double y = sol.primal(rmp.column_var(c));
      const double frac = std::min(y - std::floor(y), std::ceil(y) - y);
      if (frac > most + 1e-12) {
        most = frac;
        branch = c;
      }
    }
    if (branch == num_columns) {
      std::vector<std::size_t> chosen;
      for (std::size_t c = 0; c < num_columns; ++c) {
        if (sol.primal(rmp.column_var(c)) > 0.5) chosen.push_back(c);
      }
      const double value = rmp.selection_objective(chosen);
      if (value < best.objective - 1e-9) {
        best.objective = value;
        best.chosen = std::move(chosen);
      }
      continue;
    }
    Fixings zero = fix;
    zero.emplace_back(branch, 0);
    fix.emplace_back(branch, 1);
    stack.push_back(std::move(zero));
    stack.push_back(std::move(fix));
  }
  for (std::size_t c : best.chosen) best.decision.assignments.push_back({rmp.columns[c]->vehicle, *rmp.columns[c]});
  return best;
}

// ---------------------------------------------------------------- carry-over

void carry_over_pool(ColumnPool& pool, const State& state, const EngineContext& context) {
  std::unordered_set<RequestId> open;
  for (const Request& r : state.unassigned) open.insert(r.id);
  ColumnPool next(pool.capacity());
  for (const PathHandle& p : pool.all()) {
    if (p->vehicle < 0 || p->vehicle >= static_cast<VehicleId>(state.vehicles.size())) continue;
    if (!state.is_idle(p->vehicle)) continue;
    if (!std::all_of(p->covered.begin(), p->covered.end(), [&](RequestId id) { return open.count(id) > 0; })) continue;
    const VehicleState& vs = state.vehicles[static_cast<std::size_t>(p->vehicle)];
    if (p->start_time == state.time && p->start_pos == vs.position) {
      next.add(p);
      continue;
    }
    try {
      next.add(std::make_shared<const VehiclePath>(reanchor(*p, context.model, vs.position, state.time)));
    } catch (const PathError&) {
      // dropped
    }
  }
  next.enforce_capacity(context.model);
  pool = std::move(next);
}

// ---------------------------------------------------------------- greedy

Decision greedy_assign_all(const State& state, std::span<const Request> requests, const EngineContext& context,
                           int max_path_requests) {
  const std::vector<VehicleId> idle = state.idle_vehicles();
  if (idle.empty()) return {};
  std::vector<VehiclePath> paths;
  for (VehicleId v : idle) {
    paths.push_back(schedule_path(context.model, v, state.vehicles[static_cast<std::size_t>(v)].position, state.time, {}));
  }
  std::vector<const Request*> order;
  for (const Request& r : requests) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const Request* a, const Request* b) {
    return std::tie(a->order_time, a->id) < std::tie(b->order_time, b->id);
  });
  for (const Request* r : order) {
    const Stop pickup = pickup_of(*r);
    const Stop delivery = delivery_of(*r);
    std::size_t best = paths.size();
    InsertionMove best_move;
    for (std::size_t k = 0; k < paths.size(); ++k) {
      if (max_path_requests > 0 && paths[k].num_requests() >= static_cast<std::size_t>(max_path_requests)) continue;
      const InsertionMove move = best_insertion_move(paths[k], pickup, delivery, context.model);
      if (best == paths.size() || move.delta < best_move.delta) {
        best = k;
        best_move = move;
      }
    }
    if (best == paths.size()) break;
    VehiclePath& p = paths[best];
    p = schedule_path(context.model, p.vehicle, p.start_pos, p.start_time,
                      with_insertion(p.nodes, pickup, delivery, best_move));
  }
  Decision d;
  for (VehiclePath& p : paths) {
    if (!p.empty()) d.assignments.push_back({p.vehicle, std::move(p)});
  }
  return d;
}

// ---------------------------------------------------------------- engine

CfaEngine::CfaEngine(const ScenarioConfig& config, const CfaParams& params)
    : params_(params), context_(make_context(config, params)), pool_(params.pool_capacity), rng_(params.seed) {
  params_.validate();
}

Decision CfaEngine::decide(const State& state) { return decide(state, state.unassigned); }

Decision CfaEngine::decide(const State& state, std::span<const Request> considered) {
  EpochTrace t;
  t.time = state.time;
  t.idle_vehicles = state.idle_vehicles().size();
  t.unassigned = state.unassigned.size();
  carry_over_pool(pool_, state, context_);
  Decision decision;
  if (t.idle_vehicles > 0 && !considered.empty()) {
    RmpModel rmp = build_rmp(state, considered, pool_, params_, context_);
    try {
      const ColumnGenerationResult cg = generate_columns(state, rmp, pool_, params_, context_, rng_, observer_);
      t.rounds = cg.rounds;
      t.columns_added = cg.columns_added;
      t.relaxation_objective = cg.relaxation.objective_value;
      IntegerResult ir = solve_integer_rmp(rmp, params_.integer_time_limit_s, &cg.relaxation);
      t.integer_objective = ir.objective;
      decision = std::move(ir.decision);
    } catch (const EngineFailure&) {
      t.fallback = true;
      decision = greedy_assign_all(state, considered, context_, params_.max_path_requests);
    }
    pool_.enforce_capacity(context_.model);
  }
  trace_.push_back(t);
  return decision;
}

void write_trace(std::ostream& out, const std::vector<EpochTrace>& trace) {
  out << "time_s,idle,unassigned,rounds,columns_added,relaxation_objective,integer_objective,fallback\n";
  char buf[256];
  for (const EpochTrace& t : trace) {
    std::snprintf(buf, sizeof buf, "%.3f,%zu,%zu,%d,%zu,%.17g,%.17g,%d\n", to_seconds(t.time), t.idle_vehicles,
                  t.unassigned, t.rounds, t.columns_added, t.relaxation_objective, t.integer_objective,
                  t.fallback ? 1 : 0);
    out << buf;
  }
}

}  // namespace dpdp
