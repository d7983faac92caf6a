#pragma once

// Brute-force LP oracle: enumerates every basic solution of a small LP by
// solving each n-subset of active constraints and keeps the best feasible one.
// Correct whenever the feasible region is bounded (then the optimum, if any,
// is attained at a vertex).

#include "dpdp/lp.hpp"
#include "dpdp/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace dpdp::oracle {

struct Hyperplane {
  Eigen::VectorXd normal;
  double offset;
};

inline std::optional<double> brute_force_lp_minimum(const lp::LinearProgram<double>& lp) {
  const Eigen::Index n = lp.num_vars();
  std::vector<Hyperplane> mandatory;
  std::vector<Hyperplane> optional;
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    Hyperplane h{lp.coefficients.row(i).transpose(), lp.rhs(i)};
    (lp.relations[i] == lp::Relation::Equal ? mandatory : optional).push_back(h);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
    optional.push_back({e, lp.lower(j)});
    if (std::isfinite(lp.upper(j))) optional.push_back({e, lp.upper(j)});
  }

  const auto feasible = [&](const Eigen::VectorXd& x) {
    const double tol = 1e-9;
    for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
      const double lhs = lp.coefficients.row(i).dot(x);
      if (lp.relations[i] == lp::Relation::Equal ? std::abs(lhs - lp.rhs(i)) > tol : lhs > lp.rhs(i) + tol) {
        return false;
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (x(j) < lp.lower(j) - tol || x(j) > lp.upper(j) + tol) return false;
    }
    return true;
  };

  const Eigen::Index need = n - static_cast<Eigen::Index>(mandatory.size());
  std::optional<double> best;
  if (need < 0) {
    // Overdetermined by equalities: fall back to least squares on all of them.
    Eigen::MatrixXd a(mandatory.size(), n);
    Eigen::VectorXd b(mandatory.size());
    for (std::size_t i = 0; i < mandatory.size(); ++i) {
      a.row(static_cast<Eigen::Index>(i)) = mandatory[i].normal.transpose();
      b(static_cast<Eigen::Index>(i)) = mandatory[i].offset;
    }
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    if (feasible(x)) best = lp.objective.dot(x);
    return best;
  }

  std::vector<int> pick(static_cast<std::size_t>(need));
  const int pool = static_cast<int>(optional.size());
  std::function<void(int, int)> recurse = [&](int depth, int start) {
    if (depth == need) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      Eigen::Index row = 0;
      for (const auto& h : mandatory) {
        a.row(row) = h.normal.transpose();
        b(row++) = h.offset;
      }
      for (int k : pick) {
        a.row(row) = optional[static_cast<std::size_t>(k)].normal.transpose();
        b(row++) = optional[static_cast<std::size_t>(k)].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      const double value = lp.objective.dot(x);
      if (!best || value < *best) best = value;
      return;
    }
    for (int k = start; k < pool; ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      recurse(depth + 1, k + 1);
    }
  };
  recurse(0, 0);
  return best;
}

/// Random LP with at most `max_vars` variables and `max_rows` rows whose
/// feasible region is bounded: either every variable has an upper bound or the
/// first row caps the sum of all variables.
inline lp::LinearProgram<double> random_bounded_lp(Rng& rng, int max_vars = 6, int max_rows = 6) {
  const auto n = static_cast<Eigen::Index>(rng.between(1, max_vars));
  const auto m = static_cast<int>(rng.between(1, max_rows));
  lp::LinearProgram<double> lp(n);
  for (Eigen::Index j = 0; j < n; ++j) lp.objective(j) = rng.uniform(-1.0, 1.0);
  const bool boxed = rng.bernoulli(0.5);
  int rows = 0;
  if (boxed) {
    for (Eigen::Index j = 0; j < n; ++j) lp.upper(j) = rng.uniform(0.5, 3.0);
  } else {
    lp.add_row(Eigen::VectorXd::Ones(n), lp::Relation::LessEqual, rng.uniform(1.0, 5.0));
    ++rows;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rng.bernoulli(0.3)) lp.upper(j) = rng.uniform(0.5, 3.0);
    }
  }
  for (; rows < m; ++rows) {
    Eigen::VectorXd a(n);
    for (Eigen::Index j = 0; j < n; ++j) a(j) = rng.bernoulli(0.2) ? 0.0 : rng.uniform(-1.0, 1.0);
    const auto rel = rng.bernoulli(0.2) ? lp::Relation::Equal : lp::Relation::LessEqual;
    lp.add_row(a, rel, rng.uniform(-0.5, 2.0));
  }
  return lp;
}

}  // namespace dpdp::oracle
