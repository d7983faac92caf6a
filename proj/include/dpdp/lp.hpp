#pragma once

// Dense two-phase primal simplex with exact dual extraction.
//
// Sign convention for dual prices: the solver minimizes, and the dual of a
// `LessEqual` row is nonpositive. Reduced costs are d = c - A^T u and are
// nonnegative at optimality for variables resting at their lower bound.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace dpdp::lp {

using Index = Eigen::Index;

enum class Relation { LessEqual, Equal };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "?";
}

/// Every tolerance the solver and its certificate checks use.
struct Tolerances {
  static constexpr double pivot = 1e-9;        // smallest admissible pivot element
  static constexpr double optimality = 1e-9;   // entering threshold, scaled by (1 + |c|inf)
  static constexpr double feasibility = 1e-9;  // phase-1 residual, scaled by (1 + |b|inf)
  static constexpr double certificate = 1e-7;  // certificate checks, relative
};

template <typename Scalar>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector objective;                // minimized
  Matrix coefficients;             // one row per constraint
  std::vector<Relation> relations;
  Vector rhs;
  Vector lower;                    // finite; defaults to 0
  Vector upper;                    // +inf when absent

  LinearProgram() = default;
  explicit LinearProgram(Index num_vars)
      : objective(Vector::Zero(num_vars)),
        coefficients(0, num_vars),
        rhs(0),
        lower(Vector::Zero(num_vars)),
        upper(Vector::Constant(num_vars, std::numeric_limits<Scalar>::infinity())) {}

  Index num_vars() const { return objective.size(); }
  Index num_rows() const { return coefficients.rows(); }

  void add_row(const Eigen::Ref<const Vector>& coeffs, Relation relation, Scalar b) {
    if (coeffs.size() != num_vars()) throw std::invalid_argument("row width mismatch");
    const Index m = num_rows();
    coefficients.conservativeResize(m + 1, Eigen::NoChange);
    coefficients.row(m) = coeffs.transpose();
    rhs.conservativeResize(m + 1);
    rhs(m) = b;
    relations.push_back(relation);
  }

  bool well_formed() const {
    const Index n = num_vars();
    if (coefficients.cols() != n || lower.size() != n || upper.size() != n) return false;
    if (rhs.size() != num_rows() || static_cast<Index>(relations.size()) != num_rows()) return false;
    return objective.allFinite() && coefficients.allFinite() && rhs.allFinite() && lower.allFinite() &&
           (upper.array() >= lower.array()).all();
  }
};

/// Basis entries are `j` for structural variable j and `num_vars + i` for the
/// slack of row i. A negative entry marks an internal column (bound row slack
/// or artificial) that cannot be used for warm starts.
using Basis = std::vector<Index>;

template <typename Scalar>
struct LpSolution {
  using Vector = typename LinearProgram<Scalar>::Vector;

  Status status = Status::Infeasible;
  Vector primal;
  Vector dual;
  Scalar objective_value = 0;
  Index iterations = 0;
  bool warm_started = false;
  Basis basis;
};

struct SolveOptions {
  Index max_iterations = 0;     // 0 selects 50 * (rows + cols)
  Index stall_threshold = 30;   // consecutive degenerate pivots before switching to Bland
};

namespace detail {

template <typename Scalar>
class Simplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Simplex(const LinearProgram<Scalar>& lp, const SolveOptions& options) : lp_(lp), options_(options) {
    standardize();
  }

  LpSolution<Scalar> solve(std::span<const Index> warm) {
    LpSolution<Scalar> out;
    if (infeasible_bounds_) {
      out.status = Status::Infeasible;
      return out;
    }
    budget_ = options_.max_iterations > 0 ? options_.max_iterations
                                          : 50 * (lp_.num_rows() + lp_.num_vars());
    bool warm_ok = !warm.empty() && try_warm_start(warm);
    out.warm_started = warm_ok;
    if (!warm_ok) {
      cold_start();
      Status phase1 = run(phase_one_costs(), false);
      if (phase1 == Status::IterationLimit) return finish(out, phase1);
      if (phase1 == Status::Unbounded) throw std::logic_error("phase one cannot be unbounded");
      Scalar infeasibility = 0;
      for (Index r = 0; r < rows_; ++r) {
        if (is_artificial(basic_[r])) infeasibility += std::max(Scalar(0), tableau_(r, cols_));
      }
      if (infeasibility > feasibility_tol_) return finish(out, Status::Infeasible);
      drive_out_artificials();
    }
    return finish(out, run(phase_two_costs(), true));
  }

 private:
  void standardize() {
    const Index n = lp_.num_vars();
    const Index m = lp_.num_rows();
    for (Index j = 0; j < n; ++j) {
      if (lp_.upper(j) < lp_.lower(j)) infeasible_bounds_ = true;
      if (lp_.upper(j) <= lp_.lower(j)) continue;
      kept_.push_back(j);
      if (std::isfinite(static_cast<double>(lp_.upper(j)))) bounded_.push_back(j);
    }
    structural_ = static_cast<Index>(kept_.size());
    rows_ = m + static_cast<Index>(bounded_.size());

    Index slacks = 0;
    for (Index i = 0; i < m; ++i) slacks += lp_.relations[i] == Relation::LessEqual ? 1 : 0;
    slacks += static_cast<Index>(bounded_.size());
    slack_begin_ = structural_;
    art_begin_ = structural_ + slacks;

    a_ = Matrix::Zero(rows_, art_begin_);
    b_ = Vector::Zero(rows_);
    cost_ = Vector::Zero(art_begin_);
    slack_of_row_.assign(static_cast<std::size_t>(rows_), -1);

    const Vector shifted = lp_.rhs - lp_.coefficients * lp_.lower;
    for (Index k = 0; k < structural_; ++k) {
      a_.block(0, k, m, 1) = lp_.coefficients.col(kept_[k]);
      cost_(k) = lp_.objective(kept_[k]);
    }
    b_.head(m) = shifted;
    Index s = slack_begin_;
    for (Index i = 0; i < m; ++i) {
      if (lp_.relations[i] == Relation::LessEqual) {
        a_(i, s) = 1;
        slack_of_row_[i] = s++;
      }
    }
    for (std::size_t t = 0; t < bounded_.size(); ++t) {
      const Index row = m + static_cast<Index>(t);
      const Index j = bounded_[t];
      const Index k = static_cast<Index>(std::find(kept_.begin(), kept_.end(), j) - kept_.begin());
      a_(row, k) = 1;
      a_(row, s) = 1;
      slack_of_row_[row] = s++;
      b_(row) = lp_.upper(j) - lp_.lower(j);
    }
    const Scalar b_scale = 1 + (b_.size() ? b_.cwiseAbs().maxCoeff() : Scalar(0));
    const Scalar c_scale = 1 + (cost_.size() ? cost_.cwiseAbs().maxCoeff() : Scalar(0));
    feasibility_tol_ = Scalar(Tolerances::feasibility) * b_scale * std::max<Scalar>(1, Scalar(rows_));
    optimality_tol_ = Scalar(Tolerances::optimality) * c_scale;
  }

  bool is_artificial(Index col) const { return col >= art_begin_; }

  void cold_start() {
    // Artificial columns are appended for rows whose slack cannot start basic.
    std::vector<Index> needs;
    for (Index r = 0; r < rows_; ++r) {
      if (slack_of_row_[r] < 0 || b_(r) < 0) needs.push_back(r);
    }
    cols_ = art_begin_ + static_cast<Index>(needs.size());
    tableau_ = Matrix::Zero(rows_, cols_ + 1);
    tableau_.leftCols(art_begin_) = a_;
    tableau_.col(cols_) = b_;
    basic_.assign(slack_of_row_.begin(), slack_of_row_.end());
    art_row_ = needs;
    for (std::size_t t = 0; t < needs.size(); ++t) {
      const Index r = needs[t];
      if (b_(r) < 0) tableau_.row(r) *= -1;
      const Index art = art_begin_ + static_cast<Index>(t);
      tableau_(r, art) = 1;
      basic_[r] = art;
    }
  }

  bool try_warm_start(std::span<const Index> warm) {
    if (!bounded_.empty() || structural_ != lp_.num_vars()) return false;
    if (static_cast<Index>(warm.size()) != rows_) return false;
    std::vector<Index> cols;
    std::vector<char> seen(static_cast<std::size_t>(art_begin_), 0);
    for (Index entry : warm) {
      Index col = -1;
      if (entry >= 0 && entry < lp_.num_vars()) {
        col = entry;
      } else if (entry >= lp_.num_vars() && entry < lp_.num_vars() + lp_.num_rows()) {
        col = slack_of_row_[entry - lp_.num_vars()];
      }
      if (col < 0 || seen[col]) return false;
      seen[col] = 1;
      cols.push_back(col);
    }
    Matrix basis(rows_, rows_);
    for (Index r = 0; r < rows_; ++r) basis.col(r) = a_.col(cols[r]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (!lu.isInvertible()) return false;
    cols_ = art_begin_;
    tableau_.resize(rows_, cols_ + 1);
    tableau_.leftCols(cols_) = lu.solve(a_);
    tableau_.col(cols_) = lu.solve(b_);
    if ((tableau_.col(cols_).array() < -feasibility_tol_).any()) return false;
    basic_ = cols;
    return true;
  }

  Vector phase_one_costs() const {
    Vector c = Vector::Zero(cols_);
    c.tail(cols_ - art_begin_).setOnes();
    return c;
  }

  Vector phase_two_costs() const {
    Vector c = Vector::Zero(cols_);
    c.head(art_begin_) = cost_;
    return c;
  }

  RowVector reduced_costs(const Vector& c) const {
    Vector cb(rows_);
    for (Index r = 0; r < rows_; ++r) cb(r) = c(basic_[r]);
    return c.transpose() - cb.transpose() * tableau_.leftCols(cols_);
  }

  void pivot(Index r, Index q, RowVector& d) {
    tableau_.row(r) /= tableau_(r, q);
    const RowVector pivot_row = tableau_.row(r);
    Vector column = tableau_.col(q);
    column(r) = 0;
    tableau_.noalias() -= column * pivot_row;
    d -= d(q) * pivot_row.head(cols_);
    basic_[r] = q;
  }

  Status run(const Vector& c, bool phase_two) {
    RowVector d = reduced_costs(c);
    bool bland = false;
    Index degenerate_streak = 0;
    Index since_refresh = 0;
    const Index enter_limit = phase_two ? art_begin_ : cols_;
    for (;;) {
      if (++since_refresh == 50) {
        d = reduced_costs(c);
        since_refresh = 0;
      }
      Index q = -1;
      Scalar best = -optimality_tol_;
      for (Index j = 0; j < enter_limit; ++j) {
        if (d(j) < best) {
          q = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (q < 0) return Status::Optimal;
      if (budget_-- <= 0) return Status::IterationLimit;

      Index r = -1;
      Scalar ratio = std::numeric_limits<Scalar>::infinity();
      for (Index i = 0; i < rows_; ++i) {
        const Scalar alpha = tableau_(i, q);
        Scalar candidate;
        if (phase_two && is_artificial(basic_[i])) {
          // A basic artificial must stay at zero in phase two.
          if (std::abs(alpha) <= Tolerances::pivot) continue;
          candidate = 0;
        } else {
          if (alpha <= Tolerances::pivot) continue;
          candidate = std::max(Scalar(0), tableau_(i, cols_)) / alpha;
        }
        if (r < 0 || candidate < ratio - Scalar(1e-12)) {
          r = i;
          ratio = candidate;
        } else if (candidate <= ratio + Scalar(1e-12)) {
          const bool prefer = bland ? basic_[i] < basic_[r]
                                    : std::abs(alpha) > std::abs(tableau_(r, q));
          if (prefer) {
            r = i;
            ratio = std::min(ratio, candidate);
          }
        }
      }
      if (r < 0) return Status::Unbounded;
      degenerate_streak = ratio <= Scalar(1e-12) ? degenerate_streak + 1 : 0;
      if (degenerate_streak >= options_.stall_threshold) bland = true;
      pivot(r, q, d);
      ++iterations_;
    }
  }

  void drive_out_artificials() {
    RowVector unused = RowVector::Zero(cols_);
    for (Index r = 0; r < rows_; ++r) {
      if (!is_artificial(basic_[r])) continue;
      Index q = -1;
      Scalar best = Tolerances::pivot;
      for (Index j = 0; j < art_begin_; ++j) {
        if (std::abs(tableau_(r, j)) > best) {
          best = std::abs(tableau_(r, j));
          q = j;
        }
      }
      if (q >= 0) pivot(r, q, unused);
    }
  }

  LpSolution<Scalar>& finish(LpSolution<Scalar>& out, Status status) {
    out.status = status;
    out.iterations = iterations_;
    if (status != Status::Optimal) return out;

    const Index n = lp_.num_vars();
    const Index m = lp_.num_rows();
    Matrix basis = Matrix::Zero(rows_, rows_);
    Vector cb = Vector::Zero(rows_);
    for (Index r = 0; r < rows_; ++r) {
      const Index col = basic_[r];
      if (is_artificial(col)) {
        // Redundant row: its artificial is pinned at zero.
        basis(art_row_[col - art_begin_], r) = 1;
      } else {
        basis.col(r) = a_.col(col);
        cb(r) = cost_(col);
      }
    }
    Eigen::FullPivLU<Matrix> lu(basis);
    const Vector xb = lu.solve(b_);
    const Vector w = lu.transpose().solve(cb);

    Vector x = Vector::Zero(art_begin_);
    for (Index r = 0; r < rows_; ++r) {
      if (!is_artificial(basic_[r])) x(basic_[r]) = xb(r);
    }
    out.primal = lp_.lower;
    for (Index k = 0; k < structural_; ++k) out.primal(kept_[k]) += x(k);
    out.dual = w.head(m);
    out.objective_value = lp_.objective.dot(out.primal);

    out.basis.clear();
    for (Index r = 0; r < rows_; ++r) {
      const Index col = basic_[r];
      Index entry = -1;
      if (col < structural_) {
        entry = kept_[col];
      } else if (!is_artificial(col)) {
        const auto it = std::find(slack_of_row_.begin(), slack_of_row_.end(), col);
        const Index row = static_cast<Index>(it - slack_of_row_.begin());
        if (row < m) entry = n + row;
      }
      out.basis.push_back(entry);
    }
    return out;
  }

  const LinearProgram<Scalar>& lp_;
  SolveOptions options_;
  std::vector<Index> kept_;
  std::vector<Index> bounded_;
  Index structural_ = 0;
  Index rows_ = 0;
  Index slack_begin_ = 0;
  Index art_begin_ = 0;
  Index cols_ = 0;
  Matrix a_;
  Vector b_;
  Vector cost_;
  std::vector<Index> slack_of_row_;
  std::vector<Index> art_row_;
  Matrix tableau_;
  std::vector<Index> basic_;
  Scalar feasibility_tol_ = 0;
  Scalar optimality_tol_ = 0;
  Index budget_ = 0;
  Index iterations_ = 0;
  bool infeasible_bounds_ = false;
};

}  // namespace detail

/// Solves `lp`. When `warm` holds a basis returned by a previous solve of an
/// LP with the same rows (columns may have been appended), phase one is
/// skipped if that basis is still primal feasible.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, const SolveOptions& options = {},
                            std::span<const Index> warm = {}) {
  if (!lp.well_formed()) throw std::invalid_argument("malformed linear program");
  detail::Simplex<Scalar> simplex(lp, options);
  return simplex.solve(warm);
}

struct CertificateReport {
  double primal_residual = 0;
  double dual_residual = 0;
  double complementary_slackness = 0;
  double duality_gap = 0;
  bool primal_feasible = false;
  bool dual_feasible = false;
  bool complementary = false;
  bool gap_closed = false;

  bool all() const { return primal_feasible && dual_feasible && complementary && gap_closed; }
};

/// Recomputes every optimality certificate of `solution` from the raw data.
template <typename Scalar>
CertificateReport verify_certificates(const LinearProgram<Scalar>& lp, const LpSolution<Scalar>& solution) {
  using Vector = typename LinearProgram<Scalar>::Vector;
  CertificateReport report;
  const Index n = lp.num_vars();
  const Index m = lp.num_rows();
  if (solution.primal.size() != n || solution.dual.size() != m) return report;

  const Vector& x = solution.primal;
  const Vector& u = solution.dual;
  const double b_norm = m ? static_cast<double>(lp.rhs.cwiseAbs().maxCoeff()) : 0.0;
  const double c_norm = n ? static_cast<double>(lp.objective.cwiseAbs().maxCoeff()) : 0.0;
  const double tol_primal = Tolerances::certificate * (1 + b_norm);
  const double tol_dual = Tolerances::certificate * (1 + c_norm);

  const Vector activity = lp.coefficients * x;
  double primal = 0;
  double cs = 0;
  double dual = 0;
  for (Index i = 0; i < m; ++i) {
    const double slack = static_cast<double>(lp.rhs(i) - activity(i));
    if (lp.relations[i] == Relation::LessEqual) {
      primal = std::max(primal, -slack);
      dual = std::max(dual, static_cast<double>(u(i)));
      cs = std::max(cs, std::abs(static_cast<double>(u(i)) * slack));
    } else {
      primal = std::max(primal, std::abs(slack));
    }
  }
  const Vector d = lp.objective - lp.coefficients.transpose() * u;
  double dual_objective = static_cast<double>(lp.rhs.dot(u));
  for (Index j = 0; j < n; ++j) {
    const double xj = static_cast<double>(x(j));
    const double lo = static_cast<double>(lp.lower(j));
    const double hi = static_cast<double>(lp.upper(j));
    const double dj = static_cast<double>(d(j));
    primal = std::max({primal, lo - xj, std::isfinite(hi) ? xj - hi : 0.0});
    if (dj >= 0) {
      dual_objective += dj * lo;
      cs = std::max(cs, dj * (xj - lo));
    } else if (std::isfinite(hi)) {
      dual_objective += dj * hi;
      cs = std::max(cs, -dj * (hi - xj));
    } else {
      dual = std::max(dual, -dj);
    }
  }
  const double objective = static_cast<double>(lp.objective.dot(x));
  report.primal_residual = primal;
  report.dual_residual = dual;
  report.complementary_slackness = cs;
  report.duality_gap = std::abs(objective - dual_objective);
  report.primal_feasible = primal <= tol_primal;
  report.dual_feasible = dual <= tol_dual;
  report.complementary = cs <= Tolerances::certificate * (1 + b_norm) * (1 + c_norm);
  report.gap_closed = report.duality_gap <= Tolerances::certificate * (1 + std::abs(objective));
  return report;
}

/// Writes `lp` in CPLEX LP text format with 17 significant digits.
template <typename Scalar>
void write_lp(std::ostream& out, const LinearProgram<Scalar>& lp) {
  const auto num = [](Scalar v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.17g", static_cast<double>(v));
    return std::string(buf);
  };
  out << "Minimize\n obj:";
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective(j) != 0) out << ' ' << num(lp.objective(j)) << " x" << j;
  }
  out << "\nSubject To\n";
  for (Index i = 0; i < lp.num_rows(); ++i) {
    out << " r" << i << ':';
    for (Index j = 0; j < lp.num_vars(); ++j) {
      if (lp.coefficients(i, j) != 0) out << ' ' << num(lp.coefficients(i, j)) << " x" << j;
    }
    out << (lp.relations[i] == Relation::LessEqual ? " <= " : " = ") << num(lp.rhs(i)) << '\n';
  }
  out << "Bounds\n";
  for (Index j = 0; j < lp.num_vars(); ++j) {
    out << ' ' << num(lp.lower(j)) << " <= x" << j;
    if (std::isfinite(static_cast<double>(lp.upper(j)))) out << " <= " << num(lp.upper(j));
    out << '\n';
  }
  out << "End\n";
}

}  // namespace dpdp::lp
