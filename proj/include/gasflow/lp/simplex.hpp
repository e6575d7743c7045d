#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gasflow/lp/lp_problem.hpp"

namespace gasflow::lp {

struct SimplexOptions {
  double pivot_tolerance = 1e-7;
  /// Residual allowed on the reported solution.
  double feasibility_tolerance = 1e-6;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_pivot_limit = 50;
  std::size_t refactor_interval = 100;
  /// Zero selects 50 * (rows + columns) + 1000.
  std::size_t iteration_limit = 0;
};

/// Bounded-variable revised simplex over a dense explicit basis inverse.
///
/// Every row i gets a logical variable s_i with a_i x - s_i = 0 whose bounds
/// encode the relation, so all pivoting runs through one code path. The
/// engine keeps its basis between calls: after set_bound() the next solve()
/// starts from the previous basis and uses the dual simplex when that basis
/// is still dual feasible. Branch-and-bound relies on this.
class SimplexEngine {
 public:
  explicit SimplexEngine(const LpProblem& problem, SimplexOptions options = {});

  std::size_t num_vars() const { return n_; }
  std::size_t num_rows() const { return original_rows_; }

  Bound bound(std::size_t var) const;
  void set_bound(std::size_t var, Bound bound);
  /// Replaces the cost vector. The basis stays primal feasible, so the next
  /// solve continues with phase two.
  void set_objective(const std::vector<double>& objective);

  LpOutcome solve();

 private:
  enum class State : std::uint8_t { kBasic, kLower, kUpper, kZero };
  enum class Phase { kOne, kTwo };
  enum class Result { kOptimal, kInfeasible, kUnbounded, kDualInfeasible };

  using Column = std::vector<std::pair<std::size_t, double>>;

  void compute_scaling();
  double column_dot(const Eigen::VectorXd& y, std::size_t j) const;
  Eigen::VectorXd ftran(std::size_t j) const;
  double nonbasic_value(std::size_t j) const;
  void place_nonbasic(std::size_t j);
  void refactor();
  void reset_to_slack_basis();
  void recompute_primal();
  void pivot(std::size_t row, std::size_t entering, const Eigen::VectorXd& alpha);
  Eigen::VectorXd basic_costs(Phase phase) const;
  bool primal_feasible() const;
  double row_residual() const;
  double infeasibility(std::size_t var) const;
  double feas_tol(double bound) const;
  double dual_tol(std::size_t j) const;
  void count_iteration(double step);
  bool flip_to_dual_feasible(const Eigen::VectorXd& d);
  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& y) const;

  Result primal(Phase phase);
  Result dual();
  LpOutcome finish(LpStatus status);

  SimplexOptions options_;
  std::size_t n_ = 0;              // structural columns
  std::size_t m_ = 0;              // kept rows
  std::size_t original_rows_ = 0;  // rows in the source problem
  std::vector<std::size_t> kept_rows_;
  bool empty_row_conflict_ = false;

  std::vector<Column> columns_;
  std::vector<double> scale_;      // original value = scale_ * internal value
  std::vector<double> row_scale_;  // original multiplier = row_scale_ * internal
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<State> state_;
  std::vector<double> x_;
  std::vector<std::size_t> head_;
  Eigen::MatrixXd binv_;

  bool factored_ = false;
  bool primal_dirty_ = true;
  std::size_t pivots_since_refactor_ = 0;
  std::size_t iterations_ = 0;
  std::size_t iteration_limit_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
  double max_cost_ = 0.0;

  std::vector<double> certificate_;
};

/// One-shot solve. `tol` is the feasibility tolerance used for reporting.
LpOutcome solve_lp(const LpProblem& problem, double tol = 1e-6);

}  // namespace gasflow::lp
