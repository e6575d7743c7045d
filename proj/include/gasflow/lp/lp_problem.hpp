#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace gasflow::lp {

/// Sentinel for a missing bound. Kernel code never substitutes a large
/// finite number for it.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Bound {
  double lower = 0.0;
  double upper = kInfinity;
};

struct Constraint {
  std::vector<double> coefficients;  // one entry per variable
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

/// Minimization LP in row form with per-variable bounds.
struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<Bound> var_bounds;

  LpProblem() = default;
  explicit LpProblem(std::size_t n);

  /// Appends a variable with zero cost and the given bounds; every existing
  /// row is widened with a zero coefficient. Returns its index.
  std::size_t add_variable(double cost, Bound bound);
  /// Appends a zero row and returns a reference for filling it in.
  Constraint& add_constraint(Relation relation, double rhs);

  /// Throws ValidationError when a row length or a bound pair is malformed.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string to_string(LpStatus status);
std::string to_string(Relation relation);

struct LpOutcome {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> primal;
  /// One multiplier per constraint: >= rows nonnegative, <= rows
  /// nonpositive, = rows free.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double objective_value = 0.0;
  /// Dual objective assembled from row multipliers and active bounds.
  double dual_objective = 0.0;
  /// Unbounded: primal ray along which the objective decreases.
  /// Infeasible: Farkas-style row multipliers from the phase-one basis.
  std::vector<double> certificate;
  std::size_t iterations = 0;
};

/// Plain-text dump, one constraint per line, fixed-point with six decimals.
std::string dump_tableau(const LpProblem& problem);

}  // namespace gasflow::lp
