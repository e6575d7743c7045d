#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "gasflow/lp/lp_problem.hpp"
#include "gasflow/network/network.hpp"
#include "gasflow/uncertainty/uncertainty.hpp"

namespace gasflow::tsro {

inline constexpr std::size_t kFixedSupply = static_cast<std::size_t>(-1);

using SparseRow = std::vector<std::pair<std::size_t, double>>;

/// One row of a block. G and Q rows are ">=" or "="; W rows are "=".
struct BlockRow {
  SparseRow y;  // second-stage coefficients
  SparseRow x;  // first-stage coefficients (Q and A blocks only)
  lp::Relation relation = lp::Relation::kGreaterEqual;
  double rhs = 0.0;
  std::size_t source_row = 0;  // row index in the deterministic model
};

/// Deterministic model split into first stage x = (O, S) and second stage
/// y = (f, u, v, e, w):
///   A x >= b,  G y >= h,  Q y >= r - P x,  W y = s + z.
/// Q rows keep P x on the left (coefficients in BlockRow::x) and r as rhs.
struct StagedProblem {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<std::size_t> x_columns;  // stage index -> deterministic column
  std::vector<std::size_t> y_columns;
  std::vector<double> c;               // cost over x
  std::vector<double> d;               // cost over y
  std::vector<lp::Bound> x_bounds;
  std::vector<lp::Bound> y_bounds;
  std::vector<BlockRow> A, G, Q, W;
  /// W row -> (position in the uncertainty set's arc list, period). Rows fed
  /// by an arc outside the set have position kFixedSupply.
  std::vector<std::pair<std::size_t, std::size_t>> w_cell;
  /// W rhs minus the supply folded in by the builder, so rhs = s + z.
  std::vector<double> s;
  /// Supply used for kFixedSupply rows.
  std::vector<double> fixed_supply;
  /// Y columns holding elastic level/ramp slack.
  std::vector<std::size_t> elastic_y;
  network::VariableMap map;
  std::size_t deterministic_rows = 0;
  /// Largest |phi| over the dual feasible region, per W row.
  std::vector<double> phi_bound;
};

struct StageOptions {
  /// Random (x, z) pairs for the partition soundness check.
  std::size_t soundness_checks = 3;
  std::uint64_t seed = 1;
  double soundness_tolerance = 1e-6;
};

/// Partitions the compiled rows into A, G, Q, W and verifies that the block
/// assembly reproduces the deterministic model at sampled (x, z).
StagedProblem stage(const network::DeterministicModel& model, const uncertainty::UncertaintySet& set,
                    const StageOptions& options = {});

struct RecourseResult {
  lp::LpStatus status = lp::LpStatus::kInfeasible;
  double value = 0.0;        // d'y
  std::vector<double> y;
  double elastic = 0.0;      // sum of elastic slack
};

/// W right-hand sides s + z for a trajectory over the set's arcs.
std::vector<double> w_rhs(const StagedProblem& staged, const uncertainty::Trajectory& z);

/// Second-stage LP at fixed x and z.
lp::LpProblem recourse_problem(const StagedProblem& staged, const std::vector<double>& x,
                               const uncertainty::Trajectory& z);
RecourseResult solve_recourse(const StagedProblem& staged, const std::vector<double>& x,
                              const uncertainty::Trajectory& z);

/// First-stage part of a deterministic column assignment.
std::vector<double> first_stage_of(const StagedProblem& staged, const std::vector<double>& full);

double first_stage_cost(const StagedProblem& staged, const std::vector<double>& x);

/// Checks A x >= b and binarity.
bool first_stage_feasible(const StagedProblem& staged, const std::vector<double>& x, double tol = 1e-9);

}  // namespace gasflow::tsro
