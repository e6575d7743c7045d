#pragma once

#include <cstddef>
#include <vector>

#include "gasflow/milp/milp.hpp"
#include "gasflow/tsro/staged.hpp"
#include "gasflow/uncertainty/uncertainty.hpp"

namespace gasflow::tsro {

/// Worst-case supply search at fixed x, written over the second-stage dual.
///
/// Maximizes lambda'h + sigma'(r - Px) + phi'(s + z0) + sum(zplus pi+ + zminus pi-)
/// + muL'l - muU'u over the dual region, with pi+ = phi xi+ and pi- = -phi xi-
/// linearized through per-cell big-M bounds on phi. Stored as minimization of
/// the negated objective.
struct DualSubproblem {
  milp::MilpProblem problem;
  std::size_t lambda_offset = 0, sigma_offset = 0, phi_offset = 0;
  std::size_t n_lambda = 0, n_sigma = 0, n_phi = 0;
  /// Indicator columns per W row; kFixedSupply when the cell cannot deviate.
  std::vector<std::size_t> xi_plus, xi_minus;
  std::vector<double> big_m;  // per W row
  /// Dual equality rows, one per y column.
  std::size_t dual_rows = 0;
  std::size_t arcs = 0, periods = 0;
};

struct SubproblemOptions {
  /// Multiplies the dual-region bound on |phi| to get each big-M.
  double big_m_safety = 10.0;
  double rel_gap = 1e-9;
  std::size_t node_limit = 200000;
  /// Strong-duality audit tolerance, relative to 1 + |value|.
  double audit_tolerance = 1e-5;
};

DualSubproblem build_subproblem(const StagedProblem& staged, const std::vector<double>& x,
                                const uncertainty::UncertaintySet& set,
                                const SubproblemOptions& options = {});

struct SubproblemResult {
  double beta = 0.0;          // dual MILP optimum
  double primal_value = 0.0;  // recourse LP at the realized scenario
  uncertainty::ScenarioIndicators indicators;
  uncertainty::Trajectory scenario;
  double elastic = 0.0;       // elastic slack in the audit solve
  std::size_t nodes = 0;
};

/// Solves the dual MILP, reads off the indicators, and re-solves the primal
/// recourse at the realized scenario. Throws NumericalError when the two
/// values disagree beyond the audit tolerance.
SubproblemResult solve_subproblem(const DualSubproblem& sub, const StagedProblem& staged,
                                  const std::vector<double>& x,
                                  const uncertainty::UncertaintySet& set,
                                  const SubproblemOptions& options = {});

/// Build and solve in one call.
SubproblemResult worst_case(const StagedProblem& staged, const std::vector<double>& x,
                            const uncertainty::UncertaintySet& set,
                            const SubproblemOptions& options = {});

}  // namespace gasflow::tsro
