#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasflow/milp/milp.hpp"
#include "gasflow/tsro/staged.hpp"
#include "gasflow/tsro/subproblem.hpp"
#include "gasflow/uncertainty/uncertainty.hpp"

namespace gasflow::tsro {

/// min c'x + beta  s.t.  A x >= b,  beta >= d'y_i,  and per scenario i:
/// G y_i >= h,  Q y_i >= r - P x,  W y_i = s + z_i.
struct MasterProblem {
  milp::MilpProblem problem;
  std::size_t beta = 0;
  std::vector<std::size_t> y_offset;  // per kept scenario
  std::vector<uncertainty::Trajectory> scenarios;  // after dedup
};

/// Duplicate scenarios are dropped and reported through `warnings`.
MasterProblem build_master(const StagedProblem& staged,
                           const std::vector<uncertainty::Trajectory>& scenarios,
                           std::vector<std::string>* warnings = nullptr);

struct CcgOptions {
  /// Stop when UB - LB <= abs_tol + rel_tol * |UB|.
  double abs_tol = 1e-4;
  double rel_tol = 1e-4;
  std::size_t max_iterations = 50;
  double master_gap = 1e-9;
  std::size_t node_limit = 200000;
  SubproblemOptions subproblem;
};

struct CcgIteration {
  std::size_t iteration = 0;
  double lower = 0.0;
  double upper = 0.0;
  double beta = 0.0;  // worst-case recourse at this iteration's x
  double subproblem_seconds = 0.0;
  double master_seconds = 0.0;
  uncertainty::ScenarioIndicators indicators;
};

struct CcgResult {
  std::vector<double> x;  // best first stage found
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<CcgIteration> trace;
  std::vector<uncertainty::Trajectory> scenarios;  // pool at exit
  uncertainty::Trajectory worst;                   // worst scenario for x
  double worst_elastic = 0.0;
  double deterministic_objective = 0.0;
  std::vector<double> deterministic_x;
  std::vector<std::string> warnings;
};

/// Column-and-constraint generation. Starts from the deterministic optimum at
/// the nominal trajectory, which also seeds the scenario pool and LB.
CcgResult ccg_solve(const StagedProblem& staged, const uncertainty::UncertaintySet& set,
                    const CcgOptions& options = {});

/// Columns iteration,lower_bound,upper_bound,beta and, with `timings`,
/// subproblem_seconds,master_seconds.
std::string trace_csv(const CcgResult& result, bool timings = true);
/// Worst scenario per iteration as indicator and trajectory arrays.
nlohmann::json scenarios_json(const CcgResult& result, const uncertainty::UncertaintySet& set);

struct PolicyReport {
  std::vector<double> costs;    // second-stage cost per trajectory
  std::vector<double> elastic;  // elastic slack per trajectory
  double mean = 0.0;
  double max = 0.0;
  double first_stage = 0.0;
  /// Trajectories with elastic slack above the tolerance.
  std::size_t elastic_active = 0;
};

PolicyReport evaluate_policy(const StagedProblem& staged, const std::vector<double>& x,
                             const std::vector<uncertainty::Trajectory>& trajectories,
                             double elastic_tolerance = 1e-7);

}  // namespace gasflow::tsro
