#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasflow/app/config.hpp"
#include "gasflow/forecast/forecaster.hpp"
#include "gasflow/network/network_io.hpp"
#include "gasflow/tsro/ccg.hpp"
#include "gasflow/uncertainty/uncertainty.hpp"

namespace gasflow::app {

struct Inputs {
  network::ModelDocument model;
  std::optional<forecast::History> history;
  std::optional<forecast::ForecastIntervals> intervals;
  std::map<std::string, std::string> hashes;  // input path -> FNV-1a of its bytes
};

/// Loads every configured input. A zero forecaster horizon is replaced by the
/// network's period count; any other mismatch is a ValidationError.
Inputs load_inputs(RunConfig& config);

struct ForecastOutcome {
  forecast::ForecastIntervals intervals;
  std::optional<forecast::ForecastBundle> bundle;  // absent when read from file
  std::vector<forecast::ArcMetrics> metrics;
};

ForecastOutcome run_forecaster(const forecast::History& history, const forecast::ForecasterConfig& config);

/// Intervals at level alpha: the configured file when its alpha matches,
/// otherwise trained from the history.
ForecastOutcome intervals_for(const RunConfig& config, const Inputs& inputs, double alpha);

struct RobustInstance {
  network::ModelDocument model;  // nominal supply replaced by the median
  uncertainty::UncertaintySet set;
  std::vector<std::string> warnings;
};

RobustInstance robust_instance(const network::ModelDocument& model, const forecast::ForecastIntervals& intervals,
                               const std::map<std::string, int>& budgets);

struct RobustSolution {
  tsro::StagedProblem staged;
  tsro::CcgResult ccg;
  double first_stage_cost = 0.0;
  network::Schedule nominal_schedule;  // robust x, nominal supply
  network::Schedule worst_schedule;    // robust x, worst-case supply
};

/// Master infeasibility is rethrown as a ValidationError that lists an
/// irreducible set of deterministic rows.
RobustSolution solve_robust(const RobustInstance& instance, const tsro::CcgOptions& options, std::uint64_t seed);

/// Deterministic model at `supply` with the first stage pinned to x.
network::Schedule pinned_schedule(const network::ModelDocument& model, const tsro::StagedProblem& staged,
                                  const std::vector<double>& x,
                                  const std::map<std::string, std::vector<double>>& supply);

/// First-stage vector from a schedule's on and start-stop tables. Unit ids
/// and periods must match the network.
std::vector<double> first_stage_from_schedule(const tsro::StagedProblem& staged,
                                              const network::EnergyNetwork& net,
                                              const network::Schedule& schedule);

/// Deletion filter over the rows of the deterministic model: a minimal set
/// of rows that is infeasible on its own, named "family unit t".
std::vector<std::string> infeasible_rows(const network::ModelDocument& model);

/// Copies with every storage ramp limit scaled, or every conversion unit's
/// minimum output ratio replaced.
network::ModelDocument scale_ramp(const network::ModelDocument& model, double factor);
network::ModelDocument with_eta_out(const network::ModelDocument& model, double eta_out);

}  // namespace gasflow::app
