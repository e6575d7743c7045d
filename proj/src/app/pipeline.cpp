#include "gasflow/app/pipeline.hpp"

#include <algorithm>
#include <set>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"
#include "gasflow/milp/milp.hpp"

namespace gasflow::app {

Inputs load_inputs(RunConfig& config) {
  Inputs in;
  auto read = [&](const std::filesystem::path& p) {
    auto text = io::read_file(p);
    in.hashes[p.lexically_relative(config.base_dir).generic_string()] = io::fnv1a_hex(text);
    return text;
  };
  auto net_text = read(config.network);
  try {
    in.model = network::parse_model(nlohmann::json::parse(net_text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(config.network.string() + ": JSON syntax error: " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(config.network.string() + ": " + e.what());
  }
  const std::size_t T = in.model.horizon.periods;
  if (config.forecaster.horizon == 0) config.forecaster.horizon = T;
  if (config.forecaster.horizon != T) {
    throw ValidationError("config /forecaster/horizon: " + std::to_string(config.forecaster.horizon) +
                          " does not match the network's " + std::to_string(T) + " periods");
  }
  if (config.history) {
    try {
      in.history = forecast::parse_history_csv(read(*config.history));
    } catch (const ValidationError& e) {
      throw ValidationError(config.history->string() + ": " + e.what());
    }
  }
  if (config.intervals) {
    try {
      in.intervals = forecast::intervals_from_json(nlohmann::json::parse(read(*config.intervals)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(config.intervals->string() + ": JSON syntax error: " + e.what());
    }
    if (in.intervals->periods != T) {
      throw ValidationError(config.intervals->string() + ": intervals cover " +
                            std::to_string(in.intervals->periods) + " periods, the network has " +
                            std::to_string(T));
    }
  }
  return in;
}

ForecastOutcome run_forecaster(const forecast::History& history, const forecast::ForecasterConfig& config) {
  ForecastOutcome out;
  out.bundle = forecast::train_forecaster(history, config);
  out.metrics = forecast::backtest(*out.bundle, history);
  out.intervals = forecast::forecast_intervals(*out.bundle, history);
  return out;
}

ForecastOutcome intervals_for(const RunConfig& config, const Inputs& inputs, double alpha) {
  if (inputs.intervals && std::abs(inputs.intervals->alpha - alpha) < 1e-12) {
    ForecastOutcome out;
    out.intervals = *inputs.intervals;
    return out;
  }
  if (!inputs.history) {
    throw ValidationError("intervals at alpha " + io::format_double(alpha) + " need a history file to train on");
  }
  auto fc = config.forecaster;
  fc.alpha = alpha;
  return run_forecaster(*inputs.history, fc);
}

RobustInstance robust_instance(const network::ModelDocument& model, const forecast::ForecastIntervals& intervals,
                               const std::map<std::string, int>& budgets) {
  RobustInstance inst;
  inst.model = model;
  for (const auto& arc : intervals.arcs) {
    auto idx = model.network.arc_index(arc);
    if (!idx) throw ValidationError("intervals name arc '" + arc + "', which is not in the network");
    const auto& origin = model.network.units[*model.network.unit_index(model.network.arcs[*idx].origin)];
    if (origin.role != network::UnitRole::kSupply) {
      throw ValidationError("intervals name arc '" + arc + "', which does not leave a supply unit");
    }
  }
  inst.set = uncertainty::from_forecast(intervals, budgets, &inst.warnings);
  for (std::size_t a = 0; a < intervals.arcs.size(); ++a) {
    inst.model.horizon.nominal_supply[intervals.arcs[a]] = inst.set.nominal()[a];
  }
  return inst;
}

network::Schedule pinned_schedule(const network::ModelDocument& model, const tsro::StagedProblem& staged,
                                  const std::vector<double>& x,
                                  const std::map<std::string, std::vector<double>>& supply) {
  network::HorizonData horizon = model.horizon;
  for (const auto& [arc, series] : supply) horizon.nominal_supply[arc] = series;
  auto det = network::build_deterministic(model.network, horizon);
  for (std::size_t i = 0; i < staged.nx; ++i) det.problem.base.var_bounds[staged.x_columns[i]] = {x[i], x[i]};
  auto out = milp::solve_milp(det.problem);
  if (out.status != milp::MilpStatus::kOptimal) {
    throw NumericalError("schedule: recourse at the fixed first stage is infeasible");
  }
  return network::extract_schedule(out, det.map, model.network, horizon);
}

RobustSolution solve_robust(const RobustInstance& instance, const tsro::CcgOptions& options, std::uint64_t seed) {
  RobustSolution sol;
  auto det = network::build_deterministic(instance.model.network, instance.model.horizon);
  tsro::StageOptions so;
  so.seed = seed;
  sol.staged = tsro::stage(det, instance.set, so);
  try {
    sol.ccg = tsro::ccg_solve(sol.staged, instance.set, options);
  } catch (const ValidationError& e) {
    if (std::string(e.what()).find("master problem is infeasible") == std::string::npos) throw;
    auto rows = infeasible_rows(instance.model);
    std::string msg = e.what();
    if (!rows.empty()) {
      msg += "; conflicting rows:";
      for (const auto& r : rows) msg += " [" + r + "]";
    }
    throw ValidationError(msg);
  }
  sol.ccg.warnings.insert(sol.ccg.warnings.begin(), instance.warnings.begin(), instance.warnings.end());
  sol.first_stage_cost = tsro::first_stage_cost(sol.staged, sol.ccg.x);
  sol.nominal_schedule = pinned_schedule(instance.model, sol.staged, sol.ccg.x,
                                         uncertainty::as_supply_map(instance.set, instance.set.nominal()));
  sol.worst_schedule = pinned_schedule(instance.model, sol.staged, sol.ccg.x,
                                       uncertainty::as_supply_map(instance.set, sol.ccg.worst));
  return sol;
}

std::vector<double> first_stage_from_schedule(const tsro::StagedProblem& staged,
                                              const network::EnergyNetwork& net,
                                              const network::Schedule& schedule) {
  std::set<std::string> expected, given(schedule.conversion_ids.begin(), schedule.conversion_ids.end());
  for (std::size_t k : staged.map.conversion_units()) expected.insert(net.units[k].id);
  for (const auto& id : given) {
    if (!expected.count(id)) throw ValidationError("schedule names unit '" + id + "', which is not a conversion unit of the network");
  }
  for (const auto& id : expected) {
    if (!given.count(id)) throw ValidationError("schedule has no on/off plan for unit '" + id + "'");
  }
  if (schedule.periods != staged.map.periods()) {
    throw ValidationError("schedule covers " + std::to_string(schedule.periods) + " periods, the network has " +
                          std::to_string(staged.map.periods()));
  }
  std::vector<double> x(staged.nx, 0.0);
  for (std::size_t i = 0; i < staged.nx; ++i) {
    const auto& e = staged.map.entry(staged.x_columns[i]);
    const auto& id = net.units[e.entity].id;
    auto row = static_cast<std::size_t>(
        std::find(schedule.conversion_ids.begin(), schedule.conversion_ids.end(), id) - schedule.conversion_ids.begin());
    const auto& table = e.kind == network::VarKind::kOn ? schedule.on : schedule.start_stop;
    if (row >= table.size() || e.period >= table[row].size()) {
      throw ValidationError("schedule table for unit '" + id + "' is too short");
    }
    int v = table[row][e.period];
    if (v != 0 && v != 1) throw ValidationError("schedule value for unit '" + id + "' is not binary");
    x[i] = v;
  }
  return x;
}

std::vector<std::string> infeasible_rows(const network::ModelDocument& model) {
  auto det = network::build_deterministic(model.network, model.horizon);
  const auto& full = det.problem;
  milp::MilpOptions opts;
  opts.node_limit = 20000;
  auto infeasible = [&](const std::vector<std::size_t>& rows) {
    milp::MilpProblem p = full;
    p.base.constraints.clear();
    for (std::size_t r : rows) p.base.constraints.push_back(full.base.constraints[r]);
    std::fill(p.base.objective.begin(), p.base.objective.end(), 0.0);
    try {
      return milp::solve_milp(p, opts).status == milp::MilpStatus::kInfeasible;
    } catch (const ResourceLimitError&) {
      return false;
    }
  };
  std::vector<std::size_t> keep(full.base.constraints.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (!infeasible(keep)) return {};
  for (std::size_t i = 0; i < keep.size();) {
    auto trial = keep;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (infeasible(trial)) {
      keep = std::move(trial);
    } else {
      ++i;
    }
  }
  std::vector<std::string> out;
  for (std::size_t r : keep) {
    const auto& tag = det.rows[r];
    bool arc_row = tag.family == network::RowFamily::kInputCapacity || tag.family == network::RowFamily::kOutputCapacity;
    const auto& id = arc_row ? model.network.arcs[tag.unit].id : model.network.units[tag.unit].id;
    out.push_back(network::to_string(tag.family) + " " + id + " t=" + std::to_string(tag.period + 1));
  }
  return out;
}

network::ModelDocument scale_ramp(const network::ModelDocument& model, double factor) {
  if (!(factor > 0.0)) throw ValidationError("ramp scale must be positive");
  auto out = model;
  for (auto& u : out.network.units) {
    if (u.role == network::UnitRole::kStorage) u.storage.delta *= factor;
  }
  return out;
}

network::ModelDocument with_eta_out(const network::ModelDocument& model, double eta_out) {
  if (!(eta_out >= 0.0 && eta_out <= 1.0)) throw ValidationError("minimum output ratio must lie in [0, 1]");
  auto out = model;
  for (auto& u : out.network.units) {
    if (u.role == network::UnitRole::kConversion) u.conversion.eta_out = eta_out;
  }
  return out;
}

}  // namespace gasflow::app
