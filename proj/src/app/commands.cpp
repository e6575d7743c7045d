#include "gasflow/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "gasflow/app/pipeline.hpp"
#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"
#include "gasflow/synthetic.hpp"

namespace gasflow::app {

namespace {

using nlohmann::json;
using io::format_double;
using Clock = std::chrono::steady_clock;

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Report {
 public:
  Report(const std::string& command, const RunConfig& config) : config_(config) {
    doc_["command"] = command;
    doc_["started_at"] = utc_now();
    doc_["config"] = config.echo;
    doc_["seed"] = config.seed;
    doc_["timings"] = json::object();
    doc_["outputs"] = json::object();
  }

  void inputs(const Inputs& in) { doc_["inputs"] = in.hashes; }

  void write(const std::string& name, const std::string& content) {
    auto path = config_.output_dir / name;
    io::write_file_atomic(path, content);
    doc_["outputs"][name] = io::fnv1a_hex(content);
    spdlog::debug("wrote {}", path.string());
  }

  void phase(const std::string& name, Clock::time_point since) {
    doc_["timings"][name] = std::chrono::duration<double>(Clock::now() - since).count();
  }

  json& operator[](const char* key) { return doc_[key]; }

  json finish(const std::string& command) {
    io::write_file_atomic(config_.output_dir / (command + "_report.json"), doc_.dump(2) + "\n");
    return doc_;
  }

 private:
  const RunConfig& config_;
  json doc_;
};

json metrics_json(const std::vector<forecast::ArcMetrics>& metrics, double alpha) {
  json out = json::array();
  for (const auto& m : metrics) {
    out.push_back({{"arc", m.arc}, {"alpha", alpha}, {"points", m.points}, {"mape", m.mape},
                   {"picp", m.picp}, {"rearranged", m.rearranged}});
  }
  return out;
}

json breakdown_json(const network::ObjectiveBreakdown& b) {
  return {{"start_stop", b.start_stop}, {"deviation", b.deviation}, {"demand", b.demand},
          {"elastic", b.elastic}, {"total", b.total()}};
}

json first_stage_json(const network::Schedule& s) {
  json out = json::object();
  for (std::size_t k = 0; k < s.conversion_ids.size(); ++k) {
    out[s.conversion_ids[k]] = {{"on", s.on[k]}, {"start_stop", s.start_stop[k]}};
  }
  return out;
}

json solution_json(const RobustSolution& sol, const uncertainty::UncertaintySet& set) {
  const auto& r = sol.ccg;
  return {{"objective", r.upper},
          {"lower_bound", r.lower},
          {"upper_bound", r.upper},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"first_stage_cost", sol.first_stage_cost},
          {"worst_case_recourse", r.upper - sol.first_stage_cost},
          {"worst_case_elastic", r.worst_elastic},
          {"deterministic_objective", r.deterministic_objective},
          {"budgets", set.budgets()},
          {"arcs", set.arcs()},
          {"first_stage", first_stage_json(sol.nominal_schedule)},
          {"breakdown_worst", breakdown_json(sol.worst_schedule.breakdown)},
          {"breakdown_nominal", breakdown_json(sol.nominal_schedule.breakdown)},
          {"warnings", r.warnings}};
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) spdlog::warn("{}", w);
}

// Runs fn(i) for i < n on up to `jobs` threads. Exceptions stay with their
// index; the caller decides what a failure means.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string failure_status(const std::exception_ptr& ep, std::string* message) {
  try {
    std::rethrow_exception(ep);
  } catch (const ResourceLimitError& e) {
    *message = e.what();
    return "limit";
  } catch (const ValidationError& e) {
    *message = e.what();
    return "invalid";
  } catch (const NumericalError& e) {
    *message = e.what();
    return "numerical";
  } catch (const std::exception& e) {
    *message = e.what();
    return "error";
  }
}

struct Cell {
  std::string table;  // budget, delta, eta
  double alpha = 0.0;
  int budget = 0;
  double scale = 1.0;
  double eta = 0.0;
};

struct CellResult {
  std::string status = "ok";
  std::string message;
  double objective = 0.0;
  double lower = 0.0;
  double deterministic = 0.0;
  double first_stage = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

std::string cell_name(const Cell& c) {
  if (c.table == "budget") return "budget_alpha" + format_double(c.alpha) + "_gamma" + std::to_string(c.budget);
  if (c.table == "delta") return "delta_scale" + format_double(c.scale);
  return "eta_out" + format_double(c.eta);
}

std::string opt_number(const CellResult& r, double v) { return r.status == "ok" ? format_double(v) : ""; }

}  // namespace

nlohmann::json cmd_forecast(RunConfig& config) {
  Report rep("forecast", config);
  auto t0 = Clock::now();
  auto in = load_inputs(config);
  rep.inputs(in);
  if (!in.history) throw ValidationError("forecast needs a history file");
  rep.phase("load", t0);

  auto t1 = Clock::now();
  spdlog::info("training quantile models: {} arcs, p={}, T={}, alpha={}", in.history->size(), config.forecaster.lags,
               config.forecaster.horizon, config.forecaster.alpha);
  auto fc = run_forecaster(*in.history, config.forecaster);
  rep.phase("train", t1);
  for (const auto& m : fc.metrics) {
    spdlog::info("{}: MAPE {:.4f}, PICP {:.3f} over {} points", m.arc, m.mape, m.picp, m.points);
  }
  if (fc.intervals.rearranged > 0) spdlog::warn("{} forecast cells had crossed quantiles", fc.intervals.rearranged);

  rep.write("intervals.csv", forecast::intervals_csv(fc.intervals));
  rep.write("intervals.json", forecast::to_json(fc.intervals).dump(2) + "\n");
  rep.write("metrics.csv", forecast::metrics_csv(fc.metrics, config.forecaster.alpha));
  rep.write("model.json", forecast::to_json(*fc.bundle).dump() + "\n");
  rep["metrics"] = metrics_json(fc.metrics, config.forecaster.alpha);
  return rep.finish("forecast");
}

nlohmann::json cmd_optimize(RunConfig& config) {
  Report rep("optimize", config);
  auto t0 = Clock::now();
  auto in = load_inputs(config);
  rep.inputs(in);
  rep.phase("load", t0);

  auto t1 = Clock::now();
  auto fc = intervals_for(config, in, config.forecaster.alpha);
  rep.phase("forecast", t1);
  if (!fc.metrics.empty()) rep["metrics"] = metrics_json(fc.metrics, config.forecaster.alpha);

  auto inst = robust_instance(in.model, fc.intervals, config.budgets_for(fc.intervals.arcs));
  auto t2 = Clock::now();
  spdlog::info("solving the robust schedule over {} periods", inst.set.periods());
  auto sol = solve_robust(inst, config.ccg, config.seed);
  rep.phase("optimize", t2);
  log_warnings(sol.ccg.warnings);
  spdlog::info("objective {} (lower bound {}, {} iterations{})", sol.ccg.upper, sol.ccg.lower, sol.ccg.iterations,
               sol.ccg.converged ? "" : ", not converged");

  rep.write("schedule.csv", network::schedule_csv(sol.nominal_schedule));
  rep.write("schedule.json", network::schedule_to_json(sol.nominal_schedule).dump(2) + "\n");
  rep.write("worst_schedule.csv", network::schedule_csv(sol.worst_schedule));
  rep.write("trace.csv", tsro::trace_csv(sol.ccg, false));
  json trace_times = json::array();
  for (const auto& it : sol.ccg.trace) {
    trace_times.push_back({{"iteration", it.iteration}, {"subproblem_seconds", it.subproblem_seconds},
                           {"master_seconds", it.master_seconds}});
  }
  rep["timings"]["ccg_iterations"] = trace_times;
  rep.write("scenarios.json", tsro::scenarios_json(sol.ccg, inst.set).dump(2) + "\n");
  rep.write("uncertainty_set.json", uncertainty::to_json(inst.set).dump(2) + "\n");
  auto summary = solution_json(sol, inst.set);
  rep.write("solution.json", summary.dump(2) + "\n");
  rep["solution"] = summary;
  return rep.finish("optimize");
}

nlohmann::json cmd_sweep(RunConfig& config, std::size_t jobs) {
  Report rep("sweep", config);
  auto t0 = Clock::now();
  auto in = load_inputs(config);
  rep.inputs(in);
  rep.phase("load", t0);
  const int T = static_cast<int>(in.model.horizon.periods);

  std::vector<double> alphas = config.sweep.alphas;
  if (std::find(alphas.begin(), alphas.end(), config.forecaster.alpha) == alphas.end()) {
    alphas.push_back(config.forecaster.alpha);
  }
  auto t1 = Clock::now();
  std::vector<ForecastOutcome> forecasts(alphas.size());
  std::vector<std::exception_ptr> forecast_errors(alphas.size());
  parallel_for(alphas.size(), jobs, [&](std::size_t i) {
    try {
      forecasts[i] = intervals_for(config, in, alphas[i]);
    } catch (...) {
      forecast_errors[i] = std::current_exception();
    }
  });
  for (auto& e : forecast_errors) {
    if (e) std::rethrow_exception(e);
  }
  rep.phase("forecast", t1);
  json metrics = json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (auto& m : metrics_json(forecasts[i].metrics, alphas[i])) metrics.push_back(m);
  }
  rep["metrics"] = metrics;
  auto forecast_at = [&](double alpha) -> const ForecastOutcome& {
    return forecasts[static_cast<std::size_t>(std::find(alphas.begin(), alphas.end(), alpha) - alphas.begin())];
  };

  std::vector<Cell> cells;
  const int gmax = config.sweep.budget_max < 0 ? T : std::min(config.sweep.budget_max, T);
  for (double a : config.sweep.alphas) {
    for (int g = config.sweep.budget_min; g <= gmax; ++g) cells.push_back({"budget", a, g, 1.0, 0.0});
  }
  const int flex = std::min(config.sweep.flex_budget, T);
  for (double s : config.sweep.delta_scale.values()) cells.push_back({"delta", config.forecaster.alpha, flex, s, 0.0});
  for (double e : config.sweep.eta_out.values()) cells.push_back({"eta", config.forecaster.alpha, flex, 1.0, e});

  auto t2 = Clock::now();
  std::vector<CellResult> results(cells.size());
  std::mutex log_mutex;
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto& c = cells[i];
    auto& r = results[i];
    try {
      auto model = in.model;
      if (c.table == "delta") model = scale_ramp(model, c.scale);
      if (c.table == "eta") model = with_eta_out(model, c.eta);
      const auto& fc = forecast_at(c.alpha);
      std::map<std::string, int> budgets;
      for (const auto& a : fc.intervals.arcs) budgets[a] = c.budget;
      auto inst = robust_instance(model, fc.intervals, budgets);
      auto det = network::build_deterministic(inst.model.network, inst.model.horizon);
      tsro::StageOptions so;
      so.seed = config.seed;
      auto staged = tsro::stage(det, inst.set, so);
      auto ccg = tsro::ccg_solve(staged, inst.set, config.ccg);
      r.objective = ccg.upper;
      r.lower = ccg.lower;
      r.deterministic = ccg.deterministic_objective;
      r.first_stage = tsro::first_stage_cost(staged, ccg.x);
      r.iterations = ccg.iterations;
      r.converged = ccg.converged;
    } catch (...) {
      r.status = failure_status(std::current_exception(), &r.message);
    }
    json cell = {{"table", c.table}, {"alpha", c.alpha},         {"budget", c.budget},
                 {"delta_scale", c.scale}, {"eta_out", c.eta}, {"status", r.status}};
    if (r.status == "ok") {
      cell["objective"] = r.objective;
      cell["lower_bound"] = r.lower;
      cell["iterations"] = r.iterations;
      cell["converged"] = r.converged;
    } else {
      cell["message"] = r.message;
    }
    io::write_file_atomic(config.output_dir / "cells" / (cell_name(c) + ".json"), cell.dump(2) + "\n");
    std::lock_guard<std::mutex> lock(log_mutex);
    if (r.status == "ok") {
      spdlog::info("cell {}: objective {} in {} iterations", cell_name(c), r.objective, r.iterations);
    } else {
      spdlog::error("cell {} failed ({}): {}", cell_name(c), r.status, r.message);
    }
  });
  rep.phase("cells", t2);

  std::ostringstream budget, delta, eta;
  budget << "alpha,budget,objective,lower_bound,deterministic,first_stage,iterations,converged,status\n";
  delta << "delta_scale,budget,objective,lower_bound,first_stage,iterations,converged,status\n";
  eta << "eta_out,budget,objective,lower_bound,first_stage,iterations,converged,status\n";
  std::size_t failed = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    if (r.status != "ok") ++failed;
    std::string tail = opt_number(r, r.objective) + ',' + opt_number(r, r.lower) + ',';
    std::string rest = opt_number(r, r.first_stage) + ',' + (r.status == "ok" ? std::to_string(r.iterations) : "") +
                       ',' + (r.status == "ok" ? (r.converged ? "1" : "0") : "") + ',' + r.status + '\n';
    if (c.table == "budget") {
      budget << format_double(c.alpha) << ',' << c.budget << ',' << tail << opt_number(r, r.deterministic) << ','
             << rest;
    } else if (c.table == "delta") {
      delta << format_double(c.scale) << ',' << c.budget << ',' << tail << rest;
    } else {
      eta << format_double(c.eta) << ',' << c.budget << ',' << tail << rest;
    }
  }
  rep.write("budget_sweep.csv", budget.str());
  rep.write("delta_sweep.csv", delta.str());
  rep.write("eta_sweep.csv", eta.str());
  rep["cells"] = cells.size();
  rep["failed_cells"] = failed;
  return rep.finish("sweep");
}

nlohmann::json cmd_evaluate(RunConfig& config) {
  Report rep("evaluate", config);
  auto t0 = Clock::now();
  auto in = load_inputs(config);
  rep.inputs(in);
  rep.phase("load", t0);

  auto t1 = Clock::now();
  auto fc = intervals_for(config, in, config.forecaster.alpha);
  auto inst = robust_instance(in.model, fc.intervals, config.budgets_for(fc.intervals.arcs));
  rep.phase("forecast", t1);

  auto t2 = Clock::now();
  std::vector<double> x;
  std::optional<double> upper;
  tsro::StagedProblem staged;
  if (config.schedule) {
    auto det = network::build_deterministic(inst.model.network, inst.model.horizon);
    tsro::StageOptions so;
    so.seed = config.seed;
    staged = tsro::stage(det, inst.set, so);
    network::Schedule schedule;
    try {
      schedule = network::schedule_from_json(nlohmann::json::parse(io::read_file(*config.schedule)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(config.schedule->string() + ": JSON syntax error: " + e.what());
    }
    x = first_stage_from_schedule(staged, inst.model.network, schedule);
    if (!tsro::first_stage_feasible(staged, x)) {
      throw ValidationError("schedule violates the first-stage constraints of the network");
    }
  } else {
    auto sol = solve_robust(inst, config.ccg, config.seed);
    log_warnings(sol.ccg.warnings);
    staged = std::move(sol.staged);
    x = sol.ccg.x;
    upper = sol.ccg.upper;
  }
  rep.phase("first_stage", t2);

  auto t3 = Clock::now();
  std::vector<uncertainty::Trajectory> trajectories = {inst.set.nominal()};
  if (config.samples > 1) {
    auto more = uncertainty::sample(inst.set, config.seed, config.samples - 1);
    trajectories.insert(trajectories.end(), more.begin(), more.end());
  }
  auto policy = tsro::evaluate_policy(staged, x, trajectories);
  rep.phase("evaluate", t3);

  std::ostringstream csv;
  csv << "sample,first_stage,second_stage,total,elastic\n";
  for (std::size_t i = 0; i < policy.costs.size(); ++i) {
    csv << i << ',' << format_double(policy.first_stage) << ',' << format_double(policy.costs[i]) << ','
        << format_double(policy.first_stage + policy.costs[i]) << ',' << format_double(policy.elastic[i]) << '\n';
  }
  json summary = {{"samples", policy.costs.size()},
                  {"seed", config.seed},
                  {"first_stage", policy.first_stage},
                  {"mean_total", policy.first_stage + policy.mean},
                  {"max_total", policy.first_stage + policy.max},
                  {"elastic_active", policy.elastic_active}};
  if (upper) {
    summary["upper_bound"] = *upper;
    summary["max_within_upper_bound"] = policy.first_stage + policy.max <= *upper + 1e-6 * (1.0 + std::abs(*upper));
  }
  spdlog::info("{} samples: mean total {}, max total {}", policy.costs.size(), policy.first_stage + policy.mean,
               policy.first_stage + policy.max);
  rep.write("evaluation.csv", csv.str());
  rep.write("evaluation.json", summary.dump(2) + "\n");
  rep["evaluation"] = summary;
  return rep.finish("evaluate");
}

void cmd_generate(const std::filesystem::path& dir, const GenerateOptions& options) {
  if (options.periods == 0) throw ValidationError("generate: periods must be positive");
  auto doc = synthetic::plant(options.periods, options.history_length);
  synthetic::HistoryOptions h;
  h.length = options.history_length;
  h.seed = options.seed;
  h.noise_scale = options.noise_scale;
  auto history = synthetic::supply_history(h);
  io::write_file_atomic(dir / "network.json", network::to_json(doc.network, doc.horizon).dump(2) + "\n");
  io::write_file_atomic(dir / "history.csv", forecast::history_csv(history));
  json config = {{"network", "network.json"},
                 {"history", "history.csv"},
                 {"output_dir", "out"},
                 {"seed", 1},
                 {"forecaster",
                  {{"lags", 20}, {"alpha", 0.05}, {"rounds", 200}, {"depth", 3}, {"learning_rate", 0.05},
                   {"min_leaf", 10}, {"train_length", options.history_length * 9 / 10}}},
                 {"budget", 1},
                 {"ccg", {{"abs_tol", 1e-4}, {"rel_tol", 1e-4}, {"max_iterations", 20}}},
                 {"sweep",
                  {{"budget_min", 0},
                   {"alphas", {0.01, 0.05, 0.1}},
                   {"delta_scale", {{"from", 0.5}, {"to", 2.0}, {"step", 0.1}}},
                   {"eta_out", {{"from", 0.0}, {"to", 0.3}, {"step", 0.05}}},
                   {"flex_budget", 1}}},
                 {"evaluate", {{"samples", 200}}}};
  io::write_file_atomic(dir / "config.json", config.dump(2) + "\n");
  spdlog::info("wrote synthetic instance ({} periods, {} history points) to {}", options.periods,
               options.history_length, dir.string());
}

}  // namespace gasflow::app
