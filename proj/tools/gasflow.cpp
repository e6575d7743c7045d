// gasflow: batch CLI for forecasting, robust scheduling and sweeps.
//
//   gasflow forecast|optimize|sweep|evaluate --config <path> [--seed N] [--jobs N] [--verbose]
//   gasflow generate --out <dir> [--periods T] [--history N] [--seed N] [--noise F]
//
// Exit codes: 0 success, 2 validation error, 3 solver limit, 4 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gasflow/app/commands.hpp"
#include "gasflow/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kSolverLimit = 3, kIo = 4 };

void setup_logging(bool verbose) {
  auto logger = spdlog::stderr_color_mt("gasflow");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("GASFLOW_LOG")) spdlog::cfg::helpers::load_levels(env);
  if (verbose) spdlog::set_level(spdlog::level::debug);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust byproduct gas scheduling"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::optional<std::size_t> samples;
  std::string schedule_path;
  bool verbose = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_option("--jobs", jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose,-v", verbose, "Debug logging");
  };
  auto* forecast = app.add_subcommand("forecast", "Train quantile models, write intervals and metrics");
  auto* optimize = app.add_subcommand("optimize", "Solve the robust schedule by column-and-constraint generation");
  auto* sweep = app.add_subcommand("sweep", "Budget, ramp-scale and minimum-output sweeps");
  auto* evaluate = app.add_subcommand("evaluate", "Sample supply trajectories and cost a fixed first stage");
  for (auto* sub : {forecast, optimize, sweep, evaluate}) add_common(sub);
  evaluate->add_option("--samples", samples, "Number of trajectories (first is nominal)")->check(CLI::PositiveNumber);
  evaluate->add_option("--schedule", schedule_path, "Schedule JSON to evaluate instead of solving");

  gasflow::app::GenerateOptions gen;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "Write the bundled synthetic instance");
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--periods", gen.periods, "Scheduling horizon T")->check(CLI::PositiveNumber);
  generate->add_option("--history", gen.history_length, "History length per arc")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Noise seed");
  generate->add_option("--noise", gen.noise_scale, "Noise scale")->check(CLI::NonNegativeNumber);
  generate->add_flag("--verbose,-v", verbose, "Debug logging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  setup_logging(verbose);

  try {
    if (generate->parsed()) {
      gasflow::app::cmd_generate(out_dir, gen);
      return kOk;
    }
    auto config = gasflow::app::load_config(config_path);
    if (seed) config.seed = *seed;
    if (samples) config.samples = *samples;
    if (!schedule_path.empty()) config.schedule = schedule_path;
    if (forecast->parsed()) gasflow::app::cmd_forecast(config);
    if (optimize->parsed()) gasflow::app::cmd_optimize(config);
    if (sweep->parsed()) {
      auto report = gasflow::app::cmd_sweep(config, jobs);
      if (report.value("failed_cells", 0) > 0) {
        spdlog::warn("{} sweep cells failed; see the status column", report["failed_cells"].get<int>());
      }
    }
    if (evaluate->parsed()) gasflow::app::cmd_evaluate(config);
  } catch (const gasflow::ValidationError& e) {
    spdlog::error("validation: {}", e.what());
    return kValidation;
  } catch (const gasflow::ResourceLimitError& e) {
    spdlog::error("solver limit: {}", e.what());
    return kSolverLimit;
  } catch (const gasflow::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kSolverLimit;
  } catch (const gasflow::IoError& e) {
    spdlog::error("I/O: {}", e.what());
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("validation: {}", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kOk;
}
