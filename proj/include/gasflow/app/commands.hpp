#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "gasflow/app/config.hpp"

namespace gasflow::app {

// Each command writes its files under config.output_dir, finishes with
// <command>_report.json, and returns that report. Reports carry the config
// echo, input and output hashes and per-phase wall-clock times; the CSV and
// JSON data files contain no timings.

/// intervals.csv, intervals.json, metrics.csv, model.json.
nlohmann::json cmd_forecast(RunConfig& config);

/// schedule.csv/json (robust x at nominal supply), worst_schedule.csv,
/// trace.csv, scenarios.json, uncertainty_set.json, solution.json.
nlohmann::json cmd_optimize(RunConfig& config);

/// budget_sweep.csv, delta_sweep.csv, eta_sweep.csv and one JSON per cell
/// under cells/. Up to `jobs` cells run at once; a failed cell is recorded
/// with its status and the sweep continues.
nlohmann::json cmd_sweep(RunConfig& config, std::size_t jobs);

/// evaluation.csv (sample 0 is the nominal trajectory) and evaluation.json.
/// The first stage comes from config.schedule when set, otherwise from a
/// robust solve.
nlohmann::json cmd_evaluate(RunConfig& config);

struct GenerateOptions {
  std::size_t periods = 3;
  std::size_t history_length = 1000;
  std::uint64_t seed = 2024;
  double noise_scale = 1.0;
};

/// network.json, history.csv and a config.json that points at them.
void cmd_generate(const std::filesystem::path& dir, const GenerateOptions& options);

}  // namespace gasflow::app
