#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasflow/forecast/forecaster.hpp"
#include "gasflow/tsro/ccg.hpp"

namespace gasflow::app {

/// Inclusive grid from, from + step, ..., to.
struct Range {
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  std::vector<double> values() const;
};

struct SweepSpec {
  int budget_min = 0;
  /// Negative means the horizon length.
  int budget_max = -1;
  std::vector<double> alphas = {0.01, 0.05, 0.1};
  Range delta_scale{0.5, 2.0, 0.1};
  Range eta_out{0.0, 0.3, 0.05};
  /// Budget used by the delta and eta sweeps.
  int flex_budget = 1;
};

struct RunConfig {
  std::filesystem::path base_dir;  // directory of the config file
  std::filesystem::path network;
  std::optional<std::filesystem::path> history;
  std::optional<std::filesystem::path> intervals;
  std::optional<std::filesystem::path> schedule;
  std::filesystem::path output_dir;

  forecast::ForecasterConfig forecaster;
  /// Per-arc budgets; `budget_all` applies to arcs not listed.
  std::map<std::string, int> budgets;
  std::optional<int> budget_all;
  tsro::CcgOptions ccg;
  SweepSpec sweep;
  std::size_t samples = 200;
  std::uint64_t seed = 1;

  nlohmann::json echo;  // the document as read

  void validate() const;
  /// Budget per arc for the given ids. Throws when an arc has none.
  std::map<std::string, int> budgets_for(const std::vector<std::string>& arcs) const;
};

/// Paths are resolved against `base_dir`. Unknown keys are rejected with a
/// JSON pointer.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
/// Reads, parses and validates, then checks that referenced inputs exist
/// (IoError otherwise).
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gasflow::app
