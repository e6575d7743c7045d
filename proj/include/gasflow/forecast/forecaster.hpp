#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasflow/forecast/gbdt.hpp"
#include "gasflow/forecast/intervals.hpp"

namespace gasflow::forecast {

/// Pairs for one horizon step t: features [z(tau-1), ..., z(tau-p)], most
/// recent first, and target z(tau+t-1).
struct SupervisedStep {
  std::size_t step = 1;
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  std::vector<std::size_t> target_index;  // position of the target in the history
};

struct SeriesDataset {
  std::size_t lags = 0;
  std::size_t horizon = 0;
  std::vector<SupervisedStep> steps;  // steps[t-1]
};

/// Requires more than p + T observations. Step t gets len - p - t + 1 pairs
/// in chronological order.
SeriesDataset make_supervised(const std::vector<double>& history, std::size_t p, std::size_t T);

using History = std::map<std::string, std::vector<double>>;  // arc id -> series

struct ForecasterConfig {
  std::size_t lags = 20;     // p
  std::size_t horizon = 8;   // T
  double alpha = 0.05;
  GbdtParams gbdt;
  /// Leading observations used for training; the rest are held out. Zero
  /// trains on everything.
  std::size_t train_length = 900;
  void validate() const;
};

/// Models per arc, per level in {alpha, 0.5, 1-alpha}, per step.
struct ForecastBundle {
  ForecasterConfig config;
  std::vector<std::string> arcs;
  std::vector<double> levels;
  /// models[arc][level][step-1]
  std::vector<std::vector<std::vector<QuantileGbdt>>> models;
};

ForecastBundle train_forecaster(const History& history, const ForecasterConfig& config);

/// Direct multi-step forecast from the last p observations of each arc.
/// Crossed quantiles are sorted per cell and counted.
ForecastIntervals forecast_intervals(const ForecastBundle& bundle, const History& history);

/// (1/N) sum |pred - actual| / |actual|. Throws on a zero actual.
double mape(const std::vector<double>& predicted, const std::vector<double>& actual);
/// Fraction of actuals strictly inside (lower, upper).
double picp(const std::vector<double>& lower, const std::vector<double>& upper,
            const std::vector<double>& actual);

struct ArcMetrics {
  std::string arc;
  std::size_t points = 0;
  double mape = 0.0;
  double picp = 0.0;
  std::size_t rearranged = 0;
};

/// Scores the held-out pairs of every step: targets after the training
/// window, features from the observations before each forecast origin.
std::vector<ArcMetrics> backtest(const ForecastBundle& bundle, const History& history);

/// Columns timestamp,arc,value with a header. Series keep file order.
History parse_history_csv(const std::string& text);
std::string history_csv(const History& history);

nlohmann::json to_json(const ForecastBundle& bundle);
ForecastBundle bundle_from_json(const nlohmann::json& doc);

/// Columns arc,period,lower,median,upper.
std::string intervals_csv(const ForecastIntervals& intervals);
nlohmann::json to_json(const ForecastIntervals& intervals);
ForecastIntervals intervals_from_json(const nlohmann::json& doc);

/// Columns arc,alpha,points,mape,picp,rearranged.
std::string metrics_csv(const std::vector<ArcMetrics>& metrics, double alpha);

}  // namespace gasflow::forecast
