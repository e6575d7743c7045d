#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

namespace gasflow::forecast {

/// Pinball loss at level q: q*max(y - f, 0) + (1 - q)*max(f - y, 0).
double pinball(double y, double f, double q);
double mean_pinball(const std::vector<double>& y, const std::vector<double>& f, double q);

/// Smallest sample value v with at least ceil(q*n) samples <= v. Minimizes
/// the empirical pinball loss at level q.
double empirical_quantile(std::vector<double> values, double q);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  std::size_t left = 0;
  std::size_t right = 0;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const std::vector<double>& x) const;
  std::size_t leaf_of(const std::vector<double>& x) const;
};

struct GbdtParams {
  std::size_t rounds = 200;  // M
  std::size_t depth = 3;
  double learning_rate = 0.05;
  std::size_t min_leaf = 10;
  void validate() const;
};

struct QuantileGbdt {
  double level = 0.5;
  std::size_t lags = 0;
  double initial = 0.0;
  double learning_rate = 0.05;
  std::vector<RegressionTree> trees;
  /// Mean training pinball loss after initialization and after each round.
  std::vector<double> loss_trace;

  /// initial + learning_rate * sum of tree outputs.
  double predict(const std::vector<double>& lags_recent_first) const;
};

/// Rows of `features` are lag vectors, most recent first.
QuantileGbdt fit_quantile_gbdt(const std::vector<std::vector<double>>& features,
                               const std::vector<double>& targets, double level,
                               const GbdtParams& params);

nlohmann::json to_json(const QuantileGbdt& model);
QuantileGbdt gbdt_from_json(const nlohmann::json& doc);

}  // namespace gasflow::forecast
