#include "gasflow/forecast/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gasflow/errors.hpp"

namespace gasflow::forecast {

double pinball(double y, double f, double q) {
  double r = y - f;
  return r >= 0.0 ? q * r : (q - 1.0) * r;
}

double mean_pinball(const std::vector<double>& y, const std::vector<double>& f, double q) {
  if (y.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += pinball(y[i], f[i], q);
  return s / static_cast<double>(y.size());
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  const double n = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-12));
  k = std::clamp<std::size_t>(k, 1, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

std::size_t RegressionTree::leaf_of(const std::vector<double>& x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

double RegressionTree::predict(const std::vector<double>& x) const { return nodes[leaf_of(x)].value; }

void GbdtParams::validate() const {
  if (rounds < 1) throw ValidationError("boosting needs at least one round");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning rate must lie in (0, 1]");
  }
  if (min_leaf < 1) throw ValidationError("min_leaf must be at least 1");
}

double QuantileGbdt::predict(const std::vector<double>& x) const {
  if (x.size() != lags) {
    throw ValidationError("expected " + std::to_string(lags) + " lags, got " + std::to_string(x.size()));
  }
  double f = initial;
  for (const auto& t : trees) f += learning_rate * t.predict(x);
  return f;
}

namespace {

// Least-squares CART on the pseudo-residuals, using per-feature orders sorted
// once up front.
class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<double>>& x, std::size_t p, const GbdtParams& params)
      : x_(x), p_(p), params_(params), order_(p), node_of_(x.size()) {
    for (std::size_t f = 0; f < p; ++f) {
      auto& o = order_[f];
      o.resize(x.size());
      std::iota(o.begin(), o.end(), 0);
      std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
    }
  }

  RegressionTree grow(const std::vector<double>& gradient, const std::vector<double>& residual,
                      double level) {
    RegressionTree tree;
    tree.nodes.push_back({});
    std::fill(node_of_.begin(), node_of_.end(), 0);
    std::vector<std::size_t> frontier{0};
    for (std::size_t d = 0; d < params_.depth && !frontier.empty(); ++d) {
      std::vector<std::size_t> next;
      // Best split per frontier node, found in one pass per feature.
      const std::size_t nodes = tree.nodes.size();
      std::vector<Split> best(nodes);
      std::vector<double> total_sum(nodes, 0.0);
      std::vector<std::size_t> total_n(nodes, 0);
      for (std::size_t i = 0; i < gradient.size(); ++i) {
        total_sum[node_of_[i]] += gradient[i];
        ++total_n[node_of_[i]];
      }
      std::vector<double> left_sum(nodes);
      std::vector<std::size_t> left_n(nodes);
      std::vector<double> last(nodes);
      for (std::size_t f = 0; f < p_; ++f) {
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        std::fill(left_n.begin(), left_n.end(), 0);
        std::fill(last.begin(), last.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t i : order_[f]) {
          std::size_t nd = node_of_[i];
          if (!is_frontier(tree, nd)) continue;
          double v = x_[i][f];
          std::size_t nl = left_n[nd], nr = total_n[nd] - nl;
          if (nl >= params_.min_leaf && nr >= params_.min_leaf && v > last[nd]) {
            double sl = left_sum[nd], sr = total_sum[nd] - sl;
            double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) -
                          total_sum[nd] * total_sum[nd] / static_cast<double>(total_n[nd]);
            if (gain > best[nd].gain + 1e-12) best[nd] = {gain, static_cast<int>(f), 0.5 * (last[nd] + v)};
          }
          left_sum[nd] += gradient[i];
          ++left_n[nd];
          last[nd] = v;
        }
      }
      for (std::size_t nd : frontier) {
        if (best[nd].feature < 0) continue;
        std::size_t l = tree.nodes.size();
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        tree.nodes[nd].feature = best[nd].feature;
        tree.nodes[nd].threshold = best[nd].threshold;
        tree.nodes[nd].left = l;
        tree.nodes[nd].right = l + 1;
        next.push_back(l);
        next.push_back(l + 1);
      }
      for (std::size_t i = 0; i < node_of_.size(); ++i) {
        const auto& n = tree.nodes[node_of_[i]];
        if (n.feature >= 0) {
          node_of_[i] = x_[i][static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
      }
      frontier = std::move(next);
    }
    // Leaf values: level-quantile of the residuals that land there.
    std::vector<std::vector<double>> bucket(tree.nodes.size());
    for (std::size_t i = 0; i < node_of_.size(); ++i) bucket[node_of_[i]].push_back(residual[i]);
    for (std::size_t nd = 0; nd < tree.nodes.size(); ++nd) {
      if (tree.nodes[nd].feature < 0 && !bucket[nd].empty()) {
        tree.nodes[nd].value = empirical_quantile(std::move(bucket[nd]), level);
      }
    }
    return tree;
  }

 private:
  struct Split {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  static bool is_frontier(const RegressionTree& tree, std::size_t nd) {
    // Leaves that may still split; split nodes no longer hold samples.
    return tree.nodes[nd].feature < 0;
  }

  const std::vector<std::vector<double>>& x_;
  std::size_t p_;
  const GbdtParams& params_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> node_of_;
};

}  // namespace

QuantileGbdt fit_quantile_gbdt(const std::vector<std::vector<double>>& features,
                               const std::vector<double>& targets, double level,
                               const GbdtParams& params) {
  params.validate();
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  if (targets.empty()) throw ValidationError("cannot fit a forecaster on an empty dataset");
  if (features.size() != targets.size()) {
    throw ValidationError("feature and target counts differ");
  }
  const std::size_t p = features.front().size();
  for (const auto& row : features) {
    if (row.size() != p) throw ValidationError("feature rows have different lengths");
  }
  QuantileGbdt model;
  model.level = level;
  model.lags = p;
  model.learning_rate = params.learning_rate;
  model.initial = empirical_quantile(targets, level);

  const std::size_t n = targets.size();
  std::vector<double> f(n, model.initial), gradient(n), residual(n);
  model.loss_trace.push_back(mean_pinball(targets, f, level));
  TreeGrower grower(features, p, params);
  for (std::size_t m = 0; m < params.rounds; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = targets[i] - f[i];
      gradient[i] = residual[i] > 0.0 ? level : level - 1.0;
    }
    auto tree = grower.grow(gradient, residual, level);
    for (std::size_t i = 0; i < n; ++i) f[i] += params.learning_rate * tree.predict(features[i]);
    model.loss_trace.push_back(mean_pinball(targets, f, level));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

nlohmann::json to_json(const QuantileGbdt& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      if (n.feature < 0) {
        nodes.push_back({{"value", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"level", model.level},         {"lags", model.lags},    {"initial", model.initial},
          {"learning_rate", model.learning_rate}, {"trees", trees}, {"loss_trace", model.loss_trace}};
}

QuantileGbdt gbdt_from_json(const nlohmann::json& doc) {
  try {
    QuantileGbdt m;
    m.level = doc.at("level").get<double>();
    m.lags = doc.at("lags").get<std::size_t>();
    m.initial = doc.at("initial").get<double>();
    m.learning_rate = doc.at("learning_rate").get<double>();
    m.loss_trace = doc.value("loss_trace", std::vector<double>{});
    for (const auto& t : doc.at("trees")) {
      RegressionTree tree;
      for (const auto& n : t) {
        TreeNode node;
        if (n.contains("feature")) {
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<std::size_t>();
          node.right = n.at("right").get<std::size_t>();
        } else {
          node.value = n.at("value").get<double>();
        }
        tree.nodes.push_back(node);
      }
      for (const auto& node : tree.nodes) {
        if (node.feature >= 0 && (node.left >= tree.nodes.size() || node.right >= tree.nodes.size() ||
                                  static_cast<std::size_t>(node.feature) >= m.lags)) {
          throw ValidationError("tree node refers outside the model");
        }
      }
      if (tree.nodes.empty()) throw ValidationError("empty tree");
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed forecaster model: ") + e.what());
  }
}

}  // namespace gasflow::forecast
