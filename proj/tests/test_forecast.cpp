#include <algorithm>
#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "gasflow/errors.hpp"
#include "gasflow/forecast/forecaster.hpp"
#include "gasflow/forecast/gbdt.hpp"
#include "gasflow/random.hpp"

using namespace gasflow;
using namespace gasflow::forecast;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

// Smallest sample value minimizing the empirical pinball loss, by scanning
// every candidate.
double brute_quantile(const std::vector<double>& y, double q) {
  double best_v = 0.0, best_loss = INFINITY;
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  for (double c : sorted) {
    double loss = 0.0;
    for (double v : y) loss += v >= c ? q * (v - c) : (1 - q) * (c - v);
    if (loss < best_loss - 1e-12) {
      best_loss = loss;
      best_v = c;
    }
  }
  return best_v;
}

std::vector<double> ar1(std::size_t n, std::uint64_t seed, double phi, double mean, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, sd);
  std::vector<double> z(n);
  double prev = mean;
  for (std::size_t i = 0; i < n; ++i) {
    prev = mean + phi * (prev - mean) + eps(rng);
    z[i] = prev;
  }
  return z;
}

}  // namespace

TEST_CASE("supervised windows", "[forecast]") {
  std::vector<double> h(30);
  for (std::size_t i = 0; i < 30; ++i) h[i] = static_cast<double>(i + 1);
  auto ds = make_supervised(h, 3, 1);
  REQUIRE(ds.steps.size() == 1);
  CHECK(ds.steps[0].targets.size() == 27);
  CHECK(ds.steps[0].features[0] == std::vector<double>{3, 2, 1});
  CHECK(ds.steps[0].targets[0] == 4);
  // No leakage: every feature precedes its target.
  for (std::size_t i = 0; i < ds.steps[0].targets.size(); ++i) {
    CHECK(ds.steps[0].features[i][0] < ds.steps[0].targets[i]);
  }

  std::vector<double> long_h(1000, 1.0);
  auto big = make_supervised(long_h, 20, 8);
  for (std::size_t t = 1; t <= 8; ++t) CHECK(big.steps[t - 1].targets.size() == 1000 - 20 - t + 1);
  CHECK(big.steps[7].targets.size() == 973);

  CHECK_THROWS_WITH(make_supervised(std::vector<double>(10, 1.0), 20, 1), ContainsSubstring("at least 22"));
  CHECK_THROWS_AS(make_supervised(std::vector<double>(10, 1.0), 0, 1), ValidationError);
}

TEST_CASE("empirical quantile minimizes pinball loss", "[forecast]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + random::uniform_index(rng, 60);
    std::vector<double> y(n);
    for (auto& v : y) v = std::round(random::uniform01(rng) * 20.0);  // ties on purpose
    for (double q : {0.01, 0.05, 0.1, 0.5, 0.9, 0.95}) {
      CHECK(empirical_quantile(y, q) == brute_quantile(y, q));
    }
  }
  CHECK(pinball(3.0, 1.0, 0.9) == Approx(1.8));
  CHECK(pinball(1.0, 3.0, 0.9) == Approx(0.2));
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), ValidationError);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 1.0), ValidationError);
}

TEST_CASE("initialization-only model is the empirical quantile", "[forecast]") {
  std::mt19937_64 rng(9);
  std::vector<std::vector<double>> x(200, std::vector<double>(2));
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = {random::uniform01(rng), random::uniform01(rng)};
    y[i] = random::normal(rng) * 3.0 + 7.0;
  }
  GbdtParams p;
  p.rounds = 1;
  p.depth = 0;
  for (double q : {0.05, 0.5, 0.95}) {
    auto m = fit_quantile_gbdt(x, y, q, p);
    CHECK(m.predict({0.3, 0.8}) == brute_quantile(y, q));
    CHECK(m.predict({0.9, 0.1}) == brute_quantile(y, q));
  }
}

TEST_CASE("constant series gives constant predictions", "[forecast]") {
  auto ds = make_supervised(std::vector<double>(80, 4.25), 4, 2);
  GbdtParams p;
  p.rounds = 20;
  for (const auto& st : ds.steps) {
    for (double q : {0.1, 0.5, 0.9}) {
      auto m = fit_quantile_gbdt(st.features, st.targets, q, p);
      CHECK(m.predict({1.0, 2.0, 3.0, 4.0}) == 4.25);
      CHECK(m.loss_trace.back() == 0.0);
    }
  }
}

TEST_CASE("single tree traced by hand", "[forecast]") {
  // x = 0..19; y = 0 below 10 and 10 from 10 on. Median start is 0, the split
  // falls at 9.5, leaves take residual medians 0 and 10.
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({static_cast<double>(i)});
    y.push_back(i < 10 ? 0.0 : 10.0);
  }
  GbdtParams p{1, 1, 1.0, 5};
  auto m = fit_quantile_gbdt(x, y, 0.5, p);
  CHECK(m.initial == 0.0);
  REQUIRE(m.trees.size() == 1);
  const auto& root = m.trees[0].nodes[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold == 9.5);
  CHECK(m.predict({3.0}) == 0.0);
  CHECK(m.predict({12.0}) == 10.0);
  CHECK(m.loss_trace == std::vector<double>{2.5, 0.0});
  CHECK_THROWS_AS(m.predict({}), ValidationError);
  CHECK_THROWS_AS(m.predict({1.0, 2.0}), ValidationError);
}

TEST_CASE("uninformative features recover the marginal quantile", "[forecast]") {
  std::mt19937_64 rng(21);
  std::vector<std::vector<double>> noise(2000, std::vector<double>(3));
  std::vector<std::vector<double>> flat(2000, std::vector<double>(3, 1.0));
  std::vector<double> y(2000);
  for (std::size_t i = 0; i < 2000; ++i) {
    for (auto& v : noise[i]) v = random::uniform01(rng);
    y[i] = random::uniform01(rng);
  }
  double oracle = brute_quantile(y, 0.9);
  CHECK(oracle == Approx(0.9).margin(0.05));
  GbdtParams p;  // defaults

  // Constant lags admit no split.
  auto m_flat = fit_quantile_gbdt(flat, y, 0.9, p);
  CHECK(m_flat.predict({1.0, 1.0, 1.0}) == Approx(oracle).margin(1e-12));

  // Random lags: splits chase noise, the average prediction stays put.
  auto m = fit_quantile_gbdt(noise, y, 0.9, p);
  double sum = 0.0;
  for (int k = 0; k < 500; ++k) {
    sum += m.predict({random::uniform01(rng), random::uniform01(rng), random::uniform01(rng)});
  }
  CHECK(sum / 500.0 == Approx(0.9).margin(0.05));
}

TEST_CASE("training loss never increases", "[forecast]") {
  auto z = ar1(600, 3, 0.8, 50.0, 2.0);
  auto ds = make_supervised(z, 5, 3);
  GbdtParams p;
  p.rounds = 60;
  for (const auto& st : ds.steps) {
    for (double q : {0.05, 0.5, 0.95}) {
      auto m = fit_quantile_gbdt(st.features, st.targets, q, p);
      REQUIRE(m.loss_trace.size() == 61);
      for (std::size_t i = 1; i < m.loss_trace.size(); ++i) {
        CHECK(m.loss_trace[i] <= m.loss_trace[i - 1] + 1e-12);
      }
      CHECK(m.loss_trace.back() < m.loss_trace.front());
    }
  }
  CHECK_THROWS_AS(fit_quantile_gbdt({}, {}, 0.5, p), ValidationError);
  CHECK_THROWS_AS(fit_quantile_gbdt({{1.0}}, {1.0}, 0.0, p), ValidationError);
  GbdtParams bad = p;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(fit_quantile_gbdt({{1.0}}, {1.0}, 0.5, bad), ValidationError);
}

TEST_CASE("interval coverage on an autoregressive series", "[forecast]") {
  auto z = ar1(2500, 11, 0.7, 100.0, 3.0);
  for (double alpha : {0.05, 0.1}) {
    ForecasterConfig cfg;
    cfg.lags = 3;
    cfg.horizon = 1;
    cfg.alpha = alpha;
    cfg.train_length = 2000;
    auto bundle = train_forecaster({{"a", z}}, cfg);
    auto m = backtest(bundle, {{"a", z}});
    REQUIRE(m.size() == 1);
    CHECK(m[0].points == 500);
    INFO("alpha=" << alpha << " picp=" << m[0].picp);
    // (q_alpha, q_(1-alpha)) covers 1 - 2 alpha.
    CHECK(m[0].picp == Approx(1.0 - 2.0 * alpha).margin(0.05));
    // Same interval from the generating model.
    double zq = alpha == 0.05 ? 1.6448536269514722 : 1.2815515655446004;
    std::size_t inside = 0;
    for (std::size_t i = 2000; i < 2500; ++i) {
      double mean = 100.0 + 0.7 * (z[i - 1] - 100.0);
      inside += std::abs(z[i] - mean) < zq * 3.0;
    }
    CHECK(std::abs(m[0].picp - inside / 500.0) <= 0.05);
  }
}

TEST_CASE("forecast intervals", "[forecast]") {
  auto z = ar1(400, 4, 0.6, 30.0, 1.0);
  ForecasterConfig cfg;
  cfg.lags = 4;
  cfg.horizon = 3;
  cfg.gbdt.rounds = 40;
  cfg.train_length = 0;
  auto bundle = train_forecaster({{"a", z}, {"b", std::vector<double>(400, 7.0)}}, cfg);
  auto iv = forecast_intervals(bundle, {{"a", z}, {"b", std::vector<double>(400, 7.0)}});
  CHECK(iv.arcs == std::vector<std::string>{"a", "b"});
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(iv.lower[a][t] <= iv.median[a][t]);
      CHECK(iv.median[a][t] <= iv.upper[a][t]);
    }
  }
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(iv.lower[1][t] == 7.0);
    CHECK(iv.upper[1][t] == 7.0);
  }
  CHECK_THROWS_AS(forecast_intervals(bundle, {{"a", z}}), ValidationError);

  cfg.alpha = 0.5;
  auto half = train_forecaster({{"a", z}}, cfg);
  auto iv2 = forecast_intervals(half, {{"a", z}});
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(iv2.lower[0][t] == iv2.median[0][t]);
    CHECK(iv2.upper[0][t] == iv2.median[0][t]);
  }

  auto broken = bundle;
  broken.models[0].pop_back();
  CHECK_THROWS_AS(forecast_intervals(broken, {{"a", z}, {"b", z}}), ValidationError);
}

TEST_CASE("crossed quantiles are sorted and counted", "[forecast]") {
  ForecastBundle b;
  b.config.lags = 1;
  b.config.horizon = 1;
  b.config.alpha = 0.1;
  b.arcs = {"a"};
  b.levels = {0.1, 0.5, 0.9};
  auto constant = [](double c, double q) {
    QuantileGbdt m;
    m.level = q;
    m.lags = 1;
    m.initial = c;
    return m;
  };
  b.models = {{{constant(5.0, 0.1)}, {constant(4.0, 0.5)}, {constant(6.0, 0.9)}}};
  auto iv = forecast_intervals(b, {{"a", {1.0}}});
  CHECK(iv.rearranged == 1);
  CHECK(iv.lower[0][0] == 4.0);
  CHECK(iv.median[0][0] == 5.0);
  CHECK(iv.upper[0][0] == 6.0);
}

TEST_CASE("MAPE and PICP", "[forecast]") {
  CHECK(mape({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mape({110}, {100}) == Approx(0.10));
  CHECK(mape({90, 110}, {100, 100}) == Approx(0.10));
  CHECK_THROWS_AS(mape({1}, {0}), ValidationError);
  CHECK_THROWS_AS(mape({1, 2}, {1}), ValidationError);

  CHECK(picp({0, 0}, {2, 2}, {1, 1}) == 1.0);
  CHECK(picp({0, 0}, {2, 2}, {5, -1}) == 0.0);
  CHECK(picp({0, 0, 0, 0}, {2, 2, 2, 2}, {1, 1, 1, 3}) == 0.75);
  // Open interval: endpoints do not count.
  CHECK(picp({0, 0}, {2, 2}, {0, 2}) == 0.0);
}

TEST_CASE("history CSV", "[forecast]") {
  auto h = parse_history_csv("timestamp,arc,value\n1,a,1.5\n1,b,2\n2,a,3\n\n3,a,4\n");
  CHECK(h.at("a") == std::vector<double>{1.5, 3, 4});
  CHECK(h.at("b") == std::vector<double>{2});
  auto moved = parse_history_csv("value,timestamp,arc\n9,1,x\n");
  CHECK(moved.at("x") == std::vector<double>{9});

  CHECK_THROWS_WITH(parse_history_csv("timestamp,value\n1,2\n"), ContainsSubstring("missing column 'arc'"));
  CHECK_THROWS_WITH(parse_history_csv("timestamp,arc,value\n1,a,2\n2,a,abc\n"), ContainsSubstring("line 3"));
  CHECK_THROWS_WITH(parse_history_csv("timestamp,arc,value\n1,a,2\n1,a,3\n"), ContainsSubstring("duplicate"));
  CHECK_THROWS_AS(parse_history_csv(""), ValidationError);

  History round{{"a", {1.25, 2.5}}, {"b", {3.0}}};
  CHECK(parse_history_csv(history_csv(round)) == round);
}

TEST_CASE("model and interval documents round-trip", "[forecast]") {
  auto z = ar1(200, 8, 0.5, 10.0, 1.0);
  ForecasterConfig cfg;
  cfg.lags = 3;
  cfg.horizon = 2;
  cfg.gbdt.rounds = 15;
  cfg.train_length = 150;
  auto b1 = train_forecaster({{"a", z}}, cfg);
  auto b2 = train_forecaster({{"a", z}}, cfg);
  CHECK(to_json(b1).dump() == to_json(b2).dump());

  auto back = bundle_from_json(nlohmann::json::parse(to_json(b1).dump()));
  auto iv1 = forecast_intervals(b1, {{"a", z}});
  auto iv2 = forecast_intervals(back, {{"a", z}});
  CHECK(iv1.lower == iv2.lower);
  CHECK(iv1.median == iv2.median);
  CHECK(iv1.upper == iv2.upper);

  auto doc = to_json(b1);
  doc["version"] = 99;
  CHECK_THROWS_WITH(bundle_from_json(doc), ContainsSubstring("version"));
  CHECK_THROWS_AS(bundle_from_json(nlohmann::json::object()), ValidationError);

  auto iv3 = intervals_from_json(nlohmann::json::parse(to_json(iv1).dump()));
  CHECK(iv3.median == iv1.median);
  CHECK(intervals_csv(iv1).rfind("arc,period,lower,median,upper\n", 0) == 0);
  auto m = backtest(b1, {{"a", z}});
  CHECK(metrics_csv(m, 0.05).rfind("arc,alpha,points,mape,picp,rearranged\n", 0) == 0);
  CHECK(m[0].points == (200 - 150) + (200 - 150 - 1));
}
