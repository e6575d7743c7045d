#include "gasflow/forecast/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"

namespace gasflow::forecast {

using io::format_double;

namespace {

constexpr int kModelVersion = 1;

std::vector<double> lag_window(const std::vector<double>& series, std::size_t tau, std::size_t p) {
  std::vector<double> x(p);
  for (std::size_t k = 0; k < p; ++k) x[k] = series[tau - 1 - k];
  return x;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

SeriesDataset make_supervised(const std::vector<double>& history, std::size_t p, std::size_t T) {
  if (p == 0 || T == 0) throw ValidationError("lag order and horizon must be positive");
  if (history.size() < p + T + 1) {
    throw ValidationError("history has " + std::to_string(history.size()) +
                          " observations; at least " + std::to_string(p + T + 1) + " are required");
  }
  SeriesDataset ds;
  ds.lags = p;
  ds.horizon = T;
  for (std::size_t t = 1; t <= T; ++t) {
    SupervisedStep step;
    step.step = t;
    for (std::size_t tau = p; tau + t - 1 < history.size(); ++tau) {
      step.features.push_back(lag_window(history, tau, p));
      step.targets.push_back(history[tau + t - 1]);
      step.target_index.push_back(tau + t - 1);
    }
    ds.steps.push_back(std::move(step));
  }
  return ds;
}

void ForecasterConfig::validate() const {
  gbdt.validate();
  if (lags == 0) throw ValidationError("lag order p must be positive");
  if (horizon == 0) throw ValidationError("horizon T must be positive");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw ValidationError("alpha must lie in (0, 0.5]");
}

ForecastBundle train_forecaster(const History& history, const ForecasterConfig& config) {
  config.validate();
  if (history.empty()) throw ValidationError("no history to train on");
  ForecastBundle b;
  b.config = config;
  b.levels = {config.alpha, 0.5, 1.0 - config.alpha};
  for (const auto& [arc, series] : history) {
    std::size_t n = config.train_length == 0 ? series.size() : std::min(series.size(), config.train_length);
    std::vector<double> train(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(n));
    SeriesDataset ds;
    try {
      ds = make_supervised(train, config.lags, config.horizon);
    } catch (const ValidationError& e) {
      throw ValidationError("arc " + arc + ": " + e.what());
    }
    std::vector<std::vector<QuantileGbdt>> per_level;
    for (std::size_t l = 0; l < b.levels.size(); ++l) {
      // alpha = 0.5 collapses the three levels onto the median model.
      if (l > 0 && b.levels[l] == b.levels[l - 1]) {
        per_level.push_back(per_level.back());
        continue;
      }
      std::vector<QuantileGbdt> steps;
      for (const auto& st : ds.steps) {
        steps.push_back(fit_quantile_gbdt(st.features, st.targets, b.levels[l], config.gbdt));
      }
      per_level.push_back(std::move(steps));
    }
    b.arcs.push_back(arc);
    b.models.push_back(std::move(per_level));
  }
  return b;
}

ForecastIntervals forecast_intervals(const ForecastBundle& bundle, const History& history) {
  const std::size_t p = bundle.config.lags, T = bundle.config.horizon;
  ForecastIntervals out;
  out.alpha = bundle.config.alpha;
  out.periods = T;
  for (std::size_t a = 0; a < bundle.arcs.size(); ++a) {
    const auto& id = bundle.arcs[a];
    auto it = history.find(id);
    if (it == history.end()) throw ValidationError("no history for arc " + id);
    if (it->second.size() < p) {
      throw ValidationError("arc " + id + " needs " + std::to_string(p) + " observations to forecast");
    }
    const auto& models = bundle.models[a];
    if (models.size() != 3) throw ValidationError("arc " + id + " is missing a quantile level");
    auto x = lag_window(it->second, it->second.size(), p);
    std::vector<double> lo(T), mid(T), hi(T);
    for (std::size_t t = 0; t < T; ++t) {
      for (const auto& lvl : models) {
        if (lvl.size() != T) throw ValidationError("arc " + id + " is missing a horizon step");
      }
      double q[3] = {models[0][t].predict(x), models[1][t].predict(x), models[2][t].predict(x)};
      if (!(q[0] <= q[1] && q[1] <= q[2])) {
        std::sort(q, q + 3);
        ++out.rearranged;
      }
      lo[t] = q[0];
      mid[t] = q[1];
      hi[t] = q[2];
    }
    out.arcs.push_back(id);
    out.lower.push_back(std::move(lo));
    out.median.push_back(std::move(mid));
    out.upper.push_back(std::move(hi));
  }
  return out;
}

double mape(const std::vector<double>& predicted, const std::vector<double>& actual) {
  if (predicted.size() != actual.size()) throw ValidationError("mape: length mismatch");
  if (actual.empty()) throw ValidationError("mape: no points");
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw ValidationError("mape: actual value is zero at position " + std::to_string(i));
    s += std::abs(predicted[i] - actual[i]) / std::abs(actual[i]);
  }
  return s / static_cast<double>(actual.size());
}

double picp(const std::vector<double>& lower, const std::vector<double>& upper,
            const std::vector<double>& actual) {
  if (lower.size() != actual.size() || upper.size() != actual.size()) {
    throw ValidationError("picp: length mismatch");
  }
  if (actual.empty()) return 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) inside += lower[i] < actual[i] && actual[i] < upper[i];
  return static_cast<double>(inside) / static_cast<double>(actual.size());
}

std::vector<ArcMetrics> backtest(const ForecastBundle& bundle, const History& history) {
  const std::size_t p = bundle.config.lags, T = bundle.config.horizon;
  std::vector<ArcMetrics> out;
  for (std::size_t a = 0; a < bundle.arcs.size(); ++a) {
    const auto& series = history.at(bundle.arcs[a]);
    const std::size_t split = bundle.config.train_length == 0 ? p : bundle.config.train_length;
    ArcMetrics m;
    m.arc = bundle.arcs[a];
    std::vector<double> lo, mid, hi, actual;
    const auto& models = bundle.models[a];
    for (std::size_t t = 1; t <= T; ++t) {
      for (std::size_t tau = std::max(split, p); tau + t - 1 < series.size(); ++tau) {
        auto x = lag_window(series, tau, p);
        double q[3] = {models[0][t - 1].predict(x), models[1][t - 1].predict(x), models[2][t - 1].predict(x)};
        if (!(q[0] <= q[1] && q[1] <= q[2])) {
          std::sort(q, q + 3);
          ++m.rearranged;
        }
        lo.push_back(q[0]);
        mid.push_back(q[1]);
        hi.push_back(q[2]);
        actual.push_back(series[tau + t - 1]);
      }
    }
    m.points = actual.size();
    if (m.points > 0) {
      m.mape = mape(mid, actual);
      m.picp = picp(lo, hi, actual);
    }
    out.push_back(m);
  }
  return out;
}

History parse_history_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  int col_ts = -1, col_arc = -1, col_value = -1;
  History h;
  std::map<std::string, std::set<std::string>> seen;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split_csv_line(line);
    if (col_ts < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "timestamp") col_ts = static_cast<int>(i);
        if (cells[i] == "arc") col_arc = static_cast<int>(i);
        if (cells[i] == "value") col_value = static_cast<int>(i);
      }
      for (auto [col, name] : {std::pair{col_ts, "timestamp"}, {col_arc, "arc"}, {col_value, "value"}}) {
        if (col < 0) throw ValidationError("history line 1: missing column '" + std::string(name) + "'");
      }
      continue;
    }
    auto where = "history line " + std::to_string(line_no) + ": ";
    std::size_t need = static_cast<std::size_t>(std::max({col_ts, col_arc, col_value})) + 1;
    if (cells.size() < need) throw ValidationError(where + "expected " + std::to_string(need) + " fields");
    const auto& arc = cells[static_cast<std::size_t>(col_arc)];
    const auto& ts = cells[static_cast<std::size_t>(col_ts)];
    const auto& raw = cells[static_cast<std::size_t>(col_value)];
    if (arc.empty()) throw ValidationError(where + "empty arc id");
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size() || !std::isfinite(v)) {
      throw ValidationError(where + "value '" + raw + "' is not a finite number");
    }
    if (!seen[arc].insert(ts).second) {
      throw ValidationError(where + "duplicate timestamp '" + ts + "' for arc " + arc);
    }
    h[arc].push_back(v);
  }
  if (col_ts < 0) throw ValidationError("history is empty");
  return h;
}

std::string history_csv(const History& history) {
  std::ostringstream os;
  os << "timestamp,arc,value\n";
  for (const auto& [arc, series] : history) {
    for (std::size_t i = 0; i < series.size(); ++i) os << i << ',' << arc << ',' << format_double(series[i]) << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const ForecastBundle& b) {
  const auto& c = b.config;
  nlohmann::json arcs = nlohmann::json::array();
  for (std::size_t a = 0; a < b.arcs.size(); ++a) {
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t l = 0; l < b.levels.size(); ++l) {
      nlohmann::json steps = nlohmann::json::array();
      for (const auto& m : b.models[a][l]) steps.push_back(to_json(m));
      levels.push_back({{"level", b.levels[l]}, {"steps", steps}});
    }
    arcs.push_back({{"id", b.arcs[a]}, {"levels", levels}});
  }
  return {{"format", "gasflow-quantile-gbdt"},
          {"version", kModelVersion},
          {"lags", c.lags},
          {"horizon", c.horizon},
          {"alpha", c.alpha},
          {"train_length", c.train_length},
          {"gbdt",
           {{"rounds", c.gbdt.rounds},
            {"depth", c.gbdt.depth},
            {"learning_rate", c.gbdt.learning_rate},
            {"min_leaf", c.gbdt.min_leaf}}},
          {"arcs", arcs}};
}

ForecastBundle bundle_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "gasflow-quantile-gbdt") {
      throw ValidationError("not a forecaster model document");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw ValidationError("unsupported forecaster model version " + doc.at("version").dump());
    }
    ForecastBundle b;
    auto& c = b.config;
    c.lags = doc.at("lags").get<std::size_t>();
    c.horizon = doc.at("horizon").get<std::size_t>();
    c.alpha = doc.at("alpha").get<double>();
    c.train_length = doc.at("train_length").get<std::size_t>();
    const auto& g = doc.at("gbdt");
    c.gbdt.rounds = g.at("rounds").get<std::size_t>();
    c.gbdt.depth = g.at("depth").get<std::size_t>();
    c.gbdt.learning_rate = g.at("learning_rate").get<double>();
    c.gbdt.min_leaf = g.at("min_leaf").get<std::size_t>();
    c.validate();
    b.levels = {c.alpha, 0.5, 1.0 - c.alpha};
    for (const auto& arc : doc.at("arcs")) {
      b.arcs.push_back(arc.at("id").get<std::string>());
      std::vector<std::vector<QuantileGbdt>> levels;
      for (const auto& lvl : arc.at("levels")) {
        std::vector<QuantileGbdt> steps;
        for (const auto& m : lvl.at("steps")) steps.push_back(gbdt_from_json(m));
        if (steps.size() != c.horizon) throw ValidationError("arc " + b.arcs.back() + " is missing a horizon step");
        levels.push_back(std::move(steps));
      }
      if (levels.size() != 3) throw ValidationError("arc " + b.arcs.back() + " is missing a quantile level");
      b.models.push_back(std::move(levels));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed forecaster model: ") + e.what());
  }
}

std::string intervals_csv(const ForecastIntervals& iv) {
  std::ostringstream os;
  os << "arc,period,lower,median,upper\n";
  for (std::size_t a = 0; a < iv.arcs.size(); ++a) {
    for (std::size_t t = 0; t < iv.periods; ++t) {
      os << iv.arcs[a] << ',' << t + 1 << ',' << format_double(iv.lower[a][t]) << ','
         << format_double(iv.median[a][t]) << ',' << format_double(iv.upper[a][t]) << '\n';
    }
  }
  return os.str();
}

nlohmann::json to_json(const ForecastIntervals& iv) {
  nlohmann::json arcs = nlohmann::json::array();
  for (std::size_t a = 0; a < iv.arcs.size(); ++a) {
    arcs.push_back({{"id", iv.arcs[a]}, {"lower", iv.lower[a]}, {"median", iv.median[a]}, {"upper", iv.upper[a]}});
  }
  return {{"alpha", iv.alpha}, {"periods", iv.periods}, {"rearranged", iv.rearranged}, {"arcs", arcs}};
}

ForecastIntervals intervals_from_json(const nlohmann::json& doc) {
  try {
    ForecastIntervals iv;
    iv.alpha = doc.at("alpha").get<double>();
    iv.periods = doc.at("periods").get<std::size_t>();
    iv.rearranged = doc.value("rearranged", std::size_t{0});
    for (const auto& arc : doc.at("arcs")) {
      iv.arcs.push_back(arc.at("id").get<std::string>());
      iv.lower.push_back(arc.at("lower").get<std::vector<double>>());
      iv.median.push_back(arc.at("median").get<std::vector<double>>());
      iv.upper.push_back(arc.at("upper").get<std::vector<double>>());
      for (const auto* s : {&iv.lower.back(), &iv.median.back(), &iv.upper.back()}) {
        if (s->size() != iv.periods) throw ValidationError("arc " + iv.arcs.back() + " has the wrong number of periods");
      }
    }
    return iv;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed intervals document: ") + e.what());
  }
}

std::string metrics_csv(const std::vector<ArcMetrics>& metrics, double alpha) {
  std::ostringstream os;
  os << "arc,alpha,points,mape,picp,rearranged\n";
  for (const auto& m : metrics) {
    os << m.arc << ',' << format_double(alpha) << ',' << m.points << ',' << format_double(m.mape) << ','
       << format_double(m.picp) << ',' << m.rearranged << '\n';
  }
  return os.str();
}

}  // namespace gasflow::forecast
