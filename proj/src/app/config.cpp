#include "gasflow/app/config.hpp"

#include <cmath>
#include <set>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"

namespace gasflow::app {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
  throw ValidationError("config " + pointer + ": " + msg);
}

void check_keys(const json& obj, const std::string& pointer, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(pointer.empty() ? "/" : pointer, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(pointer + "/" + key, "unknown key");
  }
}

double number(const json& obj, const std::string& pointer, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(pointer + "/" + key, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(pointer + "/" + key, "expected a finite number");
  return d;
}

std::size_t count(const json& obj, const std::string& pointer, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(pointer + "/" + key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

int integer(const json& obj, const std::string& pointer, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

std::filesystem::path path_of(const json& obj, const std::string& pointer, const char* key,
                              const std::filesystem::path& base) {
  const auto& v = obj.at(key);
  if (!v.is_string() || v.get<std::string>().empty()) fail(pointer + "/" + key, "expected a path string");
  std::filesystem::path p = v.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

Range range(const json& obj, const std::string& pointer, const char* key, Range fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& r = obj.at(key);
  std::string ptr = pointer + "/" + key;
  check_keys(r, ptr, {"from", "to", "step"});
  Range out;
  out.from = number(r, ptr, "from", fallback.from);
  out.to = number(r, ptr, "to", fallback.to);
  out.step = number(r, ptr, "step", fallback.step);
  if (!(out.step > 0.0)) fail(ptr + "/step", "must be positive");
  if (out.to < out.from) fail(ptr, "empty range");
  return out;
}

}  // namespace

std::vector<double> Range::values() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    // Round to 1e-9 so 0.1 steps print as 0.6 rather than 0.6000000000000001.
    double v = from + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

void RunConfig::validate() const {
  forecaster.validate();
  for (const auto& [arc, g] : budgets) {
    if (g < 0) throw ValidationError("config /budget/" + arc + ": budget must be nonnegative");
  }
  if (budget_all && *budget_all < 0) throw ValidationError("config /budget: budget must be nonnegative");
  if (ccg.max_iterations == 0) throw ValidationError("config /ccg/max_iterations: must be positive");
  if (sweep.alphas.empty()) throw ValidationError("config /sweep/alphas: empty list");
  for (double a : sweep.alphas) {
    if (!(a > 0.0 && a <= 0.5)) throw ValidationError("config /sweep/alphas: alpha must lie in (0, 0.5]");
  }
  if (sweep.budget_min < 0) throw ValidationError("config /sweep/budget_min: must be nonnegative");
  if (sweep.budget_max >= 0 && sweep.budget_max < sweep.budget_min) {
    throw ValidationError("config /sweep: empty budget range");
  }
  if (sweep.flex_budget < 0) throw ValidationError("config /sweep/flex_budget: must be nonnegative");
  if (samples == 0) throw ValidationError("config /evaluate/samples: must be positive");
}

std::map<std::string, int> RunConfig::budgets_for(const std::vector<std::string>& arcs) const {
  std::map<std::string, int> out;
  for (const auto& a : arcs) {
    auto it = budgets.find(a);
    if (it != budgets.end()) {
      out[a] = it->second;
    } else if (budget_all) {
      out[a] = *budget_all;
    } else {
      throw ValidationError("config /budget: no budget for arc '" + a + "'");
    }
  }
  for (const auto& [a, _] : budgets) {
    if (!out.count(a)) throw ValidationError("config /budget/" + a + ": not an uncertain arc");
  }
  return out;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "", {"network", "history", "intervals", "schedule", "output_dir", "forecaster", "budget",
                       "ccg", "sweep", "evaluate", "seed"});
  RunConfig c;
  c.base_dir = base_dir;
  c.echo = doc;
  if (!doc.contains("network")) fail("/network", "required");
  if (!doc.contains("output_dir")) fail("/output_dir", "required");
  c.network = path_of(doc, "", "network", base_dir);
  c.output_dir = path_of(doc, "", "output_dir", base_dir);
  if (doc.contains("history")) c.history = path_of(doc, "", "history", base_dir);
  if (doc.contains("intervals")) c.intervals = path_of(doc, "", "intervals", base_dir);
  if (doc.contains("schedule")) c.schedule = path_of(doc, "", "schedule", base_dir);
  if (!c.history && !c.intervals) fail("/history", "either history or intervals is required");
  c.seed = count(doc, "", "seed", 1);

  if (doc.contains("forecaster")) {
    const auto& f = doc.at("forecaster");
    const std::string p = "/forecaster";
    check_keys(f, p, {"lags", "horizon", "alpha", "rounds", "depth", "learning_rate", "min_leaf", "train_length"});
    c.forecaster.lags = count(f, p, "lags", c.forecaster.lags);
    // Zero means "take the horizon from the network document".
    c.forecaster.horizon = count(f, p, "horizon", 0);
    c.forecaster.alpha = number(f, p, "alpha", c.forecaster.alpha);
    c.forecaster.gbdt.rounds = count(f, p, "rounds", c.forecaster.gbdt.rounds);
    c.forecaster.gbdt.depth = count(f, p, "depth", c.forecaster.gbdt.depth);
    c.forecaster.gbdt.learning_rate = number(f, p, "learning_rate", c.forecaster.gbdt.learning_rate);
    c.forecaster.gbdt.min_leaf = count(f, p, "min_leaf", c.forecaster.gbdt.min_leaf);
    c.forecaster.train_length = count(f, p, "train_length", c.forecaster.train_length);
  } else {
    c.forecaster.horizon = 0;
  }

  if (doc.contains("budget")) {
    const auto& b = doc.at("budget");
    if (b.is_number_integer()) {
      c.budget_all = b.get<int>();
    } else if (b.is_object()) {
      for (const auto& [arc, v] : b.items()) {
        if (!v.is_number_integer()) fail("/budget/" + arc, "expected an integer");
        c.budgets[arc] = v.get<int>();
      }
    } else {
      fail("/budget", "expected an integer or an object of per-arc integers");
    }
  } else {
    c.budget_all = 0;
  }

  if (doc.contains("ccg")) {
    const auto& g = doc.at("ccg");
    const std::string p = "/ccg";
    check_keys(g, p, {"abs_tol", "rel_tol", "max_iterations", "node_limit", "big_m_safety"});
    c.ccg.abs_tol = number(g, p, "abs_tol", c.ccg.abs_tol);
    c.ccg.rel_tol = number(g, p, "rel_tol", c.ccg.rel_tol);
    c.ccg.max_iterations = count(g, p, "max_iterations", c.ccg.max_iterations);
    c.ccg.node_limit = count(g, p, "node_limit", c.ccg.node_limit);
    c.ccg.subproblem.node_limit = c.ccg.node_limit;
    c.ccg.subproblem.big_m_safety = number(g, p, "big_m_safety", c.ccg.subproblem.big_m_safety);
    if (c.ccg.abs_tol < 0 || c.ccg.rel_tol < 0) fail(p, "tolerances must be nonnegative");
    if (!(c.ccg.subproblem.big_m_safety >= 1.0)) fail(p + "/big_m_safety", "must be at least 1");
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    const std::string p = "/sweep";
    check_keys(s, p, {"budget_min", "budget_max", "alphas", "delta_scale", "eta_out", "flex_budget"});
    c.sweep.budget_min = integer(s, p, "budget_min", c.sweep.budget_min);
    c.sweep.budget_max = integer(s, p, "budget_max", c.sweep.budget_max);
    c.sweep.flex_budget = integer(s, p, "flex_budget", c.sweep.flex_budget);
    if (s.contains("alphas")) {
      const auto& a = s.at("alphas");
      if (!a.is_array()) fail(p + "/alphas", "expected an array");
      c.sweep.alphas.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) fail(p + "/alphas/" + std::to_string(i), "expected a number");
        c.sweep.alphas.push_back(a[i].get<double>());
      }
    }
    c.sweep.delta_scale = range(s, p, "delta_scale", c.sweep.delta_scale);
    c.sweep.eta_out = range(s, p, "eta_out", c.sweep.eta_out);
  }

  if (doc.contains("evaluate")) {
    const auto& e = doc.at("evaluate");
    check_keys(e, "/evaluate", {"samples"});
    c.samples = count(e, "/evaluate", "samples", c.samples);
  }

  // A zero horizon is filled in from the network later.
  auto probe = c;
  if (probe.forecaster.horizon == 0) probe.forecaster.horizon = 1;
  probe.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto text = io::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": JSON syntax error: " + e.what());
  }
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  RunConfig c = parse_config(doc, base);
  std::vector<std::filesystem::path> inputs = {c.network};
  if (c.history) inputs.push_back(*c.history);
  if (c.intervals) inputs.push_back(*c.intervals);
  if (c.schedule) inputs.push_back(*c.schedule);
  for (const auto& p : inputs) {
    if (!std::filesystem::is_regular_file(p)) throw IoError("input file '" + p.string() + "' does not exist");
  }
  return c;
}

}  // namespace gasflow::app
