#include "gasflow/uncertainty/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"
#include "gasflow/random.hpp"

namespace gasflow::uncertainty {

namespace {

void check_shape(const Trajectory& m, std::size_t arcs, std::size_t periods, const char* what) {
  if (m.size() != arcs) {
    throw ValidationError(std::string(what) + " has " + std::to_string(m.size()) + " arcs, expected " +
                          std::to_string(arcs));
  }
  for (const auto& row : m) {
    if (row.size() != periods) {
      throw ValidationError(std::string(what) + " rows must have " + std::to_string(periods) + " periods");
    }
  }
}

}  // namespace

UncertaintySet UncertaintySet::budgeted(std::vector<std::string> arcs, Trajectory nominal,
                                        Trajectory minus, Trajectory plus, std::vector<int> budgets) {
  UncertaintySet s;
  s.arcs_ = std::move(arcs);
  s.periods_ = nominal.empty() ? 0 : nominal.front().size();
  s.nominal_ = std::move(nominal);
  s.minus_ = std::move(minus);
  s.plus_ = std::move(plus);
  s.budgets_ = std::move(budgets);
  s.check();
  bool full = std::all_of(s.budgets_.begin(), s.budgets_.end(),
                          [&](int g) { return g == static_cast<int>(s.periods_); });
  s.kind_ = full ? SetKind::kBox : SetKind::kBudget;
  return s;
}

UncertaintySet UncertaintySet::box(std::vector<std::string> arcs, Trajectory nominal, Trajectory minus,
                                   Trajectory plus) {
  std::size_t T = nominal.empty() ? 0 : nominal.front().size();
  std::vector<int> budgets(arcs.size(), static_cast<int>(T));
  return budgeted(std::move(arcs), std::move(nominal), std::move(minus), std::move(plus),
                  std::move(budgets));
}

void UncertaintySet::check() const {
  const std::size_t n = arcs_.size();
  if (n == 0) throw ValidationError("uncertainty set needs at least one arc");
  if (periods_ == 0) throw ValidationError("uncertainty set needs at least one period");
  check_shape(nominal_, n, periods_, "nominal");
  check_shape(minus_, n, periods_, "minus deviations");
  check_shape(plus_, n, periods_, "plus deviations");
  if (budgets_.size() != n) throw ValidationError("one budget per arc is required");
  for (std::size_t a = 0; a < n; ++a) {
    if (budgets_[a] < 0 || budgets_[a] > static_cast<int>(periods_)) {
      throw ValidationError("budget for arc '" + arcs_[a] + "' must lie in [0, " +
                            std::to_string(periods_) + "]");
    }
    for (std::size_t t = 0; t < periods_; ++t) {
      if (!(minus_[a][t] >= 0.0) || !(plus_[a][t] >= 0.0)) {
        throw ValidationError("deviations for arc '" + arcs_[a] + "' must be nonnegative");
      }
    }
  }
}

std::size_t UncertaintySet::arc_position(const std::string& id) const {
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    if (arcs_[a] == id) return a;
  }
  throw ValidationError("arc '" + id + "' is not in the uncertainty set");
}

UncertaintySet UncertaintySet::with_budgets(std::vector<int> budgets) const {
  return budgeted(arcs_, nominal_, minus_, plus_, std::move(budgets));
}

UncertaintySet UncertaintySet::with_budget(int budget) const {
  return with_budgets(std::vector<int>(arcs_.size(), budget));
}

ScenarioIndicators ScenarioIndicators::zeros(std::size_t arcs, std::size_t periods) {
  ScenarioIndicators ind;
  ind.plus.assign(arcs, std::vector<std::uint8_t>(periods, 0));
  ind.minus.assign(arcs, std::vector<std::uint8_t>(periods, 0));
  return ind;
}

UncertaintySet from_forecast(const forecast::ForecastIntervals& f,
                             const std::map<std::string, int>& budgets,
                             std::vector<std::string>* warnings) {
  const std::size_t n = f.arcs.size();
  check_shape(f.lower, n, f.periods, "forecast lower quantiles");
  check_shape(f.median, n, f.periods, "forecast medians");
  check_shape(f.upper, n, f.periods, "forecast upper quantiles");
  Trajectory nominal = f.median;
  Trajectory minus(n, std::vector<double>(f.periods));
  Trajectory plus(n, std::vector<double>(f.periods));
  std::vector<int> g(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto it = budgets.find(f.arcs[a]);
    if (it == budgets.end()) throw ValidationError("no budget given for arc '" + f.arcs[a] + "'");
    g[a] = it->second;
    for (std::size_t t = 0; t < f.periods; ++t) {
      double dm = f.median[a][t] - f.lower[a][t];
      double dp = f.upper[a][t] - f.median[a][t];
      if (dm < 0.0) {
        if (warnings) {
          warnings->push_back("arc " + f.arcs[a] + " period " + std::to_string(t + 1) +
                              ": lower quantile above median, minus deviation clipped to 0");
        }
        dm = 0.0;
      }
      if (dp < 0.0) {
        if (warnings) {
          warnings->push_back("arc " + f.arcs[a] + " period " + std::to_string(t + 1) +
                              ": upper quantile below median, plus deviation clipped to 0");
        }
        dp = 0.0;
      }
      minus[a][t] = dm;
      plus[a][t] = dp;
    }
  }
  return UncertaintySet::budgeted(f.arcs, std::move(nominal), std::move(minus), std::move(plus),
                                  std::move(g));
}

Trajectory realize(const UncertaintySet& set, const ScenarioIndicators& ind) {
  const std::size_t n = set.arcs().size();
  const std::size_t T = set.periods();
  if (ind.plus.size() != n || ind.minus.size() != n) {
    throw ValidationError("indicator arc count does not match the set");
  }
  Trajectory z = set.nominal();
  for (std::size_t a = 0; a < n; ++a) {
    if (ind.plus[a].size() != T || ind.minus[a].size() != T) {
      throw ValidationError("indicator period count does not match the set");
    }
    int used = 0;
    for (std::size_t t = 0; t < T; ++t) {
      int p = ind.plus[a][t];
      int m = ind.minus[a][t];
      if (p > 1 || m > 1) throw ValidationError("indicators must be 0 or 1");
      if (p + m > 1) {
        throw ValidationError("arc '" + set.arcs()[a] + "' period " + std::to_string(t + 1) +
                              " deviates both up and down");
      }
      used += p + m;
      z[a][t] += p * set.plus()[a][t] - m * set.minus()[a][t];
    }
    if (used > set.budgets()[a]) {
      throw ValidationError("arc '" + set.arcs()[a] + "' uses " + std::to_string(used) +
                            " deviations, budget is " + std::to_string(set.budgets()[a]));
    }
  }
  return z;
}

Trajectory realize_fractional(const UncertaintySet& set, const Trajectory& xp, const Trajectory& xm) {
  const std::size_t n = set.arcs().size();
  const std::size_t T = set.periods();
  check_shape(xp, n, T, "xi plus");
  check_shape(xm, n, T, "xi minus");
  Trajectory z = set.nominal();
  for (std::size_t a = 0; a < n; ++a) {
    double used = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      double p = xp[a][t];
      double m = xm[a][t];
      if (p < 0.0 || m < 0.0 || p + m > 1.0 + 1e-12) {
        throw ValidationError("fractional indicators must be nonnegative with sum at most 1 per cell");
      }
      used += p + m;
      z[a][t] += p * set.plus()[a][t] - m * set.minus()[a][t];
    }
    if (used > set.budgets()[a] + 1e-9) {
      throw ValidationError("arc '" + set.arcs()[a] + "' exceeds its budget");
    }
  }
  return z;
}

std::vector<Trajectory> sample(const UncertaintySet& set, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw ValidationError("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  const std::size_t arcs = set.arcs().size();
  const std::size_t T = set.periods();
  std::vector<Trajectory> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    // Even samples are extreme points, odd samples scale them into the interior.
    const bool interior = (s % 2) == 1;
    Trajectory xp(arcs, std::vector<double>(T, 0.0));
    Trajectory xm(arcs, std::vector<double>(T, 0.0));
    for (std::size_t a = 0; a < arcs; ++a) {
      auto budget = static_cast<std::size_t>(set.budgets()[a]);
      std::size_t k = random::uniform_index(rng, budget + 1);
      std::vector<std::size_t> cells(T);
      std::iota(cells.begin(), cells.end(), 0);
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + random::uniform_index(rng, T - i);
        std::swap(cells[i], cells[j]);
        double mag = interior ? random::uniform01(rng) : 1.0;
        if (random::uniform01(rng) < 0.5) {
          xp[a][cells[i]] = mag;
        } else {
          xm[a][cells[i]] = mag;
        }
      }
    }
    out.push_back(realize_fractional(set, xp, xm));
  }
  return out;
}

nlohmann::json to_json(const UncertaintySet& set) {
  return {{"kind", set.kind() == SetKind::kBox ? "box" : "budget"},
          {"periods", set.periods()},
          {"arcs", set.arcs()},
          {"nominal", set.nominal()},
          {"minus", set.minus()},
          {"plus", set.plus()},
          {"budgets", set.budgets()}};
}

UncertaintySet set_from_json(const nlohmann::json& doc) {
  try {
    auto arcs = doc.at("arcs").get<std::vector<std::string>>();
    auto nominal = doc.at("nominal").get<Trajectory>();
    auto minus = doc.at("minus").get<Trajectory>();
    auto plus = doc.at("plus").get<Trajectory>();
    std::string kind = doc.value("kind", "budget");
    if (kind == "box") return UncertaintySet::box(arcs, nominal, minus, plus);
    if (kind != "budget") throw ValidationError("/kind: unknown set kind '" + kind + "'");
    return UncertaintySet::budgeted(arcs, nominal, minus, plus, doc.at("budgets").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("uncertainty set JSON: ") + e.what());
  }
}

std::string trajectories_csv(const UncertaintySet& set, const std::vector<Trajectory>& samples) {
  std::string out = "sample,arc,period,value\n";
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t a = 0; a < set.arcs().size(); ++a) {
      for (std::size_t t = 0; t < set.periods(); ++t) {
        out += std::to_string(s) + "," + set.arcs()[a] + "," + std::to_string(t + 1) + "," +
               io::format_double(samples[s][a][t]) + "\n";
      }
    }
  }
  return out;
}

std::map<std::string, std::vector<double>> as_supply_map(const UncertaintySet& set, const Trajectory& z) {
  std::map<std::string, std::vector<double>> m;
  for (std::size_t a = 0; a < set.arcs().size(); ++a) m[set.arcs()[a]] = z.at(a);
  return m;
}

}  // namespace gasflow::uncertainty
