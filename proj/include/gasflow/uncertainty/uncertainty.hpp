#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasflow/forecast/intervals.hpp"

namespace gasflow::uncertainty {

enum class SetKind { kBox, kBudget };

using Trajectory = std::vector<std::vector<double>>;  // [arc][t]

/// Supply deviations around a nominal trajectory, one budget per arc.
class UncertaintySet {
 public:
  UncertaintySet() = default;

  /// Box set: every arc gets budget T.
  static UncertaintySet box(std::vector<std::string> arcs, Trajectory nominal, Trajectory minus,
                            Trajectory plus);
  static UncertaintySet budgeted(std::vector<std::string> arcs, Trajectory nominal,
                                 Trajectory minus, Trajectory plus, std::vector<int> budgets);

  SetKind kind() const { return kind_; }
  std::size_t periods() const { return periods_; }
  const std::vector<std::string>& arcs() const { return arcs_; }
  const Trajectory& nominal() const { return nominal_; }
  const Trajectory& minus() const { return minus_; }
  const Trajectory& plus() const { return plus_; }
  const std::vector<int>& budgets() const { return budgets_; }
  std::size_t arc_position(const std::string& id) const;

  /// Same deviations with new budgets. Budgets equal to T everywhere give a
  /// box set.
  UncertaintySet with_budgets(std::vector<int> budgets) const;
  UncertaintySet with_budget(int budget) const;

 private:
  void check() const;

  SetKind kind_ = SetKind::kBudget;
  std::size_t periods_ = 0;
  std::vector<std::string> arcs_;
  Trajectory nominal_, minus_, plus_;
  std::vector<int> budgets_;
};

/// Binary extreme-point indicators, [arc][t].
struct ScenarioIndicators {
  std::vector<std::vector<std::uint8_t>> plus;
  std::vector<std::vector<std::uint8_t>> minus;

  static ScenarioIndicators zeros(std::size_t arcs, std::size_t periods);
};

/// z = q_0.5, zminus = q_0.5 - q_alpha, zplus = q_(1-alpha) - q_0.5. Crossed
/// quantiles clip the deviation to 0 and append a warning.
UncertaintySet from_forecast(const forecast::ForecastIntervals& intervals,
                             const std::map<std::string, int>& budgets,
                             std::vector<std::string>* warnings = nullptr);

/// Checks the indicator invariants (dimensions, one sign per cell, budget)
/// and returns z = z0 + xi_plus * zplus - xi_minus * zminus.
Trajectory realize(const UncertaintySet& set, const ScenarioIndicators& ind);

/// Continuous indicators in [0,1]; same budget rules on their sums.
Trajectory realize_fractional(const UncertaintySet& set, const Trajectory& xi_plus,
                              const Trajectory& xi_minus);

/// Mix of extreme points and interior points, deterministic in the seed.
std::vector<Trajectory> sample(const UncertaintySet& set, std::uint64_t seed, std::size_t n);

nlohmann::json to_json(const UncertaintySet& set);
UncertaintySet set_from_json(const nlohmann::json& doc);
/// Columns sample,arc,period,value.
std::string trajectories_csv(const UncertaintySet& set, const std::vector<Trajectory>& samples);

/// Arc id -> series, the form the network model takes.
std::map<std::string, std::vector<double>> as_supply_map(const UncertaintySet& set,
                                                         const Trajectory& z);

}  // namespace gasflow::uncertainty
