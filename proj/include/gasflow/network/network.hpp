#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasflow/lp/lp_problem.hpp"
#include "gasflow/milp/milp.hpp"

namespace gasflow::network {

enum class UnitRole { kSupply, kStorage, kConversion, kDemand };
enum class DemandClass { kEmittedGas, kProducedEnergy };

std::string to_string(UnitRole role);
std::string to_string(DemandClass cls);

struct StorageParams {
  double u_min = 0.0;
  double u_max = 0.0;
  double delta = 0.0;  // max level change per period
  double u_mid = 0.0;
  double u0 = 0.0;     // level before the first period
};

struct ConversionParams {
  double rho = 1.0;       // efficiency
  double eta_in = 0.0;    // min mixed calorific value of the inputs
  double eta_out = 0.0;   // min output-to-capacity ratio while on
  bool initially_on = true;
};

struct DemandParams {
  DemandClass cls = DemandClass::kProducedEnergy;
  double penalty = 0.0;  // gamma3 for this unit
};

struct Unit {
  std::string id;
  UnitRole role = UnitRole::kSupply;
  StorageParams storage;
  ConversionParams conversion;
  DemandParams demand;
};

struct Arc {
  std::string id;
  std::string origin;
  std::string destination;
  std::string energy;
  double omega = 1.0;  // calorific value per unit flow
  /// Flow limits applied while the adjacent conversion unit is on.
  double flow_min = 0.0;
  double flow_max = lp::kInfinity;
};

struct EnergyNetwork {
  std::vector<Unit> units;
  std::vector<Arc> arcs;
  std::vector<std::string> energies;

  std::optional<std::size_t> unit_index(const std::string& id) const;
  std::optional<std::size_t> arc_index(const std::string& id) const;
};

struct HorizonData {
  std::size_t periods = 1;
  std::map<std::string, std::vector<double>> demands;         // demand unit id -> d[t]
  std::map<std::string, std::vector<double>> nominal_supply;  // supply arc id -> z[t]
  double gamma1 = 100.0;
  double gamma2 = 1.0;
  /// When set, one constant for the calorific and output rows. Otherwise each
  /// row gets its tightest valid constant.
  std::optional<double> big_m;
  /// Weight on the elastic level and ramp slack. Zero selects
  /// 1000 * max(gamma1, gamma2, max gamma3).
  double elastic_penalty = 0.0;
};

struct ValidationIssue {
  std::string subject;  // unit or arc id
  std::string rule;
  std::string message;
};

std::vector<ValidationIssue> validate_network(const EnergyNetwork& net);
/// Network issues plus horizon shape checks.
std::vector<ValidationIssue> validate_model(const EnergyNetwork& net, const HorizonData& horizon);

enum class RowFamily {
  kMassBalance,
  kLevel,
  kRamp,
  kMidDeviation,
  kConversionBalance,
  kInputCapacity,
  kOutputCapacity,
  kCalorific,
  kMinOutput,
  kForcedOff,
  kStartStop,
  kDemand,
};

std::string to_string(RowFamily family);

struct RowTag {
  RowFamily family;
  std::size_t unit;    // unit index; arc index for the capacity rows
  std::size_t period;  // 0-based
};

enum class VarKind { kFlow, kLevel, kDeviation, kElastic, kDemandSlack, kOn, kStartStop };

std::string to_string(VarKind kind);

/// Index between compiled columns and (kind, entity, period). Entities are
/// arcs for flows, storage units for levels, deviations and elastic slack,
/// demand units for demand slack, and conversion units for on and start-stop.
class VariableMap {
 public:
  struct Entry {
    VarKind kind;
    std::size_t entity;  // index into arcs or units
    std::size_t period;
  };

  VariableMap() = default;
  VariableMap(const EnergyNetwork& net, std::size_t periods);

  std::size_t periods() const { return periods_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t flow(std::size_t arc, std::size_t t) const;
  std::size_t level(std::size_t unit, std::size_t t) const;
  std::size_t deviation(std::size_t unit, std::size_t t) const;
  std::size_t elastic(std::size_t unit, std::size_t t) const;
  std::size_t demand_slack(std::size_t unit, std::size_t t) const;
  std::size_t on(std::size_t unit, std::size_t t) const;
  std::size_t start_stop(std::size_t unit, std::size_t t) const;

  const Entry& entry(std::size_t column) const { return entries_.at(column); }
  /// Names like "f[arc,t]" and "u[unit,t]" with 1-based periods.
  std::string name(std::size_t column) const;
  std::optional<std::size_t> find(const std::string& name) const;

  const std::vector<std::string>& arc_ids() const { return arc_ids_; }
  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<std::size_t>& storage_units() const { return storage_; }
  const std::vector<std::size_t>& conversion_units() const { return conversion_; }
  const std::vector<std::size_t>& demand_units() const { return demand_; }
  bool is_first_stage(std::size_t column) const;

 private:
  std::size_t block(VarKind kind, const std::vector<std::size_t>& ordinal, std::size_t entity,
                    std::size_t t) const;

  std::size_t periods_ = 0;
  std::size_t n_arcs_ = 0;
  std::vector<std::string> unit_ids_;
  std::vector<std::string> arc_ids_;
  std::vector<std::size_t> storage_, conversion_, demand_;
  std::vector<std::size_t> ordinal_;  // unit index -> position within its role list
  std::map<VarKind, std::size_t> offset_;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> by_name_;
};

struct DeterministicModel {
  milp::MilpProblem problem;
  VariableMap map;
  std::vector<RowTag> rows;  // parallel to problem.base.constraints
  /// For mass-balance rows: the supply arc whose z enters the rhs.
  std::vector<std::optional<std::size_t>> supply_arc;
  /// For mass-balance rows: the supply value folded into the rhs.
  std::vector<double> supply_value;
  double elastic_penalty = 0.0;
};

/// Compiles the deterministic scheduling MILP with supplies at nominal.
DeterministicModel build_deterministic(const EnergyNetwork& net, const HorizonData& horizon);

struct ObjectiveBreakdown {
  double start_stop = 0.0;
  double deviation = 0.0;
  double demand = 0.0;
  double elastic = 0.0;
  double total() const { return start_stop + deviation + demand + elastic; }
};

struct Schedule {
  std::size_t periods = 0;
  std::vector<std::string> storage_ids;
  std::vector<std::vector<double>> levels;      // [storage][t]
  std::vector<std::vector<double>> deviations;  // [storage][t]
  std::vector<std::vector<double>> elastic;     // [storage][t]
  std::vector<std::string> conversion_ids;
  std::vector<std::vector<int>> on;             // [conversion][t]
  std::vector<std::vector<int>> start_stop;     // [conversion][t]
  std::vector<std::string> arc_ids;
  std::vector<std::vector<double>> flows;       // [arc][t]; supply arcs carry z
  std::vector<std::string> demand_ids;
  std::vector<std::vector<double>> demand_slack;  // [demand][t]
  ObjectiveBreakdown breakdown;
  double objective = 0.0;
  double max_balance_residual = 0.0;
};

/// `supply` overrides the nominal trajectory for supply arcs when given
/// (supply arc id -> z[t]).
Schedule extract_schedule(const milp::MilpOutcome& outcome, const VariableMap& map,
                          const EnergyNetwork& net, const HorizonData& horizon,
                          const std::map<std::string, std::vector<double>>* supply = nullptr);

/// Breakdown recomputed from a full column assignment.
ObjectiveBreakdown objective_breakdown(const std::vector<double>& values, const VariableMap& map,
                                       const EnergyNetwork& net, const HorizonData& horizon,
                                       double elastic_penalty);

double resolved_elastic_penalty(const EnergyNetwork& net, const HorizonData& horizon);

}  // namespace gasflow::network
