#include "gasflow/network/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gasflow/errors.hpp"

namespace gasflow::network {

std::string to_string(UnitRole role) {
  switch (role) {
    case UnitRole::kSupply:
      return "supply";
    case UnitRole::kStorage:
      return "storage";
    case UnitRole::kConversion:
      return "conversion";
    case UnitRole::kDemand:
      return "demand";
  }
  return "?";
}

std::string to_string(DemandClass cls) {
  return cls == DemandClass::kEmittedGas ? "emitted_gas" : "produced_energy";
}

std::string to_string(RowFamily family) {
  switch (family) {
    case RowFamily::kMassBalance:
      return "mass_balance";
    case RowFamily::kLevel:
      return "level";
    case RowFamily::kRamp:
      return "ramp";
    case RowFamily::kMidDeviation:
      return "mid_deviation";
    case RowFamily::kConversionBalance:
      return "conversion_balance";
    case RowFamily::kInputCapacity:
      return "input_capacity";
    case RowFamily::kOutputCapacity:
      return "output_capacity";
    case RowFamily::kCalorific:
      return "calorific";
    case RowFamily::kMinOutput:
      return "min_output";
    case RowFamily::kForcedOff:
      return "forced_off";
    case RowFamily::kStartStop:
      return "start_stop";
    case RowFamily::kDemand:
      return "demand";
  }
  return "?";
}

std::string to_string(VarKind kind) {
  switch (kind) {
    case VarKind::kFlow:
      return "f";
    case VarKind::kLevel:
      return "u";
    case VarKind::kDeviation:
      return "v";
    case VarKind::kElastic:
      return "e";
    case VarKind::kDemandSlack:
      return "w";
    case VarKind::kOn:
      return "O";
    case VarKind::kStartStop:
      return "S";
  }
  return "?";
}

std::optional<std::size_t> EnergyNetwork::unit_index(const std::string& id) const {
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> EnergyNetwork::arc_index(const std::string& id) const {
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (arcs[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<ValidationIssue> validate_network(const EnergyNetwork& net) {
  std::vector<ValidationIssue> issues;
  auto add = [&](const std::string& subject, const std::string& rule, const std::string& msg) {
    issues.push_back({subject, rule, msg});
  };

  std::set<std::string> ids;
  for (const auto& u : net.units) {
    if (!ids.insert(u.id).second) add(u.id, "unique-id", "unit id is repeated");
  }
  std::set<std::string> arc_ids;
  for (const auto& a : net.arcs) {
    if (!arc_ids.insert(a.id).second) add(a.id, "unique-id", "arc id is repeated");
  }
  std::set<std::string> energies(net.energies.begin(), net.energies.end());

  std::vector<std::size_t> inbound(net.units.size(), 0);
  std::vector<std::size_t> inbound_supply(net.units.size(), 0);
  std::vector<std::size_t> outbound(net.units.size(), 0);
  for (const auto& a : net.arcs) {
    auto o = net.unit_index(a.origin);
    auto d = net.unit_index(a.destination);
    if (!o) add(a.id, "dangling-arc", "origin unit '" + a.origin + "' does not exist");
    if (!d) add(a.id, "dangling-arc", "destination unit '" + a.destination + "' does not exist");
    if (!(a.omega > 0.0)) add(a.id, "calorific", "calorific value must be positive");
    if (!energies.empty() && energies.count(a.energy) == 0) {
      add(a.id, "energy-kind", "energy '" + a.energy + "' is not declared");
    }
    if (!o || !d) continue;
    UnitRole ro = net.units[*o].role;
    UnitRole rd = net.units[*d].role;
    bool ok = (ro == UnitRole::kSupply && rd != UnitRole::kSupply) ||
              (ro == UnitRole::kStorage && (rd == UnitRole::kConversion || rd == UnitRole::kDemand)) ||
              (ro == UnitRole::kConversion && rd == UnitRole::kDemand);
    if (!ok) {
      add(a.id, "layering", to_string(ro) + " -> " + to_string(rd) + " is not an allowed arc");
    }
    ++outbound[*o];
    ++inbound[*d];
    if (ro == UnitRole::kSupply) ++inbound_supply[*d];
    if (ro == UnitRole::kConversion || rd == UnitRole::kConversion) {
      if (!std::isfinite(a.flow_max)) {
        add(a.id, "flow-bounds", "arcs at a conversion unit need a finite flow_max");
      }
      if (a.flow_min < 0.0 || a.flow_min > a.flow_max) {
        add(a.id, "flow-bounds", "need 0 <= flow_min <= flow_max");
      }
    }
  }

  for (std::size_t i = 0; i < net.units.size(); ++i) {
    const auto& u = net.units[i];
    switch (u.role) {
      case UnitRole::kSupply:
        break;
      case UnitRole::kStorage: {
        const auto& s = u.storage;
        if (!(s.u_min <= s.u_mid && s.u_mid <= s.u_max)) {
          add(u.id, "bound-order", "need u_min <= u_mid <= u_max");
        }
        if (!(s.delta > 0.0)) add(u.id, "ramp", "delta must be positive");
        if (inbound_supply[i] != 1 || inbound[i] != 1) {
          add(u.id, "storage-supply", "storage needs exactly one inbound arc, from a supply unit");
        }
        break;
      }
      case UnitRole::kConversion: {
        const auto& c = u.conversion;
        if (!(c.rho > 0.0 && c.rho <= 1.0)) add(u.id, "efficiency", "rho must lie in (0, 1]");
        if (!(c.eta_out >= 0.0 && c.eta_out < 1.0)) {
          add(u.id, "output-ratio", "eta_out must lie in [0, 1)");
        }
        if (c.eta_in < 0.0) add(u.id, "calorific", "eta_in must be nonnegative");
        if (inbound[i] == 0 || outbound[i] == 0) {
          add(u.id, "conversion-arcs", "conversion needs inbound and outbound arcs");
        }
        break;
      }
      case UnitRole::kDemand:
        if (!(u.demand.penalty >= 0.0)) add(u.id, "penalty", "gamma3 must be nonnegative");
        break;
    }
  }
  return issues;
}

std::vector<ValidationIssue> validate_model(const EnergyNetwork& net, const HorizonData& horizon) {
  auto issues = validate_network(net);
  const std::size_t T = horizon.periods;
  if (T < 1) issues.push_back({"horizon", "periods", "need at least one period"});
  if (horizon.gamma1 < 0.0 || horizon.gamma2 < 0.0) {
    issues.push_back({"horizon", "weights", "gamma1 and gamma2 must be nonnegative"});
  }
  if (horizon.big_m && !(*horizon.big_m > 0.0)) {
    issues.push_back({"horizon", "big_m", "big_m must be positive"});
  }
  for (const auto& u : net.units) {
    if (u.role != UnitRole::kDemand) continue;
    auto it = horizon.demands.find(u.id);
    if (it == horizon.demands.end()) {
      issues.push_back({u.id, "demand-data", "no demand series"});
    } else if (it->second.size() != T) {
      issues.push_back({u.id, "demand-data", "demand series has " + std::to_string(it->second.size()) +
                                                 " periods, expected " + std::to_string(T)});
    } else if (std::any_of(it->second.begin(), it->second.end(), [](double d) { return !(d >= 0.0); })) {
      issues.push_back({u.id, "demand-data", "demands must be nonnegative"});
    }
  }
  for (const auto& a : net.arcs) {
    auto o = net.unit_index(a.origin);
    if (!o || net.units[*o].role != UnitRole::kSupply) continue;
    auto it = horizon.nominal_supply.find(a.id);
    if (it == horizon.nominal_supply.end()) {
      issues.push_back({a.id, "supply-data", "no nominal supply series"});
    } else if (it->second.size() != T) {
      issues.push_back({a.id, "supply-data", "supply series has " + std::to_string(it->second.size()) +
                                                 " periods, expected " + std::to_string(T)});
    }
  }
  return issues;
}

VariableMap::VariableMap(const EnergyNetwork& net, std::size_t periods)
    : periods_(periods), n_arcs_(net.arcs.size()), ordinal_(net.units.size(), 0) {
  for (const auto& u : net.units) unit_ids_.push_back(u.id);
  for (const auto& a : net.arcs) arc_ids_.push_back(a.id);
  for (std::size_t i = 0; i < net.units.size(); ++i) {
    switch (net.units[i].role) {
      case UnitRole::kStorage:
        ordinal_[i] = storage_.size();
        storage_.push_back(i);
        break;
      case UnitRole::kConversion:
        ordinal_[i] = conversion_.size();
        conversion_.push_back(i);
        break;
      case UnitRole::kDemand:
        ordinal_[i] = demand_.size();
        demand_.push_back(i);
        break;
      case UnitRole::kSupply:
        break;
    }
  }
  auto append = [&](VarKind kind, const std::vector<std::size_t>& entities) {
    offset_[kind] = entries_.size();
    for (std::size_t e : entities) {
      for (std::size_t t = 0; t < periods; ++t) entries_.push_back({kind, e, t});
    }
  };
  std::vector<std::size_t> arcs(n_arcs_);
  for (std::size_t a = 0; a < n_arcs_; ++a) arcs[a] = a;
  append(VarKind::kFlow, arcs);
  append(VarKind::kLevel, storage_);
  append(VarKind::kDeviation, storage_);
  append(VarKind::kElastic, storage_);
  append(VarKind::kDemandSlack, demand_);
  append(VarKind::kOn, conversion_);
  append(VarKind::kStartStop, conversion_);
  for (std::size_t j = 0; j < entries_.size(); ++j) by_name_[name(j)] = j;
}

std::size_t VariableMap::block(VarKind kind, const std::vector<std::size_t>& members,
                               std::size_t entity, std::size_t t) const {
  if (t >= periods_) throw ValidationError("period index out of range");
  if (entity >= ordinal_.size() || ordinal_[entity] >= members.size() ||
      members[ordinal_[entity]] != entity) {
    throw ValidationError("unit " + std::to_string(entity) + " has no " + to_string(kind) + " variable");
  }
  return offset_.at(kind) + ordinal_[entity] * periods_ + t;
}

std::size_t VariableMap::flow(std::size_t arc, std::size_t t) const {
  if (arc >= n_arcs_ || t >= periods_) throw ValidationError("flow index out of range");
  return offset_.at(VarKind::kFlow) + arc * periods_ + t;
}
std::size_t VariableMap::level(std::size_t unit, std::size_t t) const {
  return block(VarKind::kLevel, storage_, unit, t);
}
std::size_t VariableMap::deviation(std::size_t unit, std::size_t t) const {
  return block(VarKind::kDeviation, storage_, unit, t);
}
std::size_t VariableMap::elastic(std::size_t unit, std::size_t t) const {
  return block(VarKind::kElastic, storage_, unit, t);
}
std::size_t VariableMap::demand_slack(std::size_t unit, std::size_t t) const {
  return block(VarKind::kDemandSlack, demand_, unit, t);
}
std::size_t VariableMap::on(std::size_t unit, std::size_t t) const {
  return block(VarKind::kOn, conversion_, unit, t);
}
std::size_t VariableMap::start_stop(std::size_t unit, std::size_t t) const {
  return block(VarKind::kStartStop, conversion_, unit, t);
}

std::string VariableMap::name(std::size_t column) const {
  const Entry& e = entries_.at(column);
  const std::string& who = e.kind == VarKind::kFlow ? arc_ids_[e.entity] : unit_ids_[e.entity];
  return to_string(e.kind) + "[" + who + "," + std::to_string(e.period + 1) + "]";
}

std::optional<std::size_t> VariableMap::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

bool VariableMap::is_first_stage(std::size_t column) const {
  VarKind k = entries_.at(column).kind;
  return k == VarKind::kOn || k == VarKind::kStartStop;
}

double resolved_elastic_penalty(const EnergyNetwork& net, const HorizonData& horizon) {
  if (horizon.elastic_penalty > 0.0) return horizon.elastic_penalty;
  double m = std::max(horizon.gamma1, horizon.gamma2);
  for (const auto& u : net.units) {
    if (u.role == UnitRole::kDemand) m = std::max(m, u.demand.penalty);
  }
  return 1000.0 * std::max(m, 1.0);
}

namespace {

struct Builder {
  const EnergyNetwork& net;
  const HorizonData& horizon;
  DeterministicModel model;
  std::vector<std::vector<std::size_t>> in_arcs, out_arcs;

  lp::Constraint& row(RowFamily family, std::size_t unit, std::size_t t, lp::Relation rel,
                      double rhs, std::optional<std::size_t> supply = std::nullopt,
                      double supply_value = 0.0) {
    model.rows.push_back({family, unit, t});
    model.supply_arc.push_back(supply);
    model.supply_value.push_back(supply_value);
    return model.problem.base.add_constraint(rel, rhs);
  }

  bool from_supply(std::size_t arc) const {
    return net.units[*net.unit_index(net.arcs[arc].origin)].role == UnitRole::kSupply;
  }
};

}  // namespace

DeterministicModel build_deterministic(const EnergyNetwork& net, const HorizonData& horizon) {
  auto issues = validate_model(net, horizon);
  if (!issues.empty()) {
    std::string msg = "network model is invalid:";
    for (const auto& i : issues) msg += "\n  " + i.subject + " [" + i.rule + "] " + i.message;
    throw ValidationError(msg);
  }
  const std::size_t T = horizon.periods;
  Builder b{net, horizon, {}, {}, {}};
  b.model.map = VariableMap(net, T);
  const VariableMap& map = b.model.map;
  b.model.elastic_penalty = resolved_elastic_penalty(net, horizon);
  auto& lp = b.model.problem.base;
  lp = lp::LpProblem(map.size());

  b.in_arcs.assign(net.units.size(), {});
  b.out_arcs.assign(net.units.size(), {});
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    b.out_arcs[*net.unit_index(net.arcs[a].origin)].push_back(a);
    b.in_arcs[*net.unit_index(net.arcs[a].destination)].push_back(a);
  }

  // Bounds and costs.
  for (std::size_t j = 0; j < map.size(); ++j) {
    const auto& e = map.entry(j);
    switch (e.kind) {
      case VarKind::kFlow: {
        lp.var_bounds[j] = {0.0, lp::kInfinity};
        if (b.from_supply(e.entity)) {
          auto dest = *net.unit_index(net.arcs[e.entity].destination);
          // Supply into storage enters through the balance rhs; other supply
          // arcs deliver their nominal trajectory.
          double z = net.units[dest].role == UnitRole::kStorage
                         ? 0.0
                         : horizon.nominal_supply.at(net.arcs[e.entity].id)[e.period];
          lp.var_bounds[j] = {z, z};
        }
        break;
      }
      case VarKind::kLevel:
        lp.var_bounds[j] = {-lp::kInfinity, lp::kInfinity};
        break;
      case VarKind::kDeviation:
        lp.objective[j] = horizon.gamma2;
        break;
      case VarKind::kElastic:
        lp.objective[j] = b.model.elastic_penalty;
        break;
      case VarKind::kDemandSlack:
        lp.objective[j] = net.units[e.entity].demand.penalty;
        break;
      case VarKind::kOn:
        lp.var_bounds[j] = {0.0, 1.0};
        b.model.problem.binary_vars.push_back(j);
        break;
      case VarKind::kStartStop:
        lp.var_bounds[j] = {0.0, 1.0};
        lp.objective[j] = horizon.gamma1;
        b.model.problem.binary_vars.push_back(j);
        break;
    }
  }

  using lp::Relation;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k : map.storage_units()) {
      const auto& s = net.units[k].storage;
      const std::size_t u = map.level(k, t);
      const std::size_t el = map.elastic(k, t);
      const std::size_t supply_arc = b.in_arcs[k].front();
      const double z = horizon.nominal_supply.at(net.arcs[supply_arc].id)[t];

      // Mass balance: u_t - u_{t-1} + sum_out f = z (+ u0 at the first period).
      auto& bal = b.row(RowFamily::kMassBalance, k, t, Relation::kEqual, z + (t == 0 ? s.u0 : 0.0),
                        supply_arc, z);
      bal.coefficients[u] = 1.0;
      if (t > 0) bal.coefficients[map.level(k, t - 1)] = -1.0;
      for (std::size_t a : b.out_arcs[k]) bal.coefficients[map.flow(a, t)] = 1.0;

      // Level bounds, elastic.
      auto& lo = b.row(RowFamily::kLevel, k, t, Relation::kGreaterEqual, s.u_min);
      lo.coefficients[u] = 1.0;
      lo.coefficients[el] = 1.0;
      auto& hi = b.row(RowFamily::kLevel, k, t, Relation::kGreaterEqual, -s.u_max);
      hi.coefficients[u] = -1.0;
      hi.coefficients[el] = 1.0;

      // Ramp limits, elastic.
      const double prev = t == 0 ? s.u0 : 0.0;
      auto& down = b.row(RowFamily::kRamp, k, t, Relation::kGreaterEqual, -s.delta + prev);
      down.coefficients[u] = 1.0;
      down.coefficients[el] = 1.0;
      if (t > 0) down.coefficients[map.level(k, t - 1)] = -1.0;
      auto& up = b.row(RowFamily::kRamp, k, t, Relation::kGreaterEqual, -s.delta - prev);
      up.coefficients[u] = -1.0;
      up.coefficients[el] = 1.0;
      if (t > 0) up.coefficients[map.level(k, t - 1)] = 1.0;

      // Deviation from the middle level.
      const std::size_t v = map.deviation(k, t);
      auto& d1 = b.row(RowFamily::kMidDeviation, k, t, Relation::kGreaterEqual, -s.u_mid);
      d1.coefficients[v] = 1.0;
      d1.coefficients[u] = -1.0;
      auto& d2 = b.row(RowFamily::kMidDeviation, k, t, Relation::kGreaterEqual, s.u_mid);
      d2.coefficients[v] = 1.0;
      d2.coefficients[u] = 1.0;
    }

    for (std::size_t k : map.conversion_units()) {
      const auto& c = net.units[k].conversion;
      const std::size_t on = map.on(k, t);

      auto& bal = b.row(RowFamily::kConversionBalance, k, t, Relation::kEqual, 0.0);
      for (std::size_t a : b.in_arcs[k]) bal.coefficients[map.flow(a, t)] = c.rho * net.arcs[a].omega;
      for (std::size_t a : b.out_arcs[k]) bal.coefficients[map.flow(a, t)] = -net.arcs[a].omega;

      auto capacity = [&](std::size_t a, RowFamily family) {
        const auto& arc = net.arcs[a];
        auto& ub = b.row(family, a, t, Relation::kGreaterEqual, 0.0);
        ub.coefficients[map.flow(a, t)] = -1.0;
        ub.coefficients[on] = arc.flow_max;
        if (arc.flow_min > 0.0) {
          auto& lb = b.row(family, a, t, Relation::kGreaterEqual, 0.0);
          lb.coefficients[map.flow(a, t)] = 1.0;
          lb.coefficients[on] = -arc.flow_min;
        }
      };
      for (std::size_t a : b.in_arcs[k]) capacity(a, RowFamily::kInputCapacity);
      for (std::size_t a : b.out_arcs[k]) capacity(a, RowFamily::kOutputCapacity);

      // Mixed calorific value of inputs >= eta_in while on.
      double m8 = 0.0;
      for (std::size_t a : b.in_arcs[k]) {
        m8 += net.arcs[a].flow_max * std::max(0.0, c.eta_in - net.arcs[a].omega);
      }
      if (horizon.big_m) m8 = *horizon.big_m;
      auto& cal = b.row(RowFamily::kCalorific, k, t, Relation::kGreaterEqual, -m8);
      for (std::size_t a : b.in_arcs[k]) {
        cal.coefficients[map.flow(a, t)] = net.arcs[a].omega - c.eta_in;
      }
      cal.coefficients[on] = -m8;

      double cap_out = 0.0;
      for (std::size_t a : b.out_arcs[k]) cap_out += net.arcs[a].flow_max;
      const double floor = c.eta_out * cap_out;

      // Minimum output while on.
      const double m9 = horizon.big_m ? *horizon.big_m : floor;
      auto& mo = b.row(RowFamily::kMinOutput, k, t, Relation::kGreaterEqual, floor - m9);
      for (std::size_t a : b.out_arcs[k]) mo.coefficients[map.flow(a, t)] = 1.0;
      mo.coefficients[on] = -m9;

      // No output while off.
      const double m10 = horizon.big_m ? *horizon.big_m : cap_out;
      auto& off = b.row(RowFamily::kForcedOff, k, t, Relation::kGreaterEqual, 0.0);
      for (std::size_t a : b.out_arcs[k]) off.coefficients[map.flow(a, t)] = -1.0;
      off.coefficients[on] = m10;

      // Start-stop linking; the pre-horizon state is a constant.
      const std::size_t ss = map.start_stop(k, t);
      const double o0 = c.initially_on ? 1.0 : 0.0;
      auto& s1 = b.row(RowFamily::kStartStop, k, t, Relation::kGreaterEqual, t == 0 ? -o0 : 0.0);
      s1.coefficients[ss] = 1.0;
      s1.coefficients[on] = -1.0;
      if (t > 0) s1.coefficients[map.on(k, t - 1)] = 1.0;
      auto& s2 = b.row(RowFamily::kStartStop, k, t, Relation::kGreaterEqual, t == 0 ? o0 : 0.0);
      s2.coefficients[ss] = 1.0;
      s2.coefficients[on] = 1.0;
      if (t > 0) s2.coefficients[map.on(k, t - 1)] = -1.0;
    }

    for (std::size_t k : map.demand_units()) {
      const auto& dp = net.units[k].demand;
      const double d = horizon.demands.at(net.units[k].id)[t];
      const std::size_t w = map.demand_slack(k, t);
      if (dp.cls == DemandClass::kProducedEnergy) {
        // Shortage: sum f + w >= d.
        auto& r = b.row(RowFamily::kDemand, k, t, Relation::kGreaterEqual, d);
        for (std::size_t a : b.in_arcs[k]) r.coefficients[map.flow(a, t)] = 1.0;
        r.coefficients[w] = 1.0;
      } else {
        // Emission: w >= sum f - d.
        auto& r = b.row(RowFamily::kDemand, k, t, Relation::kGreaterEqual, -d);
        for (std::size_t a : b.in_arcs[k]) r.coefficients[map.flow(a, t)] = -1.0;
        r.coefficients[w] = 1.0;
      }
    }
  }
  return std::move(b.model);
}

ObjectiveBreakdown objective_breakdown(const std::vector<double>& values, const VariableMap& map,
                                       const EnergyNetwork& net, const HorizonData& horizon,
                                       double elastic_penalty) {
  if (values.size() != map.size()) {
    throw ValidationError("assignment has " + std::to_string(values.size()) +
                          " entries but the variable map has " + std::to_string(map.size()));
  }
  ObjectiveBreakdown br;
  for (std::size_t j = 0; j < map.size(); ++j) {
    const auto& e = map.entry(j);
    switch (e.kind) {
      case VarKind::kStartStop:
        br.start_stop += horizon.gamma1 * values[j];
        break;
      case VarKind::kDeviation:
        br.deviation += horizon.gamma2 * values[j];
        break;
      case VarKind::kDemandSlack:
        br.demand += net.units[e.entity].demand.penalty * values[j];
        break;
      case VarKind::kElastic:
        br.elastic += elastic_penalty * values[j];
        break;
      default:
        break;
    }
  }
  return br;
}

Schedule extract_schedule(const milp::MilpOutcome& outcome, const VariableMap& map,
                          const EnergyNetwork& net, const HorizonData& horizon,
                          const std::map<std::string, std::vector<double>>* supply) {
  if (outcome.status != milp::MilpStatus::kOptimal) {
    throw ValidationError("cannot extract a schedule from a non-optimal outcome");
  }
  const std::size_t T = horizon.periods;
  if (map.periods() != T || outcome.assignment.size() != map.size()) {
    throw ValidationError("outcome, variable map and horizon dimensions disagree");
  }
  const auto& x = outcome.assignment;
  const auto& z_source = supply != nullptr ? *supply : horizon.nominal_supply;

  Schedule s;
  s.periods = T;
  for (std::size_t k : map.storage_units()) {
    s.storage_ids.push_back(net.units[k].id);
    std::vector<double> lv(T), dv(T), ev(T);
    for (std::size_t t = 0; t < T; ++t) {
      lv[t] = x[map.level(k, t)];
      dv[t] = x[map.deviation(k, t)];
      ev[t] = x[map.elastic(k, t)];
    }
    s.levels.push_back(lv);
    s.deviations.push_back(dv);
    s.elastic.push_back(ev);
  }
  for (std::size_t k : map.conversion_units()) {
    s.conversion_ids.push_back(net.units[k].id);
    std::vector<int> on(T), ss(T);
    for (std::size_t t = 0; t < T; ++t) {
      on[t] = static_cast<int>(std::lround(x[map.on(k, t)]));
      ss[t] = static_cast<int>(std::lround(x[map.start_stop(k, t)]));
    }
    s.on.push_back(on);
    s.start_stop.push_back(ss);
  }
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    s.arc_ids.push_back(net.arcs[a].id);
    std::vector<double> fv(T);
    auto zit = z_source.find(net.arcs[a].id);
    for (std::size_t t = 0; t < T; ++t) fv[t] = x[map.flow(a, t)];
    auto origin = *net.unit_index(net.arcs[a].origin);
    auto dest = *net.unit_index(net.arcs[a].destination);
    if (net.units[origin].role == UnitRole::kSupply && net.units[dest].role == UnitRole::kStorage &&
        zit != z_source.end()) {
      fv = zit->second;
    }
    s.flows.push_back(fv);
  }
  for (std::size_t k : map.demand_units()) {
    s.demand_ids.push_back(net.units[k].id);
    std::vector<double> wv(T);
    for (std::size_t t = 0; t < T; ++t) wv[t] = x[map.demand_slack(k, t)];
    s.demand_slack.push_back(wv);
  }

  // Mass-balance residual against the supply the schedule was computed for.
  for (std::size_t i = 0; i < map.storage_units().size(); ++i) {
    std::size_t k = map.storage_units()[i];
    double prev = net.units[k].storage.u0;
    for (std::size_t t = 0; t < T; ++t) {
      double in = 0.0;
      double out = 0.0;
      for (std::size_t a = 0; a < net.arcs.size(); ++a) {
        if (net.arcs[a].destination == net.units[k].id) in += s.flows[a][t];
        if (net.arcs[a].origin == net.units[k].id) out += s.flows[a][t];
      }
      double r = std::abs(s.levels[i][t] - prev - in + out);
      s.max_balance_residual = std::max(s.max_balance_residual, r);
      prev = s.levels[i][t];
    }
  }

  std::vector<double> rounded = x;
  for (std::size_t j = 0; j < map.size(); ++j) {
    if (map.is_first_stage(j)) rounded[j] = std::round(x[j]);
  }
  s.breakdown = objective_breakdown(rounded, map, net, horizon, resolved_elastic_penalty(net, horizon));
  s.objective = s.breakdown.total();
  return s;
}

}  // namespace gasflow::network
