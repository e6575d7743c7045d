#include "gasflow/network/network_io.hpp"

#include <cmath>
#include <optional>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"

namespace gasflow::network {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
  throw ValidationError(pointer + ": " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.is_object()) fail(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(ptr + "/" + key, "missing required field");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& ptr,
              std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    fail(ptr + "/" + key, "missing required field");
  }
  if (!it->is_number()) fail(ptr + "/" + key, "expected a number");
  return it->get<double>();
}

std::string text(const json& obj, const std::string& key, const std::string& ptr) {
  const json& v = require(obj, key, ptr);
  if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> series(const json& v, const std::string& ptr) {
  if (!v.is_array()) fail(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(ptr + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::map<std::string, std::vector<double>> series_map(const json& v, const std::string& ptr) {
  if (!v.is_object()) fail(ptr, "expected an object of id -> series");
  std::map<std::string, std::vector<double>> out;
  for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = series(it.value(), ptr + "/" + it.key());
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ModelDocument parse_model(const json& doc) {
  if (!doc.is_object()) fail("", "expected a JSON object at the document root");
  ModelDocument out;
  EnergyNetwork& net = out.network;

  if (auto it = doc.find("energies"); it != doc.end()) {
    if (!it->is_array()) fail("/energies", "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) fail("/energies/" + std::to_string(i), "expected a string");
      net.energies.push_back((*it)[i].get<std::string>());
    }
  }

  const json& units = require(doc, "units", "");
  if (!units.is_array()) fail("/units", "expected an array");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string ptr = "/units/" + std::to_string(i);
    const json& u = units[i];
    if (!u.is_object()) fail(ptr, "expected an object");
    Unit unit;
    unit.id = text(u, "id", ptr);
    std::string role = text(u, "role", ptr);
    if (role == "supply") {
      unit.role = UnitRole::kSupply;
    } else if (role == "storage") {
      unit.role = UnitRole::kStorage;
      unit.storage.u_min = number(u, "u_min", ptr);
      unit.storage.u_max = number(u, "u_max", ptr);
      unit.storage.delta = number(u, "delta", ptr);
      unit.storage.u_mid = number(u, "u_mid", ptr);
      unit.storage.u0 = number(u, "u0", ptr);
    } else if (role == "conversion") {
      unit.role = UnitRole::kConversion;
      unit.conversion.rho = number(u, "rho", ptr);
      unit.conversion.eta_in = number(u, "eta_in", ptr, 0.0);
      unit.conversion.eta_out = number(u, "eta_out", ptr, 0.0);
      if (auto on = u.find("initially_on"); on != u.end()) {
        if (!on->is_boolean()) fail(ptr + "/initially_on", "expected a boolean");
        unit.conversion.initially_on = on->get<bool>();
      }
    } else if (role == "demand") {
      unit.role = UnitRole::kDemand;
      std::string cls = text(u, "class", ptr);
      if (cls == "emitted_gas") {
        unit.demand.cls = DemandClass::kEmittedGas;
      } else if (cls == "produced_energy") {
        unit.demand.cls = DemandClass::kProducedEnergy;
      } else {
        fail(ptr + "/class", "unknown demand class '" + cls + "'");
      }
      double fallback = unit.demand.cls == DemandClass::kEmittedGas ? 500.0 : 50.0;
      unit.demand.penalty = number(u, "penalty", ptr, fallback);
    } else {
      fail(ptr + "/role", "unknown role '" + role + "'");
    }
    net.units.push_back(unit);
  }

  const json& arcs = require(doc, "arcs", "");
  if (!arcs.is_array()) fail("/arcs", "expected an array");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const std::string ptr = "/arcs/" + std::to_string(i);
    const json& a = arcs[i];
    if (!a.is_object()) fail(ptr, "expected an object");
    Arc arc;
    arc.id = text(a, "id", ptr);
    arc.origin = text(a, "from", ptr);
    arc.destination = text(a, "to", ptr);
    arc.energy = text(a, "energy", ptr);
    arc.omega = number(a, "omega", ptr);
    arc.flow_min = number(a, "flow_min", ptr, 0.0);
    arc.flow_max = number(a, "flow_max", ptr, lp::kInfinity);
    net.arcs.push_back(arc);
  }

  const json& h = require(doc, "horizon", "");
  if (!h.is_object()) fail("/horizon", "expected an object");
  HorizonData& hz = out.horizon;
  double periods = number(h, "periods", "/horizon");
  if (periods < 1 || periods != std::floor(periods)) fail("/horizon/periods", "expected a positive integer");
  hz.periods = static_cast<std::size_t>(periods);
  hz.gamma1 = number(h, "gamma1", "/horizon", 100.0);
  hz.gamma2 = number(h, "gamma2", "/horizon", 1.0);
  if (auto it = h.find("big_m"); it != h.end() && !it->is_null()) hz.big_m = number(h, "big_m", "/horizon");
  hz.elastic_penalty = number(h, "elastic_penalty", "/horizon", 0.0);
  hz.demands = series_map(require(h, "demands", "/horizon"), "/horizon/demands");
  hz.nominal_supply = series_map(require(h, "nominal_supply", "/horizon"), "/horizon/nominal_supply");
  return out;
}

ModelDocument load_model(const std::filesystem::path& path) {
  std::string text = io::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": JSON syntax error: " + e.what());
  }
  try {
    return parse_model(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json to_json(const EnergyNetwork& net, const HorizonData& horizon) {
  json doc;
  doc["energies"] = net.energies;
  json units = json::array();
  for (const auto& u : net.units) {
    json j;
    j["id"] = u.id;
    j["role"] = to_string(u.role);
    switch (u.role) {
      case UnitRole::kStorage:
        j["u_min"] = u.storage.u_min;
        j["u_max"] = u.storage.u_max;
        j["delta"] = u.storage.delta;
        j["u_mid"] = u.storage.u_mid;
        j["u0"] = u.storage.u0;
        break;
      case UnitRole::kConversion:
        j["rho"] = u.conversion.rho;
        j["eta_in"] = u.conversion.eta_in;
        j["eta_out"] = u.conversion.eta_out;
        j["initially_on"] = u.conversion.initially_on;
        break;
      case UnitRole::kDemand:
        j["class"] = to_string(u.demand.cls);
        j["penalty"] = u.demand.penalty;
        break;
      case UnitRole::kSupply:
        break;
    }
    units.push_back(j);
  }
  doc["units"] = units;
  json arcs = json::array();
  for (const auto& a : net.arcs) {
    arcs.push_back({{"id", a.id},
                    {"from", a.origin},
                    {"to", a.destination},
                    {"energy", a.energy},
                    {"omega", a.omega},
                    {"flow_min", a.flow_min},
                    {"flow_max", finite_or_null(a.flow_max)}});
  }
  doc["arcs"] = arcs;
  json h;
  h["periods"] = horizon.periods;
  h["gamma1"] = horizon.gamma1;
  h["gamma2"] = horizon.gamma2;
  h["big_m"] = horizon.big_m ? json(*horizon.big_m) : json(nullptr);
  h["elastic_penalty"] = horizon.elastic_penalty;
  h["demands"] = horizon.demands;
  h["nominal_supply"] = horizon.nominal_supply;
  doc["horizon"] = h;
  return doc;
}

std::string schedule_csv(const Schedule& s) {
  std::string out = "entity,quantity,period,value\n";
  auto rows = [&](const std::vector<std::string>& ids, const std::string& q, const auto& values) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t t = 0; t < s.periods; ++t) {
        out += ids[i] + "," + q + "," + std::to_string(t + 1) + "," +
               io::format_double(static_cast<double>(values[i][t])) + "\n";
      }
    }
  };
  rows(s.storage_ids, "level", s.levels);
  rows(s.storage_ids, "deviation", s.deviations);
  rows(s.storage_ids, "elastic", s.elastic);
  rows(s.conversion_ids, "on", s.on);
  rows(s.conversion_ids, "start_stop", s.start_stop);
  rows(s.arc_ids, "flow", s.flows);
  rows(s.demand_ids, "demand_slack", s.demand_slack);
  return out;
}

json schedule_to_json(const Schedule& s) {
  json j;
  j["periods"] = s.periods;
  auto block = [&](const std::vector<std::string>& ids, const auto& values) {
    json b = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) b.push_back({{"id", ids[i]}, {"values", values[i]}});
    return b;
  };
  j["levels"] = block(s.storage_ids, s.levels);
  j["deviations"] = block(s.storage_ids, s.deviations);
  j["elastic"] = block(s.storage_ids, s.elastic);
  j["on"] = block(s.conversion_ids, s.on);
  j["start_stop"] = block(s.conversion_ids, s.start_stop);
  j["flows"] = block(s.arc_ids, s.flows);
  j["demand_slack"] = block(s.demand_ids, s.demand_slack);
  j["breakdown"] = {{"start_stop", s.breakdown.start_stop},
                    {"deviation", s.breakdown.deviation},
                    {"demand", s.breakdown.demand},
                    {"elastic", s.breakdown.elastic}};
  j["objective"] = s.objective;
  j["max_balance_residual"] = s.max_balance_residual;
  return j;
}

Schedule schedule_from_json(const json& j) {
  Schedule s;
  try {
    s.periods = j.at("periods").get<std::size_t>();
    auto read = [&](const char* key, std::vector<std::string>& ids, auto& values) {
      for (const auto& item : j.at(key)) {
        ids.push_back(item.at("id").get<std::string>());
        values.push_back(item.at("values").get<typename std::decay_t<decltype(values)>::value_type>());
      }
    };
    std::vector<std::string> scratch;
    read("levels", s.storage_ids, s.levels);
    read("deviations", scratch, s.deviations);
    scratch.clear();
    read("elastic", scratch, s.elastic);
    read("on", s.conversion_ids, s.on);
    scratch.clear();
    read("start_stop", scratch, s.start_stop);
    read("flows", s.arc_ids, s.flows);
    read("demand_slack", s.demand_ids, s.demand_slack);
    const json& b = j.at("breakdown");
    s.breakdown.start_stop = b.at("start_stop").get<double>();
    s.breakdown.deviation = b.at("deviation").get<double>();
    s.breakdown.demand = b.at("demand").get<double>();
    s.breakdown.elastic = b.at("elastic").get<double>();
    s.objective = j.at("objective").get<double>();
    s.max_balance_residual = j.at("max_balance_residual").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schedule JSON: ") + e.what());
  }
  return s;
}

}  // namespace gasflow::network
