#include "gasflow/synthetic.hpp"

#include <cmath>
#include <random>

#include "gasflow/errors.hpp"
#include "gasflow/random.hpp"

namespace gasflow::synthetic {

namespace {

struct SupplyProfile {
  const char* arc;
  double mean;
  double amplitude;
  double phase;
  double noise_sd;
  double phi;
};

// Flows in km3/h; calorific values in GJ per km3.
constexpr SupplyProfile kProfiles[] = {
    {"bfg_supply", 150.0, 18.0, 0.0, 2.0, 0.6},
    {"cog_supply", 26.0, 3.0, 1.3, 0.35, 0.5},
    {"ldg_supply", 30.0, 6.0, 2.6, 0.45, 0.5},
};

constexpr double kTwoPi = 6.283185307179586;

}  // namespace

double seasonal_level(const std::string& arc, std::size_t i) {
  for (const auto& p : kProfiles) {
    if (arc == p.arc) return p.mean + p.amplitude * std::sin(kTwoPi * static_cast<double>(i) / 24.0 + p.phase);
  }
  throw ValidationError("no synthetic profile for arc " + arc);
}

forecast::History supply_history(const HistoryOptions& options) {
  std::mt19937_64 rng(options.seed);
  forecast::History h;
  for (const auto& p : kProfiles) {
    std::vector<double> series(options.length);
    double noise = 0.0;
    for (std::size_t i = 0; i < options.length; ++i) {
      noise = p.phi * noise + options.noise_scale * p.noise_sd * random::normal(rng);
      series[i] = seasonal_level(p.arc, i) + noise;
    }
    h[p.arc] = std::move(series);
  }
  return h;
}

network::ModelDocument plant(std::size_t periods, std::size_t history_length) {
  if (periods == 0) throw ValidationError("synthetic plant needs at least one period");
  auto series = [periods](auto f) {
    std::vector<double> v(periods);
    for (std::size_t t = 0; t < periods; ++t) v[t] = f(t);
    return v;
  };
  nlohmann::json supply;
  for (const auto& p : kProfiles) {
    std::string arc = p.arc;
    supply[arc] = series([&](std::size_t t) { return seasonal_level(arc, history_length + t); });
  }
  const double two_pi = kTwoPi;
  auto steam = series([&](std::size_t t) { return 190.0 + 15.0 * std::sin(two_pi * static_cast<double>(t) / 8.0); });
  auto power = series([&](std::size_t t) { return 42.0 + 6.0 * std::cos(two_pi * static_cast<double>(t) / 8.0); });

  auto zeros = std::vector<double>(periods, 0.0);

  auto holder = [](const char* id, double lo, double hi, double delta, double mid, double u0) {
    return nlohmann::json{{"id", id}, {"role", "storage"}, {"u_min", lo}, {"u_max", hi},
                          {"delta", delta}, {"u_mid", mid}, {"u0", u0}};
  };
  auto unit = [](const char* id, double rho, double eta_in, double eta_out) {
    return nlohmann::json{{"id", id}, {"role", "conversion"}, {"rho", rho}, {"eta_in", eta_in},
                          {"eta_out", eta_out}, {"initially_on", true}};
  };
  auto flare = [](const char* id) {
    return nlohmann::json{{"id", id}, {"role", "demand"}, {"class", "emitted_gas"}, {"penalty", 500.0}};
  };
  auto arc = [](const char* id, const char* from, const char* to, const char* energy, double omega,
                double fmin, double fmax) {
    return nlohmann::json{{"id", id},       {"from", from},      {"to", to},          {"energy", energy},
                          {"omega", omega}, {"flow_min", fmin}, {"flow_max", fmax}};
  };
  nlohmann::json doc = {
      {"energies", {"BFG", "COG", "LDG", "steam", "power"}},
      {"units",
       {{{"id", "BF"}, {"role", "supply"}},
        {{"id", "CO"}, {"role", "supply"}},
        {{"id", "LD"}, {"role", "supply"}},
        holder("H_BFG", 60.0, 260.0, 4.0, 160.0, 160.0),
        holder("H_COG", 20.0, 100.0, 0.8, 60.0, 60.0),
        holder("H_LDG", 15.0, 75.0, 1.2, 45.0, 45.0),
        unit("B35", 0.86, 4.0, 0.4),
        unit("B130", 0.88, 4.5, 0.35),
        unit("CHP", 0.80, 4.2, 0.4),
        unit("GEN", 0.38, 7.0, 0.2),
        {{"id", "steam"}, {"role", "demand"}, {"class", "produced_energy"}, {"penalty", 50.0}},
        {{"id", "power"}, {"role", "demand"}, {"class", "produced_energy"}, {"penalty", 50.0}},
        flare("bfg_flare"),
        flare("cog_flare"),
        flare("ldg_flare")}},
      {"arcs",
       {arc("bfg_supply", "BF", "H_BFG", "BFG", 3.2, 0.0, lp::kInfinity),
        arc("cog_supply", "CO", "H_COG", "COG", 17.6, 0.0, lp::kInfinity),
        arc("ldg_supply", "LD", "H_LDG", "LDG", 7.5, 0.0, lp::kInfinity),
        arc("bfg_b35", "H_BFG", "B35", "BFG", 3.2, 0.0, 30.0),
        arc("cog_b35", "H_COG", "B35", "COG", 17.6, 0.0, 5.0),
        arc("bfg_b130", "H_BFG", "B130", "BFG", 3.2, 0.0, 100.0),
        arc("cog_b130", "H_COG", "B130", "COG", 17.6, 0.0, 12.0),
        arc("ldg_b130", "H_LDG", "B130", "LDG", 7.5, 0.0, 20.0),
        arc("bfg_chp", "H_BFG", "CHP", "BFG", 3.2, 0.0, 70.0),
        arc("cog_chp", "H_COG", "CHP", "COG", 17.6, 0.0, 8.0),
        arc("cog_gen", "H_COG", "GEN", "COG", 17.6, 0.0, 3.0),
        arc("ldg_gen", "H_LDG", "GEN", "LDG", 7.5, 0.0, 60.0),
        arc("b35_steam", "B35", "steam", "steam", 2.8, 0.0, 35.0),
        arc("b130_steam", "B130", "steam", "steam", 2.8, 0.0, 130.0),
        arc("chp_steam", "CHP", "steam", "steam", 2.8, 0.0, 50.0),
        arc("chp_power", "CHP", "power", "power", 3.6, 0.0, 25.0),
        arc("gen_power", "GEN", "power", "power", 3.6, 0.0, 102.0),
        arc("bfg_flaring", "H_BFG", "bfg_flare", "BFG", 3.2, 0.0, lp::kInfinity),
        arc("cog_flaring", "H_COG", "cog_flare", "COG", 17.6, 0.0, lp::kInfinity),
        arc("ldg_flaring", "H_LDG", "ldg_flare", "LDG", 7.5, 0.0, lp::kInfinity)}},
      {"horizon",
       {{"periods", periods},
        {"gamma1", 100.0},
        {"gamma2", 1.0},
        {"demands", {{"steam", steam}, {"power", power}, {"bfg_flare", zeros}, {"cog_flare", zeros}, {"ldg_flare", zeros}}},
        {"nominal_supply", supply}}}};
  // to_json writes infinite flow_max as null; mirror that here.
  for (auto& a : doc["arcs"]) {
    if (!std::isfinite(a["flow_max"].get<double>())) a["flow_max"] = nullptr;
  }
  return network::parse_model(doc);
}

}  // namespace gasflow::synthetic
