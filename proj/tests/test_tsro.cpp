#include <cmath>
#include <map>
#include <set>

#include "catch_amalgamated.hpp"
#include "gasflow/errors.hpp"
#include "gasflow/lp/simplex.hpp"
#include "gasflow/network/network_io.hpp"
#include "gasflow/tsro/ccg.hpp"
#include "gasflow/tsro/staged.hpp"
#include "gasflow/tsro/subproblem.hpp"
#include "oracles.hpp"

using namespace gasflow;
using Catch::Approx;
using uncertainty::Trajectory;
using uncertainty::UncertaintySet;

namespace {

UncertaintySet toy_set(std::size_t T, int budget, double minus = 15.0, double plus = 25.0) {
  Trajectory nominal{std::vector<double>(T, 20.0)};
  Trajectory lo{std::vector<double>(T, minus)};
  Trajectory hi{std::vector<double>(T, plus)};
  return UncertaintySet::budgeted({"gas_in"}, nominal, lo, hi, {budget});
}

std::vector<std::pair<std::size_t, double>> pins_of(const tsro::StagedProblem& sp,
                                                    const std::vector<double>& x) {
  std::vector<std::pair<std::size_t, double>> pins;
  for (std::size_t k = 0; k < sp.nx; ++k) pins.emplace_back(sp.x_columns[k], x[k]);
  return pins;
}

// All-on schedule: O = 1, S = 0 with the unit initially on.
std::vector<double> all_on(const tsro::StagedProblem& sp) {
  std::vector<double> x(sp.nx, 0.0);
  for (std::size_t k = 0; k < sp.nx; ++k) {
    if (sp.map.entry(sp.x_columns[k]).kind == network::VarKind::kOn) x[k] = 1.0;
  }
  return x;
}

std::map<std::string, std::vector<double>> supply_of(const UncertaintySet& set, const Trajectory& z) {
  return uncertainty::as_supply_map(set, z);
}

}  // namespace

TEST_CASE("staging partitions every row exactly once", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto sp = tsro::stage(model, toy_set(2, 1));
  CHECK(sp.W.size() == 1 * 2);
  CHECK(sp.nx + sp.ny == model.map.size());
  std::multiset<std::size_t> sources;
  for (const auto* block : {&sp.A, &sp.G, &sp.Q, &sp.W}) {
    for (const auto& r : *block) sources.insert(r.source_row);
  }
  CHECK(sources.size() == model.problem.base.constraints.size());
  CHECK(std::set<std::size_t>(sources.begin(), sources.end()).size() == sources.size());
  for (const auto& r : sp.A) CHECK(r.y.empty());
  for (const auto& r : sp.G) CHECK(r.x.empty());
  for (const auto& r : sp.Q) {
    CHECK_FALSE(r.x.empty());
    CHECK_FALSE(r.y.empty());
  }
  for (const auto& r : sp.W) CHECK(r.x.empty());
  // Start-stop rows are first stage only.
  CHECK(sp.A.size() == 2 * 2);
  for (double b : sp.phi_bound) CHECK(std::isfinite(b));
}

TEST_CASE("block assembly matches the pinned deterministic model", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(2, 2);
  auto sp = tsro::stage(model, set);
  auto x = all_on(sp);
  for (const auto& z : {set.nominal(), Trajectory{{5.0, 45.0}}}) {
    auto rec = tsro::solve_recourse(sp, x, z);
    REQUIRE(rec.status == lp::LpStatus::kOptimal);
    auto expect = testing::pinned_total(doc, pins_of(sp, x), supply_of(set, z));
    REQUIRE(expect);
    CHECK(tsro::first_stage_cost(sp, x) + rec.value == Approx(*expect).epsilon(1e-9).margin(1e-7));
  }
  CHECK(tsro::first_stage_feasible(sp, x));
  auto bad = x;
  bad[0] = 0.5;
  CHECK_FALSE(tsro::first_stage_feasible(sp, bad));
}

TEST_CASE("staging rejects models without gasholders", "[tsro]") {
  nlohmann::json doc = {
      {"units",
       {{{"id", "src"}, {"role", "supply"}},
        {{"id", "boiler"}, {"role", "conversion"}, {"rho", 0.8}, {"eta_in", 0.0}, {"eta_out", 0.0}},
        {{"id", "steam"}, {"role", "demand"}, {"class", "produced_energy"}}}},
      {"arcs",
       {{{"id", "feed"}, {"from", "src"}, {"to", "boiler"}, {"energy", "g"}, {"omega", 1.0}, {"flow_max", 50.0}},
        {{"id", "out"}, {"from", "boiler"}, {"to", "steam"}, {"energy", "s"}, {"omega", 1.0}, {"flow_max", 50.0}}}},
      {"horizon",
       {{"periods", 2}, {"demands", {{"steam", {10.0, 10.0}}}}, {"nominal_supply", {{"feed", {5.0, 5.0}}}}}}};
  auto m = network::parse_model(doc);
  auto model = network::build_deterministic(m.network, m.horizon);
  Trajectory five{{5.0, 5.0}};
  auto set = UncertaintySet::budgeted({"feed"}, five, five, five, {1});
  CHECK_THROWS_WITH(tsro::stage(model, set), Catch::Matchers::ContainsSubstring("no gasholder"));
}

TEST_CASE("staging rejects uncertain arcs that miss every gasholder", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  Trajectory two{{20.0, 20.0}, {1.0, 1.0}};
  auto set = UncertaintySet::budgeted({"gas_in", "burn"}, two, two, two, {1, 1});
  CHECK_THROWS_AS(tsro::stage(model, set), ValidationError);
}

TEST_CASE("collapsed uncertainty reduces the subproblem to the nominal recourse", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto sp = tsro::stage(model, toy_set(2, 2));
  auto x = all_on(sp);
  auto nominal = tsro::solve_recourse(sp, x, toy_set(2, 2).nominal());

  auto zero = toy_set(2, 2, 0.0, 0.0);
  auto r0 = tsro::worst_case(sp, x, zero);
  CHECK(r0.beta == Approx(nominal.value).epsilon(1e-9).margin(1e-7));

  auto no_budget = toy_set(2, 0);
  auto r1 = tsro::worst_case(sp, x, no_budget);
  CHECK(r1.beta == Approx(nominal.value).epsilon(1e-9).margin(1e-7));
  for (const auto& row : r1.indicators.plus) for (auto v : row) CHECK(v == 0);
  for (const auto& row : r1.indicators.minus) for (auto v : row) CHECK(v == 0);
}

TEST_CASE("dual subproblem has one feasibility row per second-stage column", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(2, 1);
  auto sp = tsro::stage(model, set);
  auto sub = tsro::build_subproblem(sp, all_on(sp), set);
  CHECK(sub.dual_rows == sp.ny);
  CHECK(sub.n_phi == sp.W.size());
  CHECK(sub.problem.binary_vars.size() == 2 * sp.W.size());
  for (std::size_t i = 0; i < sp.W.size(); ++i) CHECK(sub.big_m[i] == Approx(10.0 * sp.phi_bound[i]));
  CHECK_NOTHROW(sub.problem.validate());
}

TEST_CASE("budget-one subproblem matches single-deviation enumeration", "[tsro]") {
  for (std::size_t T : {2, 3}) {
    auto doc = testing::toy_model(T);
    auto model = network::build_deterministic(doc.network, doc.horizon);
    auto set = toy_set(T, 1);
    auto sp = tsro::stage(model, set);
    // Every on/off pattern with S = |delta O| from an initially-on unit.
    for (std::uint64_t mask = 0; mask < (1U << T); ++mask) {
      std::vector<double> x(sp.nx, 0.0);
      double prev = 1.0;
      for (std::size_t t = 0; t < T; ++t) {
        double o = static_cast<double>((mask >> t) & 1U);
        for (std::size_t k = 0; k < sp.nx; ++k) {
          const auto& e = sp.map.entry(sp.x_columns[k]);
          if (e.period != t) continue;
          x[k] = e.kind == network::VarKind::kOn ? o : std::abs(o - prev);
        }
        prev = o;
      }
      REQUIRE(tsro::first_stage_feasible(sp, x));
      double cx = tsro::first_stage_cost(sp, x);
      double brute = -lp::kInfinity;
      for (std::size_t t = 0; t <= T; ++t) {
        for (double sign : {1.0, -1.0}) {
          Trajectory z = set.nominal();
          if (t < T) z[0][t] += sign > 0 ? set.plus()[0][t] : -set.minus()[0][t];
          auto v = testing::pinned_total(doc, pins_of(sp, x), supply_of(set, z));
          REQUIRE(v);
          brute = std::max(brute, *v - cx);
        }
      }
      auto r = tsro::worst_case(sp, x, set);
      CHECK(r.beta == Approx(brute).epsilon(1e-7).margin(1e-5));
      CHECK(r.primal_value == Approx(r.beta).epsilon(1e-7).margin(1e-5));
      int used = 0;
      for (std::size_t t = 0; t < T; ++t) used += r.indicators.plus[0][t] + r.indicators.minus[0][t];
      CHECK(used <= 1);
    }
  }
}

TEST_CASE("elastic slack enters the worst case when a holder would drain", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  // A 60-unit shortfall leaves the holder below u_min even with the boiler at
  // its minimum intake.
  auto set = toy_set(2, 1, 60.0, 0.0);
  auto sp = tsro::stage(model, set);
  auto r = tsro::worst_case(sp, all_on(sp), set);
  CHECK(r.elastic > 1e-6);
  CHECK(r.beta >= model.elastic_penalty * r.elastic - 1e-6);
  auto nominal = tsro::solve_recourse(sp, all_on(sp), set.nominal());
  CHECK(nominal.elastic == Approx(0.0).margin(1e-9));
}

TEST_CASE("master with the nominal scenario is the deterministic model", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(2, 1);
  auto sp = tsro::stage(model, set);
  auto det = milp::enumerate_oracle(model.problem);

  auto one = tsro::build_master(sp, {set.nominal()});
  auto r1 = milp::solve_milp(one.problem);
  CHECK(r1.objective_value == Approx(det.objective_value).epsilon(1e-9).margin(1e-7));

  std::vector<std::string> warnings;
  auto two = tsro::build_master(sp, {set.nominal(), set.nominal()}, &warnings);
  CHECK(two.scenarios.size() == 1);
  CHECK(warnings.size() == 1);
  CHECK(two.problem.base.n_vars == one.problem.base.n_vars);
  CHECK(milp::solve_milp(two.problem).objective_value == Approx(r1.objective_value));

  auto three = tsro::build_master(sp, {set.nominal(), Trajectory{{5.0, 20.0}}, Trajectory{{20.0, 45.0}}});
  CHECK(three.problem.base.n_vars == sp.nx + 1 + 3 * sp.ny);

  CHECK_THROWS_AS(tsro::build_master(sp, {}), ValidationError);
}

TEST_CASE("zero budget converges in one iteration at the deterministic optimum", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(2, 0);
  auto sp = tsro::stage(model, set);
  auto res = tsro::ccg_solve(sp, set);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  double det = testing::on_off_oracle(doc);
  CHECK(res.upper == Approx(det).epsilon(1e-9).margin(1e-6));
  CHECK(res.lower == Approx(det).epsilon(1e-9).margin(1e-6));

  auto single = toy_set(2, 2, 0.0, 0.0);
  auto res2 = tsro::ccg_solve(tsro::stage(model, single), single);
  CHECK(res2.iterations == 1);
  CHECK(res2.upper == Approx(det).epsilon(1e-9).margin(1e-6));
}

TEST_CASE("C&CG matches double enumeration across budgets", "[tsro]") {
  for (std::size_t T : {2, 3}) {
    auto doc = testing::toy_model(T);
    auto model = network::build_deterministic(doc.network, doc.horizon);
    double previous = -lp::kInfinity;
    for (int g = 0; g <= static_cast<int>(T); ++g) {
      auto set = toy_set(T, g);
      auto sp = tsro::stage(model, set);
      auto res = tsro::ccg_solve(sp, set);
      INFO("T=" << T << " budget=" << g);
      REQUIRE(res.converged);
      CHECK(res.iterations <= 20);
      double oracle = testing::robust_oracle(doc, set);
      CHECK(res.upper == Approx(oracle).epsilon(1e-7).margin(1e-5));
      CHECK(res.upper - res.lower <= 1e-4 * (1.0 + std::abs(res.upper)));
      for (std::size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i].lower >= res.trace[i - 1].lower);
        CHECK(res.trace[i].upper <= res.trace[i - 1].upper);
      }
      for (const auto& it : res.trace) CHECK(it.lower <= it.upper + 1e-4 * (1.0 + std::abs(it.upper)));
      // x* attains UB.
      CHECK(testing::worst_total(doc, set, pins_of(sp, res.x)) ==
            Approx(res.upper).epsilon(1e-7).margin(1e-5));
      CHECK(res.upper >= previous - 1e-6);
      previous = res.upper;

      if (g == static_cast<int>(T)) {
        auto box = UncertaintySet::box(set.arcs(), set.nominal(), set.minus(), set.plus());
        auto rb = tsro::ccg_solve(tsro::stage(model, box), box);
        CHECK(rb.upper == Approx(res.upper).epsilon(1e-9).margin(1e-6));
      }
    }
  }
}

TEST_CASE("iteration cap returns the incumbent with the gap flagged", "[tsro]") {
  auto doc = testing::toy_model(3);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(3, 3, 60.0, 60.0);
  auto sp = tsro::stage(model, set);
  tsro::CcgOptions opt;
  opt.max_iterations = 1;
  auto res = tsro::ccg_solve(sp, set, opt);
  CHECK(res.iterations == 1);
  if (!res.converged) {
    CHECK_FALSE(res.warnings.empty());
    CHECK(res.lower <= res.upper);
  }
  CHECK(res.x.size() == sp.nx);
  CHECK_THROWS_AS(tsro::ccg_solve(sp, set, tsro::CcgOptions{.max_iterations = 0}), ValidationError);
}

TEST_CASE("policy evaluation", "[tsro]") {
  auto doc = testing::toy_model(3);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(3, 2, 30.0, 40.0);
  auto sp = tsro::stage(model, set);
  auto res = tsro::ccg_solve(sp, set);
  REQUIRE(res.converged);

  // Nominal only: deterministic second-stage cost.
  auto nominal = tsro::evaluate_policy(sp, res.deterministic_x, {set.nominal()});
  REQUIRE(nominal.costs.size() == 1);
  CHECK(nominal.first_stage + nominal.costs[0] ==
        Approx(res.deterministic_objective).epsilon(1e-9).margin(1e-6));

  // Sampled trajectories stay inside the set.
  auto samples = uncertainty::sample(set, 7, 40);
  auto rep = tsro::evaluate_policy(sp, res.x, samples);
  CHECK(rep.costs.size() == 40);
  CHECK(rep.first_stage + rep.max <= res.upper + 1e-5);
  double sum = 0.0;
  for (double c : rep.costs) sum += c;
  CHECK(rep.mean == Approx(sum / 40.0));

  // The first subproblem ran at the deterministic schedule; its scenario hurts
  // that schedule at least as much as the robust one is hurt by its own.
  auto det_scenario = uncertainty::realize(set, res.trace.front().indicators);
  auto det_worst = tsro::evaluate_policy(sp, res.deterministic_x, {det_scenario});
  auto rob_worst = tsro::evaluate_policy(sp, res.x, {res.worst});
  CHECK(det_worst.first_stage + det_worst.costs[0] >= rob_worst.first_stage + rob_worst.costs[0] - 1e-6);
  CHECK(rob_worst.first_stage + rob_worst.costs[0] == Approx(res.upper).epsilon(1e-7).margin(1e-5));
}

TEST_CASE("trace and scenario export", "[tsro]") {
  auto doc = testing::toy_model(2);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(2, 1);
  auto sp = tsro::stage(model, set);
  auto res = tsro::ccg_solve(sp, set);
  auto csv = tsro::trace_csv(res);
  CHECK(csv.rfind("iteration,lower_bound,upper_bound,beta,subproblem_seconds,master_seconds\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == res.trace.size() + 1);
  auto js = tsro::scenarios_json(res, set);
  CHECK(js["iterations"].size() == res.trace.size());
  CHECK(js["worst"].get<Trajectory>() == res.worst);
}
