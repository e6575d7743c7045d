// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--skip-cli]
//
// Criteria 6, 7, 9 and 10 drive the gasflow binary on a copy of the bundled
// synthetic instance; --skip-cli leaves them out (reported as SKIP).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gasflow/forecast/forecaster.hpp"
#include "gasflow/forecast/gbdt.hpp"
#include "gasflow/io.hpp"
#include "gasflow/lp/simplex.hpp"
#include "gasflow/milp/milp.hpp"
#include "gasflow/network/network_io.hpp"
#include "gasflow/tsro/ccg.hpp"
#include "gasflow/tsro/staged.hpp"
#include "gasflow/tsro/subproblem.hpp"
#include "oracles.hpp"

using namespace gasflow;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and limits.
constexpr double kLpObjTol = 1e-6;
constexpr double kLpGapTol = 1e-6;
constexpr double kLpSeconds = 10.0;
constexpr double kMilpObjTol = 1e-6;
constexpr double kMilpSeconds = 60.0;
constexpr double kDetObjTol = 1e-6;
constexpr double kRowTol = 1e-6;
constexpr double kSubproblemTol = 1e-5;
constexpr int kCcgMaxIterations = 20;
constexpr double kCcgSeconds = 120.0;
constexpr double kCcgMatchTol = 1e-5;
constexpr double kBoundMonotoneTol = 1e-9;
constexpr double kSweepMonotoneRel = 1e-6;
constexpr double kPicpTol = 0.05;
constexpr double kMapeLimit = 0.05;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Tally {
  int failed = 0;
  void report(const std::string& id, const std::string& title, const Verdict& v) {
    std::printf("[%s] %s %s: %s\n", v.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  void skip(const std::string& id, const std::string& title) {
    std::printf("[SKIP] %s %s\n", id.c_str(), title.c_str());
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

// ---------------------------------------------------------------- LP / MILP

Verdict lp_kernel() {
  std::mt19937_64 rng(20241016);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  auto start = Clock::now();
  int mismatches = 0, gaps = 0, optimal = 0;
  double worst_obj = 0.0, worst_gap = 0.0;
  for (int k = 0; k < 200; ++k) {
    auto p = testing::random_bounded_lp(rng, size(rng), size(rng));
    auto expected = testing::lp_vertex_enumeration(p);
    auto out = lp::solve_lp(p);
    if (!expected) {
      mismatches += out.status != lp::LpStatus::kInfeasible;
      continue;
    }
    if (out.status != lp::LpStatus::kOptimal) {
      ++mismatches;
      continue;
    }
    ++optimal;
    double de = std::abs(out.objective_value - expected->objective) / (1.0 + std::abs(expected->objective));
    double dg = std::abs(out.objective_value - out.dual_objective) / (1.0 + std::abs(out.objective_value));
    worst_obj = std::max(worst_obj, de);
    worst_gap = std::max(worst_gap, dg);
    mismatches += de > kLpObjTol;
    gaps += dg > kLpGapTol;
  }
  double secs = seconds_since(start);
  Verdict v;
  v.pass = mismatches == 0 && gaps == 0 && secs < kLpSeconds;
  v.detail = std::to_string(optimal) + "/200 optimal, max obj diff " + fmt(worst_obj) + ", max duality gap " +
             fmt(worst_gap) + ", " + fmt(secs) + " s";
  return v;
}

Verdict milp_kernel() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> bins(1, 12);
  std::uniform_int_distribution<std::size_t> extra(0, 3);
  std::uniform_int_distribution<std::size_t> rows(1, 8);
  auto start = Clock::now();
  int mismatches = 0, feasible = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::size_t nb = bins(rng);
    auto p = testing::random_milp(rng, nb + extra(rng), rows(rng), nb);
    auto expected = milp::enumerate_oracle(p);
    auto out = milp::solve_milp(p);
    if (out.status != expected.status) {
      ++mismatches;
      continue;
    }
    if (out.status != milp::MilpStatus::kOptimal) continue;
    ++feasible;
    double d = std::abs(out.objective_value - expected.objective_value) / (1.0 + std::abs(expected.objective_value));
    worst = std::max(worst, d);
    mismatches += d > kMilpObjTol;
  }
  double secs = seconds_since(start);
  Verdict v;
  v.pass = mismatches == 0 && secs < kMilpSeconds;
  v.detail = std::to_string(feasible) + "/100 feasible, " + std::to_string(mismatches) + " mismatches, max diff " +
             fmt(worst) + ", " + fmt(secs) + " s";
  return v;
}

// ---------------------------------------------------------------- toy network

std::size_t arc_row(const network::Schedule& s, const std::string& id) {
  return static_cast<std::size_t>(std::find(s.arc_ids.begin(), s.arc_ids.end(), id) - s.arc_ids.begin());
}

network::Schedule solve_toy(const network::ModelDocument& doc, double* objective) {
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto out = milp::solve_milp(model.problem);
  *objective = out.objective_value;
  return network::extract_schedule(out, model.map, doc.network, doc.horizon);
}

Verdict deterministic_soundness() {
  Verdict v;
  std::ostringstream d;
  auto doc = testing::toy_model(2);
  double obj = 0.0;
  auto s = solve_toy(doc, &obj);
  double oracle = testing::on_off_oracle(doc);
  bool matches = std::abs(obj - oracle) <= kDetObjTol * (1.0 + std::abs(oracle));
  d << "objective " << fmt(obj) << " vs 4-pattern oracle " << fmt(oracle);

  // Mass balance recomputed from the flows: u_t = u_{t-1} + z_t - f_burn,t.
  const auto& holder = doc.network.units[1].storage;
  double balance = 0.0, prev = holder.u0;
  for (std::size_t t = 0; t < 2; ++t) {
    double u = s.levels[0][t];
    balance = std::max(balance, std::abs(u - prev - s.flows[arc_row(s, "gas_in")][t] + s.flows[arc_row(s, "burn")][t]));
    prev = u;
  }
  bool balance_ok = balance <= kRowTol;
  d << "; balance residual " << fmt(balance);

  // Minimum output: demand 10 < 0.3*136 in period 2 pins steam at the floor;
  // demand 100 in period 1 keeps it off the floor.
  const auto& boiler = doc.network.units[2].conversion;
  double floor = boiler.eta_out * 136.0;
  double steam1 = s.flows[arc_row(s, "steam_out")][0];
  double steam2 = s.flows[arc_row(s, "steam_out")][1];
  bool eta_ok = s.on[0][1] == 1 && std::abs(steam2 - floor) <= kRowTol && steam1 > floor + kRowTol;
  d << "; min output slack t1 " << fmt(steam1 - floor) << " t2 " << fmt(steam2 - floor);

  // Ramp: slack under the stock limit, then tight once delta is cut to 2.
  double ramp_slack = lp::kInfinity;
  prev = holder.u0;
  for (std::size_t t = 0; t < 2; ++t) {
    ramp_slack = std::min(ramp_slack, holder.delta - std::abs(s.levels[0][t] - prev));
    prev = s.levels[0][t];
  }
  auto tight = doc;
  tight.network.units[1].storage.delta = 2.0;
  double tight_obj = 0.0;
  auto st = solve_toy(tight, &tight_obj);
  double tight_slack = lp::kInfinity;
  prev = holder.u0;
  for (std::size_t t = 0; t < 2; ++t) {
    tight_slack = std::min(tight_slack, 2.0 + st.elastic[0][t] - std::abs(st.levels[0][t] - prev));
    prev = st.levels[0][t];
  }
  double tight_oracle = testing::on_off_oracle(tight);
  bool ramp_ok = ramp_slack > kRowTol && std::abs(tight_slack) <= kRowTol &&
                 std::abs(tight_obj - tight_oracle) <= kDetObjTol * (1.0 + std::abs(tight_oracle));
  d << "; ramp slack " << fmt(ramp_slack) << " (delta 30), " << fmt(tight_slack) << " (delta 2)";

  v.pass = matches && balance_ok && eta_ok && ramp_ok;
  v.detail = d.str();
  return v;
}

uncertainty::UncertaintySet toy_set(std::size_t T, int budget) {
  uncertainty::Trajectory nominal{std::vector<double>(T, 20.0)};
  uncertainty::Trajectory lo{std::vector<double>(T, 15.0)};
  uncertainty::Trajectory hi{std::vector<double>(T, 25.0)};
  return uncertainty::UncertaintySet::budgeted({"gas_in"}, nominal, lo, hi, {budget});
}

std::vector<std::pair<std::size_t, double>> pins_of(const tsro::StagedProblem& sp, const std::vector<double>& x) {
  std::vector<std::pair<std::size_t, double>> pins;
  for (std::size_t k = 0; k < sp.nx; ++k) pins.emplace_back(sp.x_columns[k], x[k]);
  return pins;
}

Verdict subproblem_correctness() {
  const std::size_t T = 2;
  auto doc = testing::toy_model(T);
  auto model = network::build_deterministic(doc.network, doc.horizon);
  auto set = toy_set(T, 1);
  auto sp = tsro::stage(model, set);
  double worst = 0.0;
  int patterns = 0;
  for (std::uint64_t mask = 0; mask < (1U << T); ++mask) {
    std::vector<double> x(sp.nx, 0.0);
    double prev = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      double o = static_cast<double>((mask >> t) & 1U);
      for (std::size_t k = 0; k < sp.nx; ++k) {
        const auto& e = sp.map.entry(sp.x_columns[k]);
        if (e.period == t) x[k] = e.kind == network::VarKind::kOn ? o : std::abs(o - prev);
      }
      prev = o;
    }
    double cx = tsro::first_stage_cost(sp, x);
    // Nominal plus every single-cell deviation, each costed by the primal LP.
    double brute = -lp::kInfinity;
    for (std::size_t t = 0; t <= T; ++t) {
      for (double sign : {1.0, -1.0}) {
        uncertainty::Trajectory z = set.nominal();
        if (t < T) z[0][t] += sign > 0 ? set.plus()[0][t] : -set.minus()[0][t];
        auto total = testing::pinned_total(doc, pins_of(sp, x), uncertainty::as_supply_map(set, z));
        if (total) brute = std::max(brute, *total - cx);
      }
    }
    auto r = tsro::worst_case(sp, x, set);
    worst = std::max(worst, std::abs(r.beta - brute));
    ++patterns;
  }
  Verdict v;
  v.pass = worst <= kSubproblemTol;
  v.detail = std::to_string(patterns) + " on/off patterns, max |MILP - brute force| " + fmt(worst);
  return v;
}

Verdict ccg_convergence() {
  auto start = Clock::now();
  Verdict v;
  std::ostringstream d;
  bool ok = true;
  std::size_t max_iter = 0;
  double worst_oracle = 0.0;
  for (std::size_t T : {2, 3}) {
    auto doc = testing::toy_model(T);
    auto model = network::build_deterministic(doc.network, doc.horizon);
    double deterministic = testing::on_off_oracle(doc);
    for (int g = 0; g <= static_cast<int>(T); ++g) {
      auto set = toy_set(T, g);
      tsro::CcgOptions opts;
      opts.max_iterations = kCcgMaxIterations;
      auto res = tsro::ccg_solve(tsro::stage(model, set), set, opts);
      max_iter = std::max(max_iter, res.iterations);
      double allowed = opts.abs_tol + opts.rel_tol * std::abs(res.upper);
      bool gap = res.converged && res.upper - res.lower <= allowed;
      bool monotone = true;
      for (std::size_t i = 1; i < res.trace.size(); ++i) {
        double scale = kBoundMonotoneTol * (1.0 + std::abs(res.trace[i].upper));
        monotone = monotone && res.trace[i].lower >= res.trace[i - 1].lower - scale &&
                   res.trace[i].upper <= res.trace[i - 1].upper + scale;
      }
      double oracle = testing::robust_oracle(doc, set);
      worst_oracle = std::max(worst_oracle, std::abs(res.upper - oracle) / (1.0 + std::abs(oracle)));
      bool matches = close_rel(res.upper, oracle, kCcgMatchTol);
      bool ends = true;
      if (g == 0) ends = close_rel(res.upper, deterministic, kCcgMatchTol);
      if (g == static_cast<int>(T)) {
        auto box = uncertainty::UncertaintySet::box(set.arcs(), set.nominal(), set.minus(), set.plus());
        auto rb = tsro::ccg_solve(tsro::stage(model, box), box, opts);
        ends = close_rel(res.upper, rb.upper, kCcgMatchTol);
      }
      if (!(gap && monotone && matches && ends && res.iterations <= static_cast<std::size_t>(kCcgMaxIterations))) {
        ok = false;
        d << "[T=" << T << " budget=" << g << " gap " << gap << " monotone " << monotone << " oracle " << matches
          << " endpoint " << ends << "] ";
      }
    }
  }
  double secs = seconds_since(start);
  v.pass = ok && secs < kCcgSeconds;
  d << "T in {2,3}, all budgets; max iterations " << max_iter << ", max rel diff to double enumeration "
    << fmt(worst_oracle) << ", " << fmt(secs) << " s";
  v.detail = d.str();
  return v;
}

// ---------------------------------------------------------------- forecaster

std::vector<double> ar1(std::size_t n, std::uint64_t seed, double phi, double mean, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, sd);
  std::vector<double> z(n);
  double prev = mean;
  for (auto& v : z) {
    prev = mean + phi * (prev - mean) + eps(rng);
    v = prev;
  }
  return z;
}

// Smallest sample minimizing the empirical pinball loss.
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

Verdict forecaster_calibration() {
  Verdict v;
  std::ostringstream d;
  const double phi = 0.7, mean = 100.0, sd = 3.0;
  auto z = ar1(2500, 11, phi, mean, sd);
  bool picp_ok = true;
  for (double alpha : {0.05, 0.1}) {
    forecast::ForecasterConfig cfg;
    cfg.lags = 3;
    cfg.horizon = 1;
    cfg.alpha = alpha;
    cfg.train_length = 2000;
    auto bundle = forecast::train_forecaster({{"a", z}}, cfg);
    auto m = forecast::backtest(bundle, {{"a", z}});
    // Coverage of the generating model's own (alpha, 1-alpha) band.
    double zq = alpha == 0.05 ? 1.6448536269514722 : 1.2815515655446004;
    std::size_t inside = 0;
    for (std::size_t i = 2000; i < 2500; ++i) inside += std::abs(z[i] - (mean + phi * (z[i - 1] - mean))) < zq * sd;
    double target = 1.0 - alpha;
    bool ok = m.size() == 1 && m[0].points == 500 && std::abs(m[0].picp - target) <= kPicpTol;
    picp_ok = picp_ok && ok;
    d << "alpha " << alpha << ": PICP " << fmt(m[0].picp) << " vs target " << fmt(target) << " (true band "
      << fmt(inside / 500.0) << "); ";
  }

  // Initialization-only model against the brute-force empirical quantile.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd(7.0, 3.0);
  std::vector<std::vector<double>> x(200, std::vector<double>{0.0});
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i][0] = static_cast<double>(i);
    y[i] = nd(rng);
  }
  forecast::GbdtParams init;
  init.rounds = 1;
  init.depth = 0;
  bool init_ok = true;
  for (double q : {0.05, 0.5, 0.95}) init_ok = init_ok && forecast::fit_quantile_gbdt(x, y, q, init).predict({3.0}) == brute_quantile(y, q);
  d << "init-only exact " << (init_ok ? "yes" : "no");

  // Training loss trace.
  auto ds = forecast::make_supervised(z, 5, 1);
  forecast::GbdtParams gp;
  gp.rounds = 60;
  bool loss_ok = true;
  for (double q : {0.05, 0.5, 0.95}) {
    auto model = forecast::fit_quantile_gbdt(ds.steps[0].features, ds.steps[0].targets, q, gp);
    for (std::size_t i = 1; i < model.loss_trace.size(); ++i) loss_ok = loss_ok && model.loss_trace[i] <= model.loss_trace[i - 1] + 1e-12;
  }
  d << ", loss monotone " << (loss_ok ? "yes" : "no");

  // Hand examples for the metric definitions (open interval for coverage).
  bool hand_ok = std::abs(forecast::mape({90, 110}, {100, 100}) - 0.10) <= 1e-12 &&
                 forecast::picp({0, 0, 0, 0}, {2, 2, 2, 2}, {1, 1, 1, 3}) == 0.75 &&
                 forecast::picp({0, 0}, {2, 2}, {0, 2}) == 0.0;
  d << ", metric hand examples " << (hand_ok ? "yes" : "no");

  v.pass = picp_ok && init_ok && loss_ok && hand_ok;
  v.detail = d.str();
  return v;
}

// ---------------------------------------------------------------- CLI runs

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(GASFLOW_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& p) {
  std::istringstream is(io::read_file(p));
  Table rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const Table& t, const std::string& name) {
  return static_cast<std::size_t>(std::find(t[0].begin(), t[0].end(), name) - t[0].begin());
}

// Checks `objective` along rows grouped by `group` (empty: one group), in
// file order, with `sign` +1 for nondecreasing and -1 for nonincreasing.
Verdict monotone_column(const Table& t, const std::string& group, int sign, const std::string& label) {
  Verdict v;
  std::size_t obj = column(t, "objective"), status = column(t, "status");
  std::size_t g = group.empty() ? t[0].size() : column(t, group);
  std::map<std::string, double> last;
  int violations = 0, cells = 0;
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (t[r][status] != "ok") {
      v.pass = false;
      v.detail += "cell " + std::to_string(r) + " status " + t[r][status] + "; ";
      continue;
    }
    ++cells;
    std::string key = g < t[r].size() ? t[r][g] : "";
    double value = std::stod(t[r][obj]);
    auto it = last.find(key);
    if (it != last.end() && sign * (value - it->second) < -kSweepMonotoneRel * (1.0 + std::abs(it->second))) {
      ++violations;
      v.detail += label + " drops at row " + std::to_string(r) + "; ";
    }
    last[key] = value;
  }
  v.pass = v.pass && violations == 0 && cells > 1;
  v.detail += std::to_string(cells) + " cells, " + std::to_string(violations) + " violations";
  return v;
}

fs::path copy_instance(const fs::path& root, const std::string& name) {
  auto dir = root / name;
  fs::create_directories(dir);
  for (const char* f : {"config.json", "network.json", "history.csv"}) {
    fs::copy_file(fs::path(GASFLOW_SYNTHETIC_DIR) / f, dir / f, fs::copy_options::overwrite_existing);
  }
  return dir;
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_cli = argc > 1 && std::string(argv[1]) == "--skip-cli";
  Tally tally;
  tally.report("C1", "LP kernel vs vertex enumeration", lp_kernel());
  tally.report("C2", "MILP kernel vs exhaustive enumeration", milp_kernel());
  tally.report("C3", "deterministic toy model soundness", deterministic_soundness());
  tally.report("C4", "budget-one subproblem vs brute force", subproblem_correctness());
  tally.report("C5", "C&CG convergence on the toy network", ccg_convergence());

  if (skip_cli) {
    tally.skip("C6", "budget monotonicity");
    tally.skip("C7", "flexibility monotonicity");
  }
  fs::path root = fs::temp_directory_path() / ("gasflow_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::path first, second;
  int rc1 = -1, rc2 = -1;
  if (!skip_cli) {
    first = copy_instance(root, "run1");
    second = copy_instance(root, "run2");
    rc1 = run_cli("sweep --config " + (first / "config.json").string(), root / "run1.log");
    if (rc1 != 0) {
      Verdict v{false, "gasflow sweep exited " + std::to_string(rc1) + ", see " + (root / "run1.log").string()};
      tally.report("C6", "budget monotonicity", v);
      tally.report("C7", "flexibility monotonicity", v);
    } else {
      auto budget = read_csv(first / "out" / "budget_sweep.csv");
      tally.report("C6", "robust objective nondecreasing in the budget, per alpha",
                   monotone_column(budget, "alpha", +1, "objective"));
      auto delta = monotone_column(read_csv(first / "out" / "delta_sweep.csv"), "", -1, "objective");
      auto eta = monotone_column(read_csv(first / "out" / "eta_sweep.csv"), "", +1, "objective");
      Verdict both{delta.pass && eta.pass, "ramp scale 0.5..2.0 nonincreasing: " + delta.detail +
                                               "; minimum output 0..0.3 nondecreasing: " + eta.detail};
      tally.report("C7", "worst case vs ramp scale and minimum output", both);
    }
  }

  tally.report("C8", "quantile forecaster calibration", forecaster_calibration());

  if (skip_cli) {
    tally.skip("C9", "median-model MAPE on the synthetic history");
    tally.skip("C10", "byte-identical sweep reruns");
  } else {
    int rc = run_cli("forecast --config " + (first / "config.json").string(), root / "forecast.log");
    Verdict v;
    if (rc != 0) {
      v = {false, "gasflow forecast exited " + std::to_string(rc)};
    } else {
      auto metrics = read_csv(first / "out" / "metrics.csv");
      std::size_t arc = column(metrics, "arc"), mape = column(metrics, "mape");
      for (std::size_t r = 1; r < metrics.size(); ++r) {
        double m = std::stod(metrics[r][mape]);
        v.pass = v.pass && m < kMapeLimit;
        v.detail += metrics[r][arc] + " " + fmt(m) + "; ";
      }
      v.pass = v.pass && metrics.size() > 1;
      v.detail += "limit " + fmt(kMapeLimit);
    }
    tally.report("C9", "median-model MAPE per arc", v);

    rc2 = run_cli("sweep --config " + (second / "config.json").string(), root / "run2.log");
    Verdict same;
    if (rc1 != 0 || rc2 != 0) {
      same = {false, "sweep exit codes " + std::to_string(rc1) + " and " + std::to_string(rc2)};
    } else {
      for (const char* f : {"budget_sweep.csv", "delta_sweep.csv", "eta_sweep.csv"}) {
        bool eq = io::read_file(first / "out" / f) == io::read_file(second / "out" / f);
        same.pass = same.pass && eq;
        same.detail += std::string(f) + (eq ? " identical; " : " differs; ");
      }
      same.detail += "fingerprint " + io::fnv1a_hex(io::read_file(first / "out" / "budget_sweep.csv"));
    }
    tally.report("C10", "byte-identical sweep reruns", same);
    if (tally.failed == 0) fs::remove_all(root);
  }

  std::printf("%d criteria failed\n", tally.failed);
  return tally.failed == 0 ? 0 : 1;
}
