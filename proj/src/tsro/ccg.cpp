#include "gasflow/tsro/ccg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "gasflow/errors.hpp"
#include "gasflow/io.hpp"

namespace gasflow::tsro {

using lp::Relation;
using io::format_double;
using uncertainty::Trajectory;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void put(lp::Constraint& con, const SparseRow& row, std::size_t offset) {
  for (const auto& [j, a] : row) con.coefficients[offset + j] += a;
}

}  // namespace

MasterProblem build_master(const StagedProblem& staged, const std::vector<Trajectory>& scenarios,
                           std::vector<std::string>* warnings) {
  if (scenarios.empty()) throw ValidationError("master: at least one scenario is required");
  MasterProblem m;
  for (const auto& z : scenarios) {
    if (std::find(m.scenarios.begin(), m.scenarios.end(), z) != m.scenarios.end()) {
      if (warnings) warnings->push_back("master: duplicate scenario dropped");
      continue;
    }
    m.scenarios.push_back(z);
  }
  auto& lp = m.problem.base;
  for (std::size_t k = 0; k < staged.nx; ++k) {
    lp.add_variable(staged.c[k], staged.x_bounds[k]);
    m.problem.binary_vars.push_back(k);
  }
  m.beta = lp.add_variable(1.0, {-lp::kInfinity, lp::kInfinity});
  const std::size_t n_scen = m.scenarios.size();
  const std::size_t total = lp.n_vars + n_scen * staged.ny;
  lp.n_vars = total;
  lp.objective.resize(total, 0.0);
  lp.var_bounds.resize(total);
  for (std::size_t i = 0; i < n_scen; ++i) {
    std::size_t off = staged.nx + 1 + i * staged.ny;
    m.y_offset.push_back(off);
    for (std::size_t j = 0; j < staged.ny; ++j) lp.var_bounds[off + j] = staged.y_bounds[j];
  }

  for (const auto& r : staged.A) put(lp.add_constraint(r.relation, r.rhs), r.x, 0);
  for (std::size_t i = 0; i < n_scen; ++i) {
    const std::size_t off = m.y_offset[i];
    for (const auto& r : staged.G) put(lp.add_constraint(r.relation, r.rhs), r.y, off);
    for (const auto& r : staged.Q) {
      auto& con = lp.add_constraint(r.relation, r.rhs);
      put(con, r.y, off);
      put(con, r.x, 0);
    }
    auto rhs = w_rhs(staged, m.scenarios[i]);
    for (std::size_t w = 0; w < staged.W.size(); ++w) {
      put(lp.add_constraint(Relation::kEqual, rhs[w]), staged.W[w].y, off);
    }
    auto& cut = lp.add_constraint(Relation::kGreaterEqual, 0.0);
    cut.coefficients[m.beta] = 1.0;
    for (std::size_t j = 0; j < staged.ny; ++j) {
      if (staged.d[j] != 0.0) cut.coefficients[off + j] = -staged.d[j];
    }
  }
  return m;
}

CcgResult ccg_solve(const StagedProblem& staged, const uncertainty::UncertaintySet& set,
                    const CcgOptions& options) {
  if (options.max_iterations == 0) throw ValidationError("ccg: iteration cap must be positive");
  CcgResult res;
  milp::MilpOptions mo;
  mo.rel_gap = options.master_gap;
  mo.node_limit = options.node_limit;

  auto solve_master = [&](const std::vector<Trajectory>& pool, double& obj) {
    auto master = build_master(staged, pool, &res.warnings);
    auto out = milp::solve_milp(master.problem, mo);
    if (out.status != milp::MilpStatus::kOptimal) {
      throw ValidationError("ccg: master problem is infeasible; first-stage constraints cannot be met");
    }
    obj = out.objective_value;
    return std::vector<double>(out.assignment.begin(), out.assignment.begin() + staged.nx);
  };

  // Deterministic start: nominal scenario only.
  std::vector<Trajectory> pool{set.nominal()};
  auto start = std::chrono::steady_clock::now();
  double lb = 0.0;
  std::vector<double> x = solve_master(pool, lb);
  double master_time = seconds_since(start);
  res.deterministic_x = x;
  res.deterministic_objective = lb;
  double ub = lp::kInfinity;

  for (std::size_t i = 1; i <= options.max_iterations; ++i) {
    CcgIteration it;
    it.iteration = i;
    it.master_seconds = master_time;
    start = std::chrono::steady_clock::now();
    auto worst = worst_case(staged, x, set, options.subproblem);
    it.subproblem_seconds = seconds_since(start);
    it.beta = worst.beta;
    it.indicators = worst.indicators;
    double candidate = first_stage_cost(staged, x) + worst.beta;
    if (candidate < ub) {
      ub = candidate;
      res.x = x;
      res.worst = worst.scenario;
      res.worst_elastic = worst.elastic;
    }
    res.iterations = i;
    auto gap_closed = [&] { return ub - lb <= options.abs_tol + options.rel_tol * std::abs(ub); };
    if (gap_closed()) {
      it.lower = lb;
      it.upper = ub;
      res.trace.push_back(std::move(it));
      res.converged = true;
      break;
    }
    pool.push_back(worst.scenario);
    start = std::chrono::steady_clock::now();
    double obj = 0.0;
    x = solve_master(pool, obj);
    master_time = seconds_since(start);
    lb = std::max(lb, obj);
    it.lower = lb;
    it.upper = ub;
    res.trace.push_back(std::move(it));
    if (gap_closed()) {
      res.converged = true;
      break;
    }
  }
  res.lower = lb;
  res.upper = ub;
  // Keep only distinct scenarios.
  for (const auto& z : pool) {
    if (std::find(res.scenarios.begin(), res.scenarios.end(), z) == res.scenarios.end()) {
      res.scenarios.push_back(z);
    }
  }
  if (!res.converged) {
    res.warnings.push_back("ccg: iteration cap reached with gap " + format_double(ub - lb));
  }
  return res;
}

std::string trace_csv(const CcgResult& result, bool timings) {
  std::ostringstream os;
  os << "iteration,lower_bound,upper_bound,beta";
  os << (timings ? ",subproblem_seconds,master_seconds\n" : "\n");
  for (const auto& it : result.trace) {
    os << it.iteration << ',' << format_double(it.lower) << ',' << format_double(it.upper) << ','
       << format_double(it.beta);
    if (timings) os << ',' << format_double(it.subproblem_seconds) << ',' << format_double(it.master_seconds);
    os << '\n';
  }
  return os.str();
}

nlohmann::json scenarios_json(const CcgResult& result, const uncertainty::UncertaintySet& set) {
  nlohmann::json doc;
  doc["arcs"] = set.arcs();
  doc["iterations"] = nlohmann::json::array();
  for (const auto& it : result.trace) {
    nlohmann::json entry;
    entry["iteration"] = it.iteration;
    entry["beta"] = it.beta;
    entry["plus"] = it.indicators.plus;
    entry["minus"] = it.indicators.minus;
    entry["trajectory"] = uncertainty::realize(set, it.indicators);
    doc["iterations"].push_back(std::move(entry));
  }
  doc["worst"] = result.worst;
  return doc;
}

PolicyReport evaluate_policy(const StagedProblem& staged, const std::vector<double>& x,
                             const std::vector<Trajectory>& trajectories, double elastic_tolerance) {
  PolicyReport rep;
  rep.first_stage = first_stage_cost(staged, x);
  for (const auto& z : trajectories) {
    auto r = solve_recourse(staged, x, z);
    if (r.status != lp::LpStatus::kOptimal) {
      throw NumericalError("evaluate: recourse LP is " + lp::to_string(r.status));
    }
    rep.costs.push_back(r.value);
    rep.elastic.push_back(r.elastic);
    if (r.elastic > elastic_tolerance) ++rep.elastic_active;
  }
  if (!rep.costs.empty()) {
    double sum = 0.0;
    rep.max = -lp::kInfinity;
    for (double c : rep.costs) {
      sum += c;
      rep.max = std::max(rep.max, c);
    }
    rep.mean = sum / static_cast<double>(rep.costs.size());
  }
  return rep;
}

}  // namespace gasflow::tsro
