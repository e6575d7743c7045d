#include "gasflow/tsro/staged.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gasflow/errors.hpp"
#include "gasflow/lp/simplex.hpp"

namespace gasflow::tsro {

using lp::Relation;
using network::RowFamily;
using network::VarKind;

namespace {

std::string row_label(const network::DeterministicModel& model, std::size_t i) {
  const auto& tag = model.rows[i];
  return "row " + std::to_string(i) + " (" + network::to_string(tag.family) + ", period " +
         std::to_string(tag.period + 1) + ")";
}

// Greater-or-equal and equality rows as stored; a <= row is negated.
BlockRow split_row(const lp::Constraint& con, const std::vector<std::size_t>& x_pos,
                   const std::vector<std::size_t>& y_pos, const network::VariableMap& map,
                   std::size_t source) {
  BlockRow row;
  double sign = con.relation == Relation::kLessEqual ? -1.0 : 1.0;
  row.relation = con.relation == Relation::kEqual ? Relation::kEqual : Relation::kGreaterEqual;
  row.rhs = sign * con.rhs;
  row.source_row = source;
  for (std::size_t j = 0; j < con.coefficients.size(); ++j) {
    double a = con.coefficients[j];
    if (a == 0.0) continue;
    if (map.is_first_stage(j)) {
      row.x.emplace_back(x_pos[j], sign * a);
    } else {
      row.y.emplace_back(y_pos[j], sign * a);
    }
  }
  return row;
}

void append(lp::Constraint& con, const SparseRow& row, std::size_t offset = 0) {
  for (const auto& [j, a] : row) con.coefficients[offset + j] += a;
}

// Dual-region bound on each phi: max |phi_c| over G'l + Q's + W'p + muL - muU = d.
std::vector<double> phi_bounds(const StagedProblem& sp) {
  lp::LpProblem dual;
  std::size_t n_lambda = sp.G.size(), n_sigma = sp.Q.size(), n_phi = sp.W.size();
  for (const auto& r : sp.G) {
    dual.add_variable(0.0, r.relation == Relation::kEqual ? lp::Bound{-lp::kInfinity, lp::kInfinity}
                                                           : lp::Bound{0.0, lp::kInfinity});
  }
  for (const auto& r : sp.Q) {
    dual.add_variable(0.0, r.relation == Relation::kEqual ? lp::Bound{-lp::kInfinity, lp::kInfinity}
                                                           : lp::Bound{0.0, lp::kInfinity});
  }
  for (std::size_t i = 0; i < n_phi; ++i) dual.add_variable(0.0, {-lp::kInfinity, lp::kInfinity});
  std::vector<std::size_t> mu_lo(sp.ny, kFixedSupply), mu_up(sp.ny, kFixedSupply);
  for (std::size_t j = 0; j < sp.ny; ++j) {
    if (std::isfinite(sp.y_bounds[j].lower)) mu_lo[j] = dual.add_variable(0.0, {});
    if (std::isfinite(sp.y_bounds[j].upper)) mu_up[j] = dual.add_variable(0.0, {});
  }
  std::vector<lp::Constraint> rows(sp.ny);
  for (std::size_t j = 0; j < sp.ny; ++j) {
    rows[j].coefficients.assign(dual.n_vars, 0.0);
    rows[j].relation = Relation::kEqual;
    rows[j].rhs = sp.d[j];
    if (mu_lo[j] != kFixedSupply) rows[j].coefficients[mu_lo[j]] = 1.0;
    if (mu_up[j] != kFixedSupply) rows[j].coefficients[mu_up[j]] = -1.0;
  }
  auto scatter = [&](const std::vector<BlockRow>& block, std::size_t offset) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (const auto& [j, a] : block[i].y) rows[j].coefficients[offset + i] += a;
    }
  };
  scatter(sp.G, 0);
  scatter(sp.Q, n_lambda);
  scatter(sp.W, n_lambda + n_sigma);
  dual.constraints = std::move(rows);

  std::vector<double> bound(n_phi, 0.0);
  lp::SimplexEngine engine(dual);
  std::vector<double> cost(dual.n_vars, 0.0);
  for (std::size_t i = 0; i < n_phi; ++i) {
    for (double dir : {1.0, -1.0}) {
      cost[n_lambda + n_sigma + i] = dir;
      engine.set_objective(cost);
      auto out = engine.solve();
      if (out.status == lp::LpStatus::kInfeasible) {
        throw ValidationError("staging: second-stage dual is infeasible; recourse is unbounded");
      }
      if (out.status == lp::LpStatus::kUnbounded) {
        throw ValidationError("staging: balance multiplier " + std::to_string(i) +
                              " is unbounded over the dual region; recourse is not complete");
      }
      bound[i] = std::max(bound[i], std::abs(out.objective_value));
    }
    cost[n_lambda + n_sigma + i] = 0.0;
  }
  return bound;
}

double pinned_deterministic(const network::DeterministicModel& model, const StagedProblem& sp,
                            const std::vector<double>& x, const uncertainty::Trajectory& z) {
  lp::LpProblem p = model.problem.base;
  for (std::size_t k = 0; k < sp.nx; ++k) p.var_bounds[sp.x_columns[k]] = {x[k], x[k]};
  auto rhs = w_rhs(sp, z);
  for (std::size_t i = 0; i < sp.W.size(); ++i) p.constraints[sp.W[i].source_row].rhs = rhs[i];
  auto out = lp::solve_lp(p);
  if (out.status != lp::LpStatus::kOptimal) {
    throw NumericalError("staging check: deterministic model with pinned stage one is " +
                         lp::to_string(out.status));
  }
  return out.objective_value;
}

void soundness_check(const network::DeterministicModel& model, const StagedProblem& sp,
                     const uncertainty::UncertaintySet& set, const StageOptions& options) {
  if (options.soundness_checks == 0) return;
  auto trajectories = uncertainty::sample(set, options.seed, options.soundness_checks);
  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t trial = 0; trial < options.soundness_checks; ++trial) {
    // Random on/off pattern; the LP relaxation then puts S at |delta O|.
    lp::LpProblem relaxed = model.problem.base;
    for (std::size_t k : sp.map.conversion_units()) {
      for (std::size_t t = 0; t < sp.map.periods(); ++t) {
        double o = coin(rng) ? 1.0 : 0.0;
        relaxed.var_bounds[sp.map.on(k, t)] = {o, o};
      }
    }
    auto out = lp::solve_lp(relaxed);
    // Some patterns violate minimum-output or commitment rows; nothing to compare.
    if (out.status == lp::LpStatus::kInfeasible) continue;
    if (out.status != lp::LpStatus::kOptimal) {
      throw NumericalError("staging check: relaxed deterministic model is " +
                           lp::to_string(out.status));
    }
    std::vector<double> x = first_stage_of(sp, out.primal);
    for (double& v : x) v = std::round(v);
    const auto& z = trajectories[trial];
    double expect = pinned_deterministic(model, sp, x, z);
    auto rec = solve_recourse(sp, x, z);
    if (rec.status != lp::LpStatus::kOptimal) {
      throw NumericalError("staging check: block recourse is " + lp::to_string(rec.status));
    }
    double got = first_stage_cost(sp, x) + rec.value;
    if (std::abs(got - expect) > options.soundness_tolerance * (1.0 + std::abs(expect))) {
      throw NumericalError("staging check failed: blocks give " + std::to_string(got) +
                           ", deterministic model gives " + std::to_string(expect));
    }
  }
}

}  // namespace

StagedProblem stage(const network::DeterministicModel& model, const uncertainty::UncertaintySet& set,
                    const StageOptions& options) {
  const auto& base = model.problem.base;
  const auto& map = model.map;
  StagedProblem sp;
  sp.map = map;
  sp.deterministic_rows = base.constraints.size();
  if (model.rows.size() != base.constraints.size() ||
      model.supply_arc.size() != base.constraints.size() ||
      model.supply_value.size() != base.constraints.size()) {
    throw ValidationError("staging: row tags do not match the compiled constraints");
  }

  std::vector<std::size_t> x_pos(base.n_vars, kFixedSupply), y_pos(base.n_vars, kFixedSupply);
  for (std::size_t j = 0; j < base.n_vars; ++j) {
    if (map.is_first_stage(j)) {
      x_pos[j] = sp.x_columns.size();
      sp.x_columns.push_back(j);
      sp.c.push_back(base.objective[j]);
      sp.x_bounds.push_back(base.var_bounds[j]);
    } else {
      y_pos[j] = sp.y_columns.size();
      sp.y_columns.push_back(j);
      sp.d.push_back(base.objective[j]);
      sp.y_bounds.push_back(base.var_bounds[j]);
      if (map.entry(j).kind == VarKind::kElastic) sp.elastic_y.push_back(y_pos[j]);
    }
  }
  sp.nx = sp.x_columns.size();
  sp.ny = sp.y_columns.size();

  // Every uncertain arc must feed a balance row.
  std::vector<bool> arc_used(set.arcs().size(), false);
  for (std::size_t i = 0; i < base.constraints.size(); ++i) {
    BlockRow row = split_row(base.constraints[i], x_pos, y_pos, map, i);
    if (model.supply_arc[i]) {
      if (!row.x.empty()) {
        throw ValidationError("staging: " + row_label(model, i) +
                              " mixes uncertain supply with first-stage variables");
      }
      if (row.relation != Relation::kEqual) {
        throw ValidationError("staging: " + row_label(model, i) + " carries supply but is not an equality");
      }
      const std::string& arc = map.arc_ids().at(*model.supply_arc[i]);
      const auto& arcs = set.arcs();
      auto it = std::find(arcs.begin(), arcs.end(), arc);
      std::size_t pos = kFixedSupply;
      if (it != arcs.end()) {
        pos = static_cast<std::size_t>(it - arcs.begin());
        arc_used[pos] = true;
      }
      sp.w_cell.emplace_back(pos, model.rows[i].period);
      sp.s.push_back(row.rhs - model.supply_value[i]);
      sp.fixed_supply.push_back(model.supply_value[i]);
      sp.W.push_back(std::move(row));
    } else if (row.y.empty() && row.x.empty()) {
      continue;  // constant row; the deterministic solve already vetted it
    } else if (row.y.empty()) {
      sp.A.push_back(std::move(row));
    } else if (row.x.empty()) {
      sp.G.push_back(std::move(row));
    } else {
      sp.Q.push_back(std::move(row));
    }
  }
  if (sp.W.empty()) {
    throw ValidationError("staging: the model has no gasholder balance rows to carry uncertainty");
  }
  for (std::size_t a = 0; a < arc_used.size(); ++a) {
    if (!arc_used[a]) {
      throw ValidationError("staging: uncertain arc " + set.arcs()[a] + " does not feed a gasholder");
    }
  }
  if (set.periods() != map.periods()) {
    throw ValidationError("staging: uncertainty set has " + std::to_string(set.periods()) +
                          " periods, model has " + std::to_string(map.periods()));
  }

  soundness_check(model, sp, set, options);
  sp.phi_bound = phi_bounds(sp);
  return sp;
}

std::vector<double> w_rhs(const StagedProblem& staged, const uncertainty::Trajectory& z) {
  std::vector<double> rhs(staged.W.size());
  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    auto [pos, t] = staged.w_cell[i];
    double supply = pos == kFixedSupply ? staged.fixed_supply[i] : z.at(pos).at(t);
    rhs[i] = staged.s[i] + supply;
  }
  return rhs;
}

lp::LpProblem recourse_problem(const StagedProblem& staged, const std::vector<double>& x,
                               const uncertainty::Trajectory& z) {
  if (x.size() != staged.nx) {
    throw ValidationError("first-stage vector has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(staged.nx));
  }
  lp::LpProblem p(staged.ny);
  p.objective = staged.d;
  p.var_bounds = staged.y_bounds;
  for (const auto& r : staged.G) append(p.add_constraint(r.relation, r.rhs), r.y);
  for (const auto& r : staged.Q) {
    double px = 0.0;
    for (const auto& [k, a] : r.x) px += a * x[k];
    append(p.add_constraint(r.relation, r.rhs - px), r.y);
  }
  auto rhs = w_rhs(staged, z);
  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    append(p.add_constraint(Relation::kEqual, rhs[i]), staged.W[i].y);
  }
  return p;
}

RecourseResult solve_recourse(const StagedProblem& staged, const std::vector<double>& x,
                              const uncertainty::Trajectory& z) {
  auto out = lp::solve_lp(recourse_problem(staged, x, z));
  RecourseResult r;
  r.status = out.status;
  if (out.status != lp::LpStatus::kOptimal) return r;
  r.value = out.objective_value;
  r.y = std::move(out.primal);
  for (std::size_t j : staged.elastic_y) r.elastic += r.y[j];
  return r;
}

std::vector<double> first_stage_of(const StagedProblem& staged, const std::vector<double>& full) {
  std::vector<double> x(staged.nx);
  for (std::size_t k = 0; k < staged.nx; ++k) x[k] = full.at(staged.x_columns[k]);
  return x;
}

double first_stage_cost(const StagedProblem& staged, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t k = 0; k < staged.nx; ++k) v += staged.c[k] * x[k];
  return v;
}

bool first_stage_feasible(const StagedProblem& staged, const std::vector<double>& x, double tol) {
  if (x.size() != staged.nx) return false;
  for (double v : x) {
    if (v != 0.0 && v != 1.0) return false;
  }
  for (const auto& r : staged.A) {
    double lhs = 0.0;
    for (const auto& [k, a] : r.x) lhs += a * x[k];
    if (r.relation == Relation::kEqual ? std::abs(lhs - r.rhs) > tol : lhs < r.rhs - tol) return false;
  }
  return true;
}

}  // namespace gasflow::tsro
