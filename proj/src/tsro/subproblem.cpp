#include "gasflow/tsro/subproblem.hpp"

#include <cmath>
#include <string>

#include "gasflow/errors.hpp"

namespace gasflow::tsro {

using lp::Relation;

namespace {

lp::Bound sign_bound(Relation rel) {
  return rel == Relation::kEqual ? lp::Bound{-lp::kInfinity, lp::kInfinity} : lp::Bound{0.0, lp::kInfinity};
}

}  // namespace

DualSubproblem build_subproblem(const StagedProblem& staged, const std::vector<double>& x,
                                const uncertainty::UncertaintySet& set,
                                const SubproblemOptions& options) {
  if (x.size() != staged.nx) {
    throw ValidationError("subproblem: first-stage vector has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(staged.nx));
  }
  if (options.big_m_safety < 1.0) throw ValidationError("subproblem: big-M safety factor below 1");
  DualSubproblem sub;
  sub.arcs = set.arcs().size();
  sub.periods = set.periods();
  auto& lp = sub.problem.base;
  const auto& nominal = set.nominal();

  // Objective terms are negated: the MILP minimizes.
  sub.lambda_offset = lp.n_vars;
  sub.n_lambda = staged.G.size();
  for (const auto& r : staged.G) lp.add_variable(-r.rhs, sign_bound(r.relation));
  sub.sigma_offset = lp.n_vars;
  sub.n_sigma = staged.Q.size();
  for (const auto& r : staged.Q) {
    double px = 0.0;
    for (const auto& [k, a] : r.x) px += a * x[k];
    lp.add_variable(-(r.rhs - px), sign_bound(r.relation));
  }
  sub.phi_offset = lp.n_vars;
  sub.n_phi = staged.W.size();
  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    auto [pos, t] = staged.w_cell[i];
    double z0 = pos == kFixedSupply ? staged.fixed_supply[i] : nominal[pos][t];
    lp.add_variable(-(staged.s[i] + z0), {-lp::kInfinity, lp::kInfinity});
  }
  std::vector<std::size_t> mu_lo(staged.ny, kFixedSupply), mu_up(staged.ny, kFixedSupply);
  for (std::size_t j = 0; j < staged.ny; ++j) {
    const auto& b = staged.y_bounds[j];
    if (std::isfinite(b.lower)) mu_lo[j] = lp.add_variable(-b.lower, {});
    if (std::isfinite(b.upper)) mu_up[j] = lp.add_variable(b.upper, {});
  }

  // Indicator and product columns for cells that can move.
  sub.xi_plus.assign(staged.W.size(), kFixedSupply);
  sub.xi_minus.assign(staged.W.size(), kFixedSupply);
  sub.big_m.assign(staged.W.size(), 0.0);
  struct Cell {
    std::size_t row, pi_plus, pi_minus;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    auto [pos, t] = staged.w_cell[i];
    if (pos == kFixedSupply) continue;
    double up = set.plus()[pos][t], down = set.minus()[pos][t];
    double m = options.big_m_safety * staged.phi_bound.at(i);
    sub.big_m[i] = m;
    Cell cell{i, kFixedSupply, kFixedSupply};
    if (up > 0.0) {
      sub.xi_plus[i] = lp.add_variable(0.0, {0.0, 1.0});
      cell.pi_plus = lp.add_variable(-up, {-m, m});
    }
    if (down > 0.0) {
      sub.xi_minus[i] = lp.add_variable(0.0, {0.0, 1.0});
      cell.pi_minus = lp.add_variable(-down, {-m, m});
    }
    cells.push_back(cell);
  }

  // Dual feasibility: G'lambda + Q'sigma + W'phi + muL - muU = d, one row per y.
  std::vector<std::size_t> first_row(staged.ny);
  for (std::size_t j = 0; j < staged.ny; ++j) {
    first_row[j] = lp.constraints.size();
    auto& row = lp.add_constraint(Relation::kEqual, staged.d[j]);
    if (mu_lo[j] != kFixedSupply) row.coefficients[mu_lo[j]] = 1.0;
    if (mu_up[j] != kFixedSupply) row.coefficients[mu_up[j]] = -1.0;
  }
  auto scatter = [&](const std::vector<BlockRow>& block, std::size_t offset) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (const auto& [j, a] : block[i].y) lp.constraints[first_row[j]].coefficients[offset + i] += a;
    }
  };
  scatter(staged.G, sub.lambda_offset);
  scatter(staged.Q, sub.sigma_offset);
  scatter(staged.W, sub.phi_offset);
  sub.dual_rows = staged.ny;

  // pi+ <= M xi+, pi+ <= phi + M(1 - xi+); pi- <= M xi-, pi- <= -phi + M(1 - xi-).
  for (const auto& cell : cells) {
    const std::size_t phi = sub.phi_offset + cell.row;
    const double m = sub.big_m[cell.row];
    auto link = [&](std::size_t pi, std::size_t xi, double phi_sign) {
      auto& a = lp.add_constraint(Relation::kLessEqual, 0.0);
      a.coefficients[pi] = 1.0;
      a.coefficients[xi] = -m;
      auto& b = lp.add_constraint(Relation::kLessEqual, m);
      b.coefficients[pi] = 1.0;
      b.coefficients[phi] = -phi_sign;
      b.coefficients[xi] = m;
    };
    if (cell.pi_plus != kFixedSupply) link(cell.pi_plus, sub.xi_plus[cell.row], 1.0);
    if (cell.pi_minus != kFixedSupply) link(cell.pi_minus, sub.xi_minus[cell.row], -1.0);
    if (cell.pi_plus != kFixedSupply && cell.pi_minus != kFixedSupply) {
      auto& one = lp.add_constraint(Relation::kLessEqual, 1.0);
      one.coefficients[sub.xi_plus[cell.row]] = 1.0;
      one.coefficients[sub.xi_minus[cell.row]] = 1.0;
    }
  }

  // Budget per arc.
  for (std::size_t a = 0; a < sub.arcs; ++a) {
    auto& row = lp.add_constraint(Relation::kLessEqual, set.budgets()[a]);
    bool any = false;
    for (std::size_t i = 0; i < staged.W.size(); ++i) {
      if (staged.w_cell[i].first != a) continue;
      for (std::size_t xi : {sub.xi_plus[i], sub.xi_minus[i]}) {
        if (xi == kFixedSupply) continue;
        row.coefficients[xi] = 1.0;
        any = true;
      }
    }
    if (!any) lp.constraints.pop_back();
  }

  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    for (std::size_t xi : {sub.xi_plus[i], sub.xi_minus[i]}) {
      if (xi != kFixedSupply) sub.problem.binary_vars.push_back(xi);
    }
  }
  return sub;
}

SubproblemResult solve_subproblem(const DualSubproblem& sub, const StagedProblem& staged,
                                  const std::vector<double>& x,
                                  const uncertainty::UncertaintySet& set,
                                  const SubproblemOptions& options) {
  milp::MilpOptions mo;
  mo.rel_gap = options.rel_gap;
  mo.node_limit = options.node_limit;
  auto out = milp::solve_milp(sub.problem, mo);
  if (out.status != milp::MilpStatus::kOptimal) {
    throw NumericalError("subproblem: dual MILP is infeasible; the recourse LP is unbounded");
  }
  SubproblemResult r;
  r.beta = -out.objective_value;
  r.nodes = out.node_count;
  r.indicators = uncertainty::ScenarioIndicators::zeros(sub.arcs, sub.periods);
  for (std::size_t i = 0; i < staged.W.size(); ++i) {
    auto [pos, t] = staged.w_cell[i];
    if (pos == kFixedSupply) continue;
    if (sub.xi_plus[i] != kFixedSupply && out.assignment[sub.xi_plus[i]] > 0.5) {
      r.indicators.plus[pos][t] = 1;
    }
    if (sub.xi_minus[i] != kFixedSupply && out.assignment[sub.xi_minus[i]] > 0.5) {
      r.indicators.minus[pos][t] = 1;
    }
  }
  r.scenario = uncertainty::realize(set, r.indicators);
  auto rec = solve_recourse(staged, x, r.scenario);
  if (rec.status != lp::LpStatus::kOptimal) {
    throw NumericalError("subproblem audit: recourse LP at the worst scenario is " +
                         lp::to_string(rec.status));
  }
  r.primal_value = rec.value;
  r.elastic = rec.elastic;
  if (std::abs(r.beta - r.primal_value) > options.audit_tolerance * (1.0 + std::abs(r.primal_value))) {
    throw NumericalError("subproblem audit: dual optimum " + std::to_string(r.beta) +
                         " differs from recourse value " + std::to_string(r.primal_value) +
                         " at the worst scenario");
  }
  return r;
}

SubproblemResult worst_case(const StagedProblem& staged, const std::vector<double>& x,
                            const uncertainty::UncertaintySet& set, const SubproblemOptions& options) {
  return solve_subproblem(build_subproblem(staged, x, set, options), staged, x, set, options);
}

}  // namespace gasflow::tsro
