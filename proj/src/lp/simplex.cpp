#include "gasflow/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gasflow/errors.hpp"

namespace gasflow::lp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr double kResidualRefactor = 1e-8;

}  // namespace

SimplexEngine::SimplexEngine(const LpProblem& problem, SimplexOptions options)
    : options_(options) {
  problem.validate();
  n_ = problem.n_vars;
  original_rows_ = problem.constraints.size();

  std::vector<double> row_lower;
  std::vector<double> row_upper;
  for (std::size_t i = 0; i < original_rows_; ++i) {
    const auto& row = problem.constraints[i];
    bool empty = std::all_of(row.coefficients.begin(), row.coefficients.end(),
                             [](double a) { return a == 0.0; });
    double lo = row.relation == Relation::kLessEqual ? -kInfinity : row.rhs;
    double up = row.relation == Relation::kGreaterEqual ? kInfinity : row.rhs;
    if (empty) {
      if (lo > 0.0 || up < 0.0) empty_row_conflict_ = true;
      continue;
    }
    kept_rows_.push_back(i);
    row_lower.push_back(lo);
    row_upper.push_back(up);
  }
  m_ = kept_rows_.size();

  columns_.assign(n_ + m_, {});
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& coeffs = problem.constraints[kept_rows_[r]].coefficients;
    for (std::size_t j = 0; j < n_; ++j) {
      if (coeffs[j] != 0.0) columns_[j].emplace_back(r, coeffs[j]);
    }
    columns_[n_ + r].emplace_back(r, -1.0);
  }
  compute_scaling();

  cost_.assign(n_ + m_, 0.0);
  lower_.assign(n_ + m_, 0.0);
  upper_.assign(n_ + m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    cost_[j] = problem.objective[j] * scale_[j];
    lower_[j] = problem.var_bounds[j].lower / scale_[j];
    upper_[j] = problem.var_bounds[j].upper / scale_[j];
    max_cost_ = std::max(max_cost_, std::abs(cost_[j]));
  }
  for (std::size_t r = 0; r < m_; ++r) {
    lower_[n_ + r] = row_lower[r] / scale_[n_ + r];
    upper_[n_ + r] = row_upper[r] / scale_[n_ + r];
  }

  state_.assign(n_ + m_, State::kLower);
  x_.assign(n_ + m_, 0.0);
  reset_to_slack_basis();

  iteration_limit_ = options_.iteration_limit > 0 ? options_.iteration_limit
                                                  : 50 * (m_ + n_) + 1000;
}

void SimplexEngine::compute_scaling() {
  // Geometric-mean passes over rows and structural columns, rounded to powers
  // of two so scaling itself adds no rounding error.
  std::vector<double> row(m_, 1.0), col(n_, 1.0);
  auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<double> lo(m_, kInfinity), hi(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      for (const auto& [r, a] : columns_[j]) {
        double v = std::abs(a) * row[r] * col[j];
        lo[r] = std::min(lo[r], v);
        hi[r] = std::max(hi[r], v);
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (hi[r] > 0.0) row[r] *= pow2(1.0 / std::sqrt(lo[r] * hi[r]));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double clo = kInfinity, chi = 0.0;
      for (const auto& [r, a] : columns_[j]) {
        double v = std::abs(a) * row[r] * col[j];
        clo = std::min(clo, v);
        chi = std::max(chi, v);
      }
      if (chi > 0.0) col[j] *= pow2(1.0 / std::sqrt(clo * chi));
    }
  }
  scale_.assign(n_ + m_, 1.0);
  row_scale_ = row;
  for (std::size_t j = 0; j < n_; ++j) {
    scale_[j] = col[j];
    for (auto& [r, a] : columns_[j]) a *= row[r] * col[j];
  }
  // Logical s_r = a_r x is scaled with its row: s'_r = row_r * s_r.
  for (std::size_t r = 0; r < m_; ++r) scale_[n_ + r] = 1.0 / row[r];
}

Bound SimplexEngine::bound(std::size_t var) const {
  return {lower_[var] * scale_[var], upper_[var] * scale_[var]};
}

void SimplexEngine::reset_to_slack_basis() {
  head_.resize(m_);
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  for (std::size_t r = 0; r < m_; ++r) {
    head_[r] = n_ + r;
    state_[n_ + r] = State::kBasic;
  }
  binv_ = -Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_),
                                     static_cast<Eigen::Index>(m_));
  factored_ = true;
  pivots_since_refactor_ = 0;
  primal_dirty_ = true;
}

void SimplexEngine::place_nonbasic(std::size_t j) {
  State current = state_[j];
  bool lo_finite = std::isfinite(lower_[j]);
  bool up_finite = std::isfinite(upper_[j]);
  if (current == State::kUpper && up_finite) {
    state_[j] = State::kUpper;
  } else if (lo_finite) {
    state_[j] = State::kLower;
  } else if (up_finite) {
    state_[j] = State::kUpper;
  } else {
    state_[j] = State::kZero;
  }
  x_[j] = nonbasic_value(j);
}

double SimplexEngine::nonbasic_value(std::size_t j) const {
  switch (state_[j]) {
    case State::kLower:
      return lower_[j];
    case State::kUpper:
      return upper_[j];
    default:
      return 0.0;
  }
}

void SimplexEngine::set_bound(std::size_t var, Bound bound) {
  if (var >= n_) throw ValidationError("set_bound: variable index out of range");
  if (std::isnan(bound.lower) || std::isnan(bound.upper) || bound.lower > bound.upper) {
    throw ValidationError("set_bound: invalid bound pair");
  }
  lower_[var] = bound.lower / scale_[var];
  upper_[var] = bound.upper / scale_[var];
  if (state_[var] != State::kBasic) place_nonbasic(var);
  primal_dirty_ = true;
}

void SimplexEngine::set_objective(const std::vector<double>& objective) {
  if (objective.size() != n_) throw ValidationError("set_objective: expected " + std::to_string(n_) + " costs");
  max_cost_ = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (!std::isfinite(objective[j])) throw ValidationError("set_objective: non-finite cost");
    cost_[j] = objective[j] * scale_[j];
    max_cost_ = std::max(max_cost_, std::abs(cost_[j]));
  }
}

double SimplexEngine::column_dot(const Eigen::VectorXd& y, std::size_t j) const {
  double s = 0.0;
  for (const auto& [r, a] : columns_[j]) s += y[static_cast<Eigen::Index>(r)] * a;
  return s;
}

Eigen::VectorXd SimplexEngine::ftran(std::size_t j) const {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  for (const auto& [r, a] : columns_[j]) alpha += a * binv_.col(static_cast<Eigen::Index>(r));
  return alpha;
}

void SimplexEngine::refactor() {
  const auto m = static_cast<Eigen::Index>(m_);
  if (m == 0) {
    factored_ = true;
    pivots_since_refactor_ = 0;
    return;
  }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t r = 0; r < m_; ++r) {
    for (const auto& [i, a] : columns_[head_[r]]) {
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = a;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
  lu.setThreshold(1e-11);
  if (!lu.isInvertible()) {
    // Drift left a singular basis; restart from the logicals.
    reset_to_slack_basis();
    return;
  }
  binv_ = lu.inverse();
  factored_ = true;
  pivots_since_refactor_ = 0;
  primal_dirty_ = true;
}

void SimplexEngine::recompute_primal() {
  const auto m = static_cast<Eigen::Index>(m_);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic) continue;
    x_[j] = nonbasic_value(j);
    if (x_[j] == 0.0) continue;
    for (const auto& [r, a] : columns_[j]) rhs[static_cast<Eigen::Index>(r)] += a * x_[j];
  }
  Eigen::VectorXd xb = -(binv_ * rhs);
  for (std::size_t r = 0; r < m_; ++r) x_[head_[r]] = xb[static_cast<Eigen::Index>(r)];
  primal_dirty_ = false;
}

void SimplexEngine::pivot(std::size_t row, std::size_t entering,
                          const Eigen::VectorXd& alpha) {
  const auto r = static_cast<Eigen::Index>(row);
  const double p = alpha[r];
  binv_.row(r) /= p;
  Eigen::RowVectorXd pivot_row = binv_.row(r);
  Eigen::VectorXd col = alpha;
  col[r] = 0.0;
  binv_.noalias() -= col * pivot_row;
  head_[row] = entering;
  state_[entering] = State::kBasic;
  ++pivots_since_refactor_;

  bool check = pivots_since_refactor_ >= options_.refactor_interval;
  if (!check && pivots_since_refactor_ % 20 == 0) {
    // Cheap residual probe on the entering column: B^{-1} a_q must be e_r.
    Eigen::VectorXd probe = ftran(entering);
    probe[r] -= 1.0;
    check = probe.lpNorm<Eigen::Infinity>() > kResidualRefactor;
  }
  if (check) {
    refactor();
    recompute_primal();
  }
}

double SimplexEngine::feas_tol(double bound) const {
  return kPrimalTol * (1.0 + (std::isfinite(bound) ? std::abs(bound) : 0.0));
}

double SimplexEngine::dual_tol(std::size_t j) const {
  return kDualTol * (1.0 + std::abs(cost_[j]) + 1e-3 * max_cost_);
}

double SimplexEngine::infeasibility(std::size_t var) const {
  double v = x_[var];
  if (v < lower_[var] - feas_tol(lower_[var])) return lower_[var] - v;
  if (v > upper_[var] + feas_tol(upper_[var])) return v - upper_[var];
  return 0.0;
}

double SimplexEngine::row_residual() const {
  std::vector<double> activity(m_, 0.0);
  std::vector<double> scale(m_, 1.0);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    for (const auto& [r, a] : columns_[j]) {
      activity[r] += a * x_[j];
      scale[r] = std::max(scale[r], std::abs(a * x_[j]));
    }
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < m_; ++r) worst = std::max(worst, std::abs(activity[r]) / scale[r]);
  return worst;
}

bool SimplexEngine::primal_feasible() const {
  for (std::size_t r = 0; r < m_; ++r) {
    if (infeasibility(head_[r]) > 0.0) return false;
  }
  return true;
}

Eigen::VectorXd SimplexEngine::basic_costs(Phase phase) const {
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
  for (std::size_t r = 0; r < m_; ++r) {
    std::size_t v = head_[r];
    if (phase == Phase::kTwo) {
      cb[static_cast<Eigen::Index>(r)] = cost_[v];
    } else if (x_[v] < lower_[v] - feas_tol(lower_[v])) {
      cb[static_cast<Eigen::Index>(r)] = -1.0;
    } else if (x_[v] > upper_[v] + feas_tol(upper_[v])) {
      cb[static_cast<Eigen::Index>(r)] = 1.0;
    } else {
      cb[static_cast<Eigen::Index>(r)] = 0.0;
    }
  }
  return cb;
}

Eigen::VectorXd SimplexEngine::reduced_costs(const Eigen::VectorXd& y) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_ + m_));
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic) continue;
    d[static_cast<Eigen::Index>(j)] = cost_[j] - column_dot(y, j);
  }
  return d;
}

void SimplexEngine::count_iteration(double step) {
  if (++iterations_ > iteration_limit_) {
    throw NumericalError("simplex iteration limit reached (" +
                         std::to_string(iteration_limit_) + ")");
  }
  if (std::abs(step) <= kDegenerateStep) {
    if (++degenerate_run_ >= options_.degenerate_pivot_limit) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
}

SimplexEngine::Result SimplexEngine::primal(Phase phase) {
  const double piv_tol = options_.pivot_tolerance;
  while (true) {
    Eigen::VectorXd cb = basic_costs(phase);
    if (phase == Phase::kOne && cb.isZero(0.0)) return Result::kOptimal;
    Eigen::VectorXd y = binv_.transpose() * cb;

    // Pricing.
    std::size_t q = n_ + m_;
    double best = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      State s = state_[j];
      if (s == State::kBasic || lower_[j] == upper_[j]) continue;
      double c = phase == Phase::kTwo ? cost_[j] : 0.0;
      double d = c - column_dot(y, j);
      double tol = phase == Phase::kTwo ? dual_tol(j) : kDualTol;
      bool improving = (d < -tol && s != State::kUpper) ||
                       (d > tol && s != State::kLower);
      if (!improving) continue;
      if (bland_) {
        q = j;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
      }
    }
    if (q == n_ + m_) {
      if (phase == Phase::kOne) {
        certificate_.assign(original_rows_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
          certificate_[kept_rows_[r]] = y[static_cast<Eigen::Index>(r)];
        }
        return Result::kInfeasible;
      }
      return Result::kOptimal;
    }

    double dq = (phase == Phase::kTwo ? cost_[q] : 0.0) - column_dot(y, q);
    double dir = dq < 0.0 ? 1.0 : -1.0;
    Eigen::VectorXd alpha = ftran(q);

    // Ratio test. x_B moves by -dir * alpha per unit step.
    double theta = kInfinity;
    std::size_t leave = m_;
    double leave_value = 0.0;
    double leave_pivot = 0.0;
    if (std::isfinite(lower_[q]) && std::isfinite(upper_[q])) {
      theta = upper_[q] - lower_[q];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double a = alpha[static_cast<Eigen::Index>(r)];
      if (std::abs(a) <= piv_tol) continue;
      double delta = -dir * a;
      std::size_t v = head_[r];
      double lo = lower_[v];
      double up = upper_[v];
      double xv = x_[v];
      double target;
      if (phase == Phase::kOne && xv < lo - feas_tol(lo)) {
        // Infeasible below: blocks on reaching its lower bound.
        if (delta <= 0.0) continue;
        target = lo;
      } else if (phase == Phase::kOne && xv > up + feas_tol(up)) {
        if (delta >= 0.0) continue;
        target = up;
      } else if (delta > 0.0) {
        if (!std::isfinite(up)) continue;
        target = up;
      } else {
        if (!std::isfinite(lo)) continue;
        target = lo;
      }
      double t = std::max(0.0, (target - xv) / delta);
      bool take;
      if (leave == m_) {
        take = t < theta;
      } else if (bland_) {
        take = t < theta - 1e-12 || (t <= theta + 1e-12 && v < head_[leave]);
      } else {
        take = t < theta - 1e-12 || (t <= theta + 1e-12 && std::abs(a) > std::abs(leave_pivot));
      }
      if (take) {
        theta = t;
        leave = r;
        leave_value = target;
        leave_pivot = a;
      }
    }

    if (!std::isfinite(theta)) {
      if (phase == Phase::kOne) {
        throw NumericalError("phase one ray without a blocking variable");
      }
      certificate_.assign(n_, 0.0);
      if (q < n_) certificate_[q] = dir;
      for (std::size_t r = 0; r < m_; ++r) {
        if (head_[r] < n_) certificate_[head_[r]] = -dir * alpha[static_cast<Eigen::Index>(r)];
      }
      return Result::kUnbounded;
    }

    count_iteration(theta);
    x_[q] += dir * theta;
    for (std::size_t r = 0; r < m_; ++r) {
      x_[head_[r]] -= dir * theta * alpha[static_cast<Eigen::Index>(r)];
    }
    if (leave == m_) {
      state_[q] = state_[q] == State::kLower ? State::kUpper : State::kLower;
      x_[q] = nonbasic_value(q);
      continue;
    }
    std::size_t out = head_[leave];
    x_[out] = leave_value;
    state_[out] = leave_value == lower_[out] ? State::kLower : State::kUpper;
    if (!std::isfinite(lower_[out]) && !std::isfinite(upper_[out])) state_[out] = State::kZero;
    pivot(leave, q, alpha);
  }
}

bool SimplexEngine::flip_to_dual_feasible(const Eigen::VectorXd& d) {
  bool feasible = true;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    State s = state_[j];
    if (s == State::kBasic || lower_[j] == upper_[j]) continue;
    double dj = d[static_cast<Eigen::Index>(j)];
    double tol = dual_tol(j);
    bool wrong = (s == State::kLower && dj < -tol) || (s == State::kUpper && dj > tol) ||
                 (s == State::kZero && std::abs(dj) > tol);
    if (!wrong) continue;
    if (std::isfinite(lower_[j]) && std::isfinite(upper_[j])) {
      state_[j] = s == State::kLower ? State::kUpper : State::kLower;
      primal_dirty_ = true;
    } else {
      feasible = false;
    }
  }
  return feasible;
}

SimplexEngine::Result SimplexEngine::dual() {
  const double piv_tol = options_.pivot_tolerance;
  Eigen::VectorXd d = reduced_costs(binv_.transpose() * basic_costs(Phase::kTwo));
  if (!flip_to_dual_feasible(d)) return Result::kDualInfeasible;
  if (primal_dirty_) recompute_primal();

  while (true) {
    // Leaving row: largest bound violation.
    std::size_t leave = m_;
    double worst = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      double inf = infeasibility(head_[r]);
      if (inf <= 0.0) continue;
      if (bland_) {
        if (leave == m_ || head_[r] < head_[leave]) leave = r;
      } else if (inf > worst) {
        worst = inf;
        leave = r;
      }
    }
    if (leave == m_) return Result::kOptimal;

    std::size_t out = head_[leave];
    bool below = x_[out] < lower_[out];
    double target = below ? lower_[out] : upper_[out];
    Eigen::VectorXd rho = binv_.row(static_cast<Eigen::Index>(leave)).transpose();

    std::size_t q = n_ + m_;
    double best_ratio = kInfinity;
    double best_alpha = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      State s = state_[j];
      if (s == State::kBasic || lower_[j] == upper_[j]) continue;
      double a = column_dot(rho, j);
      if (std::abs(a) <= piv_tol) continue;
      // x_out changes by -a per unit increase of x_j.
      bool can_up = s != State::kUpper;
      bool can_down = s != State::kLower;
      bool eligible = below ? ((a < 0.0 && can_up) || (a > 0.0 && can_down))
                            : ((a > 0.0 && can_up) || (a < 0.0 && can_down));
      if (!eligible) continue;
      double ratio = std::abs(d[static_cast<Eigen::Index>(j)]) / std::abs(a);
      bool take;
      if (q == n_ + m_) {
        take = true;
      } else if (bland_) {
        take = ratio < best_ratio - 1e-12;
      } else {
        take = ratio < best_ratio - 1e-12 ||
               (ratio <= best_ratio + 1e-12 && std::abs(a) > std::abs(best_alpha));
      }
      if (take) {
        q = j;
        best_ratio = ratio;
        best_alpha = a;
      }
    }
    if (q == n_ + m_) {
      certificate_.assign(original_rows_, 0.0);
      double sign = below ? 1.0 : -1.0;
      for (std::size_t r = 0; r < m_; ++r) {
        certificate_[kept_rows_[r]] = sign * rho[static_cast<Eigen::Index>(r)];
      }
      return Result::kInfeasible;
    }

    Eigen::VectorXd alpha = ftran(q);
    const double arq = alpha[static_cast<Eigen::Index>(leave)];
    if (std::abs(arq) <= piv_tol) {
      // Row and column computations disagree; refresh and retry.
      refactor();
      recompute_primal();
      d = reduced_costs(binv_.transpose() * basic_costs(Phase::kTwo));
      if (!flip_to_dual_feasible(d)) return Result::kDualInfeasible;
      if (primal_dirty_) recompute_primal();
      count_iteration(0.0);
      continue;
    }

    const double theta_d = d[static_cast<Eigen::Index>(q)] / arq;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic) continue;
      double a = column_dot(rho, j);
      if (a != 0.0) d[static_cast<Eigen::Index>(j)] -= theta_d * a;
    }
    d[static_cast<Eigen::Index>(q)] = 0.0;
    d[static_cast<Eigen::Index>(out)] = -theta_d;

    const double step = (x_[out] - target) / arq;
    count_iteration(theta_d);
    x_[q] += step;
    for (std::size_t r = 0; r < m_; ++r) {
      x_[head_[r]] -= step * alpha[static_cast<Eigen::Index>(r)];
    }
    x_[out] = target;
    state_[out] = below ? State::kLower : State::kUpper;
    std::size_t before = pivots_since_refactor_;
    pivot(leave, q, alpha);
    if (pivots_since_refactor_ < before) {
      d = reduced_costs(binv_.transpose() * basic_costs(Phase::kTwo));
      if (!flip_to_dual_feasible(d)) return Result::kDualInfeasible;
      if (primal_dirty_) recompute_primal();
    }
  }
}

LpOutcome SimplexEngine::solve() {
  certificate_.clear();
  iterations_ = 0;
  degenerate_run_ = 0;
  bland_ = false;
  if (empty_row_conflict_) {
    certificate_.assign(original_rows_, 0.0);
    return finish(LpStatus::kInfeasible);
  }
  if (!factored_) refactor();
  if (primal_dirty_) recompute_primal();

  for (int round = 0; round < 8; ++round) {
    if (!primal_feasible()) {
      Result r = dual();
      if (r == Result::kInfeasible) {
        // Confirm with phase one before reporting.
        if (primal(Phase::kOne) == Result::kInfeasible) return finish(LpStatus::kInfeasible);
      } else if (r == Result::kDualInfeasible) {
        if (primal_dirty_) recompute_primal();
        if (primal(Phase::kOne) == Result::kInfeasible) return finish(LpStatus::kInfeasible);
      }
    }
    Result r = primal(Phase::kTwo);
    if (r == Result::kUnbounded) return finish(LpStatus::kUnbounded);

    if (row_residual() <= kResidualRefactor && primal_feasible()) {
      return finish(LpStatus::kOptimal);
    }
    refactor();
    recompute_primal();
  }
  throw NumericalError("simplex failed to reach a stable feasible basis");
}

LpOutcome SimplexEngine::finish(LpStatus status) {
  LpOutcome out;
  out.status = status;
  out.iterations = iterations_;
  out.certificate = certificate_;
  if (status == LpStatus::kUnbounded) {
    for (std::size_t j = 0; j < out.certificate.size(); ++j) out.certificate[j] *= scale_[j];
  } else if (status == LpStatus::kInfeasible) {
    for (std::size_t r = 0; r < m_ && !out.certificate.empty(); ++r) out.certificate[kept_rows_[r]] *= row_scale_[r];
  }
  if (status != LpStatus::kOptimal) return out;

  Eigen::VectorXd y = binv_.transpose() * basic_costs(Phase::kTwo);
  std::vector<double> internal(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    if (state_[j] != State::kBasic) internal[j] = nonbasic_value(j);
  }
  out.primal.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) out.primal[j] = internal[j] * scale_[j];
  out.duals.assign(original_rows_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    out.duals[kept_rows_[r]] = y[static_cast<Eigen::Index>(r)] * row_scale_[r];
  }
  out.reduced_costs.assign(n_, 0.0);
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (j < n_) primal_obj += cost_[j] * internal[j];
    if (state_[j] == State::kBasic) continue;
    double dj = cost_[j] - column_dot(y, j);
    if (j < n_) out.reduced_costs[j] = dj / scale_[j];
    dual_obj += dj * nonbasic_value(j);
  }
  out.objective_value = primal_obj;
  out.dual_objective = dual_obj;
  return out;
}

LpOutcome solve_lp(const LpProblem& problem, double tol) {
  SimplexOptions options;
  options.feasibility_tolerance = tol;
  SimplexEngine engine(problem, options);
  return engine.solve();
}

}  // namespace gasflow::lp
