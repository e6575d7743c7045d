#include "gasflow/lp/lp_problem.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gasflow/errors.hpp"

namespace gasflow::lp {

LpProblem::LpProblem(std::size_t n)
    : n_vars(n), objective(n, 0.0), var_bounds(n, Bound{}) {}

std::size_t LpProblem::add_variable(double cost, Bound bound) {
  objective.push_back(cost);
  var_bounds.push_back(bound);
  for (auto& row : constraints) row.coefficients.push_back(0.0);
  return n_vars++;
}

Constraint& LpProblem::add_constraint(Relation relation, double rhs) {
  constraints.push_back(Constraint{std::vector<double>(n_vars, 0.0), relation, rhs});
  return constraints.back();
}

void LpProblem::validate() const {
  if (objective.size() != n_vars) {
    throw ValidationError("objective has " + std::to_string(objective.size()) +
                          " entries, expected " + std::to_string(n_vars));
  }
  if (var_bounds.size() != n_vars) {
    throw ValidationError("var_bounds has " + std::to_string(var_bounds.size()) +
                          " entries, expected " + std::to_string(n_vars));
  }
  for (std::size_t j = 0; j < n_vars; ++j) {
    const auto& b = var_bounds[j];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
        b.lower == kInfinity || b.upper == -kInfinity) {
      throw ValidationError("variable " + std::to_string(j) + " has invalid bounds");
    }
    if (!std::isfinite(objective[j])) {
      throw ValidationError("variable " + std::to_string(j) + " has a non-finite cost");
    }
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& row = constraints[i];
    if (row.coefficients.size() != n_vars) {
      throw ValidationError("constraint " + std::to_string(i) + " has " +
                            std::to_string(row.coefficients.size()) +
                            " coefficients, expected " + std::to_string(n_vars));
    }
    if (!std::isfinite(row.rhs)) {
      throw ValidationError("constraint " + std::to_string(i) + " has a non-finite rhs");
    }
    for (double a : row.coefficients) {
      if (!std::isfinite(a)) {
        throw ValidationError("constraint " + std::to_string(i) +
                              " has a non-finite coefficient");
      }
    }
  }
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

std::string to_string(Relation relation) {
  switch (relation) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kGreaterEqual:
      return ">=";
    case Relation::kEqual:
      return "=";
  }
  return "?";
}

namespace {

std::string fixed(double v) {
  if (v == kInfinity) return "inf";
  if (v == -kInfinity) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string dump_tableau(const LpProblem& problem) {
  std::ostringstream out;
  out << "min";
  for (double c : problem.objective) out << ' ' << fixed(c);
  out << '\n';
  for (const auto& row : problem.constraints) {
    for (std::size_t j = 0; j < row.coefficients.size(); ++j) {
      if (j > 0) out << ' ';
      out << fixed(row.coefficients[j]);
    }
    out << ' ' << to_string(row.relation) << ' ' << fixed(row.rhs) << '\n';
  }
  out << "bounds";
  for (const auto& b : problem.var_bounds) {
    out << " [" << fixed(b.lower) << ',' << fixed(b.upper) << ']';
  }
  out << '\n';
  return out.str();
}

}  // namespace gasflow::lp
