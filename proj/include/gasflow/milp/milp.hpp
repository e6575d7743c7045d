#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gasflow/errors.hpp"
#include "gasflow/lp/lp_problem.hpp"

namespace gasflow::milp {

struct MilpProblem {
  lp::LpProblem base;
  std::vector<std::size_t> binary_vars;

  /// Base problem invariants plus binary indices in range, unique, and
  /// bounded within [0, 1].
  void validate() const;
};

enum class MilpStatus { kOptimal, kInfeasible };

std::string to_string(MilpStatus status);

struct MilpOutcome {
  MilpStatus status = MilpStatus::kInfeasible;
  std::vector<double> assignment;  // binaries exactly 0 or 1
  double objective_value = 0.0;
  std::size_t node_count = 0;
  double gap = 0.0;
  /// Objective after each incumbent update, in order.
  std::vector<double> incumbent_trace;
};

enum class NodeDecision { kPrunedByBound, kInfeasible, kIntegral, kBranched };

std::string to_string(NodeDecision decision);

struct NodeRecord {
  std::size_t id = 0;
  std::size_t parent = 0;  // equals id for the root
  std::size_t depth = 0;
  double bound = 0.0;      // LP value, or the inherited bound when pruned unsolved
  NodeDecision decision = NodeDecision::kBranched;
  std::size_t branch_var = 0;
};

struct MilpOptions {
  double rel_gap = 1e-6;
  std::size_t node_limit = 200000;
  double lp_tolerance = 1e-6;
  /// Values within this distance of 0 or 1 count as integral before cleanup.
  double integrality_tolerance = 1e-6;
  std::ostream* node_log = nullptr;
  std::vector<NodeRecord>* audit = nullptr;
};

/// Raised when the node limit is hit. Carries the incumbent when one exists.
class MilpLimitError : public ResourceLimitError {
 public:
  MilpLimitError(const std::string& what, std::optional<MilpOutcome> incumbent)
      : ResourceLimitError(what), incumbent_(std::move(incumbent)) {}
  const std::optional<MilpOutcome>& incumbent() const { return incumbent_; }

 private:
  std::optional<MilpOutcome> incumbent_;
};

MilpOutcome solve_milp(const MilpProblem& problem, const MilpOptions& options);
MilpOutcome solve_milp(const MilpProblem& problem, double rel_gap = 1e-6,
                       std::size_t node_limit = 200000);

/// Solves one LP per binary assignment and keeps the best. Test oracle only;
/// refuses more than 20 binaries.
MilpOutcome enumerate_oracle(const MilpProblem& problem);

}  // namespace gasflow::milp
