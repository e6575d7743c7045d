#include "gasflow/milp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "gasflow/lp/simplex.hpp"

namespace gasflow::milp {

void MilpProblem::validate() const {
  base.validate();
  std::vector<bool> seen(base.n_vars, false);
  for (std::size_t j : binary_vars) {
    if (j >= base.n_vars) {
      throw ValidationError("binary index " + std::to_string(j) + " out of range");
    }
    if (seen[j]) throw ValidationError("binary index " + std::to_string(j) + " repeated");
    seen[j] = true;
    const auto& b = base.var_bounds[j];
    if (b.lower < 0.0 || b.upper > 1.0) {
      throw ValidationError("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
    }
  }
}

std::string to_string(MilpStatus status) {
  return status == MilpStatus::kOptimal ? "optimal" : "infeasible";
}

std::string to_string(NodeDecision decision) {
  switch (decision) {
    case NodeDecision::kPrunedByBound:
      return "pruned";
    case NodeDecision::kInfeasible:
      return "infeasible";
    case NodeDecision::kIntegral:
      return "integral";
    case NodeDecision::kBranched:
      return "branched";
  }
  return "?";
}

namespace {

struct Node {
  std::size_t id;
  std::size_t parent;
  std::size_t depth;
  double bound;
  std::vector<std::int8_t> fixing;  // per binary: -1 free, else 0 or 1
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpProblem& problem, const MilpOptions& options)
      : problem_(problem), options_(options), engine_(problem.base, lp_options(options)) {
    for (std::size_t j : problem.binary_vars) {
      original_.push_back(problem.base.var_bounds[j]);
    }
  }

  MilpOutcome run() {
    const std::size_t nb = problem_.binary_vars.size();
    stack_.push_back(Node{next_id_++, 0, 0, -lp::kInfinity, std::vector<std::int8_t>(nb, -1)});

    while (true) {
      std::optional<Node> node = pop();
      if (!node) break;
      if (processed_ >= options_.node_limit) {
        std::optional<MilpOutcome> inc;
        if (incumbent_) inc = finish(node->bound);
        throw MilpLimitError("branch-and-bound node limit " + std::to_string(options_.node_limit) +
                                 " reached",
                             inc);
      }
      ++processed_;
      process(*node);
    }

    if (!incumbent_) {
      MilpOutcome out;
      out.status = MilpStatus::kInfeasible;
      out.node_count = processed_;
      return out;
    }
    return finish(lp::kInfinity);
  }

 private:
  static lp::SimplexOptions lp_options(const MilpOptions& o) {
    lp::SimplexOptions s;
    s.feasibility_tolerance = o.lp_tolerance;
    return s;
  }

  std::optional<Node> pop() {
    if (!stack_.empty()) {
      Node n = std::move(stack_.back());
      stack_.pop_back();
      return n;
    }
    if (!heap_.empty()) {
      Node n = heap_.top();
      heap_.pop();
      return n;
    }
    return std::nullopt;
  }

  void push(Node n) {
    if (incumbent_) {
      heap_.push(std::move(n));
    } else {
      stack_.push_back(std::move(n));
    }
  }

  bool prunable(double bound) const {
    if (!incumbent_) return false;
    double inc = incumbent_->objective_value;
    return bound >= inc - options_.rel_gap * std::max(1.0, std::abs(inc));
  }

  void apply(const std::vector<std::int8_t>& fixing) {
    for (std::size_t b = 0; b < fixing.size(); ++b) {
      std::size_t j = problem_.binary_vars[b];
      lp::Bound want = original_[b];
      if (fixing[b] >= 0) {
        double v = fixing[b];
        want = {std::max(v, original_[b].lower), std::min(v, original_[b].upper)};
      }
      lp::Bound have = engine_.bound(j);
      if (have.lower != want.lower || have.upper != want.upper) {
        engine_.set_bound(j, want);
      }
    }
  }

  bool fixing_consistent(const std::vector<std::int8_t>& fixing) const {
    for (std::size_t b = 0; b < fixing.size(); ++b) {
      if (fixing[b] < 0) continue;
      double v = fixing[b];
      if (v < original_[b].lower || v > original_[b].upper) return false;
    }
    return true;
  }

  void record(const Node& n, double bound, NodeDecision decision, std::size_t var) {
    if (options_.node_log != nullptr) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "node %zu depth=%zu bound=%.6f decision=%s", n.id, n.depth,
                    bound, to_string(decision).c_str());
      *options_.node_log << buf;
      if (decision == NodeDecision::kBranched) *options_.node_log << " var=" << var;
      *options_.node_log << '\n';
    }
    if (options_.audit != nullptr) {
      options_.audit->push_back(NodeRecord{n.id, n.parent, n.depth, bound, decision, var});
    }
  }

  void process(Node& node) {
    if (prunable(node.bound)) {
      record(node, node.bound, NodeDecision::kPrunedByBound, 0);
      return;
    }
    if (!fixing_consistent(node.fixing)) {
      record(node, node.bound, NodeDecision::kInfeasible, 0);
      return;
    }
    apply(node.fixing);
    lp::LpOutcome lp = engine_.solve();
    if (lp.status == lp::LpStatus::kUnbounded) {
      throw ValidationError("MILP relaxation is unbounded");
    }
    if (lp.status == lp::LpStatus::kInfeasible) {
      record(node, node.bound, NodeDecision::kInfeasible, 0);
      return;
    }
    double bound = std::max(node.bound, lp.objective_value);
    if (prunable(bound)) {
      record(node, bound, NodeDecision::kPrunedByBound, 0);
      return;
    }

    // Most fractional binary, ties to the lowest index.
    const std::size_t nb = problem_.binary_vars.size();
    std::size_t pick = nb;
    double best_frac = 0.0;
    bool near_integral = true;
    for (std::size_t b = 0; b < nb; ++b) {
      double v = lp.primal[problem_.binary_vars[b]];
      double frac = std::abs(v - std::round(v));
      if (frac > options_.integrality_tolerance) near_integral = false;
      if (frac > best_frac) {
        best_frac = frac;
        pick = b;
      }
    }

    if (near_integral) {
      bool closed = try_incumbent(node, lp, bound);
      if (closed || pick == nb) {
        record(node, bound, closed ? NodeDecision::kIntegral : NodeDecision::kInfeasible, 0);
        return;
      }
    }

    std::size_t j = problem_.binary_vars[pick];
    record(node, bound, NodeDecision::kBranched, j);
    double v = lp.primal[j];
    std::int8_t first = v >= 0.5 ? 1 : 0;
    // Pushed second so the depth-first dive visits it first.
    Node away{next_id_++, node.id, node.depth + 1, bound, node.fixing};
    away.fixing[pick] = static_cast<std::int8_t>(1 - first);
    Node toward{next_id_++, node.id, node.depth + 1, bound, std::move(node.fixing)};
    toward.fixing[pick] = first;
    if (incumbent_) {
      push(std::move(toward));
      push(std::move(away));
    } else {
      push(std::move(away));
      push(std::move(toward));
    }
  }

  // Rounds the binaries and re-solves the LP with them fixed. An improving
  // result becomes the incumbent. Returns true when the rounded point matches
  // the node bound, which closes the node.
  bool try_incumbent(const Node& node, const lp::LpOutcome& relaxed, double bound) {
    std::vector<std::int8_t> rounded(node.fixing.size());
    for (std::size_t b = 0; b < rounded.size(); ++b) {
      rounded[b] = static_cast<std::int8_t>(std::lround(relaxed.primal[problem_.binary_vars[b]]));
    }
    if (!fixing_consistent(rounded)) return false;
    apply(rounded);
    lp::LpOutcome fixed = engine_.solve();
    if (fixed.status != lp::LpStatus::kOptimal) return false;
    for (std::size_t b = 0; b < rounded.size(); ++b) {
      fixed.primal[problem_.binary_vars[b]] = rounded[b];
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < problem_.base.n_vars; ++j) {
      obj += problem_.base.objective[j] * fixed.primal[j];
    }
    bool closes = obj - bound <= 1e-6 * std::max(1.0, std::abs(obj));
    if (!incumbent_ || obj < incumbent_->objective_value) {
      bool first = !incumbent_;
      incumbent_ = MilpOutcome{};
      incumbent_->status = MilpStatus::kOptimal;
      incumbent_->assignment = std::move(fixed.primal);
      incumbent_->objective_value = obj;
      trace_.push_back(obj);
      if (first) {
        // Dive is over: switch the open nodes to best-bound order.
        for (auto& n : stack_) heap_.push(std::move(n));
        stack_.clear();
      }
    }
    return closes;
  }

  MilpOutcome finish(double open_bound) {
    while (!heap_.empty()) {
      open_bound = std::min(open_bound, heap_.top().bound);
      heap_.pop();
    }
    for (const auto& n : stack_) open_bound = std::min(open_bound, n.bound);
    MilpOutcome out = *incumbent_;
    out.node_count = processed_;
    out.incumbent_trace = trace_;
    double inc = out.objective_value;
    out.gap = std::isfinite(open_bound) ? std::max(0.0, (inc - open_bound) / std::max(1.0, std::abs(inc)))
                                        : 0.0;
    return out;
  }

  const MilpProblem& problem_;
  MilpOptions options_;
  lp::SimplexEngine engine_;
  std::vector<lp::Bound> original_;
  std::vector<Node> stack_;
  std::priority_queue<Node, std::vector<Node>, WorseBound> heap_;
  std::optional<MilpOutcome> incumbent_;
  std::vector<double> trace_;
  std::size_t next_id_ = 0;
  std::size_t processed_ = 0;
};

}  // namespace

MilpOutcome solve_milp(const MilpProblem& problem, const MilpOptions& options) {
  problem.validate();
  BranchAndBound bb(problem, options);
  return bb.run();
}

MilpOutcome solve_milp(const MilpProblem& problem, double rel_gap, std::size_t node_limit) {
  MilpOptions options;
  options.rel_gap = rel_gap;
  options.node_limit = node_limit;
  return solve_milp(problem, options);
}

MilpOutcome enumerate_oracle(const MilpProblem& problem) {
  problem.validate();
  const std::size_t nb = problem.binary_vars.size();
  if (nb > 20) {
    throw ValidationError("enumerate_oracle refuses " + std::to_string(nb) + " binaries (max 20)");
  }
  MilpOutcome best;
  best.status = MilpStatus::kInfeasible;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
    lp::LpProblem p = problem.base;
    bool ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      double v = static_cast<double>((mask >> b) & 1U);
      auto& bound = p.var_bounds[problem.binary_vars[b]];
      if (v < bound.lower || v > bound.upper) ok = false;
      bound = {v, v};
    }
    ++best.node_count;
    if (!ok) continue;
    lp::LpOutcome lp = lp::solve_lp(p);
    if (lp.status == lp::LpStatus::kUnbounded) throw ValidationError("MILP relaxation is unbounded");
    if (lp.status != lp::LpStatus::kOptimal) continue;
    if (best.status == MilpStatus::kInfeasible || lp.objective_value < best.objective_value) {
      best.status = MilpStatus::kOptimal;
      best.objective_value = lp.objective_value;
      best.assignment = lp.primal;
    }
  }
  return best;
}

}  // namespace gasflow::milp
