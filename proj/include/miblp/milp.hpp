#pragma once

#include <optional>
#include <vector>

#include "miblp/simplex.hpp"

namespace miblp {

// Branch-and-bound MILP solver used as the oracle for every subproblem the
// bilevel machinery spawns. Correctness and determinism over speed: no cuts,
// no heuristics, fixed branching order.

struct MilpProblem {
  LpProblem lp;
  std::vector<int> integer_vars;
  // When set, only solutions with objective <= cutoff - eps are of interest;
  // the search may prune everything above that line.
  std::optional<double> cutoff;
};

enum class MilpStatus { optimal, infeasible, cutoff_exceeded, limit };

struct MilpLimits {
  long max_nodes = 500000;
};

struct MilpResult {
  MilpStatus status = MilpStatus::infeasible;
  std::vector<double> solution;   // incumbent; empty if none found
  double objective = 0.0;
  long node_count = 0;

  bool has_solution() const { return !solution.empty(); }
};

// Depth-first branch and bound, branching on the most fractional integer
// variable (lowest index on ties), down branch explored first. Returns the
// global optimum; with a cutoff, status cutoff_exceeded means the problem is
// feasible but every solution lies above the cutoff line.
MilpResult solve_milp(const MilpProblem& p, const MilpLimits& limits = {});

}  // namespace miblp
