#include "miblp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace miblp {

namespace {

constexpr double kPruneTol = 1e-9;

struct Node {
  std::vector<double> lower, upper;
  std::optional<Basis> warm;
  double bound;  // LP value of the parent, valid lower bound for the subtree
};

// Most fractional integer variable; ints must be sorted so ties resolve to
// the lowest index. Returns -1 when integral within eps.
int pick_branch_var(const std::vector<double>& z, const std::vector<int>& ints) {
  int best = -1;
  double best_frac = kEps;
  for (int j : ints) {
    double f = std::abs(z[j] - std::round(z[j]));
    if (f > best_frac) {
      best_frac = f;
      best = j;
    }
  }
  return best;
}

MilpResult solve_internal(const MilpProblem& p, const MilpLimits& limits,
                          bool stop_at_first) {
  const double inf = std::numeric_limits<double>::infinity();
  MilpResult res;

  std::vector<int> ints = p.integer_vars;
  std::sort(ints.begin(), ints.end());
  ints.erase(std::unique(ints.begin(), ints.end()), ints.end());
  for (int j : ints)
    if (j < 0 || j >= p.lp.num_vars())
      throw std::invalid_argument("integer variable index out of range");

  const double cutoff_u = p.cutoff ? *p.cutoff - kEps : inf;
  double inc_obj = inf;
  bool have_inc = false;
  bool cutoff_pruned = false;
  bool hit_limit = false;

  std::vector<Node> stack;
  stack.push_back({p.lp.lower, p.lp.upper, std::nullopt, -inf});
  long nodes = 0;

  while (!stack.empty()) {
    if (nodes >= limits.max_nodes) {
      hit_limit = true;
      break;
    }
    Node nd = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    double gate = std::min(inc_obj - kPruneTol, cutoff_u);
    if (nd.bound > gate) {
      if (nd.bound > cutoff_u) cutoff_pruned = true;
      continue;
    }

    LpProblem lp = p.lp;
    lp.lower = nd.lower;
    lp.upper = nd.upper;
    LpResult lr = solve_lp(lp, nd.warm);
    if (lr.status == LpStatus::infeasible) continue;
    if (lr.status != LpStatus::optimal)
      throw SimplexError("relaxation solve failed inside branch and bound");

    double bound = lr.objective;
    if (bound > gate) {
      if (bound > cutoff_u) cutoff_pruned = true;
      continue;
    }

    int j = pick_branch_var(lr.solution, ints);
    if (j < 0) {
      if (bound < inc_obj - 1e-12) {
        inc_obj = bound;
        res.solution = lr.solution;
        have_inc = true;
        if (stop_at_first) break;
      }
      continue;
    }

    double fl = std::floor(lr.solution[j]);
    Node up_child{nd.lower, nd.upper, lr.basis, bound};
    up_child.lower[j] = fl + 1.0;
    Node down_child{std::move(nd.lower), std::move(nd.upper), lr.basis, bound};
    down_child.upper[j] = fl;
    if (up_child.lower[j] <= up_child.upper[j] + 1e-12) stack.push_back(std::move(up_child));
    // pushed last so the down branch is explored first
    if (down_child.upper[j] >= down_child.lower[j] - 1e-12)
      stack.push_back(std::move(down_child));
  }

  res.node_count = nodes;
  if (hit_limit) {
    res.status = MilpStatus::limit;
    if (have_inc) res.objective = inc_obj;
    return res;
  }
  if (have_inc) {
    res.status = MilpStatus::optimal;
    res.objective = inc_obj;
    return res;
  }
  if (cutoff_pruned && !stop_at_first) {
    // Everything above the cutoff was discarded; decide between infeasible
    // and cutoff_exceeded with a feasibility-only search.
    MilpProblem q = p;
    q.cutoff.reset();
    MilpResult probe = solve_internal(q, limits, true);
    res.node_count += probe.node_count;
    if (probe.status == MilpStatus::limit)
      res.status = MilpStatus::limit;
    else
      res.status = probe.has_solution() ? MilpStatus::cutoff_exceeded
                                        : MilpStatus::infeasible;
    return res;
  }
  res.status = cutoff_pruned ? MilpStatus::cutoff_exceeded : MilpStatus::infeasible;
  return res;
}

}  // namespace

MilpResult solve_milp(const MilpProblem& p, const MilpLimits& limits) {
  return solve_internal(p, limits, false);
}

}  // namespace miblp
