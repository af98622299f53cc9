#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "miblp/bilevel.hpp"
#include "miblp/cuts.hpp"

namespace miblp {

// Branch-and-cut driver. Nodes restrict the variable box, share one global
// cut pool, and are explored best-bound with depth-first plunging. A node
// whose vertex is bilevel feasible updates the incumbent and closes; a vertex
// that is integral but not bilevel feasible must be separated or branched
// away, so cut generation at such vertices ignores the usual gating.

struct SearchError : std::runtime_error {
  explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

// When the intersection cut families are invoked: everywhere, at the root
// only, or only at vertices with the named block integral (linking variables,
// the whole leader and follower part, the follower part, or either).
enum class IcStrategy { always, always_root, xy_int, l_int, y_int, yl_int };

enum class BranchRule { fractional, linking, second_level };

// Snapshot taken every time the driver accepts a freshly generated cut, before
// it enters the pool. Geometry fields are filled for the intersection cut
// families; incumbent_value is the incumbent at the moment of emission, which
// improving-scope cuts are entitled to lean on.
struct CutEvent {
  CutOrigin origin = CutOrigin::integrality;
  Cut cut;
  std::vector<double> vertex;  // joint (x, y) the cut separates
  double incumbent_value = kInf;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> boundary_points;
  std::optional<BfsSet> bfs;
};

struct SolverConfig {
  std::set<CutOrigin> cuts;                     // enabled cut families
  std::map<CutOrigin, IcStrategy> ic_strategy;  // per intersection-cut family
  BranchRule branching = BranchRule::fractional;
  double tailoff_threshold = 0.05;  // relative bound gain that keeps cutting
  int max_cut_rounds = 50;
  bool milp_integrality_cuts = true;
  long max_nodes = 200000;
  double time_limit_seconds = 0.0;  // 0 disables the clock
  double eps = kEps;
  // Drops direction cuts below the root when the root produced none.
  bool idic_early_shutoff = false;
  // Called once per accepted cut; meant for validation harnesses.
  std::function<void(const CutEvent&)> cut_observer;

  IcStrategy strategy_for(CutOrigin family) const;
};

// Family bundle matched to the instance shape: interdiction gets both Benders
// families and linking branching, a binary first level gets the Benders and
// no-good families, and everything else leans on the intersection cuts.
SolverConfig default_config(const MiblpInstance& inst);

// Shape of the current LP vertex, all the gating decisions read from here.
// Node vertices always satisfy both row blocks, so integrality alone decides
// membership in the integer-feasible set.
struct VertexStructure {
  bool x_integral = false;        // leader integer part
  bool y_integral = false;        // follower integer part
  bool linking_integral = false;
  bool in_s = false;
  bool linking_fixed = false;     // every linking variable pinned by the node box
  int depth = 0;
};

VertexStructure classify_vertex(const MiblpInstance& inst,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                const std::vector<double>& z, int depth);

// Whether a cut family should be attempted at a vertex of this shape. The
// no-good family needs an integral vertex, the families built from a pinned
// linking assignment need the linking part integral, and the intersection
// cut families follow the configured strategy.
bool should_generate(CutOrigin family, const VertexStructure& vs, IcStrategy strategy,
                     int depth);

// Which auxiliary problems to solve at a vertex before cutting: the follower
// problem when the vertex is integral, when every linking variable is fixed
// (the node then closes against the slice optimum), or when an enabled family
// needs a follower certificate; the slice upper bound whenever a family that
// excludes a linking assignment could fire.
struct OraclePolicy {
  bool solve_second_level = false;
  bool solve_ub = false;
};

OraclePolicy oracle_policy(const VertexStructure& vs, const SolverConfig& config);

// Average objective gain per unit of bound change, kept per variable and
// direction; unseen directions count as one.
struct Pseudocosts {
  std::vector<double> down_sum, up_sum;
  std::vector<long> down_n, up_n;

  void ensure(int n);
  void record(int var, bool up, double gain_per_unit);
  double estimate(int var, bool up) const;
  // Product rule: down and up estimates scaled by the fractional distances.
  double score(int var, double frac) const;
};

struct SearchNode {
  std::vector<double> lower, upper;  // node box over (x, y)
  std::vector<int> cuts;             // pool entries first added at this node
  std::optional<Basis> warm;
  int depth = 0;
  double bound = -kInf;
  long id = 0;

  // How this node was created, for pseudocost updates.
  int branch_var = -1;
  bool branch_up = false;
  double branch_dist = 1.0;
  double parent_bound = -kInf;
};

// var is a joint index into (x, y); integer_split means children value / value+1
// around an integral LP value rather than floor / ceil of a fractional one.
struct BranchDecision {
  int var = -1;
  double value = 0.0;
  bool integer_split = false;
};

// Candidates by rule: fractional integer variables, unfixed linking variables
// (integral LP values allowed), or follower-side fractional variables before
// leader-side ones. Picks the best pseudocost score, ties to the lowest
// index; empty when the rule yields no candidate.
std::optional<BranchDecision> select_branching(const MiblpInstance& inst,
                                               const SearchNode& node, const LpResult& lp,
                                               BranchRule rule, const Pseudocosts& pc);

// Continue cutting while the last round moved the node bound by at least the
// threshold, relative to max(1, |previous bound|).
bool tailoff_check(const std::vector<double>& bound_history, double threshold);

// Chvatal-Gomory rounding cuts from the vertex cone, one per fractional
// integer variable. Only derived when every binding row is exact integer data
// valid for the integer-feasible set itself: original rows, original bounds,
// or appended rows flagged integral-set-valid. Cuts from weaker rows would
// only hold for bilevel-feasible points, which is not what rounding proves.
std::vector<Cut> simple_integrality_cuts(const MiblpInstance& inst, const NodeLp& node,
                                         const std::vector<bool>& appended_set_valid);

struct ClassStats {
  long cg_calls = 0;
  long cuts_added = 0;
  long fail_no_certificate = 0;
  long fail_cone_contained = 0;
  long fail_not_applicable = 0;

  long failures() const {
    return fail_no_certificate + fail_cone_contained + fail_not_applicable;
  }
};

struct SolveStats {
  long nodes = 0;
  long second_level_solves = 0;
  long ub_solves = 0;
  long big_m_solves = 0;
  long improving_searches = 0;   // two-stage improving-solution subproblems
  long direction_searches = 0;   // improving-direction subproblems
  std::map<CutOrigin, ClassStats> per_class;
  std::vector<double> bound_events;  // global lower bound after each change
  double root_bound_before_cuts = 0.0;
  double root_bound_after_cuts = 0.0;
  double root_gap_before = 0.0;  // against the final incumbent
  double root_gap_after = 0.0;
  double time_lp = 0.0;
  double time_oracle = 0.0;
  double time_cuts = 0.0;
  double time_total = 0.0;
};

enum class SolveStatus { optimal, limit, infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Point> incumbent;
  double incumbent_value = kInf;
  double lower_bound = kInf;
  double gap = 0.0;
  SolveStats stats;
};

// Runs the tree to completion or to a limit. The returned incumbent has been
// re-checked against the full feasibility test, and status optimal means the
// tree closed with the bound matching the incumbent.
SolveResult solve(const MiblpInstance& inst, const SolverConfig& config);

}  // namespace miblp
