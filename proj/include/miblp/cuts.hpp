#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "miblp/bilevel.hpp"
#include "miblp/model.hpp"
#include "miblp/simplex.hpp"

namespace miblp {

// Cutting planes that separate relaxation vertices from the bilevel feasible
// region. Every cut reads alpha_x x + alpha_y y >= beta and carries a scope
// describing where it may be enforced: everywhere, only while searching below
// the incumbent, or everywhere except one fixed linking slice (which the
// caller must have accounted for separately before asking for such a cut).

// Margin used when testing whether a vertex sits strictly inside a
// bilevel-free set; anything closer to the boundary is rejected.
inline constexpr double kInteriorMargin = 1e-7;

struct CutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScopeKind { global, improving, linking_excluding };

struct CutScope {
  ScopeKind kind = ScopeKind::global;
  std::vector<double> gamma;  // excluded linking slice, ordered as inst.linking

  static CutScope global_scope() { return {}; }
  static CutScope improving_scope() { return {ScopeKind::improving, {}}; }
  static CutScope excluding(std::vector<double> g) {
    return {ScopeKind::linking_excluding, std::move(g)};
  }

  bool operator==(const CutScope&) const = default;
};

enum class CutOrigin {
  improving_solution_ic,
  improving_solution_ic_relaxed,
  improving_direction_ic,
  hypercube_ic,
  integer_no_good,
  benders_binary,
  benders_interdiction,
  generalized_no_good,
  integrality,
};

struct Cut {
  std::vector<double> alpha_x, alpha_y;
  double beta = 0.0;
  CutScope scope;
  CutOrigin origin = CutOrigin::integrality;

  double value_at(const std::vector<double>& x, const std::vector<double>& y) const;
  bool satisfied_by(const std::vector<double>& x, const std::vector<double>& y,
                    double tol = kEps) const;
};

// Joint coefficient row (alpha_x followed by alpha_y), the form in which a
// cut is appended to a node LP.
std::vector<double> joint_row(const Cut& c);

// Rescales a cut by a positive factor: when every coefficient and the right
// hand side are small rationals, clears denominators and divides out the gcd;
// otherwise scales the largest coefficient magnitude to one.
void normalize_cut(Cut& c);

// Closed convex set H z >= h over the joint (x, y) space whose strict
// interior contains no bilevel feasible point.
struct BfsSet {
  Mat rows;
  std::vector<double> rhs;

  bool strictly_interior(const std::vector<double>& z, double margin = kInteriorMargin) const;
};

enum class CutFailure { none, no_certificate, cone_contained, not_applicable };

struct CutResult {
  std::optional<Cut> cut;
  CutFailure failure = CutFailure::none;
  // Intersection geometry when an IC recipe ran: one step length per cone
  // ray (infinite when the ray never leaves the set), the finite boundary
  // points, which lie on the cut hyperplane, and the bilevel-free set the
  // rays were walked against.
  std::vector<double> lambdas;
  std::vector<std::vector<double>> boundary_points;
  std::optional<BfsSet> bfs;

  bool ok() const { return cut.has_value(); }
};

// A node LP over the joint space together with its optimal solve. Rows
// beyond the instance's two blocks are appended cuts; extra_row_scope
// records one scope per such row so validity of derived objects can be
// judged. Branching is expressed through the variable bounds.
struct NodeLp {
  LpProblem lp;
  LpResult result;
  std::vector<CutScope> extra_row_scope;
};

// LP over (x, y) with both row blocks, box bounds, and the leader objective;
// integrality and follower optimality are dropped.
LpProblem joint_relaxation(const MiblpInstance& inst);

// Solves the joint relaxation at the root. Empty when infeasible.
std::optional<NodeLp> solve_relaxation(const MiblpInstance& inst);

// Simplicial cone at the node vertex assembled only from rows that hold for
// every bilevel feasible point: instance rows, original box bounds, and
// appended rows with global scope. Tightened branching bounds never qualify,
// so the basis cone is repaired from other binding rows when it leans on
// them; empty when no such cone exists at the vertex.
std::optional<ConeRays> global_cone(const MiblpInstance& inst, const NodeLp& node);

// Generic intersection cut: walks every cone ray to the boundary of the
// bilevel-free set and spans the cut through the crossing points. Fails with
// cone_contained when no ray ever leaves the set, and refuses vertices that
// are not strictly interior.
CutResult intersection_cut(const ConeRays& cone, const BfsSet& bfs, int n1,
                           CutOrigin origin, CutScope scope);

// Bilevel-free set certified by an improving follower solution y*: points
// where the follower could switch to y* and win. Rows listed in drop_rows
// were proved loose for every leader choice and are omitted, enlarging the
// set.
BfsSet bfs_improving_solution(const MiblpInstance& inst, const std::vector<double>& ystar,
                              const std::vector<bool>& drop_rows = {});

// Bilevel-free set certified by an improving follower direction: points that
// could take the step and improve. The certificate's drop flags mark rows
// and bounds that stay satisfied along the step everywhere.
BfsSet bfs_improving_direction(const MiblpInstance& inst, const Certificate& cert);

// Hypercube around one integral linking slice: unit box on the linking
// variables, free elsewhere.
BfsSet bfs_hypercube(const MiblpInstance& inst, const std::vector<double>& gamma);

// Improving follower solution search that does not fix the leader: picks y*
// and, per follower row, either certifies the row at the worst leader choice
// (the row can then be dropped from the bilevel-free set) or charges it to
// the vertex being cut. Minimizes the number of charged rows, then the
// follower objective. Empty when no improving y* exists at the vertex.
struct ImprovingSolution {
  std::vector<double> ystar;
  std::vector<bool> drop_rows;
};
std::optional<ImprovingSolution> find_improving_solution(const MiblpInstance& inst,
                                                         const Point& p);

// Token proving the caller already solved for the best bilevel objective on
// one linking slice; generators whose cuts may remove that slice demand it.
struct UbEvidence {
  std::vector<double> gamma;
};

// Intersection cut from a supplied improving solution y*.
CutResult gen_isic_type1(const MiblpInstance& inst, const NodeLp& node,
                         const std::vector<double>& ystar);

// Intersection cut from the relaxed improving-solution search, with row
// drops applied.
CutResult gen_isic_type2(const MiblpInstance& inst, const NodeLp& node);

// Intersection cut from an improving direction certificate.
CutResult gen_idic(const MiblpInstance& inst, const NodeLp& node);

// Intersection cut from the unit hypercube around the vertex's linking
// values; scope excludes that slice, hence the evidence requirement.
CutResult gen_hypercube_ic(const MiblpInstance& inst, const NodeLp& node,
                           const UbEvidence& evidence);

// Removes exactly one integer point of the relaxation lattice by summing a
// spanning set of binding instance rows and bounds in exact integer
// arithmetic and pushing the right hand side past the vertex. Pure integer
// instances with integral data only; the caller must know the vertex is not
// bilevel feasible.
CutResult gen_integer_no_good(const MiblpInstance& inst, const NodeLp& node);

// Benders style optimality cut for binary linking variables: the follower
// value may beat d2 y* only if some linking variable moved in a direction
// that shrinks the follower's feasible region, and each such move relaxes
// the cut by big_m.
CutResult gen_benders_binary(const MiblpInstance& inst, const NodeLp& node,
                             const std::vector<double>& ystar, double big_m);

// Stronger Benders cut for interdiction instances, built from the signs of
// the follower's own constraint columns.
CutResult gen_benders_interdiction(const MiblpInstance& inst, const NodeLp& node,
                                   const std::vector<double>& ystar, double big_m);

// Excludes one binary linking slice outright: some variable in the slice
// must flip. Valid everywhere except the slice itself.
CutResult gen_generalized_no_good(const MiblpInstance& inst, const std::vector<double>& gamma,
                                  const UbEvidence& evidence);

}  // namespace miblp
