#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "miblp/milp.hpp"
#include "miblp/model.hpp"

namespace miblp {

// Second-level semantics: the follower's value function, the optimistic
// reaction, feasibility classification of relaxation solutions, and the
// certificates (improving solution / improving direction) that drive cut
// generation.

struct BilevelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CertificateKind { improving_solution, improving_direction };

struct Certificate {
  CertificateKind kind = CertificateKind::improving_solution;
  // improving_solution: a follower point y* feasible for the follower at x̂,
  // integral, with d2 y* strictly below d2 ŷ.
  std::vector<double> ystar;
  // improving_direction: an integral step Δy with d2 Δy <= -1 keeping ŷ+Δy
  // follower-feasible, plus flags marking which follower rows / lower bounds
  // stay slack along the step (used to shrink the bilevel-free set).
  std::vector<double> delta_y;
  std::vector<bool> drops_w;  // per second-level row
  std::vector<bool> drops_v;  // per second-level lower bound
};

struct FeasibilityVerdict {
  bool in_p = false;          // satisfies both row blocks and the box
  bool violates_c1 = false;   // x fractional on an integer index
  bool violates_2a = false;   // first-level rows fail
  bool violates_2b = false;   // y fractional on an integer index
  bool violates_2c = false;   // d2 y exceeds the follower optimum
  std::optional<double> phi_value;         // empty when the follower is infeasible
  std::optional<Certificate> certificate;  // present for 2c when one exists

  bool bilevel_feasible() const {
    return in_p && !violates_c1 && !violates_2a && !violates_2b && !violates_2c;
  }
};

enum class SolutionCategory { c1, c2, c3, feasible };

struct SecondLevelSolve {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> argmin;
};

// Follower problem at fixed x: min d2 y over G2 y >= b2 - A2 x, y integral on
// its integer indices, within bounds.
SecondLevelSolve solve_second_level(const MiblpInstance& inst,
                                    const std::vector<double>& x);

// Value function of the follower; empty means infeasible (treated as +inf).
std::optional<double> phi(const MiblpInstance& inst, const std::vector<double>& x);

// Optimistic reaction: among the follower's optimal responses, the one the
// leader likes best that also satisfies the first-level rows at x. Empty when
// no such response exists.
std::optional<std::vector<double>> reaction(const MiblpInstance& inst,
                                            const std::vector<double>& x);

FeasibilityVerdict check_feasibility(const MiblpInstance& inst, const Point& p);

SolutionCategory classify_relaxation_solution(const MiblpInstance& inst, const Point& p);

// Best objective over bilevel-feasible points whose linking variables equal
// gamma (ordered as inst.linking). The follower optimum is constant on that
// slice, so one value-function solve plus one MILP suffices.
std::optional<std::pair<Point, double>> best_ub(const MiblpInstance& inst,
                                                const std::vector<double>& gamma);

// Searches for an improving direction at p by maximizing the number of
// follower rows and lower bounds left slack along the step. Empty when no
// integral direction with d2 dy <= -1 keeps ŷ+Δy follower-feasible.
std::optional<Certificate> find_improving_direction(const MiblpInstance& inst,
                                                    const Point& p);

// Big-M for the binary Benders cut: max d2 y over the integer-feasible
// relaxation region, minus d2 y*. Zero when that region is empty.
double compute_big_m(const MiblpInstance& inst, const std::vector<double>& ystar);

}  // namespace miblp
