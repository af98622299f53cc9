#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "miblp/model.hpp"

namespace miblp {

// Ground-truth enumeration of the bilevel feasible region for small boxed
// instances. Everything downstream is validated against this.

struct BruteforceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnumerationResult {
  // All bilevel feasible points with their leader value, in lattice order.
  // For instances with continuous follower variables the set holds one
  // optimistic representative per first-level assignment instead.
  std::vector<std::pair<Point, double>> feasible_set;
  std::optional<std::pair<Point, double>> optimum;
  // Follower optimum per linking assignment; empty value = infeasible.
  std::map<std::vector<long long>, std::optional<double>> phi_table;
};

// Direct path: double loop over the integer lattice, no solver involved
// beyond small LPs for continuous follower parts. Requires all first-level
// variables integer; throws when the lattice exceeds cap.
EnumerationResult enumerate(const MiblpInstance& inst, long cap = 1000000);

// Independent path: walks the same lattice but decides membership through
// check_feasibility and fills the value table through the follower oracle.
// Much slower (one oracle solve per lattice point); meant for cross-checking
// on tiny instances. Requires a pure-integer instance.
EnumerationResult enumerate_by_membership(const MiblpInstance& inst, long cap = 1000000);

}  // namespace miblp
