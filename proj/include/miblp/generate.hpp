#pragma once

#include <optional>
#include <string>

#include "miblp/model.hpp"

namespace miblp {

// Random instance families mirroring the usual benchmark sets at desk scale.
// Generation uses integer arithmetic on a seeded mt19937 stream only, so the
// same seed yields the same instance on every platform, and every instance
// comes out satisfying the solver assumptions.
enum class GenFamily {
  // Pure integer, no first-level rows, second-level rows in >= form with
  // strictly negative coefficients (a covering structure).
  den_like,
  // Pure integer, no first-level rows, <= rows with mixed-sign coefficients.
  den2_like,
  // Binary first level, integer second level, <= rows with nonnegative
  // coefficients and the two objectives aligned to a normalized inner
  // product strictly between 0.6 and 0.8.
  zhang_like,
  // Zero-sum knapsack interdiction: unit budget row for the leader, one
  // follower knapsack plus one blocking row per item.
  knapsack_interdiction,
};

struct GenParams {
  int n1 = 3;
  int n2 = 3;
  int m2 = 4;       // second-level rows (ignored by knapsack_interdiction)
  int ub = 10;      // variable box upper bound where the family leaves it free
  unsigned seed = 0;
};

MiblpInstance generate(GenFamily family, const GenParams& params);

// Accepts both the short spellings used on the command line ("den", "den2",
// "zhang", "knapsack") and the full family names above.
std::optional<GenFamily> family_from_name(const std::string& name);
std::string family_name(GenFamily family);

}  // namespace miblp
