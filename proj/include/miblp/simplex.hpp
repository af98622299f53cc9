#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "miblp/model.hpp"

namespace miblp {

// Treated as infinity for surplus upper bounds.
inline constexpr double kInf = 1e30;

struct LpProblem {
  std::vector<double> objective;
  Mat rows;  // every row reads lhs >= rhs
  std::vector<double> rhs;
  std::vector<double> lower, upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
};

enum class LpStatus { optimal, infeasible, error };

enum class VarStatus : unsigned char { basic, at_lower, at_upper };

// Basic/nonbasic partition over structural variables followed by one surplus
// per row; active_rows lists the original row indices in basis row order.
struct Basis {
  std::vector<int> basic;
  std::vector<VarStatus> status;
  std::vector<int> active_rows;
};

struct LpResult {
  LpStatus status = LpStatus::error;
  std::vector<double> solution;
  double objective = 0.0;
  Basis basis;
  double phase1_objective = 0.0;
  int iterations = 0;
};

struct SimplexError : std::runtime_error {
  explicit SimplexError(const std::string& what) : std::runtime_error(what) {}
};

LpResult solve_lp(const LpProblem& p, const std::optional<Basis>& warm = std::nullopt);

// Dense Gaussian elimination with partial pivoting; nullopt when the matrix is
// singular to working precision. Shared by the cone and cut algebra.
std::optional<std::vector<double>> solve_dense_system(std::vector<std::vector<double>> a,
                                                      std::vector<double> b);

enum class BindingKind : unsigned char { constraint, lower_bound, upper_bound };

// Simplicial radial cone at a vertex: n linearly independent binding rows
// H z >= h and one ray per row, scaled to unit infinity norm, satisfying
// H r_j = t e_j for some t > 0 (ray j relaxes exactly its own row).
struct ConeRays {
  std::vector<double> vertex;
  std::vector<std::vector<double>> rays;
  Mat binding_rows;
  std::vector<double> binding_rhs;
  std::vector<BindingKind> binding_kind;
  std::vector<int> binding_index;  // original row index, or variable index for bound rows

  int dim() const { return static_cast<int>(vertex.size()); }
};

ConeRays extract_cone(const LpProblem& p, const LpResult& r);

// Builds the cone directly from a chosen nonsingular binding system; throws
// SimplexError when the rows are not linearly independent.
ConeRays cone_from_binding_rows(const std::vector<double>& vertex, const Mat& rows,
                                const std::vector<double>& rhs,
                                const std::vector<BindingKind>& kinds,
                                const std::vector<int>& indices);

}  // namespace miblp
