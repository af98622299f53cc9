#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace miblp {

// Feasibility and integrality tolerance used for solver decisions throughout.
inline constexpr double kEps = 1e-6;

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  std::vector<double> row(int i) const {
    return {a.begin() + static_cast<std::ptrdiff_t>(i) * cols,
            a.begin() + static_cast<std::ptrdiff_t>(i + 1) * cols};
  }

  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

double dot(const std::vector<double>& u, const std::vector<double>& v);
double row_dot(const Mat& m, int i, const std::vector<double>& v);

bool is_integral(double v, double tol = kEps);
bool is_integral(const std::vector<double>& v, double tol = kEps);
bool is_integral(const Mat& m, double tol = kEps);

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class RowSense { ge, le, eq };

// Interdiction shape: the leader spends a budget to knock out follower
// variables. Stored in canonical >= form alongside the instance.
struct Interdiction {
  Mat budget_a;                       // budget rows over x only
  std::vector<double> budget_b;
  Mat follower_g;                     // the follower's own rows over y (no interdiction rows)
  std::vector<double> follower_rhs;
  std::vector<double> u;              // interdiction bounds, one per linking variable

  bool operator==(const Interdiction& o) const = default;
};

// Canonical two-level problem data. Both objectives minimize, every row reads
// lhs >= rhs, and all variables carry finite box bounds. The first r1 of the
// x variables and the first r2 of the y variables are integer.
struct MiblpInstance {
  int n1 = 0;
  int n2 = 0;
  int r1 = 0;
  int r2 = 0;
  std::vector<double> c;   // leader objective on x
  std::vector<double> d1;  // leader objective on y
  std::vector<double> d2;  // follower objective on y
  Mat a1, g1;              // first-level block  a1 x + g1 y >= b1
  std::vector<double> b1;
  Mat a2, g2;              // second-level block a2 x + g2 y >= b2
  std::vector<double> b2;
  std::vector<double> lx, ux, ly, uy;
  std::vector<int> linking;  // indices i with column a2_i nonzero, sorted
  std::optional<Interdiction> interdiction;

  int m1() const { return a1.rows; }
  int m2() const { return a2.rows; }

  bool operator==(const MiblpInstance& o) const = default;
};

struct Point {
  std::vector<double> x;
  std::vector<double> y;
};

struct AssumptionReport {
  bool bounded = false;
  bool no_unbounded_ray = false;  // second-level objective has no improving recession ray
  bool linking_integer = false;

  bool all() const { return bounded && no_unbounded_ray && linking_integer; }
};

// Mixed-sense input form, before normalization.
struct RawInstance {
  int n1 = 0;
  int n2 = 0;
  int r1 = 0;
  int r2 = 0;
  bool leader_maximize = false;
  bool follower_maximize = false;
  std::vector<double> c, d1, d2;
  Mat a1, g1;
  std::vector<double> b1;
  std::vector<RowSense> s1;
  Mat a2, g2;
  std::vector<double> b2;
  std::vector<RowSense> s2;
  std::vector<double> lx, ux, ly, uy;
  std::optional<Interdiction> interdiction;
};

// Normalizes senses to >= and both objectives to minimization, splits
// equalities, computes the linking set, and validates the basic shape
// requirements (finite bounds, integer linking variables, m2 >= 1).
MiblpInstance canonicalize(const RawInstance& raw);

// Round trip back to the mixed-sense form (all rows >=); canonicalize of the
// result reproduces the instance, which is what idempotence means here.
RawInstance to_raw(const MiblpInstance& inst);

AssumptionReport check_assumptions(const MiblpInstance& inst);

std::vector<int> linking_set(const MiblpInstance& inst);

// Row residuals a x + g y - b for one block; negative entries are violations.
std::vector<double> block_residuals(const Mat& a, const Mat& g, const std::vector<double>& b,
                                    const std::vector<double>& x, const std::vector<double>& y);

bool within_bounds(const std::vector<double>& v, const std::vector<double>& lo,
                   const std::vector<double>& hi, double tol = kEps);

}  // namespace miblp
