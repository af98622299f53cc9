#pragma once

// Slow, independent reference implementations used only by tests. These are
// deliberately written with different algorithms than the library (vertex
// enumeration instead of simplex, lattice scans instead of branch and
// bound) so agreement is meaningful.

#include <cmath>
#include <optional>
#include <vector>

#include "miblp/milp.hpp"
#include "miblp/simplex.hpp"

namespace miblp::testing {

// Plain Gaussian elimination; empty result when the system is singular.
inline std::optional<std::vector<double>> gauss_solve(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 1e-9;
    for (int i = col; i < n; ++i)
      if (std::abs(a[i][col]) > best) {
        best = std::abs(a[i][col]);
        piv = i;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      double f = a[i][col] / a[col][col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[i][j] -= f * a[col][j];
      b[i] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Minimum objective over all vertices of the LP's feasible region, found by
// trying every n-subset of {constraint rows, bound rows}. Empty = infeasible.
inline std::optional<double> lp_vertex_oracle(const LpProblem& p, double tol = 1e-7) {
  int n = p.num_vars();
  int m = p.num_rows();
  // candidate rows: constraints, then x_j >= l_j, then -x_j >= -u_j
  int total = m + 2 * n;
  auto row_of = [&](int k) {
    std::vector<double> coef(n, 0.0);
    double rhs;
    if (k < m) {
      coef = p.rows.row(k);
      rhs = p.rhs[k];
    } else if (k < m + n) {
      coef[k - m] = 1.0;
      rhs = p.lower[k - m];
    } else {
      coef[k - m - n] = -1.0;
      rhs = -p.upper[k - m - n];
    }
    return std::make_pair(coef, rhs);
  };

  std::optional<double> best;
  std::vector<int> pick(n);
  // iterate over all n-combinations of [0, total)
  for (int i = 0; i < n; ++i) pick[i] = i;
  if (n == 0) return 0.0;
  while (true) {
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
      auto [coef, rhs] = row_of(pick[i]);
      a[i] = coef;
      b[i] = rhs;
    }
    if (auto z = gauss_solve(a, b)) {
      bool ok = true;
      for (int j = 0; j < n && ok; ++j)
        if ((*z)[j] < p.lower[j] - tol || (*z)[j] > p.upper[j] + tol) ok = false;
      for (int i = 0; i < m && ok; ++i)
        if (row_dot(p.rows, i, *z) < p.rhs[i] - tol) ok = false;
      if (ok) {
        double obj = dot(p.objective, *z);
        if (!best || obj < *best) best = obj;
      }
    }
    // next combination
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// Exhaustive lattice scan for all-integer MILPs with small boxes. Honors the
// cutoff the same way the contract states it: values above cutoff - eps do
// not count. Empty = no qualifying point.
inline std::optional<double> milp_lattice_oracle(const MilpProblem& p, double tol = 1e-7) {
  int n = p.lp.num_vars();
  std::vector<long long> lo(n), hi(n), v(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = static_cast<long long>(std::ceil(p.lp.lower[j] - tol));
    hi[j] = static_cast<long long>(std::floor(p.lp.upper[j] + tol));
    if (lo[j] > hi[j]) return std::nullopt;
    v[j] = lo[j];
  }
  std::optional<double> best;
  while (true) {
    std::vector<double> z(v.begin(), v.end());
    bool ok = true;
    for (int i = 0; i < p.lp.num_rows() && ok; ++i)
      if (row_dot(p.lp.rows, i, z) < p.lp.rhs[i] - tol) ok = false;
    if (ok) {
      double obj = dot(p.lp.objective, z);
      if (!p.cutoff || obj <= *p.cutoff - kEps)
        if (!best || obj < *best) best = obj;
    }
    int i = n - 1;
    while (i >= 0 && v[i] == hi[i]) --i;
    if (i < 0) break;
    ++v[i];
    for (int j = i + 1; j < n; ++j) v[j] = lo[j];
  }
  return best;
}

// True optimum ignoring the cutoff; used to check the cutoff status contract.
inline std::optional<double> milp_lattice_optimum(MilpProblem p, double tol = 1e-7) {
  p.cutoff.reset();
  return milp_lattice_oracle(p, tol);
}

}  // namespace miblp::testing
