#include "miblp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace miblp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kDegenStep = 1e-11;
constexpr int kDegenLimit = 40;

bool finite_bound(double b) { return std::abs(b) < kInf / 2; }

// Dense bounded-variable tableau simplex. Columns are the n structural
// variables, then one surplus per row (a z - s = b with s >= 0), then one
// artificial per row. Artificials are opened only where the initial point
// violates a row and are pinned back to [0, 0] as soon as they leave the
// basis, so phase two never sees them move.
struct Tableau {
  const LpProblem& p;
  int n, m;       // structural count, row count
  int ncols;
  std::vector<std::vector<double>> t;  // B^{-1} applied to the full column set
  std::vector<double> xb;              // values of the basic variables
  std::vector<int> basis;              // variable basic in each row
  std::vector<VarStatus> status;
  std::vector<double> lo, up;
  std::vector<double> red;             // reduced costs for the current phase
  int iterations = 0;
  int degen_streak = 0;
  bool failed = false;

  explicit Tableau(const LpProblem& prob)
      : p(prob), n(prob.num_vars()), m(prob.num_rows()) {
    ncols = n + 2 * m;
    lo.resize(ncols);
    up.resize(ncols);
    status.assign(ncols, VarStatus::at_lower);
    for (int j = 0; j < n; ++j) {
      lo[j] = p.lower[j];
      up[j] = p.upper[j];
    }
    for (int i = 0; i < m; ++i) {
      lo[n + i] = 0.0;
      up[n + i] = kInf;       // surplus
      lo[n + m + i] = 0.0;
      up[n + m + i] = 0.0;    // artificial, opened per row on demand
    }
  }

  double col_value(int j) const {
    return status[j] == VarStatus::at_upper ? up[j] : lo[j];
  }

  // Entry of the equality system a z - s + a' = b.
  double raw_entry(int row, int j) const {
    if (j < n) return p.rows(row, j);
    if (j < n + m) return j - n == row ? -1.0 : 0.0;
    return j - n - m == row ? 1.0 : 0.0;
  }

  void cold_start() {
    // full reset: a rejected warm-start attempt leaves stale basic marks
    status.assign(ncols, VarStatus::at_lower);
    for (int i = 0; i < m; ++i) up[n + m + i] = 0.0;
    t.assign(m, std::vector<double>(ncols, 0.0));
    xb.assign(m, 0.0);
    basis.resize(m);
    for (int i = 0; i < m; ++i) {
      double s0 = -p.rhs[i];
      for (int j = 0; j < n; ++j) s0 += p.rows(i, j) * col_value(j);
      if (s0 >= 0.0) {
        // surplus basic: the tableau row is the negated original row
        basis[i] = n + i;
        for (int j = 0; j < ncols; ++j) t[i][j] = -raw_entry(i, j);
        xb[i] = s0;
      } else {
        basis[i] = n + m + i;
        up[n + m + i] = kInf;
        for (int j = 0; j < ncols; ++j) t[i][j] = raw_entry(i, j);
        xb[i] = -s0;
      }
      status[basis[i]] = VarStatus::basic;
      t[i][basis[i]] = 1.0;
    }
  }

  void compute_reduced(const std::vector<double>& cost) {
    red = cost;
    red.resize(ncols, 0.0);
    for (int i = 0; i < m; ++i) {
      double cb = static_cast<size_t>(basis[i]) < cost.size() ? cost[basis[i]] : 0.0;
      if (cb == 0.0) continue;
      for (int j = 0; j < ncols; ++j) red[j] -= cb * t[i][j];
    }
  }

  void pivot(int r, int q) {
    double piv = t[r][q];
    for (double& e : t[r]) e /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = t[i][q];
      if (f == 0.0) continue;
      for (int j = 0; j < ncols; ++j) t[i][j] -= f * t[r][j];
      t[i][q] = 0.0;
    }
    double f = red[q];
    if (f != 0.0) {
      for (int j = 0; j < ncols; ++j) red[j] -= f * t[r][j];
      red[q] = 0.0;
    }
  }

  // One iteration; returns false at optimality for the current costs.
  bool step(bool bland) {
    int q = -1;
    double best_score = 0.0;
    for (int j = 0; j < ncols; ++j) {
      if (status[j] == VarStatus::basic) continue;
      if (up[j] - lo[j] < kPivotTol) continue;  // fixed, including closed artificials
      double score = status[j] == VarStatus::at_lower ? red[j] : -red[j];
      if (score >= -kCostTol) continue;
      if (bland) {
        q = j;
        break;
      }
      if (score < best_score) {
        best_score = score;
        q = j;
      }
    }
    if (q < 0) return false;

    double dir = status[q] == VarStatus::at_lower ? 1.0 : -1.0;
    double limit = std::numeric_limits<double>::infinity();
    int block_row = -1;
    bool block_to_upper = false;
    for (int i = 0; i < m; ++i) {
      double coef = dir * t[i][q];
      if (coef > kPivotTol) {
        double v = (xb[i] - lo[basis[i]]) / coef;
        if (v < limit - 1e-12 ||
            (v < limit + 1e-12 && (block_row < 0 || basis[i] < basis[block_row]))) {
          limit = v;
          block_row = i;
          block_to_upper = false;
        }
      } else if (coef < -kPivotTol && finite_bound(up[basis[i]])) {
        double v = (up[basis[i]] - xb[i]) / (-coef);
        if (v < limit - 1e-12 ||
            (v < limit + 1e-12 && (block_row < 0 || basis[i] < basis[block_row]))) {
          limit = v;
          block_row = i;
          block_to_upper = true;
        }
      }
    }
    bool flip = false;
    if (finite_bound(up[q]) && up[q] - lo[q] < limit - 1e-12) {
      limit = up[q] - lo[q];
      flip = true;
    }
    if (!std::isfinite(limit)) {
      failed = true;  // impossible with finite structural boxes unless corrupted
      return false;
    }
    double step_len = std::max(limit, 0.0);
    for (int i = 0; i < m; ++i) xb[i] -= dir * t[i][q] * step_len;
    ++iterations;
    degen_streak = step_len < kDegenStep ? degen_streak + 1 : 0;

    if (flip) {
      status[q] =
          status[q] == VarStatus::at_lower ? VarStatus::at_upper : VarStatus::at_lower;
      return true;
    }
    int leaving = basis[block_row];
    status[leaving] = block_to_upper ? VarStatus::at_upper : VarStatus::at_lower;
    if (leaving >= n + m) {
      status[leaving] = VarStatus::at_lower;
      up[leaving] = 0.0;  // an artificial never comes back
    }
    double enter_value = col_value(q) + dir * step_len;
    pivot(block_row, q);
    basis[block_row] = q;
    status[q] = VarStatus::basic;
    xb[block_row] = enter_value;
    return true;
  }

  bool run(const std::vector<double>& cost, int max_iter) {
    compute_reduced(cost);
    bool bland = false;
    for (int it = 0; it < max_iter; ++it) {
      if (degen_streak > kDegenLimit) bland = true;
      if (degen_streak == 0) bland = false;
      if (!step(bland)) return !failed;
    }
    failed = true;
    return false;
  }

  double phase1_value() const {
    double v = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n + m) v += xb[i];
    return v;
  }

  // Drive leftover artificials out of the basis with degenerate pivots. A
  // tableau row always carries a nonbasic structural or surplus column with
  // nonzero coefficient (an all-zero row would make the basis singular), so
  // failure here means severe ill-conditioning.
  bool retire_artificials() {
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n + m) continue;
      int q = -1;
      double best = 1e-9;
      for (int j = 0; j < n + m; ++j) {
        if (status[j] == VarStatus::basic) continue;
        if (std::abs(t[i][j]) > best) {
          best = std::abs(t[i][j]);
          q = j;
        }
      }
      if (q < 0) return false;
      int art = basis[i];
      pivot(i, q);
      basis[i] = q;
      status[q] = VarStatus::basic;
      status[art] = VarStatus::at_lower;
      up[art] = 0.0;
    }
    for (int i = 0; i < m; ++i) up[n + m + i] = 0.0;
    return true;
  }

  // Solve B x_B = b - N x_N for the current basis from the original data;
  // removes drift accumulated by incremental updates and by the degenerate
  // retirement pivots above.
  bool recompute_xb() {
    if (m == 0) return true;
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (int i = 0; i < m; ++i) {
      double acc = p.rhs[i];
      for (int j = 0; j < ncols; ++j) {
        if (status[j] == VarStatus::basic) continue;
        double v = col_value(j);
        if (v != 0.0) acc -= raw_entry(i, j) * v;
      }
      for (int k = 0; k < m; ++k) a[i][k] = raw_entry(i, basis[k]);
      a[i][m] = acc;
    }
    for (int col = 0; col < m; ++col) {
      int piv = -1;
      double best = 1e-11;
      for (int i = col; i < m; ++i)
        if (std::abs(a[i][col]) > best) {
          best = std::abs(a[i][col]);
          piv = i;
        }
      if (piv < 0) return false;
      std::swap(a[col], a[piv]);
      double d = a[col][col];
      for (double& e : a[col]) e /= d;
      for (int i = 0; i < m; ++i) {
        if (i == col) continue;
        double f = a[i][col];
        if (f == 0.0) continue;
        for (int j = col; j <= m; ++j) a[i][j] -= f * a[col][j];
      }
    }
    for (int i = 0; i < m; ++i) xb[i] = a[i][m];
    return true;
  }

  std::vector<double> structural_solution() const {
    std::vector<double> z(n);
    for (int j = 0; j < n; ++j) z[j] = col_value(j);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n) z[basis[i]] = xb[i];
    return z;
  }
};

// Rebuild the tableau from a caller-supplied basis: factor B, form B^{-1}A,
// and keep the result only if the implied basic values respect their bounds.
bool try_warm_start(Tableau& tab, const Basis& warm) {
  int n = tab.n, m = tab.m;
  if (static_cast<int>(warm.basic.size()) != m ||
      static_cast<int>(warm.status.size()) != n + m)
    return false;
  for (int v : warm.basic)
    if (v < 0 || v >= n + m) return false;

  std::vector<std::vector<double>> aug(m, std::vector<double>(m + tab.ncols, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) aug[i][k] = tab.raw_entry(i, warm.basic[k]);
    for (int j = 0; j < tab.ncols; ++j) aug[i][m + j] = tab.raw_entry(i, j);
  }
  // Gauss-Jordan on [B | A_full] ends as [I | B^{-1} A_full], with row i
  // expressing the variable basic in slot i.
  for (int col = 0; col < m; ++col) {
    int piv = -1;
    double best = 1e-9;
    for (int i = col; i < m; ++i)
      if (std::abs(aug[i][col]) > best) {
        best = std::abs(aug[i][col]);
        piv = i;
      }
    if (piv < 0) return false;
    std::swap(aug[col], aug[piv]);
    double d = aug[col][col];
    for (double& e : aug[col]) e /= d;
    for (int i = 0; i < m; ++i) {
      if (i == col) continue;
      double f = aug[i][col];
      if (f == 0.0) continue;
      for (int j = col; j < m + tab.ncols; ++j) aug[i][j] -= f * aug[col][j];
    }
  }

  tab.t.assign(m, std::vector<double>(tab.ncols, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < tab.ncols; ++j) tab.t[i][j] = aug[i][m + j];
  tab.basis = warm.basic;
  for (int j = 0; j < n + m; ++j) tab.status[j] = warm.status[j];
  for (int i = 0; i < m; ++i) tab.status[warm.basic[i]] = VarStatus::basic;
  tab.xb.assign(m, 0.0);
  if (!tab.recompute_xb()) return false;
  for (int i = 0; i < m; ++i) {
    int v = tab.basis[i];
    if (tab.xb[i] < tab.lo[v] - kFeasTol || tab.xb[i] > tab.up[v] + kFeasTol)
      return false;
  }
  return true;
}

}  // namespace

LpResult solve_lp(const LpProblem& p, const std::optional<Basis>& warm) {
  LpResult res;
  int n = p.num_vars();
  int m = p.num_rows();
  for (int j = 0; j < n; ++j) {
    if (p.lower[j] > p.upper[j] + 1e-12) {
      res.status = LpStatus::infeasible;
      res.phase1_objective = p.lower[j] - p.upper[j];
      return res;
    }
    if (!finite_bound(p.lower[j]) || !finite_bound(p.upper[j])) {
      res.status = LpStatus::error;
      return res;
    }
  }

  Tableau tab(p);
  int max_iter = 20000 + 200 * (n + m);

  bool warm_ok = warm.has_value() && try_warm_start(tab, *warm);
  if (!warm_ok) {
    tab.cold_start();
    std::vector<double> cost1(tab.ncols, 0.0);
    for (int i = 0; i < m; ++i) cost1[n + m + i] = 1.0;
    if (!tab.run(cost1, max_iter)) {
      res.status = LpStatus::error;
      return res;
    }
    res.phase1_objective = tab.phase1_value();
    res.iterations = tab.iterations;
    if (res.phase1_objective > kEps) {
      res.status = LpStatus::infeasible;
      return res;
    }
    if (!tab.retire_artificials() || !tab.recompute_xb()) {
      res.status = LpStatus::error;
      return res;
    }
  }

  std::vector<double> cost2(tab.ncols, 0.0);
  for (int j = 0; j < n; ++j) cost2[j] = p.objective[j];
  tab.degen_streak = 0;
  if (!tab.run(cost2, max_iter) || !tab.recompute_xb()) {
    res.status = LpStatus::error;
    return res;
  }

  std::vector<double> z = tab.structural_solution();
  for (int j = 0; j < n; ++j) {
    if (z[j] < p.lower[j] - kFeasTol || z[j] > p.upper[j] + kFeasTol) {
      res.status = LpStatus::error;
      return res;
    }
    z[j] = std::clamp(z[j], p.lower[j], p.upper[j]);
  }
  for (int i = 0; i < m; ++i) {
    if (row_dot(p.rows, i, z) < p.rhs[i] - 1e-6) {
      res.status = LpStatus::error;
      return res;
    }
  }

  res.status = LpStatus::optimal;
  res.solution = std::move(z);
  res.objective = dot(p.objective, res.solution);
  res.iterations = tab.iterations;
  res.basis.basic = tab.basis;
  res.basis.status.assign(tab.status.begin(), tab.status.begin() + n + m);
  res.basis.active_rows.resize(m);
  for (int i = 0; i < m; ++i) res.basis.active_rows[i] = i;
  return res;
}

ConeRays cone_from_binding_rows(const std::vector<double>& vertex, const Mat& rows,
                                const std::vector<double>& rhs,
                                const std::vector<BindingKind>& kinds,
                                const std::vector<int>& indices) {
  int n = static_cast<int>(vertex.size());
  if (rows.rows != n || rows.cols != n)
    throw SimplexError("binding system must be square in the structural dimension");

  // Rays are the columns of H^{-1}: moving along H^{-1} e_j relaxes binding
  // row j alone and keeps every other row tight.
  std::vector<std::vector<double>> aug(n, std::vector<double>(2 * n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = rows(i, j);
    aug[i][n + i] = 1.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 1e-9;
    for (int i = col; i < n; ++i)
      if (std::abs(aug[i][col]) > best) {
        best = std::abs(aug[i][col]);
        piv = i;
      }
    if (piv < 0) throw SimplexError("binding rows are linearly dependent");
    std::swap(aug[col], aug[piv]);
    double d = aug[col][col];
    for (double& e : aug[col]) e /= d;
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      double f = aug[i][col];
      if (f == 0.0) continue;
      for (int j = col; j < 2 * n; ++j) aug[i][j] -= f * aug[col][j];
    }
  }

  ConeRays cone;
  cone.vertex = vertex;
  cone.binding_rows = rows;
  cone.binding_rhs = rhs;
  cone.binding_kind = kinds;
  cone.binding_index = indices;
  cone.rays.resize(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> r(n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = aug[i][n + j];
      norm = std::max(norm, std::abs(r[i]));
    }
    if (norm < 1e-12) throw SimplexError("degenerate ray in cone extraction");
    for (double& e : r) e /= norm;
    cone.rays[j] = r;
  }
  return cone;
}

ConeRays extract_cone(const LpProblem& p, const LpResult& r) {
  if (r.status != LpStatus::optimal)
    throw SimplexError("cone extraction needs an optimal vertex");
  int n = p.num_vars();

  Mat h(0, n);
  std::vector<double> hrhs;
  std::vector<BindingKind> kinds;
  std::vector<int> indices;
  auto push = [&](const std::vector<double>& coef, double b, BindingKind k, int idx) {
    h.a.insert(h.a.end(), coef.begin(), coef.end());
    ++h.rows;
    hrhs.push_back(b);
    kinds.push_back(k);
    indices.push_back(idx);
  };

  for (int j = 0; j < n; ++j) {
    if (r.basis.status[j] == VarStatus::basic) continue;
    std::vector<double> coef(n, 0.0);
    if (r.basis.status[j] == VarStatus::at_lower) {
      coef[j] = 1.0;
      push(coef, p.lower[j], BindingKind::lower_bound, j);
    } else {
      coef[j] = -1.0;
      push(coef, -p.upper[j], BindingKind::upper_bound, j);
    }
  }
  for (int i : r.basis.active_rows) {
    if (r.basis.status[n + i] != VarStatus::basic)
      push(p.rows.row(i), p.rhs[i], BindingKind::constraint, i);
  }
  if (h.rows != n)
    throw SimplexError("binding system has wrong size for a vertex basis");
  return cone_from_binding_rows(r.solution, h, hrhs, kinds, indices);
}

std::optional<std::vector<double>> solve_dense_system(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-9) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace miblp
