#include "miblp/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace miblp {

namespace {

constexpr long long kMaxDenominator = 10000;
constexpr long long kMaxScale = 1000000000;

double original_lower(const MiblpInstance& inst, int j) {
  return j < inst.n1 ? inst.lx[j] : inst.ly[j - inst.n1];
}

double original_upper(const MiblpInstance& inst, int j) {
  return j < inst.n1 ? inst.ux[j] : inst.uy[j - inst.n1];
}

bool row_is_global(const MiblpInstance& inst, const NodeLp& node, int k) {
  int m_orig = inst.m1() + inst.m2();
  if (k < m_orig) return true;
  return node.extra_row_scope[static_cast<std::size_t>(k - m_orig)].kind == ScopeKind::global;
}

void check_node(const MiblpInstance& inst, const NodeLp& node) {
  if (node.result.status != LpStatus::optimal)
    throw CutError("cut generation needs an optimal node solve");
  int n = inst.n1 + inst.n2;
  if (node.lp.num_vars() != n || static_cast<int>(node.result.solution.size()) != n)
    throw CutError("node LP does not match the instance dimensions");
  int extra = node.lp.num_rows() - inst.m1() - inst.m2();
  if (extra < 0 || static_cast<int>(node.extra_row_scope.size()) != extra)
    throw CutError("node LP rows are not instance rows plus tagged cuts");
}

// Greedy choice of n linearly independent rows, scanned in the given order.
// Empty result when the candidates do not span.
std::vector<int> spanning_subset(const std::vector<std::vector<double>>& rows, int n) {
  std::vector<int> chosen;
  std::vector<std::vector<double>> reduced;  // unit inf-norm, eliminated against earlier picks
  std::vector<int> pivot_col;
  for (int k = 0; k < static_cast<int>(rows.size()) && static_cast<int>(chosen.size()) < n; ++k) {
    std::vector<double> r = rows[k];
    double mag = 0.0;
    for (double v : r) mag = std::max(mag, std::abs(v));
    if (mag <= 0.0) continue;
    for (double& v : r) v /= mag;
    for (std::size_t t = 0; t < reduced.size(); ++t) {
      double f = r[pivot_col[t]] / reduced[t][pivot_col[t]];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) r[c] -= f * reduced[t][c];
    }
    int piv = 0;
    for (int c = 1; c < n; ++c)
      if (std::abs(r[c]) > std::abs(r[piv])) piv = c;
    if (std::abs(r[piv]) <= 1e-7) continue;
    chosen.push_back(k);
    reduced.push_back(std::move(r));
    pivot_col.push_back(piv);
  }
  if (static_cast<int>(chosen.size()) < n) chosen.clear();
  return chosen;
}

struct Fraction {
  long long num = 0;
  long long den = 1;
};

std::optional<Fraction> to_fraction(double v, long long max_den) {
  if (!std::isfinite(v)) return std::nullopt;
  if (std::abs(v) > 9e14) return std::nullopt;
  double rounded = std::round(v);
  if (std::abs(v - rounded) <= 1e-9 * std::max(1.0, std::abs(v)))
    return Fraction{static_cast<long long>(rounded), 1};
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // previous and current convergents
  double x = v;
  for (int it = 0; it < 48; ++it) {
    double fa = std::floor(x);
    if (std::abs(fa) > 9e14) return std::nullopt;
    long long a = static_cast<long long>(fa);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) return std::nullopt;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (q1 > 0 && std::abs(v - static_cast<double>(p1) / static_cast<double>(q1)) <=
                      1e-9 * std::max(1.0, std::abs(v)))
      return Fraction{p1, q1};
    double frac = x - fa;
    if (frac < 1e-12) return std::nullopt;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

long long gcd_ll(long long a, long long b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Integer ceiling of a/g for g > 0.
long long ceil_div(long long a, long long g) {
  long long q = a / g;
  if (a % g != 0 && a > 0) ++q;
  return q;
}

bool second_level_slack_integral(const MiblpInstance& inst) {
  if (!is_integral(inst.a2, 1e-9) || !is_integral(inst.g2, 1e-9) ||
      !is_integral(inst.b2, 1e-9))
    return false;
  for (int i = 0; i < inst.m2(); ++i)
    for (int j = inst.r2; j < inst.n2; ++j)
      if (std::abs(inst.g2(i, j)) > 1e-12) return false;
  return true;
}

bool follower_objective_integral(const MiblpInstance& inst) {
  if (!is_integral(inst.d2, 1e-9)) return false;
  for (int j = inst.r2; j < inst.n2; ++j)
    if (std::abs(inst.d2[j]) > 1e-12) return false;
  return true;
}

bool binary_linking_bounds(const MiblpInstance& inst) {
  for (int i : inst.linking)
    if (std::abs(inst.lx[i]) > 1e-9 || std::abs(inst.ux[i] - 1.0) > 1e-9) return false;
  return true;
}

std::vector<double> vertex_x(const MiblpInstance& inst, const NodeLp& node) {
  return {node.result.solution.begin(), node.result.solution.begin() + inst.n1};
}

std::vector<double> vertex_y(const MiblpInstance& inst, const NodeLp& node) {
  return {node.result.solution.begin() + inst.n1, node.result.solution.end()};
}

CutResult fail(CutFailure reason) {
  CutResult res;
  res.failure = reason;
  return res;
}

// Final guard shared by the closed-form generators: the emitted cut must
// separate the vertex by a real margin.
CutResult emit(Cut c, const MiblpInstance& inst, const NodeLp& node) {
  double viol = c.beta - c.value_at(vertex_x(inst, node), vertex_y(inst, node));
  if (viol < kEps) return fail(CutFailure::not_applicable);
  CutResult res;
  res.cut = std::move(c);
  return res;
}

}  // namespace

double Cut::value_at(const std::vector<double>& x, const std::vector<double>& y) const {
  double s = 0.0;
  for (std::size_t j = 0; j < alpha_x.size(); ++j) s += alpha_x[j] * x[j];
  for (std::size_t j = 0; j < alpha_y.size(); ++j) s += alpha_y[j] * y[j];
  return s;
}

bool Cut::satisfied_by(const std::vector<double>& x, const std::vector<double>& y,
                       double tol) const {
  return value_at(x, y) >= beta - tol;
}

std::vector<double> joint_row(const Cut& c) {
  std::vector<double> row = c.alpha_x;
  row.insert(row.end(), c.alpha_y.begin(), c.alpha_y.end());
  return row;
}

void normalize_cut(Cut& c) {
  double maxmag = 0.0;
  for (double v : c.alpha_x) maxmag = std::max(maxmag, std::abs(v));
  for (double v : c.alpha_y) maxmag = std::max(maxmag, std::abs(v));
  if (maxmag <= 0.0) return;

  std::vector<double*> vals;
  for (double& v : c.alpha_x) vals.push_back(&v);
  for (double& v : c.alpha_y) vals.push_back(&v);
  vals.push_back(&c.beta);

  std::vector<Fraction> fracs;
  fracs.reserve(vals.size());
  long long scale = 1;
  bool rational = true;
  for (double* v : vals) {
    auto f = to_fraction(*v, kMaxDenominator);
    if (!f) {
      rational = false;
      break;
    }
    long long g = gcd_ll(scale, f->den);
    if (scale / g > kMaxScale / f->den) {
      rational = false;
      break;
    }
    scale = scale / g * f->den;
    fracs.push_back(*f);
  }
  if (rational) {
    std::vector<long long> ints(vals.size());
    for (std::size_t k = 0; k < vals.size() && rational; ++k) {
      long long mult = scale / fracs[k].den;
      double mag = std::abs(static_cast<double>(fracs[k].num)) * static_cast<double>(mult);
      if (mag > 9e15) rational = false;
      else ints[k] = fracs[k].num * mult;
    }
    if (rational) {
      long long g = 0;
      for (long long v : ints) g = gcd_ll(g, v);
      if (g == 0) g = 1;
      for (std::size_t k = 0; k < vals.size(); ++k)
        *vals[k] = static_cast<double>(ints[k] / g);
      return;
    }
  }
  double s = 1.0 / maxmag;
  for (double* v : vals) *v *= s;
}

bool BfsSet::strictly_interior(const std::vector<double>& z, double margin) const {
  for (int i = 0; i < rows.rows; ++i)
    if (row_dot(rows, i, z) - rhs[i] < margin) return false;
  return true;
}

LpProblem joint_relaxation(const MiblpInstance& inst) {
  int n1 = inst.n1, n2 = inst.n2;
  int m1 = inst.m1(), m2 = inst.m2();
  LpProblem p;
  p.objective = inst.c;
  p.objective.insert(p.objective.end(), inst.d1.begin(), inst.d1.end());
  p.rows = Mat(m1 + m2, n1 + n2);
  p.rhs.resize(m1 + m2);
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < n1; ++j) p.rows(i, j) = inst.a1(i, j);
    for (int j = 0; j < n2; ++j) p.rows(i, n1 + j) = inst.g1(i, j);
    p.rhs[i] = inst.b1[i];
  }
  for (int i = 0; i < m2; ++i) {
    for (int j = 0; j < n1; ++j) p.rows(m1 + i, j) = inst.a2(i, j);
    for (int j = 0; j < n2; ++j) p.rows(m1 + i, n1 + j) = inst.g2(i, j);
    p.rhs[m1 + i] = inst.b2[i];
  }
  p.lower = inst.lx;
  p.lower.insert(p.lower.end(), inst.ly.begin(), inst.ly.end());
  p.upper = inst.ux;
  p.upper.insert(p.upper.end(), inst.uy.begin(), inst.uy.end());
  return p;
}

std::optional<NodeLp> solve_relaxation(const MiblpInstance& inst) {
  NodeLp node;
  node.lp = joint_relaxation(inst);
  node.result = solve_lp(node.lp);
  if (node.result.status != LpStatus::optimal) return std::nullopt;
  return node;
}

std::optional<ConeRays> global_cone(const MiblpInstance& inst, const NodeLp& node) {
  check_node(inst, node);
  int n = inst.n1 + inst.n2;
  ConeRays cone = extract_cone(node.lp, node.result);
  bool clean = true;
  for (std::size_t k = 0; k < cone.binding_kind.size() && clean; ++k) {
    int idx = cone.binding_index[k];
    switch (cone.binding_kind[k]) {
      case BindingKind::constraint:
        clean = row_is_global(inst, node, idx);
        break;
      case BindingKind::lower_bound:
        clean = std::abs(node.lp.lower[idx] - original_lower(inst, idx)) <= 1e-9;
        break;
      case BindingKind::upper_bound:
        clean = std::abs(node.lp.upper[idx] - original_upper(inst, idx)) <= 1e-9;
        break;
    }
  }
  if (clean) return cone;

  // The basis leans on branching bounds or non-global cut rows; rebuild the
  // cone from whatever globally valid rows are binding here.
  const std::vector<double>& z = node.result.solution;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<BindingKind> kinds;
  std::vector<int> indices;
  for (int k = 0; k < node.lp.num_rows(); ++k) {
    if (!row_is_global(inst, node, k)) continue;
    if (std::abs(row_dot(node.lp.rows, k, z) - node.lp.rhs[k]) > kInteriorMargin) continue;
    rows.push_back(node.lp.rows.row(k));
    rhs.push_back(node.lp.rhs[k]);
    kinds.push_back(BindingKind::constraint);
    indices.push_back(k);
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(z[j] - original_lower(inst, j)) > kInteriorMargin) continue;
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(std::move(e));
    rhs.push_back(original_lower(inst, j));
    kinds.push_back(BindingKind::lower_bound);
    indices.push_back(j);
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(z[j] - original_upper(inst, j)) > kInteriorMargin) continue;
    std::vector<double> e(n, 0.0);
    e[j] = -1.0;
    rows.push_back(std::move(e));
    rhs.push_back(-original_upper(inst, j));
    kinds.push_back(BindingKind::upper_bound);
    indices.push_back(j);
  }
  std::vector<int> pick = spanning_subset(rows, n);
  if (pick.empty()) return std::nullopt;
  Mat h(n, n);
  std::vector<double> h_rhs(n);
  std::vector<BindingKind> h_kinds(n);
  std::vector<int> h_idx(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) h(r, c) = rows[pick[r]][c];
    h_rhs[r] = rhs[pick[r]];
    h_kinds[r] = kinds[pick[r]];
    h_idx[r] = indices[pick[r]];
  }
  return cone_from_binding_rows(z, h, h_rhs, h_kinds, h_idx);
}

CutResult intersection_cut(const ConeRays& cone, const BfsSet& bfs, int n1,
                           CutOrigin origin, CutScope scope) {
  int n = cone.dim();
  if (bfs.rows.cols != n || static_cast<int>(cone.rays.size()) != n)
    throw CutError("intersection cut dimension mismatch");
  if (!bfs.strictly_interior(cone.vertex)) return fail(CutFailure::not_applicable);

  CutResult res;
  const double inf = std::numeric_limits<double>::infinity();
  res.lambdas.assign(n, inf);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < bfs.rows.rows; ++i) {
      double hr = row_dot(bfs.rows, i, cone.rays[j]);
      if (hr >= -1e-9) continue;
      double slack = row_dot(bfs.rows, i, cone.vertex) - bfs.rhs[i];
      res.lambdas[j] = std::min(res.lambdas[j], slack / -hr);
    }
  }
  bool any_finite = false;
  for (double l : res.lambdas) any_finite = any_finite || std::isfinite(l);
  if (!any_finite) {
    res.failure = CutFailure::cone_contained;
    return res;
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(res.lambdas[j])) continue;
    std::vector<double> p = cone.vertex;
    for (int c = 0; c < n; ++c) p[c] += res.lambdas[j] * cone.rays[j][c];
    res.boundary_points.push_back(std::move(p));
  }

  // The cut hyperplane passes through every finite crossing point and runs
  // parallel to every ray that stays inside: alpha r_j = 1 / lambda_j.
  std::vector<std::vector<double>> sys(n);
  std::vector<double> q(n);
  for (int j = 0; j < n; ++j) {
    sys[j] = cone.rays[j];
    q[j] = std::isfinite(res.lambdas[j]) ? 1.0 / res.lambdas[j] : 0.0;
  }
  auto alpha = solve_dense_system(std::move(sys), std::move(q));
  if (!alpha) return fail(CutFailure::not_applicable);

  Cut c;
  c.alpha_x.assign(alpha->begin(), alpha->begin() + n1);
  c.alpha_y.assign(alpha->begin() + n1, alpha->end());
  c.beta = dot(*alpha, cone.vertex) + 1.0;
  c.scope = std::move(scope);
  c.origin = origin;
  normalize_cut(c);

  std::vector<double> vx(cone.vertex.begin(), cone.vertex.begin() + n1);
  std::vector<double> vy(cone.vertex.begin() + n1, cone.vertex.end());
  if (c.beta - c.value_at(vx, vy) < kEps) return fail(CutFailure::not_applicable);
  res.cut = std::move(c);
  res.bfs = bfs;
  return res;
}

BfsSet bfs_improving_solution(const MiblpInstance& inst, const std::vector<double>& ystar,
                              const std::vector<bool>& drop_rows) {
  int n1 = inst.n1, n2 = inst.n2, m2 = inst.m2();
  if (static_cast<int>(ystar.size()) != n2)
    throw CutError("improving solution has the wrong dimension");
  if (!drop_rows.empty() && static_cast<int>(drop_rows.size()) != m2)
    throw CutError("drop flags do not match the follower rows");
  std::vector<int> kept;
  for (int i = 0; i < m2; ++i)
    if (drop_rows.empty() || !drop_rows[i]) kept.push_back(i);

  BfsSet bfs;
  bfs.rows = Mat(1 + static_cast<int>(kept.size()), n1 + n2);
  bfs.rhs.resize(bfs.rows.rows);
  for (int j = 0; j < n2; ++j) bfs.rows(0, n1 + j) = inst.d2[j];
  bfs.rhs[0] = dot(inst.d2, ystar);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    int i = kept[r];
    for (int j = 0; j < n1; ++j) bfs.rows(1 + static_cast<int>(r), j) = inst.a2(i, j);
    bfs.rhs[1 + r] = inst.b2[i] - row_dot(inst.g2, i, ystar) - 1.0;
  }
  return bfs;
}

BfsSet bfs_improving_direction(const MiblpInstance& inst, const Certificate& cert) {
  int n1 = inst.n1, n2 = inst.n2, m2 = inst.m2();
  if (cert.kind != CertificateKind::improving_direction ||
      static_cast<int>(cert.delta_y.size()) != n2 ||
      static_cast<int>(cert.drops_w.size()) != m2 ||
      static_cast<int>(cert.drops_v.size()) != n2)
    throw CutError("malformed improving direction certificate");

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (int i = 0; i < m2; ++i) {
    if (cert.drops_w[i]) continue;
    std::vector<double> row(n1 + n2, 0.0);
    for (int j = 0; j < n1; ++j) row[j] = inst.a2(i, j);
    for (int j = 0; j < n2; ++j) row[n1 + j] = inst.g2(i, j);
    rows.push_back(std::move(row));
    rhs.push_back(inst.b2[i] - row_dot(inst.g2, i, cert.delta_y) - 1.0);
  }
  for (int j = 0; j < n2; ++j) {
    if (cert.drops_v[j]) continue;
    std::vector<double> row(n1 + n2, 0.0);
    row[n1 + j] = 1.0;
    rows.push_back(std::move(row));
    // Integer variables get a unit of slack that integrality wins back;
    // continuous ones rely on the set being closed.
    if (j < inst.r2)
      rhs.push_back(std::ceil(inst.ly[j] - 1e-9) - cert.delta_y[j] - 1.0);
    else
      rhs.push_back(inst.ly[j] - cert.delta_y[j]);
  }
  for (int j = 0; j < n2; ++j) {
    if (cert.delta_y[j] <= kEps) continue;  // step away from the upper bound never needs a row
    std::vector<double> row(n1 + n2, 0.0);
    row[n1 + j] = -1.0;
    rows.push_back(std::move(row));
    if (j < inst.r2)
      rhs.push_back(cert.delta_y[j] - std::floor(inst.uy[j] + 1e-9) - 1.0);
    else
      rhs.push_back(cert.delta_y[j] - inst.uy[j]);
  }

  BfsSet bfs;
  bfs.rows = Mat(static_cast<int>(rows.size()), n1 + n2);
  bfs.rhs = std::move(rhs);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < n1 + n2; ++c) bfs.rows(static_cast<int>(r), c) = rows[r][c];
  return bfs;
}

BfsSet bfs_hypercube(const MiblpInstance& inst, const std::vector<double>& gamma) {
  int n1 = inst.n1, n2 = inst.n2;
  int nl = static_cast<int>(inst.linking.size());
  if (static_cast<int>(gamma.size()) != nl)
    throw CutError("hypercube center does not match the linking set");
  BfsSet bfs;
  bfs.rows = Mat(2 * nl, n1 + n2);
  bfs.rhs.resize(2 * nl);
  for (int k = 0; k < nl; ++k) {
    int j = inst.linking[k];
    bfs.rows(2 * k, j) = 1.0;
    bfs.rhs[2 * k] = gamma[k] - 1.0;
    bfs.rows(2 * k + 1, j) = -1.0;
    bfs.rhs[2 * k + 1] = -gamma[k] - 1.0;
  }
  return bfs;
}

std::optional<ImprovingSolution> find_improving_solution(const MiblpInstance& inst,
                                                         const Point& p) {
  int n2 = inst.n2, m2 = inst.m2();
  // Worst leader contribution to each follower row over the whole box.
  std::vector<double> worst(m2, 0.0);
  for (int i = 0; i < m2; ++i)
    for (int j = 0; j < inst.n1; ++j)
      worst[i] += std::min(inst.a2(i, j) * inst.lx[j], inst.a2(i, j) * inst.ux[j]);

  double target = std::ceil(dot(inst.d2, p.y) - 1.0 - 1e-9);

  // Variables: candidate y, then one keep flag per follower row. A flag at
  // zero certifies its row at the worst leader choice; flags at one charge
  // the row to the vertex. Minimize the charged rows first.
  MilpProblem stage1;
  stage1.lp.objective.assign(n2 + m2, 0.0);
  for (int i = 0; i < m2; ++i) stage1.lp.objective[n2 + i] = 1.0;
  stage1.lp.rows = Mat(1 + m2, n2 + m2);
  stage1.lp.rhs.resize(1 + m2);
  for (int j = 0; j < n2; ++j) stage1.lp.rows(0, j) = -inst.d2[j];
  stage1.lp.rhs[0] = -target;
  for (int i = 0; i < m2; ++i) {
    for (int j = 0; j < n2; ++j) stage1.lp.rows(1 + i, j) = inst.g2(i, j);
    stage1.lp.rows(1 + i, n2 + i) = row_dot(inst.a2, i, p.x) - worst[i];
    stage1.lp.rhs[1 + i] = inst.b2[i] - worst[i];
  }
  stage1.lp.lower = inst.ly;
  stage1.lp.upper = inst.uy;
  stage1.lp.lower.insert(stage1.lp.lower.end(), m2, 0.0);
  stage1.lp.upper.insert(stage1.lp.upper.end(), m2, 1.0);
  for (int j = 0; j < inst.r2; ++j) stage1.integer_vars.push_back(j);
  for (int i = 0; i < m2; ++i) stage1.integer_vars.push_back(n2 + i);

  MilpResult first = solve_milp(stage1);
  if (first.status != MilpStatus::optimal) return std::nullopt;
  long long kept = std::llround(first.objective);

  // Among solutions with that many charged rows, prefer the best follower
  // value so the certificate is as strong as possible.
  MilpProblem stage2 = stage1;
  for (int j = 0; j < n2; ++j) stage2.lp.objective[j] = inst.d2[j];
  for (int i = 0; i < m2; ++i) stage2.lp.objective[n2 + i] = 0.0;
  std::vector<double> cap(n2 + m2, 0.0);
  for (int i = 0; i < m2; ++i) cap[n2 + i] = -1.0;
  stage2.lp.rows.a.insert(stage2.lp.rows.a.end(), cap.begin(), cap.end());
  ++stage2.lp.rows.rows;
  stage2.lp.rhs.push_back(-static_cast<double>(kept));

  MilpResult second = solve_milp(stage2);
  if (second.status != MilpStatus::optimal) return std::nullopt;

  ImprovingSolution out;
  out.ystar.assign(second.solution.begin(), second.solution.begin() + n2);
  for (int j = 0; j < inst.r2; ++j) out.ystar[j] = std::round(out.ystar[j]);
  out.drop_rows.resize(m2);
  for (int i = 0; i < m2; ++i) out.drop_rows[i] = second.solution[n2 + i] < 0.5;
  return out;
}

CutResult gen_isic_type1(const MiblpInstance& inst, const NodeLp& node,
                         const std::vector<double>& ystar) {
  check_node(inst, node);
  if (!second_level_slack_integral(inst)) return fail(CutFailure::not_applicable);
  if (static_cast<int>(ystar.size()) != inst.n2)
    throw CutError("improving solution has the wrong dimension");
  if (dot(inst.d2, vertex_y(inst, node)) <= dot(inst.d2, ystar) + kEps)
    return fail(CutFailure::no_certificate);
  auto cone = global_cone(inst, node);
  if (!cone) return fail(CutFailure::not_applicable);
  return intersection_cut(*cone, bfs_improving_solution(inst, ystar), inst.n1,
                          CutOrigin::improving_solution_ic, CutScope::global_scope());
}

CutResult gen_isic_type2(const MiblpInstance& inst, const NodeLp& node) {
  check_node(inst, node);
  if (!second_level_slack_integral(inst) || !follower_objective_integral(inst))
    return fail(CutFailure::not_applicable);
  Point p{vertex_x(inst, node), vertex_y(inst, node)};
  auto found = find_improving_solution(inst, p);
  if (!found) return fail(CutFailure::no_certificate);
  auto cone = global_cone(inst, node);
  if (!cone) return fail(CutFailure::not_applicable);
  return intersection_cut(*cone, bfs_improving_solution(inst, found->ystar, found->drop_rows),
                          inst.n1, CutOrigin::improving_solution_ic_relaxed,
                          CutScope::global_scope());
}

CutResult gen_idic(const MiblpInstance& inst, const NodeLp& node) {
  check_node(inst, node);
  if (!second_level_slack_integral(inst) || !follower_objective_integral(inst))
    return fail(CutFailure::not_applicable);
  Point p{vertex_x(inst, node), vertex_y(inst, node)};
  auto cert = find_improving_direction(inst, p);
  if (!cert) return fail(CutFailure::no_certificate);
  auto cone = global_cone(inst, node);
  if (!cone) return fail(CutFailure::not_applicable);
  return intersection_cut(*cone, bfs_improving_direction(inst, *cert), inst.n1,
                          CutOrigin::improving_direction_ic, CutScope::global_scope());
}

CutResult gen_hypercube_ic(const MiblpInstance& inst, const NodeLp& node,
                           const UbEvidence& evidence) {
  check_node(inst, node);
  if (inst.linking.empty()) return fail(CutFailure::not_applicable);
  std::vector<double> x = vertex_x(inst, node);
  std::vector<double> gamma;
  for (int j : inst.linking) {
    if (!is_integral(x[j])) return fail(CutFailure::not_applicable);
    gamma.push_back(std::round(x[j]));
  }
  if (evidence.gamma.size() != gamma.size()) return fail(CutFailure::not_applicable);
  for (std::size_t k = 0; k < gamma.size(); ++k)
    if (std::abs(evidence.gamma[k] - gamma[k]) > kEps) return fail(CutFailure::not_applicable);
  auto cone = global_cone(inst, node);
  if (!cone) return fail(CutFailure::not_applicable);
  BfsSet bfs = bfs_hypercube(inst, gamma);
  return intersection_cut(*cone, bfs, inst.n1, CutOrigin::hypercube_ic,
                          CutScope::excluding(std::move(gamma)));
}

CutResult gen_integer_no_good(const MiblpInstance& inst, const NodeLp& node) {
  check_node(inst, node);
  int n1 = inst.n1, n2 = inst.n2, n = n1 + n2;
  if (inst.r1 != n1 || inst.r2 != n2) return fail(CutFailure::not_applicable);
  if (!is_integral(inst.a1, 1e-9) || !is_integral(inst.g1, 1e-9) ||
      !is_integral(inst.b1, 1e-9) || !is_integral(inst.a2, 1e-9) ||
      !is_integral(inst.g2, 1e-9) || !is_integral(inst.b2, 1e-9))
    return fail(CutFailure::not_applicable);
  const std::vector<double>& z = node.result.solution;
  if (!is_integral(z)) return fail(CutFailure::not_applicable);

  // Binding instance rows and original bounds at the vertex, in exact
  // integer form.
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<long long>> irows;
  std::vector<long long> irhs;
  auto add_block = [&](const Mat& a, const Mat& g, const std::vector<double>& b) {
    for (int i = 0; i < a.rows; ++i) {
      double lhs = 0.0;
      std::vector<double> row(n, 0.0);
      std::vector<long long> irow(n, 0);
      for (int j = 0; j < n1; ++j) {
        row[j] = a(i, j);
        irow[j] = std::llround(a(i, j));
        lhs += a(i, j) * z[j];
      }
      for (int j = 0; j < n2; ++j) {
        row[n1 + j] = g(i, j);
        irow[n1 + j] = std::llround(g(i, j));
        lhs += g(i, j) * z[n1 + j];
      }
      if (std::abs(lhs - b[i]) > kInteriorMargin) continue;
      rows.push_back(std::move(row));
      irows.push_back(std::move(irow));
      irhs.push_back(std::llround(b[i]));
    }
  };
  add_block(inst.a1, inst.g1, inst.b1);
  add_block(inst.a2, inst.g2, inst.b2);
  for (int j = 0; j < n; ++j) {
    if (std::abs(z[j] - original_lower(inst, j)) > kInteriorMargin) continue;
    std::vector<double> row(n, 0.0);
    std::vector<long long> irow(n, 0);
    row[j] = 1.0;
    irow[j] = 1;
    rows.push_back(std::move(row));
    irows.push_back(std::move(irow));
    irhs.push_back(std::llround(original_lower(inst, j)));
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(z[j] - original_upper(inst, j)) > kInteriorMargin) continue;
    std::vector<double> row(n, 0.0);
    std::vector<long long> irow(n, 0);
    row[j] = -1.0;
    irow[j] = -1;
    rows.push_back(std::move(row));
    irows.push_back(std::move(irow));
    irhs.push_back(-std::llround(original_upper(inst, j)));
  }

  std::vector<int> pick = spanning_subset(rows, n);
  if (pick.empty()) return fail(CutFailure::not_applicable);

  // Any lattice point other than the vertex beats at least one binding row
  // by a full unit, so the summed row can be pushed one unit tighter.
  std::vector<long long> coef(n, 0);
  long long rhs_sum = 0;
  for (int k : pick) {
    for (int j = 0; j < n; ++j) coef[j] += irows[k][j];
    rhs_sum += irhs[k];
  }
  long long g = 0;
  for (long long v : coef) g = gcd_ll(g, v);
  if (g == 0) return fail(CutFailure::not_applicable);
  long long beta = ceil_div(rhs_sum + 1, g);

  Cut c;
  c.alpha_x.resize(n1);
  c.alpha_y.resize(n2);
  for (int j = 0; j < n1; ++j) c.alpha_x[j] = static_cast<double>(coef[j] / g);
  for (int j = 0; j < n2; ++j) c.alpha_y[j] = static_cast<double>(coef[n1 + j] / g);
  c.beta = static_cast<double>(beta);
  c.scope = CutScope::global_scope();
  c.origin = CutOrigin::integer_no_good;
  return emit(std::move(c), inst, node);
}

CutResult gen_benders_binary(const MiblpInstance& inst, const NodeLp& node,
                             const std::vector<double>& ystar, double big_m) {
  check_node(inst, node);
  if (static_cast<int>(ystar.size()) != inst.n2)
    throw CutError("improving solution has the wrong dimension");
  if (!binary_linking_bounds(inst)) return fail(CutFailure::not_applicable);
  std::vector<double> x = vertex_x(inst, node);
  for (int i : inst.linking)
    if (std::abs(x[i]) > kEps && std::abs(x[i] - 1.0) > kEps)
      return fail(CutFailure::not_applicable);
  if (dot(inst.d2, vertex_y(inst, node)) <= dot(inst.d2, ystar) + kEps)
    return fail(CutFailure::no_certificate);

  Cut c;
  c.alpha_x.assign(inst.n1, 0.0);
  c.alpha_y.resize(inst.n2);
  for (int j = 0; j < inst.n2; ++j) c.alpha_y[j] = -inst.d2[j];
  c.beta = -dot(inst.d2, ystar);
  for (int i : inst.linking) {
    bool col_nonneg = true, col_nonpos = true;
    for (int k = 0; k < inst.m2(); ++k) {
      col_nonneg = col_nonneg && inst.a2(k, i) >= -1e-9;
      col_nonpos = col_nonpos && inst.a2(k, i) <= 1e-9;
    }
    bool at_one = std::abs(x[i] - 1.0) <= kEps;
    if (!col_nonpos && at_one) {
      // Flipping this variable off shrinks the follower region; relax.
      c.alpha_x[i] -= big_m;
      c.beta -= big_m;
    } else if (!col_nonneg && !at_one) {
      c.alpha_x[i] += big_m;
    }
  }
  c.scope = CutScope::global_scope();
  c.origin = CutOrigin::benders_binary;
  normalize_cut(c);
  return emit(std::move(c), inst, node);
}

CutResult gen_benders_interdiction(const MiblpInstance& inst, const NodeLp& node,
                                   const std::vector<double>& ystar, double big_m) {
  check_node(inst, node);
  if (!inst.interdiction) return fail(CutFailure::not_applicable);
  if (static_cast<int>(ystar.size()) != inst.n2)
    throw CutError("improving solution has the wrong dimension");
  if (!binary_linking_bounds(inst)) return fail(CutFailure::not_applicable);
  for (int i : inst.linking)
    if (i >= inst.n2) return fail(CutFailure::not_applicable);
  std::vector<double> x = vertex_x(inst, node);
  for (int i : inst.linking)
    if (std::abs(x[i]) > kEps && std::abs(x[i] - 1.0) > kEps)
      return fail(CutFailure::not_applicable);
  if (dot(inst.d2, vertex_y(inst, node)) <= dot(inst.d2, ystar) + kEps)
    return fail(CutFailure::no_certificate);

  const Mat& fg = inst.interdiction->follower_g;
  Cut c;
  c.alpha_x.assign(inst.n1, 0.0);
  c.alpha_y.resize(inst.n2);
  for (int j = 0; j < inst.n2; ++j) c.alpha_y[j] = -inst.d2[j];
  c.beta = -dot(inst.d2, ystar);
  for (int i : inst.linking) {
    bool col_nonneg = true, col_nonpos = true;
    for (int k = 0; k < fg.rows; ++k) {
      col_nonneg = col_nonneg && fg(k, i) >= -1e-9;
      col_nonpos = col_nonpos && fg(k, i) <= 1e-9;
    }
    if (col_nonpos) {
      // Interdicting this variable only frees the follower rows, so charge
      // exactly the value it loses.
      c.alpha_x[i] -= inst.d2[i] * ystar[i];
    } else if (std::abs(ystar[i]) > kEps) {
      c.alpha_x[i] += big_m;
    }
    if (col_nonneg && std::abs(ystar[i]) <= kEps) c.alpha_y[i] += inst.d2[i];
  }
  c.scope = CutScope::global_scope();
  c.origin = CutOrigin::benders_interdiction;
  normalize_cut(c);
  return emit(std::move(c), inst, node);
}

CutResult gen_generalized_no_good(const MiblpInstance& inst, const std::vector<double>& gamma,
                                  const UbEvidence& evidence) {
  int nl = static_cast<int>(inst.linking.size());
  if (nl == 0 || static_cast<int>(gamma.size()) != nl) return fail(CutFailure::not_applicable);
  if (!binary_linking_bounds(inst)) return fail(CutFailure::not_applicable);
  std::vector<double> g(nl);
  for (int k = 0; k < nl; ++k) {
    if (std::abs(gamma[k]) > kEps && std::abs(gamma[k] - 1.0) > kEps)
      return fail(CutFailure::not_applicable);
    g[k] = std::round(gamma[k]);
  }
  if (evidence.gamma.size() != g.size()) return fail(CutFailure::not_applicable);
  for (int k = 0; k < nl; ++k)
    if (std::abs(evidence.gamma[k] - g[k]) > kEps) return fail(CutFailure::not_applicable);

  Cut c;
  c.alpha_x.assign(inst.n1, 0.0);
  c.alpha_y.assign(inst.n2, 0.0);
  c.beta = 1.0;
  for (int k = 0; k < nl; ++k) {
    if (g[k] > 0.5) {
      c.alpha_x[inst.linking[k]] = -1.0;
      c.beta -= 1.0;
    } else {
      c.alpha_x[inst.linking[k]] = 1.0;
    }
  }
  c.scope = CutScope::excluding(g);
  c.origin = CutOrigin::generalized_no_good;
  CutResult res;
  res.cut = std::move(c);
  return res;
}

}  // namespace miblp
