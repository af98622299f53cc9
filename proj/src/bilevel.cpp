#include "miblp/bilevel.hpp"

#include <algorithm>
#include <cmath>

namespace miblp {

namespace {

std::vector<int> iota_ints(int first, int count) {
  std::vector<int> v(count);
  for (int i = 0; i < count; ++i) v[i] = first + i;
  return v;
}

// Follower rows at fixed x: G2 y >= b2 - A2 x.
MilpProblem follower_problem(const MiblpInstance& inst, const std::vector<double>& x) {
  MilpProblem p;
  p.lp.objective = inst.d2;
  p.lp.rows = inst.g2;
  p.lp.rhs.resize(inst.m2());
  for (int i = 0; i < inst.m2(); ++i)
    p.lp.rhs[i] = inst.b2[i] - row_dot(inst.a2, i, x);
  p.lp.lower = inst.ly;
  p.lp.upper = inst.uy;
  p.integer_vars = iota_ints(0, inst.r2);
  return p;
}

MilpResult run_oracle(const MilpProblem& p, const char* what) {
  MilpResult r = solve_milp(p);
  if (r.status == MilpStatus::limit)
    throw BilevelError(std::string("oracle node limit reached in ") + what);
  return r;
}

// Joint problem over (x, y) with both row blocks and the box; extra rows can
// be appended by the caller before solving.
MilpProblem joint_problem(const MiblpInstance& inst) {
  MilpProblem p;
  int n = inst.n1 + inst.n2;
  p.lp.objective.assign(n, 0.0);
  p.lp.rows = Mat(inst.m1() + inst.m2(), n);
  p.lp.rhs.resize(inst.m1() + inst.m2());
  for (int i = 0; i < inst.m1(); ++i) {
    for (int j = 0; j < inst.n1; ++j) p.lp.rows(i, j) = inst.a1(i, j);
    for (int j = 0; j < inst.n2; ++j) p.lp.rows(i, inst.n1 + j) = inst.g1(i, j);
    p.lp.rhs[i] = inst.b1[i];
  }
  for (int i = 0; i < inst.m2(); ++i) {
    int r = inst.m1() + i;
    for (int j = 0; j < inst.n1; ++j) p.lp.rows(r, j) = inst.a2(i, j);
    for (int j = 0; j < inst.n2; ++j) p.lp.rows(r, inst.n1 + j) = inst.g2(i, j);
    p.lp.rhs[r] = inst.b2[i];
  }
  p.lp.lower = inst.lx;
  p.lp.lower.insert(p.lp.lower.end(), inst.ly.begin(), inst.ly.end());
  p.lp.upper = inst.ux;
  p.lp.upper.insert(p.lp.upper.end(), inst.uy.begin(), inst.uy.end());
  p.integer_vars = iota_ints(0, inst.r1);
  for (int j = 0; j < inst.r2; ++j) p.integer_vars.push_back(inst.n1 + j);
  return p;
}

void append_row(MilpProblem& p, const std::vector<double>& coef, double rhs) {
  p.lp.rows.a.insert(p.lp.rows.a.end(), coef.begin(), coef.end());
  ++p.lp.rows.rows;
  p.lp.rhs.push_back(rhs);
}

bool integral_on(const std::vector<double>& v, int count) {
  for (int j = 0; j < count; ++j)
    if (std::abs(v[j] - std::round(v[j])) > kEps) return false;
  return true;
}

}  // namespace

SecondLevelSolve solve_second_level(const MiblpInstance& inst,
                                    const std::vector<double>& x) {
  SecondLevelSolve out;
  MilpResult r = run_oracle(follower_problem(inst, x), "the follower solve");
  if (r.status != MilpStatus::optimal) return out;
  out.feasible = true;
  out.value = r.objective;
  out.argmin = r.solution;
  return out;
}

std::optional<double> phi(const MiblpInstance& inst, const std::vector<double>& x) {
  SecondLevelSolve s = solve_second_level(inst, x);
  if (!s.feasible) return std::nullopt;
  return s.value;
}

std::optional<std::vector<double>> reaction(const MiblpInstance& inst,
                                            const std::vector<double>& x) {
  SecondLevelSolve s = solve_second_level(inst, x);
  if (!s.feasible) return std::nullopt;

  // Second stage: best leader objective among follower optima that also
  // satisfy the first-level rows at x.
  MilpProblem p = follower_problem(inst, x);
  p.lp.objective = inst.d1;
  std::vector<double> neg_d2(inst.n2);
  for (int j = 0; j < inst.n2; ++j) neg_d2[j] = -inst.d2[j];
  append_row(p, neg_d2, -s.value - kEps);
  for (int i = 0; i < inst.m1(); ++i)
    append_row(p, inst.g1.row(i), inst.b1[i] - row_dot(inst.a1, i, x));
  MilpResult r = run_oracle(p, "the reaction solve");
  if (r.status != MilpStatus::optimal) return std::nullopt;
  return r.solution;
}

FeasibilityVerdict check_feasibility(const MiblpInstance& inst, const Point& p) {
  FeasibilityVerdict v;
  v.violates_c1 = !integral_on(p.x, inst.r1);
  v.violates_2b = !integral_on(p.y, inst.r2);

  bool rows1_ok = true, rows2_ok = true;
  for (int i = 0; i < inst.m1() && rows1_ok; ++i)
    if (row_dot(inst.a1, i, p.x) + row_dot(inst.g1, i, p.y) < inst.b1[i] - kEps)
      rows1_ok = false;
  for (int i = 0; i < inst.m2() && rows2_ok; ++i)
    if (row_dot(inst.a2, i, p.x) + row_dot(inst.g2, i, p.y) < inst.b2[i] - kEps)
      rows2_ok = false;
  v.violates_2a = !rows1_ok;
  v.in_p = rows1_ok && rows2_ok && within_bounds(p.x, inst.lx, inst.ux, kEps) &&
           within_bounds(p.y, inst.ly, inst.uy, kEps);

  SecondLevelSolve s = solve_second_level(inst, p.x);
  if (!s.feasible) return v;  // follower empty: no value condition, no certificate
  v.phi_value = s.value;
  double d2y = dot(inst.d2, p.y);
  if (d2y > s.value + kEps) {
    v.violates_2c = true;
    Certificate cert;
    cert.kind = CertificateKind::improving_solution;
    // Prefer a reaction-stage witness (also first-level feasible); the plain
    // follower argmin is a valid fallback.
    std::optional<std::vector<double>> re = reaction(inst, p.x);
    cert.ystar = re ? *re : s.argmin;
    v.certificate = std::move(cert);
  }
  return v;
}

SolutionCategory classify_relaxation_solution(const MiblpInstance& inst, const Point& p) {
  bool integral = integral_on(p.x, inst.r1) && integral_on(p.y, inst.r2);
  std::optional<double> f = phi(inst, p.x);
  bool above = f.has_value() && dot(inst.d2, p.y) > *f + kEps;
  if (integral) return above ? SolutionCategory::c3 : SolutionCategory::feasible;
  return above ? SolutionCategory::c2 : SolutionCategory::c1;
}

std::optional<std::pair<Point, double>> best_ub(const MiblpInstance& inst,
                                                const std::vector<double>& gamma) {
  if (gamma.size() != inst.linking.size())
    throw BilevelError("linking assignment has wrong length");
  if (!is_integral(gamma))
    throw BilevelError("linking assignment must be integral");

  // The follower optimum is the same for every x on this slice; evaluate it
  // at one representative.
  std::vector<double> xrep = inst.lx;
  for (size_t k = 0; k < inst.linking.size(); ++k) xrep[inst.linking[k]] = gamma[k];
  std::optional<double> f = phi(inst, xrep);
  if (!f) return std::nullopt;

  MilpProblem p = joint_problem(inst);
  p.lp.objective = inst.c;
  p.lp.objective.insert(p.lp.objective.end(), inst.d1.begin(), inst.d1.end());
  std::vector<double> row(inst.n1 + inst.n2, 0.0);
  for (int j = 0; j < inst.n2; ++j) row[inst.n1 + j] = -inst.d2[j];
  append_row(p, row, -*f - kEps);
  for (size_t k = 0; k < inst.linking.size(); ++k) {
    int j = inst.linking[k];
    if (gamma[k] < inst.lx[j] - kEps || gamma[k] > inst.ux[j] + kEps) return std::nullopt;
    p.lp.lower[j] = gamma[k];
    p.lp.upper[j] = gamma[k];
  }
  MilpResult r = run_oracle(p, "the fixed-linking solve");
  if (r.status != MilpStatus::optimal) return std::nullopt;
  Point pt;
  pt.x.assign(r.solution.begin(), r.solution.begin() + inst.n1);
  pt.y.assign(r.solution.begin() + inst.n1, r.solution.end());
  return std::make_pair(std::move(pt), r.objective);
}

std::optional<Certificate> find_improving_direction(const MiblpInstance& inst,
                                                    const Point& p) {
  int n2 = inst.n2, m2 = inst.m2();
  // Variables: dy (n2), then one slack credit per follower row (w), then one
  // per lower bound (v). Maximizing the credits finds the direction leaving
  // as many rows and bounds slack as possible.
  MilpProblem q;
  int n = n2 + m2 + n2;
  q.lp.objective.assign(n, 0.0);
  for (int i = 0; i < m2 + n2; ++i) q.lp.objective[n2 + i] = -1.0;
  q.lp.lower.assign(n, 0.0);
  q.lp.upper.assign(n, 0.0);
  for (int j = 0; j < n2; ++j) {
    q.lp.lower[j] = inst.ly[j] - p.y[j];
    q.lp.upper[j] = inst.uy[j] - p.y[j];
  }
  std::vector<double> res(m2);
  for (int i = 0; i < m2; ++i) {
    res[i] = inst.b2[i] - row_dot(inst.a2, i, p.x) - row_dot(inst.g2, i, p.y);
    q.lp.lower[n2 + i] = std::min(res[i], 0.0);
  }
  for (int j = 0; j < n2; ++j)
    q.lp.lower[n2 + m2 + j] = std::min(inst.ly[j] - p.y[j], 0.0);
  q.integer_vars = iota_ints(0, inst.r2);

  q.lp.rows = Mat(0, n);
  std::vector<double> row(n, 0.0);
  for (int j = 0; j < n2; ++j) row[j] = -inst.d2[j];
  append_row(q, row, 1.0);  // d2 dy <= -1
  for (int i = 0; i < m2; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for (int j = 0; j < n2; ++j) row[j] = inst.g2(i, j);
    append_row(q, row, res[i]);  // stay follower-feasible after the step
    row[n2 + i] = -1.0;
    append_row(q, row, 0.0);     // w_i <= G2_i dy
    row[n2 + i] = 0.0;
  }
  for (int j = 0; j < n2; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    row[j] = 1.0;
    row[n2 + m2 + j] = -1.0;
    append_row(q, row, 0.0);     // v_j <= dy_j
  }

  MilpResult r = run_oracle(q, "the improving-direction solve");
  if (r.status != MilpStatus::optimal) return std::nullopt;

  Certificate cert;
  cert.kind = CertificateKind::improving_direction;
  cert.delta_y.assign(r.solution.begin(), r.solution.begin() + n2);
  cert.drops_w.resize(m2);
  for (int i = 0; i < m2; ++i) cert.drops_w[i] = r.solution[n2 + i] >= -kEps;
  cert.drops_v.resize(n2);
  for (int j = 0; j < n2; ++j) cert.drops_v[j] = r.solution[n2 + m2 + j] >= -kEps;
  return cert;
}

double compute_big_m(const MiblpInstance& inst, const std::vector<double>& ystar) {
  MilpProblem p = joint_problem(inst);
  for (int j = 0; j < inst.n2; ++j) p.lp.objective[inst.n1 + j] = -inst.d2[j];
  MilpResult r = run_oracle(p, "the big-M solve");
  if (r.status != MilpStatus::optimal) return 0.0;
  return -r.objective - dot(inst.d2, ystar);
}

}  // namespace miblp
