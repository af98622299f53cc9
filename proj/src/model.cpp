#include "miblp/model.hpp"

#include <algorithm>
#include <cmath>

#include "miblp/simplex.hpp"

namespace miblp {

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double row_dot(const Mat& m, int i, const std::vector<double>& v) {
  double s = 0.0;
  for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
  return s;
}

bool is_integral(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

bool is_integral(const std::vector<double>& v, double tol) {
  return std::all_of(v.begin(), v.end(), [tol](double e) { return is_integral(e, tol); });
}

bool is_integral(const Mat& m, double tol) { return is_integral(m.a, tol); }

std::vector<double> block_residuals(const Mat& a, const Mat& g, const std::vector<double>& b,
                                    const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> r(b.size());
  for (int i = 0; i < static_cast<int>(b.size()); ++i) {
    double lhs = 0.0;
    if (a.rows > 0) lhs += row_dot(a, i, x);
    if (g.rows > 0) lhs += row_dot(g, i, y);
    r[i] = lhs - b[i];
  }
  return r;
}

bool within_bounds(const std::vector<double>& v, const std::vector<double>& lo,
                   const std::vector<double>& hi, double tol) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < lo[i] - tol || v[i] > hi[i] + tol) return false;
  return true;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ModelError(what);
}

void check_finite(const std::vector<double>& v, const std::string& name) {
  for (double e : v) require(std::isfinite(e), name + " contains a non-finite entry");
}

void check_dims(const RawInstance& raw) {
  require(raw.n1 >= 0 && raw.n2 >= 1, "need at least one second-level variable");
  require(raw.r1 >= 0 && raw.r1 <= raw.n1 && raw.r2 >= 0 && raw.r2 <= raw.n2,
          "integer counts out of range");
  require(static_cast<int>(raw.c.size()) == raw.n1, "c has wrong length");
  require(static_cast<int>(raw.d1.size()) == raw.n2, "d1 has wrong length");
  require(static_cast<int>(raw.d2.size()) == raw.n2, "d2 has wrong length");
  auto block = [&](const Mat& a, const Mat& g, const std::vector<double>& b,
                   const std::vector<RowSense>& s, const std::string& name) {
    int m = static_cast<int>(b.size());
    require(static_cast<int>(s.size()) == m, name + " sense list has wrong length");
    if (m > 0) {
      require(a.rows == m && g.rows == m, name + " row counts disagree");
      require(a.cols == raw.n1 || (raw.n1 == 0 && a.cols == 0), name + " x-block has wrong width");
      require(g.cols == raw.n2, name + " y-block has wrong width");
    }
  };
  block(raw.a1, raw.g1, raw.b1, raw.s1, "first-level block");
  block(raw.a2, raw.g2, raw.b2, raw.s2, "second-level block");
  require(!raw.b2.empty(), "second-level block must have at least one row");
  require(static_cast<int>(raw.lx.size()) == raw.n1 && static_cast<int>(raw.ux.size()) == raw.n1,
          "x bounds have wrong length");
  require(static_cast<int>(raw.ly.size()) == raw.n2 && static_cast<int>(raw.uy.size()) == raw.n2,
          "y bounds have wrong length");
  check_finite(raw.c, "c");
  check_finite(raw.d1, "d1");
  check_finite(raw.d2, "d2");
  check_finite(raw.b1, "b1");
  check_finite(raw.b2, "b2");
  check_finite(raw.a1.a, "a1");
  check_finite(raw.g1.a, "g1");
  check_finite(raw.a2.a, "a2");
  check_finite(raw.g2.a, "g2");
  check_finite(raw.lx, "lx");
  check_finite(raw.ux, "ux");
  check_finite(raw.ly, "ly");
  check_finite(raw.uy, "uy");
  for (int j = 0; j < raw.n1; ++j)
    require(raw.lx[j] <= raw.ux[j], "x bounds cross at index " + std::to_string(j));
  for (int j = 0; j < raw.n2; ++j)
    require(raw.ly[j] <= raw.uy[j], "y bounds cross at index " + std::to_string(j));
}

// Appends the >= normalization of one mixed-sense row, splitting equalities.
void push_row(Mat& a, Mat& g, std::vector<double>& b, const std::vector<double>& arow,
              const std::vector<double>& grow, double rhs, RowSense sense) {
  auto append = [&](double sign) {
    for (double e : arow) a.a.push_back(sign * e);
    for (double e : grow) g.a.push_back(sign * e);
    b.push_back(sign * rhs);
    ++a.rows;
    ++g.rows;
  };
  if (sense == RowSense::ge || sense == RowSense::eq) append(1.0);
  if (sense == RowSense::le || sense == RowSense::eq) append(-1.0);
}

}  // namespace

MiblpInstance canonicalize(const RawInstance& raw) {
  check_dims(raw);

  MiblpInstance inst;
  inst.n1 = raw.n1;
  inst.n2 = raw.n2;
  inst.r1 = raw.r1;
  inst.r2 = raw.r2;
  inst.c = raw.c;
  inst.d1 = raw.d1;
  inst.d2 = raw.d2;
  if (raw.leader_maximize) {
    for (double& e : inst.c) e = -e;
    for (double& e : inst.d1) e = -e;
  }
  if (raw.follower_maximize)
    for (double& e : inst.d2) e = -e;

  auto normalize_block = [&](const Mat& a, const Mat& g, const std::vector<double>& b,
                             const std::vector<RowSense>& s, Mat& ca, Mat& cg,
                             std::vector<double>& cb) {
    ca = Mat(0, raw.n1);
    cg = Mat(0, raw.n2);
    for (int i = 0; i < static_cast<int>(b.size()); ++i)
      push_row(ca, cg, cb, a.rows ? a.row(i) : std::vector<double>(raw.n1, 0.0),
               g.rows ? g.row(i) : std::vector<double>(raw.n2, 0.0), b[i], s[i]);
  };
  normalize_block(raw.a1, raw.g1, raw.b1, raw.s1, inst.a1, inst.g1, inst.b1);
  normalize_block(raw.a2, raw.g2, raw.b2, raw.s2, inst.a2, inst.g2, inst.b2);

  inst.lx = raw.lx;
  inst.ux = raw.ux;
  inst.ly = raw.ly;
  inst.uy = raw.uy;

  inst.linking = linking_set(inst);
  for (int i : inst.linking)
    require(i < inst.r1, "linking variable x[" + std::to_string(i) + "] must be integer");

  if (raw.interdiction) {
    const Interdiction& itd = *raw.interdiction;
    require(static_cast<int>(itd.u.size()) == static_cast<int>(inst.linking.size()),
            "interdiction bound vector length must match the linking set");
    for (int i : inst.linking)
      require(inst.lx[i] == 0.0 && inst.ux[i] == 1.0,
              "interdiction instances need binary linking variables");
    for (int j = 0; j < inst.n2; ++j)
      require(std::abs(inst.d1[j] + inst.d2[j]) <= 1e-12,
              "interdiction objectives must satisfy d1 = -d2");
    inst.interdiction = itd;
  }
  return inst;
}

RawInstance to_raw(const MiblpInstance& inst) {
  RawInstance raw;
  raw.n1 = inst.n1;
  raw.n2 = inst.n2;
  raw.r1 = inst.r1;
  raw.r2 = inst.r2;
  raw.c = inst.c;
  raw.d1 = inst.d1;
  raw.d2 = inst.d2;
  raw.a1 = inst.a1;
  raw.g1 = inst.g1;
  raw.b1 = inst.b1;
  raw.s1.assign(inst.b1.size(), RowSense::ge);
  raw.a2 = inst.a2;
  raw.g2 = inst.g2;
  raw.b2 = inst.b2;
  raw.s2.assign(inst.b2.size(), RowSense::ge);
  raw.lx = inst.lx;
  raw.ux = inst.ux;
  raw.ly = inst.ly;
  raw.uy = inst.uy;
  raw.interdiction = inst.interdiction;
  return raw;
}

std::vector<int> linking_set(const MiblpInstance& inst) {
  std::vector<int> links;
  for (int j = 0; j < inst.n1; ++j) {
    bool nonzero = false;
    for (int i = 0; i < inst.a2.rows && !nonzero; ++i) nonzero = inst.a2(i, j) != 0.0;
    if (nonzero) links.push_back(j);
  }
  return links;
}

AssumptionReport check_assumptions(const MiblpInstance& inst) {
  AssumptionReport rep;

  rep.bounded = true;
  for (int j = 0; j < inst.n1; ++j)
    rep.bounded = rep.bounded && std::isfinite(inst.lx[j]) && std::isfinite(inst.ux[j]) &&
                  inst.lx[j] <= inst.ux[j];
  for (int j = 0; j < inst.n2; ++j)
    rep.bounded = rep.bounded && std::isfinite(inst.ly[j]) && std::isfinite(inst.uy[j]) &&
                  inst.ly[j] <= inst.uy[j];

  // Normalized recession ray check: an improving second-level ray exists iff
  // min { d2 r : g2 r >= 0, 0 <= r <= 1 } is strictly negative.
  LpProblem ray;
  ray.objective = inst.d2;
  ray.rows = inst.g2;
  ray.rhs.assign(inst.m2(), 0.0);
  ray.lower.assign(inst.n2, 0.0);
  ray.upper.assign(inst.n2, 1.0);
  LpResult res = solve_lp(ray);
  rep.no_unbounded_ray = res.status == LpStatus::optimal && res.objective >= -kEps;

  rep.linking_integer = true;
  for (int i : linking_set(inst)) rep.linking_integer = rep.linking_integer && i < inst.r1;
  return rep;
}

}  // namespace miblp
