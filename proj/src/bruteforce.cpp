#include "miblp/bruteforce.hpp"

#include <algorithm>
#include <cmath>

#include "miblp/bilevel.hpp"
#include "miblp/simplex.hpp"

namespace miblp {

namespace {

constexpr double kTieTol = 1e-9;

struct LatticeBox {
  std::vector<long long> lo, hi;  // integer ranges per dimension

  long long count() const {
    long long c = 1;
    for (size_t i = 0; i < lo.size(); ++i) {
      long long r = hi[i] - lo[i] + 1;
      if (r <= 0) return 0;
      if (c > (1LL << 62) / std::max(r, 1LL)) return 1LL << 62;
      c *= r;
    }
    return c;
  }
};

LatticeBox integer_box(const std::vector<double>& lo, const std::vector<double>& hi,
                       int count) {
  LatticeBox b;
  for (int i = 0; i < count; ++i) {
    b.lo.push_back(static_cast<long long>(std::ceil(lo[i] - kTieTol)));
    b.hi.push_back(static_cast<long long>(std::floor(hi[i] + kTieTol)));
  }
  return b;
}

// Odometer over the box, last index fastest. Returns false after the final
// point has been visited.
bool advance(std::vector<long long>& v, const LatticeBox& b) {
  for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) {
    if (v[i] < b.hi[i]) {
      ++v[i];
      for (size_t j = i + 1; j < v.size(); ++j) v[j] = b.lo[j];
      return true;
    }
  }
  return false;
}

std::vector<double> to_doubles(const std::vector<long long>& v) {
  return std::vector<double>(v.begin(), v.end());
}

std::vector<long long> linking_key(const MiblpInstance& inst,
                                   const std::vector<long long>& x) {
  std::vector<long long> key;
  key.reserve(inst.linking.size());
  for (int j : inst.linking) key.push_back(x[j]);
  return key;
}

bool rows_hold(const Mat& a, const Mat& g, const std::vector<double>& rhs,
               const std::vector<double>& x, const std::vector<double>& y) {
  for (int i = 0; i < a.rows; ++i)
    if (row_dot(a, i, x) + row_dot(g, i, y) < rhs[i] - kTieTol) return false;
  return true;
}

void update_optimum(EnumerationResult& res, const Point& p, double value) {
  if (!res.optimum || value < res.optimum->second - kTieTol)
    res.optimum = std::make_pair(p, value);
}

// Mixed follower: minimize obj over the continuous tail of y with the
// integer head fixed, subject to the given joint rows at fixed x. Rows are
// (coef_x, coef_y, rhs) triples taken directly from instance blocks.
struct TailLp {
  const MiblpInstance& inst;
  LpProblem lp;

  TailLp(const MiblpInstance& i, const std::vector<double>& obj_tail) : inst(i) {
    int tail = i.n2 - i.r2;
    lp.objective = obj_tail;
    lp.rows = Mat(0, tail);
    lp.lower.assign(i.ly.begin() + i.r2, i.ly.end());
    lp.upper.assign(i.uy.begin() + i.r2, i.uy.end());
  }

  void add_block(const Mat& ax, const Mat& gy, const std::vector<double>& rhs,
                 const std::vector<double>& x, const std::vector<double>& yhead) {
    for (int i = 0; i < gy.rows; ++i) {
      double r = rhs[i] - row_dot(ax, i, x);
      for (int j = 0; j < inst.r2; ++j) r -= gy(i, j) * yhead[j];
      for (int j = inst.r2; j < inst.n2; ++j) lp.rows.a.push_back(gy(i, j));
      ++lp.rows.rows;
      lp.rhs.push_back(r);
    }
  }

  void add_row(const std::vector<double>& coef_tail, double rhs) {
    lp.rows.a.insert(lp.rows.a.end(), coef_tail.begin(), coef_tail.end());
    ++lp.rows.rows;
    lp.rhs.push_back(rhs);
  }
};

}  // namespace

EnumerationResult enumerate(const MiblpInstance& inst, long cap) {
  if (inst.r1 != inst.n1)
    throw BruteforceError("enumeration needs all first-level variables integer");
  LatticeBox xbox = integer_box(inst.lx, inst.ux, inst.n1);
  LatticeBox ybox = integer_box(inst.ly, inst.uy, inst.r2);
  if (xbox.count() * std::max<long long>(ybox.count(), 1) > cap)
    throw BruteforceError("lattice too large for enumeration");

  const bool pure = inst.r2 == inst.n2;
  const int tail = inst.n2 - inst.r2;
  EnumerationResult res;
  if (xbox.count() == 0) return res;

  std::vector<long long> xi = xbox.lo;
  do {
    std::vector<double> x = to_doubles(xi);
    double best = 0.0;
    bool any = false;

    if (pure) {
      std::vector<long long> yi = ybox.lo;
      if (ybox.count() > 0) {
        // first sweep: the follower optimum at this x
        std::vector<long long> it = yi;
        bool more = true;
        while (more) {
          std::vector<double> y = to_doubles(it);
          if (rows_hold(inst.a2, inst.g2, inst.b2, x, y)) {
            double v = dot(inst.d2, y);
            if (!any || v < best) best = v;
            any = true;
          }
          more = advance(it, ybox);
        }
        // second sweep: follower optima that also satisfy the leader rows
        if (any) {
          it = yi;
          more = true;
          while (more) {
            std::vector<double> y = to_doubles(it);
            if (rows_hold(inst.a2, inst.g2, inst.b2, x, y) &&
                dot(inst.d2, y) <= best + kTieTol &&
                rows_hold(inst.a1, inst.g1, inst.b1, x, y)) {
              Point p{x, y};
              double value = dot(inst.c, x) + dot(inst.d1, y);
              res.feasible_set.emplace_back(p, value);
              update_optimum(res, p, value);
            }
            more = advance(it, ybox);
          }
        }
      }
    } else {
      // Continuous follower tail: per integer head, finish with an LP.
      std::vector<double> d2_tail(inst.d2.begin() + inst.r2, inst.d2.end());
      std::vector<long long> it = ybox.lo;
      bool more = inst.r2 == 0 || ybox.count() > 0;
      std::vector<std::vector<double>> heads;
      std::vector<double> head_values;
      while (more) {
        std::vector<double> yhead = to_doubles(it);
        TailLp t(inst, d2_tail);
        t.add_block(inst.a2, inst.g2, inst.b2, x, yhead);
        LpResult lr = solve_lp(t.lp);
        if (lr.status == LpStatus::optimal) {
          double head_part = 0.0;
          for (int j = 0; j < inst.r2; ++j) head_part += inst.d2[j] * yhead[j];
          double v = head_part + lr.objective;
          if (!any || v < best) best = v;
          any = true;
          heads.push_back(yhead);
          head_values.push_back(v);
        }
        more = inst.r2 > 0 && advance(it, ybox);
        if (inst.r2 == 0) break;
      }
      if (any) {
        // optimistic completion: best leader objective among follower optima
        // that satisfy the leader rows
        bool found = false;
        Point best_p;
        double best_leader = 0.0;
        for (size_t k = 0; k < heads.size(); ++k) {
          if (head_values[k] > best + kTieTol) continue;
          std::vector<double> d1_tail(inst.d1.begin() + inst.r2, inst.d1.end());
          TailLp t(inst, d1_tail);
          t.add_block(inst.a2, inst.g2, inst.b2, x, heads[k]);
          t.add_block(inst.a1, inst.g1, inst.b1, x, heads[k]);
          std::vector<double> neg(tail);
          for (int j = 0; j < tail; ++j) neg[j] = -inst.d2[inst.r2 + j];
          double fixed = 0.0;
          for (int j = 0; j < inst.r2; ++j) fixed += inst.d2[j] * heads[k][j];
          t.add_row(neg, fixed - best - kEps);  // d2 y <= follower optimum
          LpResult lr = solve_lp(t.lp);
          if (lr.status != LpStatus::optimal) continue;
          std::vector<double> y = heads[k];
          y.insert(y.end(), lr.solution.begin(), lr.solution.end());
          double head_d1 = 0.0;
          for (int j = 0; j < inst.r2; ++j) head_d1 += inst.d1[j] * heads[k][j];
          double leader = dot(inst.c, x) + head_d1 + lr.objective;
          if (!found || leader < best_leader - kTieTol) {
            found = true;
            best_leader = leader;
            best_p = Point{x, y};
          }
        }
        if (found) {
          res.feasible_set.emplace_back(best_p, best_leader);
          update_optimum(res, best_p, best_leader);
        }
      }
    }

    std::vector<long long> key = linking_key(inst, xi);
    auto slot = res.phi_table.find(key);
    if (slot == res.phi_table.end())
      res.phi_table.emplace(std::move(key),
                            any ? std::optional<double>(best) : std::nullopt);
  } while (advance(xi, xbox));

  return res;
}

EnumerationResult enumerate_by_membership(const MiblpInstance& inst, long cap) {
  if (inst.r1 != inst.n1 || inst.r2 != inst.n2)
    throw BruteforceError("membership enumeration needs a pure-integer instance");
  LatticeBox xbox = integer_box(inst.lx, inst.ux, inst.n1);
  LatticeBox ybox = integer_box(inst.ly, inst.uy, inst.n2);
  if (xbox.count() * std::max<long long>(ybox.count(), 1) > cap)
    throw BruteforceError("lattice too large for enumeration");

  EnumerationResult res;
  if (xbox.count() == 0 || ybox.count() == 0) return res;

  std::vector<long long> xi = xbox.lo;
  do {
    std::vector<double> x = to_doubles(xi);
    std::vector<long long> yi = ybox.lo;
    bool more = true;
    while (more) {
      Point p{x, to_doubles(yi)};
      if (check_feasibility(inst, p).bilevel_feasible()) {
        double value = dot(inst.c, p.x) + dot(inst.d1, p.y);
        res.feasible_set.emplace_back(p, value);
        update_optimum(res, p, value);
      }
      more = advance(yi, ybox);
    }
    std::vector<long long> key = linking_key(inst, xi);
    if (res.phi_table.find(key) == res.phi_table.end()) {
      std::vector<double> xrep = inst.lx;
      for (size_t k = 0; k < inst.linking.size(); ++k)
        xrep[inst.linking[k]] = static_cast<double>(key[k]);
      res.phi_table.emplace(std::move(key), phi(inst, xrep));
    }
  } while (advance(xi, xbox));

  return res;
}

}  // namespace miblp
