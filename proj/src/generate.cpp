#include "miblp/generate.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <random>

namespace miblp {

namespace {

int draw(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
}

std::vector<double> draw_vec(std::mt19937& rng, int n, int lo, int hi) {
  std::vector<double> v(n);
  for (double& e : v) e = draw(rng, lo, hi);
  return v;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; });
}

MiblpInstance gen_den(const GenParams& p, std::mt19937& rng) {
  RawInstance raw;
  raw.n1 = p.n1;
  raw.n2 = p.n2;
  raw.r1 = p.n1;
  raw.r2 = p.n2;
  raw.c = draw_vec(rng, p.n1, -10, 10);
  raw.d1 = draw_vec(rng, p.n2, -10, 10);
  do raw.d2 = draw_vec(rng, p.n2, -10, 10);
  while (all_zero(raw.d2));
  raw.a1 = Mat(0, p.n1);
  raw.g1 = Mat(0, p.n2);
  raw.a2 = Mat(p.m2, p.n1);
  raw.g2 = Mat(p.m2, p.n2);
  for (int i = 0; i < p.m2; ++i) {
    for (int j = 0; j < p.n1; ++j) raw.a2(i, j) = -draw(rng, 1, 10);
    for (int j = 0; j < p.n2; ++j) raw.g2(i, j) = -draw(rng, 1, 10);
    raw.b2.push_back(-draw(rng, 1, 10 * p.ub));
    raw.s2.push_back(RowSense::ge);
  }
  raw.lx.assign(p.n1, 0.0);
  raw.ux.assign(p.n1, p.ub);
  raw.ly.assign(p.n2, 0.0);
  raw.uy.assign(p.n2, p.ub);
  return canonicalize(raw);
}

MiblpInstance gen_den2(const GenParams& p, std::mt19937& rng) {
  RawInstance raw;
  raw.n1 = p.n1;
  raw.n2 = p.n2;
  raw.r1 = p.n1;
  raw.r2 = p.n2;
  raw.c = draw_vec(rng, p.n1, -10, 10);
  raw.d1 = draw_vec(rng, p.n2, -10, 10);
  do raw.d2 = draw_vec(rng, p.n2, -10, 10);
  while (all_zero(raw.d2));
  raw.a1 = Mat(0, p.n1);
  raw.g1 = Mat(0, p.n2);
  raw.a2 = Mat(p.m2, p.n1);
  raw.g2 = Mat(p.m2, p.n2);
  for (int i = 0; i < p.m2; ++i) {
    for (int j = 0; j < p.n1; ++j) raw.a2(i, j) = draw(rng, -10, 10);
    for (int j = 0; j < p.n2; ++j) raw.g2(i, j) = draw(rng, -10, 10);
    raw.b2.push_back(draw(rng, 0, 5 * p.ub));
    raw.s2.push_back(RowSense::le);
  }
  raw.lx.assign(p.n1, 0.0);
  raw.ux.assign(p.n1, p.ub);
  raw.ly.assign(p.n2, 0.0);
  raw.uy.assign(p.n2, p.ub);
  return canonicalize(raw);
}

MiblpInstance gen_zhang(const GenParams& p, std::mt19937& rng) {
  if (p.n2 < 2)
    throw ModelError("zhang_like needs at least two second-level variables for the "
                     "objective alignment to be reachable");
  RawInstance raw;
  raw.n1 = p.n1;
  raw.n2 = p.n2;
  raw.r1 = p.n1;
  raw.r2 = p.n2;
  raw.c = draw_vec(rng, p.n1, -10, 10);
  raw.d2 = draw_vec(rng, p.n2, 1, 10);

  // Perturb the follower objective until the normalized inner product of the
  // two lands strictly inside (0.6, 0.8); checked in exact integer arithmetic
  // as 9 A B < 25 dot^2 < 16 A B with dot > 0.
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 10000) throw ModelError("objective alignment draw did not converge");
    raw.d1.clear();
    for (int j = 0; j < p.n2; ++j) raw.d1.push_back(raw.d2[j] + draw(rng, -6, 6));
    std::int64_t dot = 0, a = 0, b = 0;
    for (int j = 0; j < p.n2; ++j) {
      std::int64_t u = static_cast<std::int64_t>(raw.d1[j]);
      std::int64_t v = static_cast<std::int64_t>(raw.d2[j]);
      dot += u * v;
      a += u * u;
      b += v * v;
    }
    if (dot > 0 && 9 * a * b < 25 * dot * dot && 25 * dot * dot < 16 * a * b) break;
  }

  raw.a1 = Mat(0, p.n1);
  raw.g1 = Mat(0, p.n2);
  raw.a2 = Mat(p.m2, p.n1);
  raw.g2 = Mat(p.m2, p.n2);
  for (int i = 0; i < p.m2; ++i) {
    bool empty = true;
    while (empty) {
      for (int j = 0; j < p.n1; ++j) {
        raw.a2(i, j) = draw(rng, 0, 10);
        empty = empty && raw.a2(i, j) == 0.0;
      }
      for (int j = 0; j < p.n2; ++j) {
        raw.g2(i, j) = draw(rng, 0, 10);
        empty = empty && raw.g2(i, j) == 0.0;
      }
    }
    raw.b2.push_back(draw(rng, 20, 30));
    raw.s2.push_back(RowSense::le);
  }
  raw.lx.assign(p.n1, 0.0);
  raw.ux.assign(p.n1, 1.0);
  raw.ly.assign(p.n2, 0.0);
  raw.uy.assign(p.n2, p.ub);
  return canonicalize(raw);
}

MiblpInstance gen_knapsack(const GenParams& p, std::mt19937& rng) {
  int k = p.n1;
  std::vector<double> profit = draw_vec(rng, k, 1, 10);
  std::vector<double> weight = draw_vec(rng, k, 1, 10);
  int wsum = 0;
  for (double w : weight) wsum += static_cast<int>(w);
  int budget = draw(rng, 1, std::max(1, k - 1));
  int capacity = draw(rng, 1, std::max(1, wsum - 1));

  RawInstance raw;
  raw.n1 = k;
  raw.n2 = k;
  raw.r1 = k;
  raw.r2 = k;
  raw.c.assign(k, 0.0);
  raw.d1 = profit;
  for (double v : profit) raw.d2.push_back(-v);
  raw.a1 = Mat(1, k);
  raw.g1 = Mat(1, k);
  for (int j = 0; j < k; ++j) raw.a1(0, j) = -1.0;
  raw.b1 = {static_cast<double>(-budget)};
  raw.s1 = {RowSense::ge};
  raw.a2 = Mat(k + 1, k);
  raw.g2 = Mat(k + 1, k);
  for (int j = 0; j < k; ++j) raw.g2(0, j) = -weight[j];
  raw.b2.push_back(-capacity);
  raw.s2.push_back(RowSense::ge);
  for (int j = 0; j < k; ++j) {
    raw.a2(j + 1, j) = -1.0;
    raw.g2(j + 1, j) = -1.0;
    raw.b2.push_back(-1.0);
    raw.s2.push_back(RowSense::ge);
  }
  raw.lx.assign(k, 0.0);
  raw.ux.assign(k, 1.0);
  raw.ly.assign(k, 0.0);
  raw.uy.assign(k, 1.0);

  Interdiction inter;
  inter.budget_a = raw.a1;
  inter.budget_b = raw.b1;
  inter.follower_g = Mat(1, k);
  for (int j = 0; j < k; ++j) inter.follower_g(0, j) = -weight[j];
  inter.follower_rhs = {static_cast<double>(-capacity)};
  inter.u.assign(k, 1.0);
  raw.interdiction = std::move(inter);
  return canonicalize(raw);
}

}  // namespace

MiblpInstance generate(GenFamily family, const GenParams& params) {
  if (params.n1 < 1 || params.n2 < 1 || params.m2 < 1 || params.ub < 1)
    throw ModelError("generator sizes must be positive");
  std::mt19937 rng(params.seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    MiblpInstance inst;
    switch (family) {
      case GenFamily::den_like:
        inst = gen_den(params, rng);
        break;
      case GenFamily::den2_like:
        inst = gen_den2(params, rng);
        break;
      case GenFamily::zhang_like:
        inst = gen_zhang(params, rng);
        break;
      case GenFamily::knapsack_interdiction:
        inst = gen_knapsack(params, rng);
        break;
    }
    if (check_assumptions(inst).all()) return inst;
  }
  throw ModelError("generator did not produce an instance satisfying the solver assumptions");
}

std::optional<GenFamily> family_from_name(const std::string& name) {
  std::string n;
  for (char ch : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (n == "den" || n == "den_like") return GenFamily::den_like;
  if (n == "den2" || n == "den2_like") return GenFamily::den2_like;
  if (n == "zhang" || n == "zhang_like") return GenFamily::zhang_like;
  if (n == "knapsack" || n == "interdiction" || n == "knapsack_interdiction")
    return GenFamily::knapsack_interdiction;
  return std::nullopt;
}

std::string family_name(GenFamily family) {
  switch (family) {
    case GenFamily::den_like: return "den_like";
    case GenFamily::den2_like: return "den2_like";
    case GenFamily::zhang_like: return "zhang_like";
    case GenFamily::knapsack_interdiction: return "knapsack_interdiction";
  }
  return "";
}

}  // namespace miblp
