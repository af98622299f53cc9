#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "miblp/simplex.hpp"
#include "oracles.hpp"
#include "test_instances.hpp"

using namespace miblp;

namespace {

// LP relaxation of the classic example over (x, y): four rows, box [0,10]^2.
LpProblem mb_relax(std::vector<double> objective) {
  MiblpInstance inst = testing::mb();
  LpProblem p;
  p.objective = std::move(objective);
  p.rows = Mat(inst.m2(), 2);
  for (int i = 0; i < inst.m2(); ++i) {
    p.rows(i, 0) = inst.a2(i, 0);
    p.rows(i, 1) = inst.g2(i, 0);
  }
  p.rhs = inst.b2;
  p.lower = {0.0, 0.0};
  p.upper = {10.0, 10.0};
  return p;
}

}  // namespace

TEST_CASE("classic relaxation optimum") {
  LpResult r = solve_lp(mb_relax({-1.0, -10.0}));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(std::abs(r.solution[0] - 2.0) <= 1e-8);
  CHECK(std::abs(r.solution[1] - 4.0) <= 1e-8);
  CHECK(std::abs(r.objective - -42.0) <= 1e-8);
  CHECK(r.phase1_objective <= kEps);
}

TEST_CASE("cone at the classic optimum") {
  LpProblem p = mb_relax({-1.0, -10.0});
  LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  ConeRays cone = extract_cone(p, r);
  REQUIRE(cone.dim() == 2);
  REQUIRE(cone.rays.size() == 2);
  CHECK(cone.binding_index == std::vector<int>{0, 1});
  CHECK(cone.binding_kind ==
        std::vector<BindingKind>{BindingKind::constraint, BindingKind::constraint});
  CHECK(cone.binding_rows.a == std::vector<double>{5.0, -4.0, -1.0, -2.0});
  CHECK(cone.binding_rhs == std::vector<double>{-6.0, -10.0});
  CHECK(std::abs(cone.rays[0][0] - 1.0) <= 1e-9);
  CHECK(std::abs(cone.rays[0][1] - -0.5) <= 1e-9);
  CHECK(std::abs(cone.rays[1][0] - -0.8) <= 1e-9);
  CHECK(std::abs(cone.rays[1][1] - -1.0) <= 1e-9);
}

TEST_CASE("single variable, single row") {
  LpProblem p;
  p.objective = {1.0};
  p.rows = Mat(1, 1);
  p.rows(0, 0) = 1.0;
  p.rhs = {3.0};
  p.lower = {0.0};
  p.upper = {10.0};
  LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(std::abs(r.solution[0] - 3.0) <= 1e-9);
  ConeRays cone = extract_cone(p, r);
  REQUIRE(cone.dim() == 1);
  CHECK(cone.binding_kind[0] == BindingKind::constraint);
  CHECK(std::abs(cone.rays[0][0] - 1.0) <= 1e-12);
}

TEST_CASE("cone at a box corner uses bound rows") {
  LpProblem p;
  p.objective = {1.0, 1.0};
  p.rows = Mat(1, 2);
  p.rows(0, 0) = 1.0;
  p.rows(0, 1) = 1.0;
  p.rhs = {-5.0};  // never tight
  p.lower = {0.0, 0.0};
  p.upper = {1.0, 1.0};
  LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(std::abs(r.objective) <= 1e-12);
  ConeRays cone = extract_cone(p, r);
  REQUIRE(cone.dim() == 2);
  CHECK(cone.binding_kind[0] == BindingKind::lower_bound);
  CHECK(cone.binding_kind[1] == BindingKind::lower_bound);
  CHECK(cone.binding_index == std::vector<int>{0, 1});
  CHECK(cone.rays[0] == std::vector<double>{1.0, 0.0});
  CHECK(cone.rays[1] == std::vector<double>{0.0, 1.0});
}

TEST_CASE("infeasible and malformed problems") {
  SUBCASE("row conflicts with the box") {
    LpProblem p;
    p.objective = {0.0};
    p.rows = Mat(1, 1);
    p.rows(0, 0) = 1.0;
    p.rhs = {1.0};
    p.lower = {0.0};
    p.upper = {0.0};
    LpResult r = solve_lp(p);
    CHECK(r.status == LpStatus::infeasible);
    CHECK(r.phase1_objective > kEps);
  }
  SUBCASE("crossed bounds") {
    LpProblem p;
    p.objective = {0.0};
    p.rows = Mat(1, 1);
    p.rows(0, 0) = 1.0;
    p.rhs = {0.0};
    p.lower = {2.0};
    p.upper = {1.0};
    CHECK(solve_lp(p).status == LpStatus::infeasible);
  }
  SUBCASE("unbounded box is reported as an error") {
    LpProblem p;
    p.objective = {1.0};
    p.rows = Mat(1, 1);
    p.rows(0, 0) = 1.0;
    p.rhs = {0.0};
    p.lower = {0.0};
    p.upper = {2e30};
    CHECK(solve_lp(p).status == LpStatus::error);
  }
}

TEST_CASE("problem with no rows") {
  LpProblem p;
  p.objective = {1.0, -1.0};
  p.rows = Mat(0, 2);
  p.lower = {-2.0, -3.0};
  p.upper = {5.0, 4.0};
  LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(std::abs(r.objective - -6.0) <= 1e-12);
  CHECK(r.solution == std::vector<double>{-2.0, 4.0});
}

TEST_CASE("degenerate optimum on the variant objective") {
  LpResult r = solve_lp(mb_relax({3.0, -1.0}));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(std::abs(r.solution[0] - 0.0) <= 1e-8);
  CHECK(std::abs(r.solution[1] - 1.5) <= 1e-8);
  CHECK(std::abs(r.objective - -1.5) <= 1e-8);
}

TEST_CASE("random problems against vertex enumeration") {
  std::mt19937 rng(7102);
  auto coin = [&](int k) { return static_cast<int>(rng() % k); };
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 250; ++trial) {
    LpProblem p;
    int n = 1 + coin(3);
    int m = 1 + coin(4);
    p.objective.resize(n);
    for (double& e : p.objective) e = coin(9) - 4;
    p.rows = Mat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) p.rows(i, j) = coin(7) - 3;
    p.rhs.resize(m);
    for (double& e : p.rhs) e = coin(9) - 4;
    p.lower.resize(n);
    p.upper.resize(n);
    for (int j = 0; j < n; ++j) {
      p.lower[j] = -coin(6);
      p.upper[j] = p.lower[j] + coin(8);
    }

    LpResult r = solve_lp(p);
    std::optional<double> want = testing::lp_vertex_oracle(p);
    if (want) {
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(std::abs(r.objective - *want) <= 1e-6);
      ++optimal_seen;

      // radial cone invariants at the reported vertex
      ConeRays cone = extract_cone(p, r);
      REQUIRE(cone.dim() == n);
      for (int i = 0; i < n; ++i) {
        double resid = row_dot(cone.binding_rows, i, cone.vertex) - cone.binding_rhs[i];
        CHECK(std::abs(resid) <= 1e-6);
      }
      for (int j = 0; j < n; ++j) {
        double norm = 0.0;
        for (double e : cone.rays[j]) norm = std::max(norm, std::abs(e));
        CHECK(std::abs(norm - 1.0) <= 1e-9);
        for (int i = 0; i < n; ++i) {
          double v = row_dot(cone.binding_rows, i, cone.rays[j]);
          if (i == j)
            CHECK(v > 1e-9);
          else
            CHECK(std::abs(v) <= 1e-7);
        }
      }
    } else {
      REQUIRE(r.status == LpStatus::infeasible);
      ++infeasible_seen;
    }
  }
  // the generator should exercise both outcomes
  CHECK(optimal_seen > 50);
  CHECK(infeasible_seen > 5);
}

TEST_CASE("warm starts") {
  LpProblem p = mb_relax({-1.0, -10.0});
  LpResult cold = solve_lp(p);
  REQUIRE(cold.status == LpStatus::optimal);

  SUBCASE("re-solving from the optimal basis") {
    LpResult warm = solve_lp(p, cold.basis);
    REQUIRE(warm.status == LpStatus::optimal);
    CHECK(std::abs(warm.objective - cold.objective) <= 1e-9);
    CHECK(warm.iterations <= 1);
  }
  SUBCASE("objective change keeps the basis usable") {
    LpProblem q = p;
    q.objective = {3.0, -1.0};
    LpResult warm = solve_lp(q, cold.basis);
    LpResult fresh = solve_lp(q);
    REQUIRE(warm.status == LpStatus::optimal);
    CHECK(std::abs(warm.objective - fresh.objective) <= 1e-8);
  }
  SUBCASE("bound tightening") {
    LpProblem q = p;
    q.upper[1] = 3.0;
    LpResult warm = solve_lp(q, cold.basis);
    LpResult fresh = solve_lp(q);
    REQUIRE(warm.status == LpStatus::optimal);
    CHECK(std::abs(warm.objective - fresh.objective) <= 1e-8);
  }
  SUBCASE("nonsense basis falls back to a cold start") {
    Basis junk;
    junk.basic = {0};  // wrong size
    junk.status.assign(3, VarStatus::at_lower);
    LpResult r = solve_lp(p, junk);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - -42.0) <= 1e-8);
  }
  SUBCASE("singular basis falls back to a cold start") {
    Basis junk;
    junk.basic = {2, 2, 3, 4};  // repeated column
    junk.status.assign(6, VarStatus::at_lower);
    junk.active_rows = {0, 1, 2, 3};
    LpResult r = solve_lp(p, junk);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(std::abs(r.objective - -42.0) <= 1e-8);
  }
}

TEST_CASE("warm start across random perturbations") {
  std::mt19937 rng(5150);
  auto coin = [&](int k) { return static_cast<int>(rng() % k); };
  for (int trial = 0; trial < 60; ++trial) {
    LpProblem p;
    int n = 2 + coin(2);
    int m = 2 + coin(3);
    p.objective.resize(n);
    for (double& e : p.objective) e = coin(9) - 4;
    p.rows = Mat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) p.rows(i, j) = coin(7) - 3;
    p.rhs.resize(m);
    for (double& e : p.rhs) e = coin(7) - 5;
    p.lower.assign(n, 0.0);
    p.upper.assign(n, 4.0);
    LpResult base = solve_lp(p);
    if (base.status != LpStatus::optimal) continue;

    LpProblem q = p;
    q.rhs[coin(m)] -= 1.0;
    q.upper[coin(n)] = 3.0;
    LpResult warm = solve_lp(q, base.basis);
    LpResult fresh = solve_lp(q);
    REQUIRE(warm.status == fresh.status);
    if (fresh.status == LpStatus::optimal)
      CHECK(std::abs(warm.objective - fresh.objective) <= 1e-6);
  }
}

TEST_CASE("cone construction rejects dependent rows") {
  Mat rows(2, 2);
  rows(0, 0) = 1.0;
  rows(0, 1) = 2.0;
  rows(1, 0) = 2.0;
  rows(1, 1) = 4.0;
  CHECK_THROWS_AS(cone_from_binding_rows({0.0, 0.0}, rows, {0.0, 0.0},
                                         {BindingKind::constraint, BindingKind::constraint},
                                         {0, 1}),
                  SimplexError);
}
