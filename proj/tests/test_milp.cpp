#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "miblp/milp.hpp"
#include "oracles.hpp"
#include "test_instances.hpp"

using namespace miblp;

namespace {

// Follower problem of the classic example at a fixed leader value.
MilpProblem mb_follower(double x) {
  MiblpInstance inst = testing::mb();
  MilpProblem p;
  p.lp.objective = inst.d2;
  p.lp.rows = inst.g2;
  p.lp.rhs.resize(inst.m2());
  for (int i = 0; i < inst.m2(); ++i) p.lp.rhs[i] = inst.b2[i] - inst.a2(i, 0) * x;
  p.lp.lower = inst.ly;
  p.lp.upper = inst.uy;
  p.integer_vars = {0};
  return p;
}

}  // namespace

TEST_CASE("follower problem at a fixed leader value") {
  MilpResult r = solve_milp(mb_follower(2.0));
  REQUIRE(r.status == MilpStatus::optimal);
  CHECK(std::abs(r.objective - 2.0) <= 1e-8);
  CHECK(std::abs(r.solution[0] - 2.0) <= 1e-6);

  // leader value outside the inducible region: y box ends up empty
  CHECK(solve_milp(mb_follower(0.0)).status == MilpStatus::infeasible);
}

TEST_CASE("branching is actually exercised") {
  // min -2x - y with 4x + y <= 8.5, x integer: LP sits at x = 0.875, the
  // integer optimum is (1, 4.5) with value -6.5.
  MilpProblem p;
  p.lp.objective = {-2.0, -1.0};
  p.lp.rows = Mat(1, 2);
  p.lp.rows(0, 0) = -4.0;
  p.lp.rows(0, 1) = -1.0;
  p.lp.rhs = {-8.5};
  p.lp.lower = {0.0, 0.0};
  p.lp.upper = {5.0, 5.0};
  p.integer_vars = {0};
  MilpResult r = solve_milp(p);
  REQUIRE(r.status == MilpStatus::optimal);
  CHECK(std::abs(r.objective - -6.5) <= 1e-8);
  CHECK(std::abs(r.solution[0] - 1.0) <= 1e-6);
  CHECK(std::abs(r.solution[1] - 4.5) <= 1e-6);
  CHECK(r.node_count >= 3);
}

TEST_CASE("rounding a fractional singleton is not allowed") {
  // the only feasible value is y = 0.5, so the integer problem is infeasible
  MilpProblem p;
  p.lp.objective = {1.0};
  p.lp.rows = Mat(2, 1);
  p.lp.rows(0, 0) = 1.0;
  p.lp.rows(1, 0) = -1.0;
  p.lp.rhs = {0.5, -0.5};
  p.lp.lower = {0.0};
  p.lp.upper = {1.0};
  p.integer_vars = {0};
  CHECK(solve_milp(p).status == MilpStatus::infeasible);
}

TEST_CASE("cutoff semantics") {
  SUBCASE("optimum below the cutoff is returned") {
    MilpProblem p = mb_follower(2.0);
    p.cutoff = 2.5;
    MilpResult r = solve_milp(p);
    REQUIRE(r.status == MilpStatus::optimal);
    CHECK(std::abs(r.objective - 2.0) <= 1e-8);
  }
  SUBCASE("optimum exactly at the cutoff does not qualify") {
    MilpProblem p = mb_follower(2.0);
    p.cutoff = 2.0;
    CHECK(solve_milp(p).status == MilpStatus::cutoff_exceeded);
  }
  SUBCASE("optimum above the cutoff") {
    MilpProblem p = mb_follower(2.0);
    p.cutoff = 1.5;
    CHECK(solve_milp(p).status == MilpStatus::cutoff_exceeded);
  }
  SUBCASE("infeasible stays infeasible under any cutoff") {
    MilpProblem p = mb_follower(0.0);
    p.cutoff = 100.0;
    CHECK(solve_milp(p).status == MilpStatus::infeasible);
  }
}

TEST_CASE("node limit reports the best incumbent") {
  MilpProblem p;
  p.lp.objective = {-2.0, -1.0};
  p.lp.rows = Mat(1, 2);
  p.lp.rows(0, 0) = -4.0;
  p.lp.rows(0, 1) = -1.0;
  p.lp.rhs = {-8.5};
  p.lp.lower = {0.0, 0.0};
  p.lp.upper = {5.0, 5.0};
  p.integer_vars = {0};
  MilpLimits lim;
  lim.max_nodes = 1;
  MilpResult r = solve_milp(p, lim);
  CHECK(r.status == MilpStatus::limit);
  CHECK(r.node_count == 1);
}

TEST_CASE("no integer variables reduces to the relaxation") {
  MilpProblem p;
  p.lp.objective = {-1.0, -10.0};
  MiblpInstance inst = testing::mb();
  p.lp.rows = Mat(inst.m2(), 2);
  for (int i = 0; i < inst.m2(); ++i) {
    p.lp.rows(i, 0) = inst.a2(i, 0);
    p.lp.rows(i, 1) = inst.g2(i, 0);
  }
  p.lp.rhs = inst.b2;
  p.lp.lower = {0.0, 0.0};
  p.lp.upper = {10.0, 10.0};
  MilpResult r = solve_milp(p);
  REQUIRE(r.status == MilpStatus::optimal);
  CHECK(std::abs(r.objective - -42.0) <= 1e-8);
}

TEST_CASE("bad integer index is rejected") {
  MilpProblem p = mb_follower(2.0);
  p.integer_vars = {3};
  CHECK_THROWS_AS(solve_milp(p), std::invalid_argument);
}

TEST_CASE("random problems against lattice enumeration") {
  std::mt19937 rng(40911);
  auto coin = [&](int k) { return static_cast<int>(rng() % k); };
  int optimal_seen = 0, infeasible_seen = 0, cutoff_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    MilpProblem p;
    int n = 1 + coin(3);
    int m = 1 + coin(3);
    p.lp.objective.resize(n);
    for (double& e : p.lp.objective) e = coin(9) - 4;
    p.lp.rows = Mat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) p.lp.rows(i, j) = coin(7) - 3;
    p.lp.rhs.resize(m);
    for (double& e : p.lp.rhs) e = coin(9) - 4;
    p.lp.lower.resize(n);
    p.lp.upper.resize(n);
    for (int j = 0; j < n; ++j) {
      p.lp.lower[j] = -coin(3);
      p.lp.upper[j] = p.lp.lower[j] + coin(5);
    }
    for (int j = 0; j < n; ++j) p.integer_vars.push_back(j);
    if (coin(3) == 0) p.cutoff = coin(9) - 4;

    MilpResult r = solve_milp(p);
    std::optional<double> want = testing::milp_lattice_oracle(p);
    std::optional<double> unrestricted = testing::milp_lattice_optimum(p);
    if (want) {
      REQUIRE(r.status == MilpStatus::optimal);
      CHECK(std::abs(r.objective - *want) <= 1e-6);
      for (int j : p.integer_vars)
        CHECK(std::abs(r.solution[j] - std::round(r.solution[j])) <= kEps);
      // the reported solution must itself be feasible
      for (int i = 0; i < m; ++i)
        CHECK(row_dot(p.lp.rows, i, r.solution) >= p.lp.rhs[i] - 1e-6);
      ++optimal_seen;
    } else if (unrestricted) {
      REQUIRE(r.status == MilpStatus::cutoff_exceeded);
      ++cutoff_seen;
    } else {
      REQUIRE(r.status == MilpStatus::infeasible);
      ++infeasible_seen;
    }
  }
  CHECK(optimal_seen > 150);
  CHECK(infeasible_seen > 20);
  CHECK(cutoff_seen > 5);
}
