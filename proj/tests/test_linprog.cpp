#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qsafe/errors.hpp"
#include "qsafe/linprog.hpp"
#include "support/oracles.hpp"

using namespace qsafe;

namespace {

LpProblem make(std::initializer_list<double> cost,
               std::initializer_list<std::initializer_list<double>> rows,
               std::initializer_list<double> rhs) {
  LpProblem p;
  p.cost.resize(static_cast<long>(cost.size()));
  int i = 0;
  for (double c : cost) p.cost(i++) = c;
  p.lhs.resize(static_cast<long>(rows.size()), p.cost.size());
  p.rhs.resize(static_cast<long>(rhs.size()));
  i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) p.lhs(i, j++) = v;
    ++i;
  }
  i = 0;
  for (double v : rhs) p.rhs(i++) = v;
  return p;
}

}  // namespace

TEST_CASE("box corner optimum") {
  // min -x-y over [0,1]x[0,2]
  auto sol = lp_solve(make({-1, -1}, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {1, 2, 0, 0}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(sol.point(0) == doctest::Approx(1.0));
  CHECK(sol.point(1) == doctest::Approx(2.0));
}

TEST_CASE("negative coordinates via split variables") {
  // min x subject to x >= -5
  auto sol = lp_solve(make({1}, {{-1}}, {5}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("phase one needed when the origin is infeasible") {
  // min x subject to x >= 10
  auto sol = lp_solve(make({1}, {{-1}}, {-10}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("infeasible pair of bounds") {
  auto sol = lp_solve(make({1}, {{1}, {-1}}, {-1, -2}));  // x <= -1 and x >= 2
  CHECK(sol.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded below") {
  auto sol = lp_solve(make({-1}, {{-1}}, {0}));  // min -x, x >= 0
  CHECK(sol.status == LpStatus::Unbounded);
}

TEST_CASE("equality sandwich is honored exactly") {
  auto sol = lp_solve(make({1, 1}, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, {3, -3, 7, -7}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.point(0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(sol.point(1) == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("redundant and duplicated rows do not disturb the optimum") {
  auto sol = lp_solve(make({-1, 0},
                           {{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, -1}, {-1, 0}},
                           {2, 2, 5, 1, 1, 0}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("degenerate vertex (many ties) still terminates and is optimal") {
  // Pyramid apex at origin touched by 4 planes; min x+y+z with z >= 0 etc.
  auto sol = lp_solve(make({1, 1, 1},
                           {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1},
                            {1, 1, 0}, {1, 0, 1}, {0, 1, 1}},
                           {0, 0, 0, 0, 0, 0}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero cost returns any feasible point") {
  auto sol = lp_solve(make({0, 0}, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {1, 1, 0, 0}));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(sol.point(0) >= -kFeasTol);
  CHECK(sol.point(0) <= 1 + kFeasTol);
}

TEST_CASE("feasibility helper") {
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  Eigen::VectorXd b(2);
  b << 1, 0;  // 0 <= x <= 1
  CHECK(lp_feasible(a, b));
  b << -2, 1;  // x <= -2 and x >= -1
  CHECK(!lp_feasible(a, b));
}

TEST_CASE("random 2-d LPs agree with vertex enumeration") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> off(0.5, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
  int solved = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int extra = 3 + static_cast<int>(rng() % 6);
    Eigen::MatrixXd c(4 + extra, 2);
    Eigen::VectorXd d(4 + extra);
    // axis bounds keep the set bounded
    c.row(0) << 1, 0;
    c.row(1) << -1, 0;
    c.row(2) << 0, 1;
    c.row(3) << 0, -1;
    for (int i = 0; i < 4; ++i) d(i) = off(rng);
    for (int i = 0; i < extra; ++i) {
      double a = ang(rng);
      c.row(4 + i) << std::cos(a), std::sin(a);
      d(4 + i) = off(rng);
    }
    double ca = ang(rng);
    Eigen::Vector2d cost(std::cos(ca), std::sin(ca));
    auto expect = oracle::min_over_vertices_2d(c, d, cost);
    LpProblem p{cost, c, d};
    auto sol = lp_solve(p);
    REQUIRE(expect.has_value());  // origin is always feasible here
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective ==
          doctest::Approx(*expect).epsilon(1e-7).scale(std::max(1.0, std::abs(*expect))));
    ++solved;
  }
  CHECK(solved == 400);
}

TEST_CASE("solution point satisfies constraints within tolerance") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    int m = n + 2 + static_cast<int>(rng() % 6);
    Eigen::MatrixXd a(m + 2 * n, n);
    Eigen::VectorXd b(m + 2 * n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
      b(i) = std::abs(g(rng)) + 0.1;
    }
    // box so the LP stays bounded
    a.middleRows(m, n) = Eigen::MatrixXd::Identity(n, n);
    a.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    b.segment(m, n).setConstant(10.0);
    b.tail(n).setConstant(10.0);
    Eigen::VectorXd cost(n);
    for (int j = 0; j < n; ++j) cost(j) = g(rng);
    auto sol = lp_solve({cost, a, b});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(((a * sol.point - b).maxCoeff()) <= kFeasTol * 10);
    CHECK(sol.objective == doctest::Approx(cost.dot(sol.point)).epsilon(1e-9));
  }
}
