#include "ipsets/lp.hpp"

#include "doctest.h"

#include <random>

using namespace ipsets;

TEST_CASE("simplex solves a small bounded problem") {
  // min -x1 - 2 x2  s.t.  x1 + x2 + s = 1
  lp::Problem p;
  p.A = Matrix::Ones(1, 3);
  p.b = Vector::Ones(1);
  p.c = Vector(3);
  p.c << -1.0, -2.0, 0.0;
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("simplex handles multiple equality rows and degenerate columns") {
  // Barycentric coordinates of (0.3, 0.7) over {0, 0.5, 1} with a duplicate.
  lp::Problem p;
  p.A = Matrix(2, 4);
  p.A << 1.0, 1.0, 1.0, 1.0, 0.0, 0.5, 1.0, 0.5;
  p.b = Vector(2);
  p.b << 1.0, 0.7;
  p.c = Vector::Zero(4);
  p.c << 0.0, 1.0, 0.0, 1.0;  // discourage the midpoint columns
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.3));
  CHECK(sol.x[2] == doctest::Approx(0.7));
  int positive = 0;
  for (int j = 0; j < 4; ++j)
    if (sol.x[j] > 1e-9) ++positive;
  CHECK(positive <= 2);
}

TEST_CASE("infeasible problems produce a Farkas certificate") {
  // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
  lp::Problem p;
  p.A = Matrix(2, 2);
  p.A << 1.0, 1.0, 1.0, 1.0;
  p.b = Vector(2);
  p.b << 1.0, 2.0;
  p.c = Vector::Zero(2);
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Infeasible);
  CHECK(sol.infeasibility == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(sol.farkas.size() == 2);
  const double certificate_gap = sol.farkas.dot(p.b);
  CHECK(certificate_gap > 1e-9);
  for (int j = 0; j < 2; ++j) CHECK(sol.farkas.dot(p.A.col(j)) <= 1e-9);
}

TEST_CASE("redundant rows are tolerated") {
  lp::Problem p;
  p.A = Matrix(3, 3);
  p.A << 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 0.0, 1.0, 2.0;
  p.b = Vector(3);
  p.b << 1.0, 2.0, 1.5;
  p.c = Vector(3);
  p.c << 0.0, 0.0, -1.0;
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.75));
  CHECK((p.A * sol.x - p.b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unbounded detection") {
  // min -x with only x - y = 0.
  lp::Problem p;
  p.A = Matrix(1, 2);
  p.A << 1.0, -1.0;
  p.b = Vector::Zero(1);
  p.c = Vector(2);
  p.c << -1.0, 0.0;
  const auto sol = lp::solve(p);
  CHECK(sol.status == lp::Status::Unbounded);
}

TEST_CASE("duals price the constraints at the optimum") {
  // max 2x1 + x2 s.t. x1 + x2 = 1 (as min of the negative).
  lp::Problem p;
  p.A = Matrix::Ones(1, 2);
  p.b = Vector::Ones(1);
  p.c = Vector(2);
  p.c << -2.0, -1.0;
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.duals[0] == doctest::Approx(-2.0));
}

TEST_CASE("random feasible problems satisfy strong duality") {
  std::mt19937_64 rng(9001);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int optimal_count = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const int n = m + 1 + static_cast<int>(rng() % 40);
    lp::Problem p;
    p.A = Matrix(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) p.A(i, j) = normal(rng);
    Vector x0 = Vector::Zero(n);
    for (int j = 0; j < n; ++j)
      if (unif(rng) < 0.4) x0[j] = unif(rng);
    p.b = p.A * x0;  // feasible by construction
    // Dual-feasible costs (c = A'y + s, s >= 0) keep the problem bounded.
    Vector y(m);
    for (int i = 0; i < m; ++i) y[i] = normal(rng);
    p.c = p.A.transpose() * y;
    for (int j = 0; j < n; ++j)
      if (unif(rng) < 0.7) p.c[j] += unif(rng);

    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    ++optimal_count;
    // Primal feasibility.
    CHECK((p.A * sol.x - p.b).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(sol.x.minCoeff() > -1e-9);
    // Dual feasibility and strong duality certify optimality.
    const Vector reduced = p.c - p.A.transpose() * sol.duals;
    CHECK(reduced.minCoeff() > -1e-6);
    CHECK(sol.objective == doctest::Approx(p.b.dot(sol.duals)).epsilon(1e-6));
  }
  CHECK(optimal_count == 300);
}
