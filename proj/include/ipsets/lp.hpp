#pragma once

#include "ipsets/common.hpp"

#include <vector>

namespace ipsets::lp {

// Dense two-phase primal simplex for problems in standard form,
//
//     min c'x   s.t.   A x = b,  x >= 0.
//
// Geared towards the problems in this library: a handful of equality rows
// (moment constraints over a belief simplex) against thousands of columns.
// The basis matrix is refactored from scratch every pivot, which is cheap at
// these row counts and avoids drift in the basis inverse.
//
// Beyond the optimum itself, callers rely on two artifacts:
//   * the optimal basis (a basic feasible solution with at most m positive
//     entries), used to thin out belief-distribution supports, and
//   * a Farkas certificate when the constraints are infeasible
//     (y with y'A <= 0 and y'b > 0), used to build separating directions.

enum class Status {
  Optimal,
  Infeasible,
  Unbounded,
};

struct Problem {
  Matrix A;
  Vector b;
  Vector c;
};

struct Solution {
  Status status = Status::Optimal;
  double objective = 0.0;
  Vector x;                 // primal solution, size n (zeros if infeasible)
  std::vector<int> basis;   // column indices of the final basis
  Vector duals;             // y = c_B' B^{-1}, one entry per row of A
  Vector farkas;            // infeasibility certificate (empty unless Infeasible)
  double infeasibility = 0.0;  // phase-1 objective: minimal L1 constraint violation
};

//\p tol governs pivot admission and the feasibility threshold on the
// phase-1 objective.
Solution solve(const Problem& problem, double tol = 1e-9);

}  // namespace ipsets::lp
