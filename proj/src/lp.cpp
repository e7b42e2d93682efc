#include "ipsets/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ipsets::lp {
namespace {

constexpr int kBlandSwitch = 20000;
constexpr int kHardIterationCap = 200000;

// State for one simplex run over the working matrix [A | I].
struct Tableau {
  const Matrix& A;  // m x n, original columns
  Vector b;         // adjusted right-hand side (nonnegative)
  int m = 0;
  int n = 0;
  std::vector<int> basis;                 // size m; index >= n means artificial
  Eigen::PartialPivLU<Matrix> basis_lu;   // factorization of current B

  explicit Tableau(const Matrix& a, const Vector& rhs) : A(a), b(rhs) {
    m = static_cast<int>(A.rows());
    n = static_cast<int>(A.cols());
    basis.resize(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    refactor();
  }

  Vector column(int j) const {
    if (j < n) return A.col(j);
    Vector e = Vector::Zero(m);
    e[j - n] = 1.0;
    return e;
  }

  void refactor() {
    Matrix B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = column(basis[i]);
    basis_lu.compute(B);
  }

  Vector basic_values() const { return basis_lu.solve(b); }

  Vector duals(const Vector& cost_full) const {
    Vector cb(m);
    for (int i = 0; i < m; ++i) cb[i] = cost_full[basis[i]];
    return basis_lu.transpose().solve(cb);
  }
};

// Runs the simplex loop with the given full cost vector (length n + m).
// Columns in [0, limit) are eligible to enter. Returns Optimal or Unbounded.
Status iterate(Tableau& t, const Vector& cost_full, int limit, double tol) {
  for (int iter = 0; iter < kHardIterationCap; ++iter) {
    const Vector y = t.duals(cost_full);
    const bool bland = iter >= kBlandSwitch;

    int entering = -1;
    double best = -tol;
    for (int j = 0; j < limit; ++j) {
      const double rc = cost_full[j] - y.dot(t.A.col(j));
      if (rc < -tol) {
        if (bland) {
          entering = j;
          break;
        }
        if (rc < best) {
          best = rc;
          entering = j;
        }
      }
    }
    if (entering < 0) return Status::Optimal;

    const Vector d = t.basis_lu.solve(t.column(entering));
    const Vector xb = t.basic_values();

    int leaving = -1;
    double step = std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.m; ++i) {
      if (d[i] > tol) {
        const double ratio = std::max(xb[i], 0.0) / d[i];
        if (ratio < step - 1e-12 ||
            (ratio < step + 1e-12 &&
             (leaving < 0 || t.basis[i] < t.basis[leaving]))) {
          step = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) return Status::Unbounded;

    t.basis[leaving] = entering;
    t.refactor();
  }
  throw NumericalFailure("simplex hit the hard iteration cap");
}

}  // namespace

Solution solve(const Problem& problem, double tol) {
  const int m = static_cast<int>(problem.A.rows());
  const int n = static_cast<int>(problem.A.cols());
  if (problem.b.size() != m || problem.c.size() != n)
    throw DimensionMismatch("lp::solve: inconsistent problem dimensions");

  // Orient rows so the artificial start is feasible.
  Matrix A = problem.A;
  Vector b = problem.b;
  std::vector<double> row_sign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      A.row(i) *= -1.0;
      b[i] *= -1.0;
      row_sign[i] = -1.0;
    }
  }

  Tableau t(A, b);

  // Phase 1: minimize the total artificial mass.
  Vector phase1_cost = Vector::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  if (iterate(t, phase1_cost, n, tol) == Status::Unbounded)
    throw NumericalFailure("phase-1 simplex reported an unbounded problem");

  Vector xb = t.basic_values();
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (t.basis[i] >= n) infeas += std::max(xb[i], 0.0);

  Solution out;
  out.infeasibility = infeas;

  if (infeas > tol) {
    // Still expose the best-approximation primal point: callers with a looser
    // feasibility tolerance than the solver's may accept it.
    out.status = Status::Infeasible;
    out.x = Vector::Zero(n);
    for (int i = 0; i < m; ++i)
      if (t.basis[i] < n) out.x[t.basis[i]] = std::max(xb[i], 0.0);
    Vector y = t.duals(phase1_cost);
    out.farkas = Vector(m);
    for (int i = 0; i < m; ++i) out.farkas[i] = row_sign[i] * y[i];
    out.duals = Vector::Zero(m);
    out.basis = t.basis;
    return out;
  }

  // Drive leftover artificials out of the basis; drop rows where no real
  // column can replace them (redundant constraints).
  std::vector<int> keep_rows;
  {
    std::vector<int> drop;
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < n) continue;
      Matrix Binv_rows = t.basis_lu.inverse();
      int replacement = -1;
      for (int j = 0; j < n && replacement < 0; ++j) {
        if (std::find(t.basis.begin(), t.basis.end(), j) != t.basis.end())
          continue;
        const double piv = Binv_rows.row(i).dot(A.col(j).transpose());
        if (std::abs(piv) > 1e3 * tol) replacement = j;
      }
      if (replacement >= 0) {
        t.basis[i] = replacement;
        t.refactor();
      } else {
        drop.push_back(i);
      }
    }
    for (int i = 0; i < m; ++i)
      if (std::find(drop.begin(), drop.end(), i) == drop.end())
        keep_rows.push_back(i);
  }

  Matrix A2(static_cast<int>(keep_rows.size()), n);
  Vector b2(static_cast<int>(keep_rows.size()));
  std::vector<double> sign2(keep_rows.size());
  for (size_t i = 0; i < keep_rows.size(); ++i) {
    A2.row(static_cast<int>(i)) = A.row(keep_rows[i]);
    b2[static_cast<int>(i)] = b[keep_rows[i]];
    sign2[i] = row_sign[keep_rows[i]];
  }

  Tableau t2(A2, b2);
  t2.basis.clear();
  for (int i : keep_rows) t2.basis.push_back(t.basis[i]);
  t2.refactor();

  // Phase 2 on the cleaned system.
  const int m2 = static_cast<int>(keep_rows.size());
  Vector phase2_cost = Vector::Zero(n + m2);
  phase2_cost.head(n) = problem.c;
  const Status st = iterate(t2, phase2_cost, n, tol);
  if (st == Status::Unbounded) {
    out.status = Status::Unbounded;
    out.x = Vector::Zero(n);
    out.duals = Vector::Zero(m);
    out.basis = t2.basis;
    return out;
  }

  out.status = Status::Optimal;
  out.x = Vector::Zero(n);
  xb = t2.basic_values();
  for (int i = 0; i < m2; ++i) {
    if (t2.basis[i] < n) out.x[t2.basis[i]] = std::max(xb[i], 0.0);
  }
  out.objective = problem.c.dot(out.x);
  out.basis = t2.basis;
  out.duals = Vector::Zero(m);
  const Vector y2 = t2.duals(phase2_cost);
  for (int i = 0; i < m2; ++i) out.duals[keep_rows[i]] = sign2[i] * y2[i];
  return out;
}

}  // namespace ipsets::lp
