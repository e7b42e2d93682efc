#include "ipsets/geometry.hpp"

#include "ipsets/lp.hpp"

#include <cmath>

namespace ipsets {
namespace {

constexpr double kWeightFloor = 1e-12;

int belief_dim(const std::vector<AdjustedColumn>& columns) {
  if (columns.empty()) throw Error("no columns");
  return columns.front().atom.dim();
}

int payoff_dim(const std::vector<AdjustedColumn>& columns) {
  return static_cast<int>(columns.front().payoff.size());
}

// Mean-belief constraint block: one row per belief coordinate. Row-summing
// these gives sum(p) == 1, so no separate normalization row is needed.
Matrix mean_rows(const std::vector<AdjustedColumn>& columns) {
  const int nb = belief_dim(columns);
  Matrix a(nb, static_cast<int>(columns.size()));
  for (size_t j = 0; j < columns.size(); ++j) a.col(static_cast<int>(j)) = columns[j].atom.belief;
  return a;
}

BeliefDistribution distribution_from_weights(const std::vector<AdjustedColumn>& columns,
                                             const Vector& weights,
                                             std::vector<int>* support = nullptr) {
  std::vector<BeliefDistribution::Entry> atoms;
  double total = 0.0;
  for (int j = 0; j < weights.size(); ++j) {
    if (weights[j] > kWeightFloor) total += weights[j];
  }
  if (total <= 0.0) throw NumericalFailure("empty support in LP solution");
  for (int j = 0; j < weights.size(); ++j) {
    if (weights[j] > kWeightFloor) {
      atoms.push_back({weights[j] / total, columns[j].atom});
      if (support) support->push_back(j);
    }
  }
  return BeliefDistribution(std::move(atoms)).merged();
}

}  // namespace

std::vector<AdjustedColumn> adjusted_columns(const Payoff& w, const Prior& prior,
                                             const BeliefGrid& grid) {
  std::vector<AdjustedColumn> out;
  out.reserve(grid.size());
  for (const BeliefAtom& atom : grid.atoms())
    out.push_back({atom, adjusted_payoff(w, prior, atom)});
  return out;
}

SupportResult support_over_columns(const std::vector<AdjustedColumn>& columns,
                                   const Vector& mean_target, const Vector& lambda) {
  const int n = static_cast<int>(columns.size());
  const int k = payoff_dim(columns);
  if (lambda.size() != k) throw DimensionMismatch("support: direction dimension");
  if (lambda.cwiseAbs().maxCoeff() <= 0.0) throw Error("support: zero direction");

  lp::Problem p;
  p.A = mean_rows(columns);
  p.b = mean_target;
  p.c = Vector(n);
  for (int j = 0; j < n; ++j) p.c[j] = -lambda.dot(columns[j].payoff);

  const lp::Solution sol = lp::solve(p);
  if (sol.status == lp::Status::Infeasible)
    throw GridTooCoarse("support: the anchor is not in the grid's convex hull");
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("support: LP did not reach an optimum");

  SupportResult out;
  out.value = -sol.objective;
  out.profile = Vector::Zero(k);
  for (int j = 0; j < n; ++j)
    if (sol.x[j] > 0.0) out.profile += sol.x[j] * columns[j].payoff;
  out.argmax = distribution_from_weights(columns, sol.x, &out.support_columns);
  out.duals = sol.duals;
  return out;
}

MembershipResult membership_over_columns(const std::vector<AdjustedColumn>& columns,
                                         const Vector& mean_target,
                                         const Vector& target, double tol) {
  const int n = static_cast<int>(columns.size());
  const int nb = belief_dim(columns);
  const int k = payoff_dim(columns);
  if (target.size() != k) throw DimensionMismatch("membership: target dimension");
  if (!target.allFinite()) throw Error("membership: non-finite target");

  lp::Problem p;
  p.A = Matrix(nb + k, n);
  p.A.topRows(nb) = mean_rows(columns);
  for (int j = 0; j < n; ++j) p.A.col(j).tail(k) = columns[j].payoff;
  p.b = Vector(nb + k);
  p.b.head(nb) = mean_target;
  p.b.tail(k) = target;
  p.c = Vector::Zero(n);

  const lp::Solution sol = lp::solve(p);

  MembershipResult out;
  out.violation = sol.infeasibility;
  if (sol.infeasibility <= tol) {
    out.inside = true;
    out.certificate = distribution_from_weights(columns, sol.x);
    return out;
  }

  // If even the mean constraint alone is out of reach, the grid is broken
  // (its convex hull misses the anchor); a grid containing the simplex
  // vertices rules that out.
  {
    lp::Problem mean_only;
    mean_only.A = p.A.topRows(nb);
    mean_only.b = mean_target;
    mean_only.c = Vector::Zero(n);
    if (lp::solve(mean_only).infeasibility > tol)
      throw GridTooCoarse("membership: anchor outside the grid's convex hull");
  }

  // Farkas certificate y: y'col <= 0 for every column while y'b > 0. With the
  // mean system feasible, the payoff block of y cannot vanish, and it
  // separates the target from everything the columns generate.
  Vector lambda = sol.farkas.tail(k);
  if (lambda.cwiseAbs().maxCoeff() <= 1e-10)
    throw NumericalFailure("membership: degenerate separating certificate");
  lambda /= lambda.cwiseAbs().maxCoeff();
  out.inside = false;
  out.separating = lambda;
  return out;
}

MaxminResult maxmin_over_columns(const std::vector<AdjustedColumn>& columns,
                                 const Vector& mean_target) {
  const int n = static_cast<int>(columns.size());
  const int nb = belief_dim(columns);
  const int k = payoff_dim(columns);

  // Variables: column weights, t = t+ - t-, one slack per payoff coordinate.
  const int nvar = n + 2 + k;
  lp::Problem p;
  p.A = Matrix::Zero(nb + k, nvar);
  p.A.topLeftCorner(nb, n) = mean_rows(columns);
  for (int j = 0; j < n; ++j) p.A.col(j).tail(k) = columns[j].payoff;
  for (int i = 0; i < k; ++i) {
    p.A(nb + i, n) = -1.0;
    p.A(nb + i, n + 1) = 1.0;
    p.A(nb + i, n + 2 + i) = -1.0;
  }
  p.b = Vector::Zero(nb + k);
  p.b.head(nb) = mean_target;
  p.c = Vector::Zero(nvar);
  p.c[n] = -1.0;
  p.c[n + 1] = 1.0;

  const lp::Solution sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("maxmin: LP did not reach an optimum");

  MaxminResult out;
  out.value = sol.x[n] - sol.x[n + 1];
  out.profile = Vector::Zero(k);
  for (int j = 0; j < n; ++j)
    if (sol.x[j] > 0.0) out.profile += sol.x[j] * columns[j].payoff;
  const Vector weights = sol.x.head(n);
  out.argmax = distribution_from_weights(columns, weights, &out.support_columns);
  // Duals on the bound rows: nonnegative by the slack columns' reduced costs,
  // summing to one through the t column, and supporting the profile.
  out.support_direction = sol.duals.tail(k).cwiseMax(0.0);
  return out;
}

std::pair<double, double> equal_profile_range(
    const std::vector<AdjustedColumn>& columns, const Vector& mean_target) {
  const int n = static_cast<int>(columns.size());
  const int nb = belief_dim(columns);
  const int k = payoff_dim(columns);

  const int nvar = n + 2;
  lp::Problem p;
  p.A = Matrix::Zero(nb + k, nvar);
  p.A.topLeftCorner(nb, n) = mean_rows(columns);
  for (int j = 0; j < n; ++j) p.A.col(j).tail(k) = columns[j].payoff;
  for (int i = 0; i < k; ++i) {
    p.A(nb + i, n) = -1.0;
    p.A(nb + i, n + 1) = 1.0;
  }
  p.b = Vector::Zero(nb + k);
  p.b.head(nb) = mean_target;
  p.c = Vector::Zero(nvar);

  p.c[n] = 1.0;
  p.c[n + 1] = -1.0;
  const lp::Solution lo = lp::solve(p);
  p.c[n] = -1.0;
  p.c[n + 1] = 1.0;
  const lp::Solution hi = lp::solve(p);
  if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal)
    throw NumericalFailure("equal_profile_range: LP failed");
  return {lo.x[n] - lo.x[n + 1], hi.x[n] - hi.x[n + 1]};
}

double SetApprox::support_range(const Vector& direction) const {
  double pos = std::nan("");
  double neg = std::nan("");
  for (const SupportSample& s : samples) {
    if ((s.direction - direction).cwiseAbs().maxCoeff() <= 1e-12) pos = s.value;
    if ((s.direction + direction).cwiseAbs().maxCoeff() <= 1e-12) neg = s.value;
  }
  return pos + neg;
}

double SetApprox::diameter_bound() const {
  double best = 0.0;
  for (size_t i = 0; i < inner_vertices.size(); ++i)
    for (size_t j = i + 1; j < inner_vertices.size(); ++j)
      best = std::max(best, (inner_vertices[i] - inner_vertices[j]).norm());
  return best;
}

SetApprox approximate_from_columns(const std::vector<AdjustedColumn>& columns,
                                   const Vector& mean_target,
                                   const std::vector<Vector>& directions) {
  SetApprox out;
  for (const Vector& d : directions) {
    SupportResult r = support_over_columns(columns, mean_target, d);
    bool fresh = true;
    for (const Profile& v : out.inner_vertices) {
      if ((v - r.profile).cwiseAbs().maxCoeff() <= 1e-9) {
        fresh = false;
        break;
      }
    }
    if (fresh) out.inner_vertices.push_back(r.profile);
    out.outer_halfspaces.emplace_back(d, r.value);
    out.samples.push_back({d, r.value, r.profile, r.argmax, r.attained});
  }
  return out;
}

}  // namespace ipsets
