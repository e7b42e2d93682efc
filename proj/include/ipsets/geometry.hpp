#pragma once

#include "ipsets/grid.hpp"
#include "ipsets/model.hpp"

#include <utility>
#include <vector>

namespace ipsets {

// One candidate support point for the distribution-over-posteriors programs:
// a belief atom paired with the payoff vector it contributes. The belief
// dimension and the payoff dimension may differ (they do for cohort sets).
// `action` tags the receiver action behind the column where relevant.
struct AdjustedColumn {
  BeliefAtom atom;
  Vector payoff;
  int action = -1;
};

// Columns (mu_k, adjusted payoff at mu_k) for every grid atom.
std::vector<AdjustedColumn> adjusted_columns(const Payoff& w, const Prior& prior,
                                             const BeliefGrid& grid);

struct SupportResult {
  double value = 0.0;
  Profile profile;            // payoff vector of the maximizing distribution
  BeliefDistribution argmax;  // maximizing distribution over column atoms
  std::vector<int> support_columns;
  Vector duals;  // prices on the mean-belief constraints
  // False when the optimum leans on one-sided limit atoms whose value differs
  // from the exact payoff there: the supremum is then approached, not
  // attained, and the reported value belongs to the closure.
  bool attained = true;
};

// Maximizes lambda' * (sum of column payoffs) over nonnegative column weights
// whose belief barycenter equals `mean_target`. Weights sum to one implicitly.
SupportResult support_over_columns(const std::vector<AdjustedColumn>& columns,
                                   const Vector& mean_target, const Vector& lambda);

struct MembershipResult {
  bool inside = false;
  double violation = 0.0;       // minimal L1 slack of the moment system
  BeliefDistribution certificate;  // when inside
  Vector separating;               // when outside: lambda with lambda'target > sup
};

// Decides whether `target` is the payoff vector of some feasible distribution
// over the columns, within `tol` per moment equation.
MembershipResult membership_over_columns(const std::vector<AdjustedColumn>& columns,
                                         const Vector& mean_target,
                                         const Vector& target,
                                         double tol = kPlausibilityTol);

struct MaxminResult {
  double value = 0.0;  // best lower bound t with profile >= t componentwise
  Profile profile;
  BeliefDistribution argmax;
  std::vector<int> support_columns;
  // Nonnegative direction supporting the optimal profile, from the LP duals
  // of the per-coordinate bound rows; certifies boundary position.
  Vector support_direction;
};

MaxminResult maxmin_over_columns(const std::vector<AdjustedColumn>& columns,
                                 const Vector& mean_target);

// Range of t such that the constant vector (t, ..., t) is achievable.
std::pair<double, double> equal_profile_range(
    const std::vector<AdjustedColumn>& columns, const Vector& mean_target);

struct SupportSample {
  Vector direction;
  double value = 0.0;
  Profile profile;
  BeliefDistribution argmax;
  bool attained = true;
};

// Support-function sampling of the achievable payoff set.
struct SetApprox {
  std::vector<SupportSample> samples;
  std::vector<Profile> inner_vertices;  // deduplicated boundary profiles
  std::vector<std::pair<Vector, double>> outer_halfspaces;  // lambda' x <= value

  double support_range(const Vector& direction) const;  // h(d) + h(-d) if sampled
  double diameter_bound() const;  // max pairwise distance of inner vertices
};

SetApprox approximate_from_columns(const std::vector<AdjustedColumn>& columns,
                                   const Vector& mean_target,
                                   const std::vector<Vector>& directions);

}  // namespace ipsets
