#pragma once

#include "ipsets/geometry.hpp"

namespace ipsets {

// LP geometry of the achievable interim-profile set, discretized on a belief
// grid. Directions with mixed signs may only approach the supremum through
// one-sided limit values; the grid realizes those limits through its
// one-sided breakpoint atoms, so everything here computes the closure of the
// set.

// Is `target` achievable (within tol) by some Bayes-plausible distribution on
// grid atoms? Inside yields a certificate distribution; outside yields a
// direction lambda with lambda'target strictly above the achievable maximum.
MembershipResult membership(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                            const Profile& target, double tol = kPlausibilityTol);

// Support function max { lambda' v : v achievable } with the maximizing
// distribution.
SupportResult support_value(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                            const Vector& direction);

// Profile generated by the support maximizer in `direction`.
Profile boundary_profile(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                         const Vector& direction);

// Inner/outer polyhedral approximation from support samples.
SetApprox approximate_set(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                          const std::vector<Vector>& directions);

// Thins tau to at most 2N-1 atoms with the same mean belief and the same
// interim profile (within kPlausibilityTol). Atoms inside one affine piece of
// the adjusted payoff merge at their barycenter; the rest is null-space
// pivoting to a basic solution of the moment system, followed, if the basis
// is still one atom too large, by a randomized search for a sparser
// representation. Throws ReductionFailed when no 2N-1 atom representation is
// found.
BeliefDistribution reduce_support(const Prior& prior, const BeliefDistribution& tau,
                                  const Payoff& w);

struct MinSignalsOptions {
  unsigned long seed = 0;
  int restarts = 400;        // multi-start budget in dimensions > 2
  int refinement = 10;       // pair-search grid refinement factor for N == 2
  double tol = 1e-5;         // profile match tolerance
  int base_resolution = 0;   // 0: default grid resolution
};

// True iff some k-atom Bayes-plausible distribution generates `target`
// within options.tol. Decision is one-sided: exhaustive for N == 2 and
// k <= 3, search-based otherwise, so `false` means "not found".
bool min_signals(const Payoff& w, const Prior& prior, const Profile& target, int k,
                 const MinSignalsOptions& options = {});

}  // namespace ipsets
