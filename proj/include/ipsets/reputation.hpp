#pragma once

#include "ipsets/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ipsets {

// Linear expected-reputation machinery: with w(mu) = mu'rho, a profile is
// achievable exactly when it equals D0 * C * rho for a completely positive C
// whose rows sum to the prior. P = D0 * C is then a reversible Markov
// transition matrix with the prior as its stationary distribution.

struct CPCertificate {
  Matrix C;                      // second-moment matrix of the posteriors
  std::vector<Vector> factors;   // nonnegative x_m with C = sum x_m x_m'
  std::vector<double> alphas;    // atom weights
  std::vector<Vector> posteriors;
};

// C = sum_m alpha_m mu_m mu_m' for the atoms of tau. Always factorizable.
CPCertificate cp_certificate(const Prior& prior, const BeliefDistribution& tau);

// Profile D0 * C * rho. Throws RowSumMismatch when C's rows do not sum to the
// prior.
Profile profile_from_cp(const Matrix& C, const Prior& prior, const Vector& rho);

enum class CPVerdict {
  Certified,
  NotCP,
  Inconclusive,
};

struct CPCheckResult {
  CPVerdict verdict = CPVerdict::Inconclusive;
  std::string reason;  // the violated property when NotCP
  // Certified and a factorization was found: the distribution reconstructed
  // from the factors (alpha_m = (sum_j x_mj)^2, mu_m = x_m / sqrt(alpha_m)).
  std::optional<BeliefDistribution> reconstructed;
  std::vector<Vector> factors;
};

// Checks symmetry, nonnegativity, positive semidefiniteness, and row sums.
// For N <= 4 those properties are equivalent to complete positivity, so an
// all-pass verdict is Certified; for N >= 5 it is merely Inconclusive. The
// factor search (spectral square root, Cholesky, random rotation polish) is
// heuristic and may come back empty even for a Certified matrix.
CPCheckResult cp_check(const Matrix& C, const Prior& prior);

struct MarkovReport {
  Matrix P;  // D0 * C
  bool stationary_ok = false;        // prior' P = prior'
  bool stochastic_ok = false;        // P e = e
  bool detailed_balance_ok = false;  // mu0_i P_ij = mu0_j P_ji
  double mean_reversion_gap = 0.0;   // ||P^50 w - (mu0'rho) e||_inf
  double second_eigenvalue = 0.0;
  bool unit_eigenvalue_repeated = false;  // gap is reported, not meaningful
};

MarkovReport markov_checks(const Matrix& C, const Prior& prior, const Vector& rho);

struct TruthDriftResult {
  double lhs = 0.0;  // expected posterior probability of the event, given it
  double rhs = 0.0;  // prior probability of the event
  bool holds = true;
};

// For an event with conditional probabilities beta, the posterior probability
// of the event averaged over signals (conditional on the event) weakly
// exceeds its prior probability.
TruthDriftResult truth_drifting(const Prior& prior, const InformationStructure& pi,
                                const Vector& beta);

// Uniform priors only: sorted-partial-sum dominance of profile by rho with
// matching totals. Throws NonUniformPrior otherwise.
bool majorization_check(const Vector& rho, const Profile& profile, const Prior& prior);

enum class OptimizeSense {
  max,
  min,
};

// Information structure that pairwise pools one target type with every type
// past a threshold while all other types separate. pool_probs are the target
// type's signal probabilities.
struct BiPoolPolicy {
  int target = 0;
  Vector pool_probs;
  int threshold = 0;
};

struct BiPoolResult {
  BiPoolPolicy policy;
  double value = 0.0;
};

// Best (max) or worst (min) achievable interim payoff of `target` under
// w = mu'rho, via threshold scan plus projected-gradient solves of the
// per-threshold concave pooling program. rho must be sorted ascending.
BiPoolResult bipool_optimize(const Prior& prior, const Vector& rho, int target,
                             OptimizeSense sense);

// Turns a bi-pooling policy into its explicit likelihood matrix (signals are
// labelled by the pooled-with type).
InformationStructure bipool_structure(const Prior& prior, const BiPoolPolicy& policy);

struct StructuralDiagnostics {
  // Per-atom pairs (E_mu[lambda/mu0], E_mu[rho]).
  std::vector<std::pair<double, double>> atom_points;
  bool ordered_ok = false;          // the atom points are comonotone
  bool segment_slopes_ok = false;   // pooled type pairs never both increase
  bool generic = false;             // no three (gamma_j, rho_j) points collinear
  bool pairwise_ok = false;         // every atom pools at most two types
};

// Structural properties satisfied by optimal policies of the acceptance-
// probability design problem; advisory checks, not optimality proofs. The
// pairwise flag is only meaningful on generic instances.
StructuralDiagnostics rs_diagnostics(const Prior& prior, const Vector& rho,
                                     const Vector& direction,
                                     const BeliefDistribution& tau);

}  // namespace ipsets
