#pragma once

#include "ipsets/common.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ipsets {

// Full-support distribution over the N types. Anchors every likelihood-ratio
// adjustment in the library.
class Prior {
 public:
  explicit Prior(Vector probs);

  int num_types() const { return static_cast<int>(probs_.size()); }
  const Vector& probs() const { return probs_; }
  double operator()(int type) const { return probs_[type]; }

  // diag(1/mu0) applied to v.
  Vector scale_by_reciprocal(const Vector& v) const;
  bool is_uniform(double tol = kInputTol) const;

 private:
  Vector probs_;
};

// Row-stochastic type-by-signal likelihood matrix.
class InformationStructure {
 public:
  InformationStructure(Matrix likelihoods, std::vector<std::string> signal_labels = {});

  int num_types() const { return static_cast<int>(likelihoods_.rows()); }
  int num_signals() const { return static_cast<int>(likelihoods_.cols()); }
  const Matrix& likelihoods() const { return likelihoods_; }
  double operator()(int type, int signal) const { return likelihoods_(type, signal); }
  const std::vector<std::string>& signal_labels() const { return signal_labels_; }

  static InformationStructure uninformative(int num_types);
  static InformationStructure full_disclosure(int num_types);

 private:
  Matrix likelihoods_;
  std::vector<std::string> signal_labels_;
};

// One-sided evaluation selector for payoffs that jump at a breakpoint.
// `lower`/`upper` mean the limit from the lower/upper side of the payoff's
// local breakpoint; `exact` takes the stored value at the belief itself.
enum class Side {
  lower,
  upper,
  exact,
};

std::string to_string(Side side);

struct BeliefAtom {
  Vector belief;
  Side side = Side::exact;

  BeliefAtom() = default;
  explicit BeliefAtom(Vector b, Side s = Side::exact);

  int dim() const { return static_cast<int>(belief.size()); }
};

// Finite distribution over posterior beliefs.
class BeliefDistribution {
 public:
  struct Entry {
    double weight;
    BeliefAtom atom;
  };

  BeliefDistribution() = default;
  explicit BeliefDistribution(std::vector<Entry> atoms);

  const std::vector<Entry>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  int dim() const { return atoms_.empty() ? 0 : atoms_.front().atom.dim(); }

  Vector mean_belief() const;
  bool is_bayes_plausible(const Prior& prior, double tol = kPlausibilityTol) const;
  void require_bayes_plausible(const Prior& prior, double tol = kPlausibilityTol) const;

  // Sums weights of atoms with equal beliefs and sides.
  BeliefDistribution merged(double tol = kInputTol) const;

  static BeliefDistribution point_mass(const Vector& belief);

 private:
  std::vector<Entry> atoms_;
};

// Piecewise-constant layout of a payoff: pieces are the score intervals
// [lower_k, upper_k] between cutoffs, each carrying one value per type. The
// scaled-belief substitution z = weight * mu turns "atom in piece k" into
// linear constraints, which is what makes exact sparse-support searches
// solvable by LP.
struct AffinePieces {
  Vector score;
  std::vector<double> lower;  // -inf on the first piece
  std::vector<double> upper;  // +inf on the last piece
  Matrix values;              // piece x type
};

// Payoff function w(mu, theta). Bounded; evaluable at every belief atom.
class Payoff {
 public:
  virtual ~Payoff() = default;

  virtual int num_types() const = 0;
  virtual double value(const BeliefAtom& mu, int type) const = 0;

  // One-dimensional breakpoint beliefs (only meaningful for N == 2 payoffs);
  // grid builders insert one-sided atoms at each of these.
  virtual std::vector<Vector> breakpoint_beliefs() const { return {}; }

  // True when the belief sits on a discontinuity hyperplane of the payoff.
  virtual bool on_breakpoint(const Vector& /*mu*/) const { return false; }

  // Identifier of the affine piece containing the atom, for payoffs whose
  // adjusted graph is a finite union of affine patches (piecewise-constant w).
  // Atoms within one piece may be merged at their barycenter without moving
  // the represented interim profile.
  virtual std::optional<long> piece_index(const BeliefAtom& /*mu*/) const {
    return std::nullopt;
  }

  // Full piece layout when the payoff is piecewise constant.
  virtual std::optional<AffinePieces> affine_pieces() const { return std::nullopt; }
};

// Piecewise-constant payoff, tabulated per piece. Pieces are the intervals of
// a scalar belief score s(mu) = score . mu between sorted cutoffs; each piece
// stores one value per type; each cutoff records which adjacent piece supplies
// the exact value there (the one-sided values are the neighboring pieces).
class TabulatedPayoff : public Payoff {
 public:
  TabulatedPayoff(Vector score, std::vector<double> cutoffs, Matrix piece_values,
                  std::vector<bool> closed_above = {});

  // N == 2 convenience: score is the probability of the second type.
  static TabulatedPayoff step_on_second_type(std::vector<double> cutoffs,
                                             Matrix piece_values,
                                             std::vector<bool> closed_above = {});

  int num_types() const override { return static_cast<int>(values_.cols()); }
  double value(const BeliefAtom& mu, int type) const override;
  std::vector<Vector> breakpoint_beliefs() const override;
  bool on_breakpoint(const Vector& mu) const override;
  std::optional<long> piece_index(const BeliefAtom& mu) const override;
  std::optional<AffinePieces> affine_pieces() const override;

  const Vector& score() const { return score_; }
  const std::vector<double>& cutoffs() const { return cutoffs_; }
  const Matrix& piece_values() const { return values_; }
  const std::vector<bool>& closed_above() const { return closed_above_; }

 private:
  int piece_of(const BeliefAtom& mu) const;

  Vector score_;
  std::vector<double> cutoffs_;
  Matrix values_;  // (#pieces) x N
  std::vector<bool> closed_above_;
};

// w(mu, theta) = E_mu[rho], type-independent and linear in the belief.
class LinearReputationPayoff : public Payoff {
 public:
  explicit LinearReputationPayoff(Vector rho);

  int num_types() const override { return static_cast<int>(rho_.size()); }
  double value(const BeliefAtom& mu, int type) const override;
  const Vector& rho() const { return rho_; }

 private:
  Vector rho_;
};

// -- Operations --------------------------------------------------------------

// Posterior belief of signal s under (prior, pi) by Bayes' rule.
// Throws ZeroProbabilitySignal when the signal has no unconditional mass.
BeliefAtom posterior(const Prior& prior, const InformationStructure& pi, int signal);

// Distribution over posteriors induced by pi; zero-probability signals are
// dropped and equal posteriors from distinct signals are merged.
BeliefDistribution posterior_distribution(const Prior& prior,
                                          const InformationStructure& pi);

// Interim payoff profile: per type, the expected payoff conditional on that
// type. One-sided evaluation defaults to Side::exact.
Profile interim_profile(const Payoff& w, const Prior& prior,
                        const InformationStructure& pi,
                        std::optional<Side> side_override = std::nullopt);

// Likelihood-ratio-adjusted payoff vector at one atom: component theta equals
// (mu(theta)/mu0(theta)) * w(mu, theta), with zero-support types pinned to 0.
Vector adjusted_payoff(const Payoff& w, const Prior& prior, const BeliefAtom& atom);

// Unconditional expectation of the adjusted payoff under tau.
Profile unconditional_profile(const Payoff& w, const Prior& prior,
                              const BeliefDistribution& tau);

// Information structure with one signal per atom of tau, reproducing tau.
InformationStructure structure_from_tau(const Prior& prior,
                                        const BeliefDistribution& tau);

}  // namespace ipsets
