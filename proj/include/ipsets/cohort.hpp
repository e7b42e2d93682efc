#pragma once

#include "ipsets/geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ipsets {

// Cohort-state-data extension: payoffs are conditioned on the cohort, beliefs
// are about the state, and information can only be provided about the data
// variable. All belief machinery runs over the data simplex; payoffs reach
// the state-belief domain through the posterior pushforward mu(eta).

// Payoff w(mu, omega, c) on state-beliefs.
class StatePayoff {
 public:
  virtual ~StatePayoff() = default;
  virtual double value(const BeliefAtom& state_belief, int state, int cohort) const = 0;
  // Discontinuity layout on the state simplex, for grid construction.
  virtual const Payoff* belief_shape() const { return nullptr; }
};

// State- and cohort-independent wrapper around a plain belief payoff.
class BeliefStatePayoff : public StatePayoff {
 public:
  explicit BeliefStatePayoff(std::shared_ptr<const Payoff> inner)
      : inner_(std::move(inner)) {}
  double value(const BeliefAtom& state_belief, int state, int /*cohort*/) const override {
    return inner_->value(state_belief, state);
  }
  const Payoff* belief_shape() const override { return inner_.get(); }
  const Payoff& inner() const { return *inner_; }

 private:
  std::shared_ptr<const Payoff> inner_;
};

struct GarblingMatrix {
  Matrix G;  // |D| x |D'|, rows sum to 1

  explicit GarblingMatrix(Matrix g);
  static GarblingMatrix binary_symmetric(double keep_probability);
};

class CohortProblem {
 public:
  // joint[c](omega, d) = P(c, omega, d). Cohorts with zero mass and data
  // values with zero marginal are rejected.
  CohortProblem(std::vector<std::string> cohorts, std::vector<std::string> states,
                std::vector<std::string> data, std::vector<Matrix> joint,
                std::shared_ptr<const StatePayoff> payoff);

  int num_cohorts() const { return static_cast<int>(joint_.size()); }
  int num_states() const { return static_cast<int>(joint_.front().rows()); }
  int num_data() const { return static_cast<int>(joint_.front().cols()); }

  const std::vector<std::string>& cohorts() const { return cohorts_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& data() const { return data_; }
  const std::vector<Matrix>& joint() const { return joint_; }
  const StatePayoff& payoff() const { return *payoff_; }
  std::shared_ptr<const StatePayoff> payoff_ptr() const { return payoff_; }

  const Vector& data_marginal() const { return eta0_; }      // eta_0
  const Vector& cohort_marginal() const { return cohort_mass_; }
  // M(omega, d) = P(omega | d); mu(eta) = M eta.
  const Matrix& state_given_data() const { return post_state_given_data_; }

  // w_dagger(eta, omega, c) = w(mu(eta), omega, c); the atom's side carries
  // over to the state belief (flipped when the pushforward reverses the
  // orientation of a two-point data simplex).
  double data_payoff(const BeliefAtom& eta, int state, int cohort) const;
  BeliefAtom pushforward(const BeliefAtom& eta) const;

 private:
  std::vector<std::string> cohorts_, states_, data_;
  std::vector<Matrix> joint_;
  std::shared_ptr<const StatePayoff> payoff_;
  Vector eta0_;
  Vector cohort_mass_;
  Matrix post_state_given_data_;
};

// Posterior over data values after signal s of a structure on D.
BeliefAtom data_posterior(const CohortProblem& problem, const InformationStructure& pi,
                          int signal);

// Adjusted payoff vector over cohorts at a data belief:
// component c equals sum_{omega, d} P(omega, d | c) (eta(d)/eta0(d))
// w_dagger(eta, omega, c).
Vector adjusted_cohort_payoff(const CohortProblem& problem, const BeliefAtom& eta);

// Expected payoff conditional on each cohort under a structure on D.
Profile cohort_interim_profile(const CohortProblem& problem,
                               const InformationStructure& pi);

// Grid over the data simplex, payoff breakpoints pulled back through mu(eta).
BeliefGrid data_grid(const CohortProblem& problem, int resolution = 0);

std::vector<AdjustedColumn> cohort_columns(const CohortProblem& problem,
                                           const BeliefGrid& grid);

SupportResult cohort_support(const CohortProblem& problem, const BeliefGrid& grid,
                             const Vector& direction);

SetApprox cohort_set(const CohortProblem& problem, const BeliefGrid& grid,
                     const std::vector<Vector>& directions);

// Post-composes the data channel with G; the cohort-state marginal and the
// state payoff are untouched.
CohortProblem garble(const CohortProblem& problem, const GarblingMatrix& g);

struct BlackwellReport {
  struct Entry {
    Vector direction;
    double original = 0.0;
    double garbled = 0.0;
    double slack = 0.0;  // original - garbled; inclusion demands >= -1e-6
  };
  std::vector<Entry> entries;
  std::vector<int> violations;  // indices with slack < -1e-6
  bool inclusion_holds = true;
};

// Pullback of a garbled data belief to the original data alphabet: the belief
// the original data user holds after the signal whose garbled posterior is
// eta'. Pushing it forward to state beliefs reproduces mu(eta') exactly, and
// its adjusted payoff vector equals the garbled one.
Vector pullback_data_belief(const CohortProblem& problem, const GarblingMatrix& g,
                            const CohortProblem& garbled, const Vector& eta_garbled);

// Support-function dominance of the garbled set by the original in every
// direction. The original grid is augmented with the pullbacks of the garbled
// grid's atoms, which makes the discretized inclusion hold exactly whenever
// the true one does.
BlackwellReport blackwell_inclusion_test(const CohortProblem& problem,
                                         const GarblingMatrix& g,
                                         const std::vector<Vector>& directions,
                                         int resolution = 0);

// Running example family: two equally likely types that are both state and
// cohort, observed through a binary symmetric data channel of precision
// sigma, with the given payoff on type beliefs.
CohortProblem binary_precision_problem(double sigma,
                                       std::shared_ptr<const Payoff> type_payoff);

}  // namespace ipsets
