#pragma once

#include "ipsets/geometry.hpp"

#include <set>
#include <string>
#include <vector>

namespace ipsets {

// Sender-receiver micro-foundation: the receiver best-responds to the
// posterior, the sender's indirect payoff set V folds every best-response
// selection into the feasible columns, so its support is always attained.

class ReceiverGame {
 public:
  ReceiverGame(std::vector<std::string> actions, Matrix receiver_payoffs,
               Matrix sender_payoffs);

  int num_actions() const { return static_cast<int>(receiver_u_.rows()); }
  int num_types() const { return static_cast<int>(receiver_u_.cols()); }
  const std::vector<std::string>& actions() const { return actions_; }
  const Matrix& receiver_payoffs() const { return receiver_u_; }
  const Matrix& sender_payoffs() const { return sender_v_; }

  bool sender_payoff_type_independent(double tol = 1e-12) const;

 private:
  std::vector<std::string> actions_;
  Matrix receiver_u_;  // |A| x N
  Matrix sender_v_;    // |A| x N
};

// Actions within `slack` of the receiver's best expected payoff at mu.
std::set<int> best_responses(const ReceiverGame& game, const BeliefAtom& mu,
                             double slack = 1e-9);

// Adjusted sender payoff vectors at mu, one per pure best response. Mixed
// selections are convexified by the LPs downstream.
std::vector<Vector> indirect_payoff_atoms(const ReceiverGame& game, const Prior& prior,
                                          const BeliefAtom& mu);

// Payoff induced by the game under the sender-preferred best-response
// selection; usable with the generic set machinery. One-sided atoms resolve
// knife-edge beliefs toward the adjacent region (two-type games only).
class PersuasionPayoff : public Payoff {
 public:
  explicit PersuasionPayoff(ReceiverGame game);

  int num_types() const override { return game_.num_types(); }
  double value(const BeliefAtom& mu, int type) const override;
  std::vector<Vector> breakpoint_beliefs() const override;
  bool on_breakpoint(const Vector& mu) const override;

  const ReceiverGame& game() const { return game_; }
  // Sender-preferred selection: the best response maximizing E_mu[v].
  int selected_action(const BeliefAtom& mu) const;

 private:
  ReceiverGame game_;
  std::vector<double> cutoffs_;  // best-response switch points (N == 2)
};

// Columns (grid atom, adjusted sender vector) for every pure best response.
std::vector<AdjustedColumn> sender_columns(const ReceiverGame& game, const Prior& prior,
                                           const BeliefGrid& grid);

// One support atom of a sender distribution together with the best response
// chosen there.
struct SelectionAtom {
  BeliefAtom belief;
  int action = 0;
};

// The per-atom action selections behind a support result computed on the same
// game/prior/grid triple.
std::vector<SelectionAtom> support_selections(const ReceiverGame& game,
                                              const Prior& prior,
                                              const BeliefGrid& grid,
                                              const SupportResult& result);

// Grid over the type simplex with one-sided atoms at best-response switches.
BeliefGrid grid_for_game(const ReceiverGame& game, const Prior& prior,
                         int resolution = 0);

// Support of the sender's payoff set V in the given direction. The max is
// attained: every tied action enters the column pool.
SupportResult v_set_support(const ReceiverGame& game, const Prior& prior,
                            const BeliefGrid& grid, const Vector& direction);

struct CautiousResult {
  double value = 0.0;  // best worst-type interim payoff
  Profile profile;
  BeliefDistribution tau;
  // Nonnegative direction supporting the profile on the boundary of the
  // sender payoff set, recovered from the LP duals.
  Vector support_direction;
};

// Rawlsian selection from V: maximizes the minimum interim payoff across
// sender types.
CautiousResult cautious_value(const ReceiverGame& game, const Prior& prior,
                              const BeliefGrid& grid);

// Interval of t with (t, ..., t) in V; these are exactly the payoffs the
// sender can achieve without commitment under truthful reporting incentives.
// Requires a type-independent sender payoff.
std::pair<double, double> comm_eq_profiles(const ReceiverGame& game, const Prior& prior,
                                           const BeliefGrid& grid);

// Merges signals that induce the same selected action; at most |A| signals
// remain and the interim profile under that selection is unchanged.
InformationStructure reduce_to_actions(const ReceiverGame& game, const Prior& prior,
                                       const InformationStructure& pi);

}  // namespace ipsets
