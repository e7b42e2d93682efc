#include "ipsets/persuasion.hpp"

#include <algorithm>
#include <cmath>

namespace ipsets {
namespace {

Vector adjusted_sender_vector(const ReceiverGame& game, const Prior& prior,
                              const BeliefAtom& mu, int action) {
  const int n = game.num_types();
  Vector out = Vector::Zero(n);
  for (int t = 0; t < n; ++t) {
    if (mu.belief[t] == 0.0) continue;
    out[t] = mu.belief[t] / prior(t) * game.sender_payoffs()(action, t);
  }
  return out;
}

// Best-response switch points on the one-dimensional simplex: beliefs where
// the receiver's optimal action set changes.
std::vector<double> switch_points(const ReceiverGame& game) {
  std::vector<double> cuts;
  if (game.num_types() != 2) return cuts;
  const Matrix& u = game.receiver_payoffs();
  auto best_at = [&](double m) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < game.num_actions(); ++a)
      best = std::max(best, (1.0 - m) * u(a, 0) + m * u(a, 1));
    return best;
  };
  for (int a = 0; a < game.num_actions(); ++a) {
    for (int b = a + 1; b < game.num_actions(); ++b) {
      const double da = u(a, 1) - u(a, 0);
      const double db = u(b, 1) - u(b, 0);
      if (std::abs(da - db) < 1e-14) continue;
      const double m = (u(b, 0) - u(a, 0)) / (da - db);
      if (m <= 1e-12 || m >= 1.0 - 1e-12) continue;
      const double val = (1.0 - m) * u(a, 0) + m * u(a, 1);
      if (val >= best_at(m) - 1e-12) cuts.push_back(m);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             cuts.end());
  return cuts;
}

}  // namespace

ReceiverGame::ReceiverGame(std::vector<std::string> actions, Matrix receiver_payoffs,
                           Matrix sender_payoffs)
    : actions_(std::move(actions)),
      receiver_u_(std::move(receiver_payoffs)),
      sender_v_(std::move(sender_payoffs)) {
  if (receiver_u_.rows() < 1) throw Error("ReceiverGame: needs at least one action");
  if (sender_v_.rows() != receiver_u_.rows() || sender_v_.cols() != receiver_u_.cols())
    throw DimensionMismatch("ReceiverGame: payoff matrices disagree in shape");
  if (!receiver_u_.allFinite() || !sender_v_.allFinite())
    throw Error("ReceiverGame: non-finite payoff");
  if (actions_.empty())
    for (int a = 0; a < receiver_u_.rows(); ++a)
      actions_.push_back("a" + std::to_string(a));
  if (static_cast<int>(actions_.size()) != receiver_u_.rows())
    throw Error("ReceiverGame: action label count mismatch");
}

bool ReceiverGame::sender_payoff_type_independent(double tol) const {
  for (int a = 0; a < num_actions(); ++a) {
    const double v0 = sender_v_(a, 0);
    for (int t = 1; t < num_types(); ++t)
      if (std::abs(sender_v_(a, t) - v0) > tol) return false;
  }
  return true;
}

std::set<int> best_responses(const ReceiverGame& game, const BeliefAtom& mu,
                             double slack) {
  if (mu.dim() != game.num_types())
    throw DimensionMismatch("best_responses: belief dimension");
  Vector expected = game.receiver_payoffs() * mu.belief;
  const double best = expected.maxCoeff();
  std::set<int> out;
  for (int a = 0; a < game.num_actions(); ++a)
    if (expected[a] >= best - slack) out.insert(a);
  return out;
}

std::vector<Vector> indirect_payoff_atoms(const ReceiverGame& game, const Prior& prior,
                                          const BeliefAtom& mu) {
  std::vector<Vector> out;
  for (int a : best_responses(game, mu)) {
    const Vector v = adjusted_sender_vector(game, prior, mu, a);
    bool fresh = true;
    for (const Vector& seen : out)
      if ((seen - v).cwiseAbs().maxCoeff() <= 1e-12) fresh = false;
    if (fresh) out.push_back(v);
  }
  return out;
}

PersuasionPayoff::PersuasionPayoff(ReceiverGame game)
    : game_(std::move(game)), cutoffs_(switch_points(game_)) {}

int PersuasionPayoff::selected_action(const BeliefAtom& mu) const {
  BeliefAtom query = mu;
  if (game_.num_types() == 2 && mu.side != Side::exact) {
    // Resolve the one-sided limit by nudging off the knife edge.
    const double eps = 1e-9;
    const double shift = mu.side == Side::lower ? -eps : eps;
    Vector b = mu.belief;
    b[1] = std::clamp(b[1] + shift, 0.0, 1.0);
    b[0] = 1.0 - b[1];
    query = BeliefAtom(b);
  }
  const std::set<int> brs = best_responses(game_, query);
  int chosen = *brs.begin();
  double chosen_value = -std::numeric_limits<double>::infinity();
  for (int a : brs) {
    const double v = query.belief.dot(game_.sender_payoffs().row(a).transpose());
    if (v > chosen_value + 1e-15) {
      chosen_value = v;
      chosen = a;
    }
  }
  return chosen;
}

double PersuasionPayoff::value(const BeliefAtom& mu, int type) const {
  return game_.sender_payoffs()(selected_action(mu), type);
}

std::vector<Vector> PersuasionPayoff::breakpoint_beliefs() const {
  std::vector<Vector> out;
  for (double m : cutoffs_) {
    Vector b(2);
    b << 1.0 - m, m;
    out.push_back(b);
  }
  return out;
}

bool PersuasionPayoff::on_breakpoint(const Vector& mu) const {
  if (game_.num_types() != 2) return false;
  for (double c : cutoffs_)
    if (std::abs(mu[1] - c) <= 1e-11) return true;
  return false;
}

std::vector<AdjustedColumn> sender_columns(const ReceiverGame& game, const Prior& prior,
                                           const BeliefGrid& grid) {
  // Ties are handled by enumerating the tied actions, so one-sided grid
  // duplicates add nothing; canonicalize to exact atoms and deduplicate.
  std::vector<AdjustedColumn> out;
  auto seen = [&out](const Vector& belief, int action) {
    for (const AdjustedColumn& c : out) {
      if (c.action == action &&
          (c.atom.belief - belief).cwiseAbs().maxCoeff() <= 1e-12)
        return true;
    }
    return false;
  };
  for (const BeliefAtom& atom : grid.atoms()) {
    for (int a : best_responses(game, atom)) {
      if (seen(atom.belief, a)) continue;
      out.push_back({BeliefAtom(atom.belief), adjusted_sender_vector(game, prior, atom, a), a});
    }
  }
  return out;
}

BeliefGrid grid_for_game(const ReceiverGame& game, const Prior& prior, int resolution) {
  PersuasionPayoff payoff(game);
  return BeliefGrid::for_payoff(prior, payoff, resolution);
}

SupportResult v_set_support(const ReceiverGame& game, const Prior& prior,
                            const BeliefGrid& grid, const Vector& direction) {
  return support_over_columns(sender_columns(game, prior, grid), prior.probs(),
                              direction);
}

std::vector<SelectionAtom> support_selections(const ReceiverGame& game,
                                              const Prior& prior,
                                              const BeliefGrid& grid,
                                              const SupportResult& result) {
  const auto columns = sender_columns(game, prior, grid);
  std::vector<SelectionAtom> out;
  for (int j : result.support_columns) {
    if (j < 0 || j >= static_cast<int>(columns.size())) continue;
    out.push_back({columns[j].atom, columns[j].action});
  }
  return out;
}

CautiousResult cautious_value(const ReceiverGame& game, const Prior& prior,
                              const BeliefGrid& grid) {
  const MaxminResult r =
      maxmin_over_columns(sender_columns(game, prior, grid), prior.probs());
  return {r.value, r.profile, r.argmax, r.support_direction};
}

std::pair<double, double> comm_eq_profiles(const ReceiverGame& game, const Prior& prior,
                                           const BeliefGrid& grid) {
  if (!game.sender_payoff_type_independent())
    throw TypeDependentSenderPayoff(
        "comm_eq_profiles: sender payoff must depend on the action only");
  return equal_profile_range(sender_columns(game, prior, grid), prior.probs());
}

InformationStructure reduce_to_actions(const ReceiverGame& game, const Prior& prior,
                                       const InformationStructure& pi) {
  if (pi.num_types() != prior.num_types() || game.num_types() != prior.num_types())
    throw DimensionMismatch("reduce_to_actions: dimension mismatch");
  PersuasionPayoff payoff(game);

  const int n = prior.num_types();
  Matrix merged = Matrix::Zero(n, game.num_actions());
  std::vector<bool> used(game.num_actions(), false);
  for (int s = 0; s < pi.num_signals(); ++s) {
    const Vector joint = prior.probs().cwiseProduct(pi.likelihoods().col(s));
    const double prob = joint.sum();
    if (prob <= kSignalProbFloor) {
      // Dead signal: park its (zero) likelihood anywhere consistent.
      continue;
    }
    const int action = payoff.selected_action(BeliefAtom(joint / prob));
    merged.col(action) += pi.likelihoods().col(s);
    used[action] = true;
  }

  std::vector<int> kept;
  for (int a = 0; a < game.num_actions(); ++a)
    if (used[a]) kept.push_back(a);
  Matrix out(n, static_cast<int>(kept.size()));
  std::vector<std::string> labels;
  for (size_t j = 0; j < kept.size(); ++j) {
    out.col(static_cast<int>(j)) = merged.col(kept[j]);
    labels.push_back(game.actions()[kept[j]]);
  }
  return InformationStructure(std::move(out), std::move(labels));
}

}  // namespace ipsets
