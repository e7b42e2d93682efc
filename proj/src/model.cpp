#include "ipsets/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ipsets {
namespace {

void require_probability_vector(const Vector& v, double tol, const char* what,
                                bool strict_positive) {
  if (v.size() < 1) throw Error(std::string(what) + ": empty vector");
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(std::string(what) + ": non-finite entry");
    if (strict_positive ? v[i] <= 0.0 : v[i] < -tol) {
      std::ostringstream os;
      os << what << ": entry " << i << " = " << v[i] << " out of range";
      throw Error(os.str());
    }
  }
  if (std::abs(v.sum() - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": entries sum to " << v.sum() << ", expected 1";
    throw Error(os.str());
  }
}

}  // namespace

Prior::Prior(Vector probs) : probs_(std::move(probs)) {
  require_probability_vector(probs_, kInputTol, "Prior", /*strict_positive=*/true);
}

Vector Prior::scale_by_reciprocal(const Vector& v) const {
  if (v.size() != probs_.size())
    throw DimensionMismatch("Prior::scale_by_reciprocal: size mismatch");
  return v.cwiseQuotient(probs_);
}

bool Prior::is_uniform(double tol) const {
  const double u = 1.0 / num_types();
  return (probs_.array() - u).abs().maxCoeff() <= tol;
}

InformationStructure::InformationStructure(Matrix likelihoods,
                                           std::vector<std::string> signal_labels)
    : likelihoods_(std::move(likelihoods)), signal_labels_(std::move(signal_labels)) {
  if (likelihoods_.rows() < 1 || likelihoods_.cols() < 1)
    throw Error("InformationStructure: needs at least one type and one signal");
  for (int i = 0; i < likelihoods_.rows(); ++i) {
    for (int j = 0; j < likelihoods_.cols(); ++j) {
      if (!(likelihoods_(i, j) >= -kInputTol) || !std::isfinite(likelihoods_(i, j)))
        throw Error("InformationStructure: negative or non-finite likelihood");
      if (likelihoods_(i, j) < 0.0) likelihoods_(i, j) = 0.0;
    }
    const double row_sum = likelihoods_.row(i).sum();
    if (std::abs(row_sum - 1.0) > kInputTol) {
      std::ostringstream os;
      os << "InformationStructure: row " << i << " sums to " << row_sum;
      throw Error(os.str());
    }
  }
  if (signal_labels_.empty()) {
    for (int j = 0; j < likelihoods_.cols(); ++j)
      signal_labels_.push_back("s" + std::to_string(j + 1));
  }
  if (static_cast<int>(signal_labels_.size()) != likelihoods_.cols())
    throw Error("InformationStructure: label count does not match signal count");
}

InformationStructure InformationStructure::uninformative(int num_types) {
  return InformationStructure(Matrix::Ones(num_types, 1));
}

InformationStructure InformationStructure::full_disclosure(int num_types) {
  return InformationStructure(Matrix::Identity(num_types, num_types));
}

std::string to_string(Side side) {
  switch (side) {
    case Side::lower:
      return "lower";
    case Side::upper:
      return "upper";
    case Side::exact:
      return "exact";
  }
  return "exact";
}

BeliefAtom::BeliefAtom(Vector b, Side s) : belief(std::move(b)), side(s) {
  require_probability_vector(belief, kInputTol, "BeliefAtom", /*strict_positive=*/false);
  for (int i = 0; i < belief.size(); ++i)
    if (belief[i] < 0.0) belief[i] = 0.0;
}

BeliefDistribution::BeliefDistribution(std::vector<Entry> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error("BeliefDistribution: no atoms");
  double total = 0.0;
  const int dim = atoms_.front().atom.dim();
  for (const Entry& e : atoms_) {
    if (e.atom.dim() != dim)
      throw DimensionMismatch("BeliefDistribution: mixed belief dimensions");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error("BeliefDistribution: weights must be strictly positive");
    total += e.weight;
  }
  if (std::abs(total - 1.0) > kInputTol)
    throw Error("BeliefDistribution: weights sum to " + std::to_string(total));
}

Vector BeliefDistribution::mean_belief() const {
  Vector mean = Vector::Zero(dim());
  for (const Entry& e : atoms_) mean += e.weight * e.atom.belief;
  return mean;
}

bool BeliefDistribution::is_bayes_plausible(const Prior& prior, double tol) const {
  if (dim() != prior.num_types()) return false;
  return (mean_belief() - prior.probs()).cwiseAbs().maxCoeff() <= tol;
}

void BeliefDistribution::require_bayes_plausible(const Prior& prior, double tol) const {
  if (!is_bayes_plausible(prior, tol)) {
    std::ostringstream os;
    os << "belief distribution mean deviates from the prior by "
       << (dim() == prior.num_types()
               ? (mean_belief() - prior.probs()).cwiseAbs().maxCoeff()
               : std::nan(""));
    throw NotBayesPlausible(os.str());
  }
}

BeliefDistribution BeliefDistribution::merged(double tol) const {
  std::vector<Entry> out;
  for (const Entry& e : atoms_) {
    bool absorbed = false;
    for (Entry& o : out) {
      if (o.atom.side == e.atom.side &&
          (o.atom.belief - e.atom.belief).cwiseAbs().maxCoeff() <= tol) {
        o.weight += e.weight;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.push_back(e);
  }
  return BeliefDistribution(std::move(out));
}

BeliefDistribution BeliefDistribution::point_mass(const Vector& belief) {
  return BeliefDistribution({{1.0, BeliefAtom(belief)}});
}

// -- TabulatedPayoff ----------------------------------------------------------

TabulatedPayoff::TabulatedPayoff(Vector score, std::vector<double> cutoffs,
                                 Matrix piece_values, std::vector<bool> closed_above)
    : score_(std::move(score)),
      cutoffs_(std::move(cutoffs)),
      values_(std::move(piece_values)),
      closed_above_(std::move(closed_above)) {
  if (values_.rows() != static_cast<int>(cutoffs_.size()) + 1)
    throw Error("TabulatedPayoff: need one value row per piece (cutoffs + 1)");
  if (score_.size() != values_.cols())
    throw DimensionMismatch("TabulatedPayoff: score dimension != type count");
  if (!values_.allFinite()) throw Error("TabulatedPayoff: non-finite value");
  if (!std::is_sorted(cutoffs_.begin(), cutoffs_.end()))
    throw Error("TabulatedPayoff: cutoffs must be ascending");
  if (closed_above_.empty()) closed_above_.assign(cutoffs_.size(), true);
  if (closed_above_.size() != cutoffs_.size())
    throw Error("TabulatedPayoff: closed-side flags do not match cutoffs");
}

TabulatedPayoff TabulatedPayoff::step_on_second_type(std::vector<double> cutoffs,
                                                     Matrix piece_values,
                                                     std::vector<bool> closed_above) {
  Vector score(2);
  score << 0.0, 1.0;
  return TabulatedPayoff(std::move(score), std::move(cutoffs),
                         std::move(piece_values), std::move(closed_above));
}

int TabulatedPayoff::piece_of(const BeliefAtom& mu) const {
  const double s = score_.dot(mu.belief);
  constexpr double kBreakTol = 1e-11;
  for (size_t k = 0; k < cutoffs_.size(); ++k) {
    if (std::abs(s - cutoffs_[k]) <= kBreakTol) {
      switch (mu.side) {
        case Side::lower:
          return static_cast<int>(k);
        case Side::upper:
          return static_cast<int>(k) + 1;
        case Side::exact:
          return static_cast<int>(k) + (closed_above_[k] ? 1 : 0);
      }
    }
  }
  int piece = 0;
  while (piece < static_cast<int>(cutoffs_.size()) && s > cutoffs_[piece]) ++piece;
  return piece;
}

double TabulatedPayoff::value(const BeliefAtom& mu, int type) const {
  if (mu.dim() != num_types())
    throw EvaluationError("TabulatedPayoff: belief dimension mismatch");
  return values_(piece_of(mu), type);
}

std::vector<Vector> TabulatedPayoff::breakpoint_beliefs() const {
  std::vector<Vector> out;
  if (num_types() != 2) return out;
  const double g1 = score_[0];
  const double g2 = score_[1];
  if (std::abs(g2 - g1) < 1e-14) return out;
  for (double c : cutoffs_) {
    const double m = (c - g1) / (g2 - g1);
    if (m >= 0.0 && m <= 1.0) {
      Vector b(2);
      b << 1.0 - m, m;
      out.push_back(b);
    }
  }
  return out;
}

bool TabulatedPayoff::on_breakpoint(const Vector& mu) const {
  const double s = score_.dot(mu);
  for (double c : cutoffs_)
    if (std::abs(s - c) <= 1e-11) return true;
  return false;
}

std::optional<long> TabulatedPayoff::piece_index(const BeliefAtom& mu) const {
  return piece_of(mu);
}

std::optional<AffinePieces> TabulatedPayoff::affine_pieces() const {
  AffinePieces out;
  out.score = score_;
  out.values = values_;
  const double inf = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k <= cutoffs_.size(); ++k) {
    out.lower.push_back(k == 0 ? -inf : cutoffs_[k - 1]);
    out.upper.push_back(k == cutoffs_.size() ? inf : cutoffs_[k]);
  }
  return out;
}

// -- LinearReputationPayoff ---------------------------------------------------

LinearReputationPayoff::LinearReputationPayoff(Vector rho) : rho_(std::move(rho)) {
  if (rho_.size() < 1 || !rho_.allFinite())
    throw Error("LinearReputationPayoff: invalid reputation vector");
}

double LinearReputationPayoff::value(const BeliefAtom& mu, int /*type*/) const {
  if (mu.dim() != num_types())
    throw EvaluationError("LinearReputationPayoff: belief dimension mismatch");
  return mu.belief.dot(rho_);
}

// -- Operations ----------------------------------------------------------------

BeliefAtom posterior(const Prior& prior, const InformationStructure& pi, int signal) {
  if (pi.num_types() != prior.num_types())
    throw DimensionMismatch("posterior: prior/structure type counts differ");
  if (signal < 0 || signal >= pi.num_signals())
    throw Error("posterior: signal index out of range");
  const Vector joint = prior.probs().cwiseProduct(pi.likelihoods().col(signal));
  const double prob = joint.sum();
  if (prob <= kSignalProbFloor)
    throw ZeroProbabilitySignal("posterior: signal " + std::to_string(signal) +
                                " has unconditional probability " +
                                std::to_string(prob));
  return BeliefAtom(joint / prob);
}

BeliefDistribution posterior_distribution(const Prior& prior,
                                          const InformationStructure& pi) {
  std::vector<BeliefDistribution::Entry> atoms;
  for (int s = 0; s < pi.num_signals(); ++s) {
    const Vector joint = prior.probs().cwiseProduct(pi.likelihoods().col(s));
    const double prob = joint.sum();
    if (prob <= kSignalProbFloor) continue;
    atoms.push_back({prob, BeliefAtom(joint / prob)});
  }
  return BeliefDistribution(std::move(atoms)).merged();
}

Profile interim_profile(const Payoff& w, const Prior& prior,
                        const InformationStructure& pi,
                        std::optional<Side> side_override) {
  if (w.num_types() != prior.num_types() || pi.num_types() != prior.num_types())
    throw DimensionMismatch("interim_profile: dimension mismatch");
  const Side side = side_override.value_or(Side::exact);
  Profile out = Profile::Zero(prior.num_types());
  for (int s = 0; s < pi.num_signals(); ++s) {
    const Vector joint = prior.probs().cwiseProduct(pi.likelihoods().col(s));
    const double prob = joint.sum();
    if (prob <= kSignalProbFloor) continue;
    const BeliefAtom atom(joint / prob, side);
    for (int t = 0; t < prior.num_types(); ++t) {
      const double likelihood = pi(t, s);
      if (likelihood <= 0.0) continue;
      const double v = w.value(atom, t);
      if (!std::isfinite(v))
        throw EvaluationError("interim_profile: payoff not finite at induced atom");
      out[t] += likelihood * v;
    }
  }
  return out;
}

Vector adjusted_payoff(const Payoff& w, const Prior& prior, const BeliefAtom& atom) {
  if (atom.dim() != prior.num_types())
    throw DimensionMismatch("adjusted_payoff: belief dimension mismatch");
  Vector out = Vector::Zero(prior.num_types());
  for (int t = 0; t < prior.num_types(); ++t) {
    if (atom.belief[t] == 0.0) continue;  // zero-support types get exactly 0
    out[t] = atom.belief[t] / prior(t) * w.value(atom, t);
  }
  return out;
}

Profile unconditional_profile(const Payoff& w, const Prior& prior,
                              const BeliefDistribution& tau) {
  tau.require_bayes_plausible(prior);
  Profile out = Profile::Zero(prior.num_types());
  for (const auto& e : tau.atoms()) out += e.weight * adjusted_payoff(w, prior, e.atom);
  return out;
}

InformationStructure structure_from_tau(const Prior& prior,
                                        const BeliefDistribution& tau) {
  tau.require_bayes_plausible(prior);
  const int n = prior.num_types();
  Matrix pi(n, tau.size());
  for (int m = 0; m < tau.size(); ++m) {
    const auto& e = tau.atoms()[m];
    for (int t = 0; t < n; ++t) pi(t, m) = e.weight * e.atom.belief[t] / prior(t);
  }
  // Rows sum to 1 exactly when the mean-belief constraint holds; renormalize
  // the residual tolerance away so the constructor's 1e-9 check passes.
  for (int t = 0; t < n; ++t) {
    const double row_sum = pi.row(t).sum();
    if (std::abs(row_sum - 1.0) > kPlausibilityTol * 10)
      throw NotBayesPlausible("structure_from_tau: row normalization failed");
    pi.row(t) /= row_sum;
  }
  return InformationStructure(std::move(pi));
}

}  // namespace ipsets
