#include "ipsets/cohort.hpp"

#include <cmath>

namespace ipsets {

GarblingMatrix::GarblingMatrix(Matrix g) : G(std::move(g)) {
  if (G.rows() < 1 || G.cols() < 1) throw Error("GarblingMatrix: empty");
  for (int i = 0; i < G.rows(); ++i) {
    if (G.row(i).minCoeff() < -kInputTol)
      throw Error("GarblingMatrix: negative entry");
    if (std::abs(G.row(i).sum() - 1.0) > kInputTol)
      throw Error("GarblingMatrix: row " + std::to_string(i) + " does not sum to 1");
  }
}

GarblingMatrix GarblingMatrix::binary_symmetric(double keep_probability) {
  if (keep_probability < 0.0 || keep_probability > 1.0)
    throw Error("GarblingMatrix: keep probability out of [0, 1]");
  Matrix g(2, 2);
  g << keep_probability, 1.0 - keep_probability, 1.0 - keep_probability,
      keep_probability;
  return GarblingMatrix(std::move(g));
}

CohortProblem::CohortProblem(std::vector<std::string> cohorts,
                             std::vector<std::string> states,
                             std::vector<std::string> data, std::vector<Matrix> joint,
                             std::shared_ptr<const StatePayoff> payoff)
    : cohorts_(std::move(cohorts)),
      states_(std::move(states)),
      data_(std::move(data)),
      joint_(std::move(joint)),
      payoff_(std::move(payoff)) {
  if (joint_.empty()) throw Error("CohortProblem: no cohorts");
  const int ns = static_cast<int>(joint_.front().rows());
  const int nd = static_cast<int>(joint_.front().cols());
  double total = 0.0;
  for (const Matrix& slab : joint_) {
    if (slab.rows() != ns || slab.cols() != nd)
      throw DimensionMismatch("CohortProblem: ragged joint tensor");
    if (slab.minCoeff() < -1e-15) throw Error("CohortProblem: negative probability");
    total += slab.sum();
  }
  if (std::abs(total - 1.0) > kInputTol)
    throw Error("CohortProblem: joint tensor sums to " + std::to_string(total));
  if (cohorts_.empty())
    for (size_t c = 0; c < joint_.size(); ++c)
      cohorts_.push_back("c" + std::to_string(c + 1));
  if (states_.empty())
    for (int s = 0; s < ns; ++s) states_.push_back("w" + std::to_string(s + 1));
  if (data_.empty())
    for (int d = 0; d < nd; ++d) data_.push_back("d" + std::to_string(d + 1));
  if (static_cast<int>(cohorts_.size()) != num_cohorts() ||
      static_cast<int>(states_.size()) != ns ||
      static_cast<int>(data_.size()) != nd)
    throw Error("CohortProblem: label counts do not match the joint tensor");
  if (!payoff_) throw Error("CohortProblem: missing payoff");

  cohort_mass_ = Vector(num_cohorts());
  for (int c = 0; c < num_cohorts(); ++c) {
    cohort_mass_[c] = joint_[c].sum();
    if (cohort_mass_[c] <= 1e-12)
      throw CohortZeroMass("cohort " + cohorts_[c] + " has zero mass");
  }

  eta0_ = Vector::Zero(nd);
  for (const Matrix& slab : joint_) eta0_ += slab.colwise().sum().transpose();
  for (int d = 0; d < nd; ++d)
    if (eta0_[d] <= 1e-12)
      throw Error("CohortProblem: data value " + data_[d] + " has zero marginal");

  post_state_given_data_ = Matrix::Zero(ns, nd);
  for (const Matrix& slab : joint_) post_state_given_data_ += slab;
  for (int d = 0; d < nd; ++d) post_state_given_data_.col(d) /= eta0_[d];
}

BeliefAtom CohortProblem::pushforward(const BeliefAtom& eta) const {
  Vector mu = post_state_given_data_ * eta.belief;
  // Renormalize residual rounding so the atom constructor's checks pass.
  mu /= mu.sum();
  Side side = eta.side;
  if (side != Side::exact && num_data() == 2 && num_states() == 2) {
    const double slope =
        post_state_given_data_(1, 1) - post_state_given_data_(1, 0);
    if (slope < 0.0) side = side == Side::lower ? Side::upper : Side::lower;
  }
  return BeliefAtom(std::move(mu), side);
}

double CohortProblem::data_payoff(const BeliefAtom& eta, int state, int cohort) const {
  return payoff_->value(pushforward(eta), state, cohort);
}

BeliefAtom data_posterior(const CohortProblem& problem, const InformationStructure& pi,
                          int signal) {
  if (pi.num_types() != problem.num_data())
    throw DimensionMismatch("data_posterior: structure must be on the data set");
  if (signal < 0 || signal >= pi.num_signals())
    throw Error("data_posterior: signal index out of range");
  const Vector joint = problem.data_marginal().cwiseProduct(pi.likelihoods().col(signal));
  const double prob = joint.sum();
  if (prob <= kSignalProbFloor)
    throw ZeroProbabilitySignal("data_posterior: signal " + std::to_string(signal) +
                                " has zero probability");
  return BeliefAtom(joint / prob);
}

Vector adjusted_cohort_payoff(const CohortProblem& problem, const BeliefAtom& eta) {
  if (eta.dim() != problem.num_data())
    throw DimensionMismatch("adjusted_cohort_payoff: belief dimension");
  const int nc = problem.num_cohorts();
  const int ns = problem.num_states();
  const int nd = problem.num_data();
  Vector out = Vector::Zero(nc);
  for (int c = 0; c < nc; ++c) {
    const Matrix& slab = problem.joint()[c];
    const double mass = problem.cohort_marginal()[c];
    double acc = 0.0;
    for (int d = 0; d < nd; ++d) {
      if (eta.belief[d] == 0.0) continue;
      const double ratio = eta.belief[d] / problem.data_marginal()[d];
      for (int s = 0; s < ns; ++s) {
        const double p = slab(s, d) / mass;  // P(omega, d | c)
        if (p <= 0.0) continue;
        acc += p * ratio * problem.data_payoff(eta, s, c);
      }
    }
    out[c] = acc;
  }
  return out;
}

Profile cohort_interim_profile(const CohortProblem& problem,
                               const InformationStructure& pi) {
  if (pi.num_types() != problem.num_data())
    throw DimensionMismatch("cohort_interim_profile: structure must be on data");
  const int nc = problem.num_cohorts();
  const int ns = problem.num_states();
  const int nd = problem.num_data();
  Profile out = Profile::Zero(nc);
  for (int sig = 0; sig < pi.num_signals(); ++sig) {
    const Vector joint = problem.data_marginal().cwiseProduct(pi.likelihoods().col(sig));
    const double prob = joint.sum();
    if (prob <= kSignalProbFloor) continue;
    const BeliefAtom eta(joint / prob);
    for (int c = 0; c < nc; ++c) {
      const Matrix& slab = problem.joint()[c];
      const double mass = problem.cohort_marginal()[c];
      for (int d = 0; d < nd; ++d) {
        const double like = pi(d, sig);
        if (like <= 0.0) continue;
        for (int s = 0; s < ns; ++s) {
          const double p = slab(s, d) / mass;
          if (p <= 0.0) continue;
          out[c] += p * like * problem.data_payoff(eta, s, c);
        }
      }
    }
  }
  return out;
}

BeliefGrid data_grid(const CohortProblem& problem, int resolution) {
  const int nd = problem.num_data();
  if (resolution <= 0) resolution = BeliefGrid::default_resolution(nd);
  const Payoff* shape = problem.payoff().belief_shape();
  if (shape == nullptr)
    return BeliefGrid::build(nd, resolution, problem.data_marginal());

  // Pull state-belief breakpoints back to the data simplex (binary data).
  std::vector<Vector> pulled;
  if (nd == 2) {
    const Matrix& m = problem.state_given_data();
    for (const Vector& mu : shape->breakpoint_beliefs()) {
      // Solve mu(eta)[1] = mu[1] over eta = (1-h, h) for 2-state payoffs;
      // other shapes rely on the on_breakpoint marking below.
      if (problem.num_states() != 2) break;
      const double base = m(1, 0);
      const double slope = m(1, 1) - m(1, 0);
      if (std::abs(slope) < 1e-14) continue;
      const double h = (mu[1] - base) / slope;
      if (h < -1e-12 || h > 1.0 + 1e-12) continue;
      Vector eta(2);
      eta << 1.0 - std::clamp(h, 0.0, 1.0), std::clamp(h, 0.0, 1.0);
      pulled.push_back(eta);
    }
  }
  auto on_break = [&problem, shape](const Vector& eta) {
    const Vector mu = problem.state_given_data() * eta;
    return shape->on_breakpoint(mu / mu.sum());
  };
  return BeliefGrid::build(nd, resolution, problem.data_marginal(), pulled, on_break);
}

std::vector<AdjustedColumn> cohort_columns(const CohortProblem& problem,
                                           const BeliefGrid& grid) {
  std::vector<AdjustedColumn> out;
  out.reserve(grid.size());
  for (const BeliefAtom& atom : grid.atoms())
    out.push_back({atom, adjusted_cohort_payoff(problem, atom)});
  return out;
}

namespace {

bool cohort_attainment(const CohortProblem& problem, const BeliefDistribution& argmax) {
  for (const auto& e : argmax.atoms()) {
    if (e.atom.side == Side::exact) continue;
    const Vector sided = adjusted_cohort_payoff(problem, e.atom);
    const Vector exact = adjusted_cohort_payoff(problem, BeliefAtom(e.atom.belief));
    if ((sided - exact).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

}  // namespace

SupportResult cohort_support(const CohortProblem& problem, const BeliefGrid& grid,
                             const Vector& direction) {
  SupportResult r = support_over_columns(cohort_columns(problem, grid),
                                         problem.data_marginal(), direction);
  r.attained = cohort_attainment(problem, r.argmax);
  return r;
}

SetApprox cohort_set(const CohortProblem& problem, const BeliefGrid& grid,
                     const std::vector<Vector>& directions) {
  SetApprox out = approximate_from_columns(cohort_columns(problem, grid),
                                           problem.data_marginal(), directions);
  for (SupportSample& s : out.samples) s.attained = cohort_attainment(problem, s.argmax);
  return out;
}

CohortProblem garble(const CohortProblem& problem, const GarblingMatrix& g) {
  if (g.G.rows() != problem.num_data())
    throw DimensionMismatch("garble: matrix rows must match the data set");
  std::vector<Matrix> joint;
  joint.reserve(problem.joint().size());
  for (const Matrix& slab : problem.joint()) joint.push_back(slab * g.G);
  std::vector<std::string> data;
  for (int d = 0; d < g.G.cols(); ++d) data.push_back("g" + std::to_string(d + 1));
  return CohortProblem(problem.cohorts(), problem.states(), std::move(data),
                       std::move(joint), problem.payoff_ptr());
}

Vector pullback_data_belief(const CohortProblem& problem, const GarblingMatrix& g,
                            const CohortProblem& garbled, const Vector& eta_garbled) {
  const int nd = problem.num_data();
  Vector eta = Vector::Zero(nd);
  for (int d = 0; d < nd; ++d) {
    double mix = 0.0;
    for (int dp = 0; dp < g.G.cols(); ++dp)
      mix += g.G(d, dp) * eta_garbled[dp] / garbled.data_marginal()[dp];
    eta[d] = problem.data_marginal()[d] * mix;
  }
  return eta / eta.sum();
}

BlackwellReport blackwell_inclusion_test(const CohortProblem& problem,
                                         const GarblingMatrix& g,
                                         const std::vector<Vector>& directions,
                                         int resolution) {
  const CohortProblem garbled = garble(problem, g);
  BeliefGrid grid_orig = data_grid(problem, resolution);
  const BeliefGrid grid_garb = data_grid(garbled, resolution);

  // Everything the garbled data can induce, the original can match: augment
  // the original grid with the pullbacks of the garbled atoms (all sides, so
  // one-sided limits stay available) to make that exact at grid level.
  std::vector<BeliefAtom> mapped;
  for (const BeliefAtom& a : grid_garb.atoms()) {
    const Vector eta = pullback_data_belief(problem, g, garbled, a.belief);
    for (Side side : {Side::exact, Side::lower, Side::upper})
      mapped.emplace_back(eta, side);
  }
  grid_orig.add_atoms(mapped);

  const auto cols_orig = cohort_columns(problem, grid_orig);
  const auto cols_garb = cohort_columns(garbled, grid_garb);

  BlackwellReport report;
  for (const Vector& d : directions) {
    BlackwellReport::Entry e;
    e.direction = d;
    e.original =
        support_over_columns(cols_orig, problem.data_marginal(), d).value;
    e.garbled = support_over_columns(cols_garb, garbled.data_marginal(), d).value;
    e.slack = e.original - e.garbled;
    if (e.slack < -1e-6) {
      report.violations.push_back(static_cast<int>(report.entries.size()));
      report.inclusion_holds = false;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

CohortProblem binary_precision_problem(double sigma,
                                       std::shared_ptr<const Payoff> type_payoff) {
  if (sigma < 0.5 || sigma > 1.0)
    throw Error("binary_precision_problem: precision must lie in [1/2, 1]");
  if (type_payoff->num_types() != 2)
    throw DimensionMismatch("binary_precision_problem: payoff must be over 2 types");
  // State and cohort coincide with the type; each type is equally likely and
  // emits the matching data value with probability sigma.
  std::vector<Matrix> joint(2, Matrix::Zero(2, 2));
  joint[0](0, 0) = 0.5 * sigma;
  joint[0](0, 1) = 0.5 * (1.0 - sigma);
  joint[1](1, 0) = 0.5 * (1.0 - sigma);
  joint[1](1, 1) = 0.5 * sigma;
  return CohortProblem({"low", "high"}, {"low", "high"}, {"d1", "d2"},
                       std::move(joint),
                       std::make_shared<BeliefStatePayoff>(std::move(type_payoff)));
}

}  // namespace ipsets
