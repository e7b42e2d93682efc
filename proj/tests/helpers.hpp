#pragma once

#include "ipsets/model.hpp"
#include "ipsets/persuasion.hpp"

#include <memory>
#include <random>

namespace testutil {

using namespace ipsets;

// Running marketplace example: two equally likely types, profits 0 / 1/2 / 1
// as the high-quality belief crosses 1/3 and 2/3.
inline Prior half_half() {
  Vector p(2);
  p << 0.5, 0.5;
  return Prior(p);
}

inline std::shared_ptr<TabulatedPayoff> marketplace_payoff() {
  Matrix values(3, 2);
  values << 0.0, 0.0, 0.5, 0.5, 1.0, 1.0;
  return std::make_shared<TabulatedPayoff>(
      TabulatedPayoff::step_on_second_type({1.0 / 3.0, 2.0 / 3.0}, values));
}

inline InformationStructure marketplace_three_signals() {
  Matrix pi(2, 3);
  pi << 1.0 / 5.0, 2.0 / 5.0, 2.0 / 5.0, 0.0, 1.0 / 5.0, 4.0 / 5.0;
  return InformationStructure(pi);
}

inline InformationStructure marketplace_cautious() {
  Matrix pi(2, 2);
  pi << 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0;
  return InformationStructure(pi);
}

// Receiver game whose sender-preferred indirect utility reproduces the
// marketplace payoff: actions worth 0, 1/2, 1 to the sender, with receiver
// cutoffs at 1/3 and 2/3.
inline ReceiverGame marketplace_game() {
  Matrix u(3, 2);
  u << 0.0, 0.0, -1.0, 2.0, -3.0, 3.0;
  Matrix v(3, 2);
  v << 0.0, 0.0, 0.5, 0.5, 1.0, 1.0;
  return ReceiverGame({"pass", "stock", "feature"}, u, v);
}

inline Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

inline Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

inline Prior random_prior(std::mt19937_64& rng, int n, double floor = 0.08) {
  std::gamma_distribution<double> gam(1.0, 1.0);
  Vector p(n);
  for (int i = 0; i < n; ++i) p[i] = gam(rng) + floor * n;
  return Prior(p / p.sum());
}

inline InformationStructure random_structure(std::mt19937_64& rng, int types,
                                             int signals) {
  std::gamma_distribution<double> gam(1.0, 1.0);
  Matrix pi(types, signals);
  for (int i = 0; i < types; ++i) {
    double total = 0.0;
    for (int j = 0; j < signals; ++j) {
      pi(i, j) = gam(rng) + 1e-6;
      total += pi(i, j);
    }
    pi.row(i) /= total;
  }
  return InformationStructure(pi);
}

// Bayes-plausible distribution whose atoms mix the prior with random
// directions; `spread` in (0, 1] controls how far atoms sit from the prior.
inline BeliefDistribution random_tau(std::mt19937_64& rng, const Prior& prior,
                                     int atoms, double spread = 0.9) {
  const int n = prior.num_types();
  std::gamma_distribution<double> gam(1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, spread);
  std::vector<BeliefDistribution::Entry> entries;
  Vector weights(atoms);
  for (int m = 0; m < atoms; ++m) weights[m] = gam(rng) + 0.05;
  weights /= weights.sum();

  Vector running = Vector::Zero(n);
  for (int m = 0; m + 1 < atoms; ++m) {
    Vector raw(n);
    for (int i = 0; i < n; ++i) raw[i] = gam(rng) + 1e-9;
    raw /= raw.sum();
    const double t = unif(rng);
    Vector mu = (1.0 - t) * prior.probs() + t * raw;
    entries.push_back({weights[m], BeliefAtom(mu)});
    running += weights[m] * mu;
  }
  // Close the mean with the last atom; retry callers keep spread small enough
  // that it stays a probability vector.
  Vector last = (prior.probs() - running) / weights[atoms - 1];
  for (int i = 0; i < n; ++i)
    if (last[i] < 0.0) return random_tau(rng, prior, atoms, spread * 0.6);
  entries.push_back({weights[atoms - 1], BeliefAtom(last)});
  return BeliefDistribution(std::move(entries));
}

// Piecewise-constant payoff with random cutoffs and values on a random score
// direction.
inline std::shared_ptr<TabulatedPayoff> random_step_payoff(std::mt19937_64& rng, int n,
                                                           int pieces,
                                                           double value_range = 2.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector score(n);
  for (int i = 0; i < n; ++i) score[i] = unif(rng);
  std::vector<double> cutoffs;
  for (int k = 0; k + 1 < pieces; ++k) {
    const double lo = score.minCoeff();
    const double hi = score.maxCoeff();
    cutoffs.push_back(lo + (hi - lo) * unif(rng));
  }
  std::sort(cutoffs.begin(), cutoffs.end());
  Matrix values(pieces, n);
  for (int p = 0; p < pieces; ++p)
    for (int i = 0; i < n; ++i) values(p, i) = value_range * (unif(rng) - 0.25);
  std::vector<bool> closed(cutoffs.size());
  for (size_t k = 0; k < cutoffs.size(); ++k) closed[k] = unif(rng) < 0.5;
  return std::make_shared<TabulatedPayoff>(score, cutoffs, values, closed);
}

}  // namespace testutil
