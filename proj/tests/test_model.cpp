#include "ipsets/model.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <random>

using namespace ipsets;
using namespace testutil;

TEST_CASE("posterior by Bayes' rule") {
  const Prior prior = half_half();

  SUBCASE("full disclosure gives degenerate posteriors") {
    const auto pi = InformationStructure::full_disclosure(2);
    const BeliefAtom mu = posterior(prior, pi, 0);
    CHECK(mu.belief[0] == doctest::Approx(1.0));
    CHECK(mu.belief[1] == doctest::Approx(0.0));
  }

  SUBCASE("cautious structure") {
    const BeliefAtom mu = posterior(prior, marketplace_cautious(), 0);
    CHECK(mu.belief[0] == doctest::Approx(1.0 / 3.0));
    CHECK(mu.belief[1] == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("three-signal structure, third signal") {
    const BeliefAtom mu = posterior(prior, marketplace_three_signals(), 2);
    CHECK(mu.belief[0] == doctest::Approx(1.0 / 3.0));
    CHECK(mu.belief[1] == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("zero-probability signals are rejected") {
    Matrix pi(2, 2);
    pi << 1.0, 0.0, 1.0, 0.0;
    CHECK_THROWS_AS(posterior(prior, InformationStructure(pi), 1),
                    ZeroProbabilitySignal);
  }
}

TEST_CASE("posterior_distribution") {
  const Prior prior = half_half();

  SUBCASE("uninformative structure keeps the prior") {
    const auto tau = posterior_distribution(prior, InformationStructure::uninformative(2));
    REQUIRE(tau.size() == 1);
    CHECK(tau.atoms()[0].weight == doctest::Approx(1.0));
    CHECK(tau.atoms()[0].atom.belief[1] == doctest::Approx(0.5));
  }

  SUBCASE("three-signal structure") {
    const auto tau = posterior_distribution(prior, marketplace_three_signals());
    REQUIRE(tau.size() == 3);
    CHECK(tau.atoms()[0].weight == doctest::Approx(0.1));
    CHECK(tau.atoms()[0].atom.belief[0] == doctest::Approx(1.0));
    CHECK(tau.atoms()[1].weight == doctest::Approx(0.3));
    CHECK(tau.atoms()[1].atom.belief[1] == doctest::Approx(1.0 / 3.0));
    CHECK(tau.atoms()[2].weight == doctest::Approx(0.6));
    CHECK(tau.atoms()[2].atom.belief[1] == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("full disclosure splits evenly") {
    const auto tau =
        posterior_distribution(prior, InformationStructure::full_disclosure(2));
    REQUIRE(tau.size() == 2);
    CHECK(tau.atoms()[0].weight == doctest::Approx(0.5));
    CHECK(tau.atoms()[1].weight == doctest::Approx(0.5));
  }

  SUBCASE("signals with equal posteriors merge") {
    Matrix pi(2, 3);
    pi << 0.25, 0.25, 0.5, 0.25, 0.25, 0.5;
    const auto tau = posterior_distribution(prior, InformationStructure(pi));
    CHECK(tau.size() == 1);
  }
}

TEST_CASE("interim profiles of the marketplace example") {
  const Prior prior = half_half();
  const auto w = marketplace_payoff();

  const Profile three = interim_profile(*w, prior, marketplace_three_signals());
  CHECK(three[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(three[1] == doctest::Approx(0.9).epsilon(1e-12));

  const Profile cautious = interim_profile(*w, prior, marketplace_cautious());
  CHECK(cautious[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(cautious[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  const Profile none = interim_profile(*w, prior, InformationStructure::uninformative(2));
  CHECK(none[0] == doctest::Approx(0.5));
  CHECK(none[1] == doctest::Approx(0.5));
}

TEST_CASE("adjusted payoff applies the likelihood ratio") {
  const Prior prior = half_half();
  const auto w = marketplace_payoff();

  SUBCASE("high-belief atom") {
    const Vector v = adjusted_payoff(*w, prior, BeliefAtom(vec2(0.3, 0.7)));
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(1.4));
  }

  SUBCASE("at the prior the ratio is one") {
    const Vector v = adjusted_payoff(*w, prior, BeliefAtom(vec2(0.5, 0.5)));
    CHECK(v[0] == doctest::Approx(0.5));
    CHECK(v[1] == doctest::Approx(0.5));
  }

  SUBCASE("zero-support types contribute zero") {
    const Vector v = adjusted_payoff(*w, prior, BeliefAtom(vec2(0.0, 1.0)));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(2.0));
  }

  SUBCASE("one-sided evaluation at a breakpoint") {
    const Vector lower =
        adjusted_payoff(*w, prior, BeliefAtom(vec2(2.0 / 3.0, 1.0 / 3.0), Side::lower));
    const Vector exact =
        adjusted_payoff(*w, prior, BeliefAtom(vec2(2.0 / 3.0, 1.0 / 3.0)));
    CHECK(lower[0] == doctest::Approx(0.0));
    CHECK(exact[0] == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("unconditional profile matches the paper anchors") {
  const Prior prior = half_half();
  const auto w = marketplace_payoff();

  CHECK(unconditional_profile(*w, prior, BeliefDistribution::point_mass(vec2(0.5, 0.5)))[0] ==
        doctest::Approx(0.5));

  const BeliefDistribution full({{0.5, BeliefAtom(vec2(1.0, 0.0))},
                                 {0.5, BeliefAtom(vec2(0.0, 1.0))}});
  const Profile f = unconditional_profile(*w, prior, full);
  CHECK(f[0] == doctest::Approx(0.0));
  CHECK(f[1] == doctest::Approx(1.0));

  const auto tau = posterior_distribution(prior, marketplace_three_signals());
  const Profile p = unconditional_profile(*w, prior, tau);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.9));

  SUBCASE("mean-belief violations are rejected") {
    const BeliefDistribution off({{0.7, BeliefAtom(vec2(1.0, 0.0))},
                                  {0.3, BeliefAtom(vec2(0.0, 1.0))}});
    CHECK_THROWS_AS(unconditional_profile(*w, prior, off), NotBayesPlausible);
  }
}

TEST_CASE("structure_from_tau inverts posterior_distribution") {
  const Prior prior = half_half();

  SUBCASE("point mass at the prior is uninformative") {
    const auto pi = structure_from_tau(prior, BeliefDistribution::point_mass(vec2(0.5, 0.5)));
    CHECK(pi.num_signals() == 1);
    CHECK(pi(0, 0) == doctest::Approx(1.0));
    CHECK(pi(1, 0) == doctest::Approx(1.0));
  }

  SUBCASE("vertex atoms give full disclosure") {
    const BeliefDistribution tau({{0.5, BeliefAtom(vec2(1.0, 0.0))},
                                  {0.5, BeliefAtom(vec2(0.0, 1.0))}});
    const auto pi = structure_from_tau(prior, tau);
    CHECK(pi(0, 0) == doctest::Approx(1.0));
    CHECK(pi(0, 1) == doctest::Approx(0.0));
    CHECK(pi(1, 1) == doctest::Approx(1.0));
  }

  SUBCASE("marketplace atoms recover the displayed matrix") {
    const BeliefDistribution tau({{0.1, BeliefAtom(vec2(1.0, 0.0))},
                                  {0.3, BeliefAtom(vec2(2.0 / 3.0, 1.0 / 3.0))},
                                  {0.6, BeliefAtom(vec2(1.0 / 3.0, 2.0 / 3.0))}});
    const auto pi = structure_from_tau(prior, tau);
    CHECK(pi(0, 0) == doctest::Approx(0.2));
    CHECK(pi(0, 1) == doctest::Approx(0.4));
    CHECK(pi(0, 2) == doctest::Approx(0.4));
    CHECK(pi(1, 0) == doctest::Approx(0.0));
    CHECK(pi(1, 1) == doctest::Approx(0.2));
    CHECK(pi(1, 2) == doctest::Approx(0.8));
  }
}

TEST_CASE("accounting identity on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> types_draw(2, 4);
  std::uniform_int_distribution<int> signal_draw(1, 6);
  std::uniform_int_distribution<int> piece_draw(1, 5);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = types_draw(rng);
    const Prior prior = random_prior(rng, n);
    const auto pi = random_structure(rng, n, signal_draw(rng));
    const auto w = random_step_payoff(rng, n, piece_draw(rng));
    const Profile direct = interim_profile(*w, prior, pi);
    const Profile via_tau =
        unconditional_profile(*w, prior, posterior_distribution(prior, pi));
    CHECK((direct - via_tau).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("round trip tau -> structure -> tau") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Prior prior = random_prior(rng, n);
    const BeliefDistribution tau =
        random_tau(rng, prior, 2 + static_cast<int>(rng() % 4)).merged();
    const auto back = posterior_distribution(prior, structure_from_tau(prior, tau));
    REQUIRE(back.size() == tau.size());
    for (int m = 0; m < tau.size(); ++m) {
      // posterior_distribution preserves the atom order of the signals
      CHECK((back.atoms()[m].atom.belief - tau.atoms()[m].atom.belief)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      CHECK(back.atoms()[m].weight ==
            doctest::Approx(tau.atoms()[m].weight).epsilon(1e-9));
    }
  }
}

TEST_CASE("unconditional profile equals the induced structure's interim profile") {
  std::mt19937_64 rng(88);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Prior prior = random_prior(rng, n);
    const auto w = random_step_payoff(rng, n, 3);
    const BeliefDistribution tau = random_tau(rng, prior, 4).merged();
    const Profile direct = unconditional_profile(*w, prior, tau);
    const Profile via_structure =
        interim_profile(*w, prior, structure_from_tau(prior, tau));
    CHECK((direct - via_structure).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("stochastic-weight identity") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Prior prior = random_prior(rng, n);
    const BeliefDistribution tau = random_tau(rng, prior, 3);
    for (const auto& e : tau.atoms()) {
      double mean_ratio = 0.0;
      for (int t = 0; t < n; ++t)
        mean_ratio += prior(t) * (e.atom.belief[t] / prior(t));
      CHECK(mean_ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS(Prior(vec2(0.5, 0.6)));
  CHECK_THROWS(Prior(vec2(1.0, 0.0)));  // full support required
  Matrix bad(2, 2);
  bad << 0.9, 0.2, 0.5, 0.5;
  CHECK_THROWS(InformationStructure(bad));
  CHECK_THROWS(BeliefAtom(vec2(0.9, 0.2)));
  CHECK_THROWS(BeliefDistribution({{0.5, BeliefAtom(vec2(1.0, 0.0))}}));
  const LinearReputationPayoff lin(vec2(0.0, 1.0));
  CHECK(lin.value(BeliefAtom(vec2(0.25, 0.75)), 0) == doctest::Approx(0.75));
  CHECK(lin.value(BeliefAtom(vec2(0.25, 0.75)), 1) == doctest::Approx(0.75));
}
