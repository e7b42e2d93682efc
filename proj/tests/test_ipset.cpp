#include "ipsets/ipset.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <random>

using namespace ipsets;
using namespace testutil;

namespace {

struct MarketplaceFixture {
  Prior prior = half_half();
  std::shared_ptr<TabulatedPayoff> w = marketplace_payoff();
  BeliefGrid grid = BeliefGrid::for_payoff(prior, *w);
};

// Exhaustive one/two-atom concavification on a fine one-dimensional grid,
// independent of the LP path. Valid for N == 2: the support problem is the
// concave envelope of a scalar function, so two atoms suffice.
double brute_force_support(const Payoff& w, const Prior& prior, const Vector& lambda,
                           int fine) {
  std::vector<BeliefAtom> atoms;
  for (int i = 0; i <= fine; ++i) {
    const double m = static_cast<double>(i) / fine;
    atoms.emplace_back(vec2(1.0 - m, m));
  }
  for (const Vector& b : w.breakpoint_beliefs()) {
    atoms.emplace_back(b, Side::lower);
    atoms.emplace_back(b, Side::upper);
  }
  std::vector<double> score(atoms.size());
  std::vector<double> pos(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i) {
    score[i] = lambda.dot(adjusted_payoff(w, prior, atoms[i]));
    pos[i] = atoms[i].belief[1];
  }
  const double m0 = prior(1);
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (std::abs(pos[i] - m0) < 1e-12) best = std::max(best, score[i]);
    for (size_t j = 0; j < atoms.size(); ++j) {
      if (pos[i] > m0 || pos[j] < m0 || pos[j] - pos[i] < 1e-12) continue;
      const double p = (pos[j] - m0) / (pos[j] - pos[i]);
      best = std::max(best, p * score[i] + (1.0 - p) * score[j]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("grid construction") {
  MarketplaceFixture f;
  CHECK(f.grid.dim() == 2);
  bool has_lower_third = false;
  bool has_upper_third = false;
  bool has_prior = false;
  for (const auto& a : f.grid.atoms()) {
    if (std::abs(a.belief[1] - 1.0 / 3.0) < 1e-12) {
      has_lower_third |= a.side == Side::lower;
      has_upper_third |= a.side == Side::upper;
    }
    if (std::abs(a.belief[1] - 0.5) < 1e-12 && a.side == Side::exact) has_prior = true;
  }
  CHECK(has_lower_third);
  CHECK(has_upper_third);
  CHECK(has_prior);
}

TEST_CASE("membership on the marketplace example") {
  MarketplaceFixture f;

  SUBCASE("no-information profile is achievable") {
    const auto r = membership(*f.w, f.prior, f.grid, vec2(0.5, 0.5));
    REQUIRE(r.inside);
    CHECK(r.certificate.is_bayes_plausible(f.prior));
  }

  SUBCASE("the Pareto profile (0.6, 0.9) is achievable with three atoms") {
    const auto r = membership(*f.w, f.prior, f.grid, vec2(0.6, 0.9));
    REQUIRE(r.inside);
    const Profile p = unconditional_profile(*f.w, f.prior, r.certificate);
    CHECK((p - vec2(0.6, 0.9)).cwiseAbs().maxCoeff() < 1e-7);
  }

  SUBCASE("(1, 1) is outside with a valid separating direction") {
    const auto r = membership(*f.w, f.prior, f.grid, vec2(1.0, 1.0));
    REQUIRE(!r.inside);
    REQUIRE(r.separating.size() == 2);
    const double sup =
        support_value(*f.w, f.prior, f.grid, r.separating).value;
    CHECK(r.separating.dot(vec2(1.0, 1.0)) > sup + 1e-9);
  }
}

TEST_CASE("support values and boundary profiles") {
  MarketplaceFixture f;

  SUBCASE("equal weights give the ex ante optimum 3/4") {
    const auto r = support_value(*f.w, f.prior, f.grid, vec2(0.5, 0.5));
    CHECK(r.value == doctest::Approx(0.75).epsilon(1e-9));
    const Profile p = boundary_profile(*f.w, f.prior, f.grid, vec2(0.5, 0.5));
    CHECK(vec2(0.5, 0.5).dot(p) == doctest::Approx(r.value).epsilon(1e-9));
  }

  SUBCASE("direction (0,1) reaches full disclosure") {
    const auto r = support_value(*f.w, f.prior, f.grid, vec2(0.0, 1.0));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("direction (0,-1) reaches the closure vertex (1/6, 1/3)") {
    // The minimum of the second coordinate over the closure is 1/3, attained
    // only through lower-side atoms at the breakpoints.
    const auto r = support_value(*f.w, f.prior, f.grid, vec2(0.0, -1.0));
    CHECK(r.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
    CHECK(!r.attained);  // one-sided limit, closure value
    const Profile p = boundary_profile(*f.w, f.prior, f.grid, vec2(0.0, -1.0));
    CHECK(p[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-7));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  }

  SUBCASE("nonnegative directions attain their suprema") {
    CHECK(support_value(*f.w, f.prior, f.grid, vec2(0.0, 1.0)).attained);
    CHECK(support_value(*f.w, f.prior, f.grid, vec2(0.5, 0.5)).attained);
  }

  SUBCASE("linear payoffs are direction-invariant ex ante") {
    const LinearReputationPayoff lin(vec2(0.0, 1.0));
    const BeliefGrid grid = BeliefGrid::for_payoff(f.prior, lin);
    const auto r = support_value(lin, f.prior, grid, f.prior.probs());
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("approximate_set recovers the marketplace polygon") {
  MarketplaceFixture f;
  const auto dirs = circle_directions(64);
  const SetApprox approx = approximate_set(*f.w, f.prior, f.grid, dirs);

  const std::vector<Vector> expected = {vec2(0.0, 1.0),       vec2(0.5, 1.0),
                                        vec2(2.0 / 3.0, 5.0 / 6.0),
                                        vec2(0.5, 0.5),       vec2(1.0 / 6.0, 1.0 / 3.0),
                                        vec2(0.0, 0.5)};
  for (const Vector& v : expected) {
    double best = 1e9;
    for (const Profile& p : approx.inner_vertices)
      best = std::min(best, (p - v).cwiseAbs().maxCoeff());
    CHECK(best < 0.02);
  }

  SUBCASE("sandwich: inner vertices satisfy the outer halfspaces") {
    for (const Profile& p : approx.inner_vertices)
      for (const auto& [lambda, offset] : approx.outer_halfspaces)
        CHECK(lambda.dot(p) <= offset + 1e-6);
  }

  SUBCASE("inner vertices pass membership and convexity at midpoints") {
    for (size_t i = 0; i < approx.inner_vertices.size(); i += 3) {
      CHECK(membership(*f.w, f.prior, f.grid, approx.inner_vertices[i]).inside);
      const Vector mid =
          0.5 * (approx.inner_vertices[i] +
                 approx.inner_vertices[(i + 2) % approx.inner_vertices.size()]);
      CHECK(membership(*f.w, f.prior, f.grid, mid).inside);
    }
  }
}

TEST_CASE("linear reputation set is the expected segment") {
  const Prior prior = half_half();
  const LinearReputationPayoff lin(vec2(0.0, 1.0));
  const BeliefGrid grid = BeliefGrid::for_payoff(prior, lin);
  const SetApprox approx = approximate_set(lin, prior, grid, circle_directions(64));
  for (const Profile& p : approx.inner_vertices) {
    CHECK(prior.probs().dot(p) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(p[0] > -1e-9);
    CHECK(p[0] < 0.5 + 1e-9);
  }
  double lo = 1e9;
  double hi = -1e9;
  for (const Profile& p : approx.inner_vertices) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(hi == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("membership reports a coarse grid instead of a bogus direction") {
  // Columns with identical payoffs cannot separate in payoff space; if their
  // beliefs also miss the anchor, the failure is the grid's.
  std::vector<AdjustedColumn> columns;
  columns.push_back({BeliefAtom(vec2(1.0, 0.0)), Vector::Zero(2)});
  columns.push_back({BeliefAtom(vec2(0.9, 0.1)), Vector::Zero(2)});
  CHECK_THROWS_AS(
      membership_over_columns(columns, vec2(0.5, 0.5), Vector::Zero(2)),
      GridTooCoarse);
}

TEST_CASE("degenerate single-type set is a point") {
  Vector one(1);
  one << 1.0;
  const Prior prior{one};
  Matrix value(1, 1);
  value << 0.7;
  const TabulatedPayoff w(one, {}, value);
  const BeliefGrid grid = BeliefGrid::for_payoff(prior, w, 1);
  Vector up(1), down(1);
  up << 1.0;
  down << -1.0;
  const SetApprox approx = approximate_set(w, prior, grid, {up, down});
  REQUIRE(approx.inner_vertices.size() == 1);
  CHECK(approx.inner_vertices[0][0] == doctest::Approx(0.7));
}

TEST_CASE("reduce_support") {
  const Prior prior = half_half();
  const auto w = marketplace_payoff();

  SUBCASE("five atoms representing (0.6, 0.9) shrink to three") {
    const BeliefDistribution tau({{0.05, BeliefAtom(vec2(1.0, 0.0))},
                                  {0.05, BeliefAtom(vec2(1.0, 0.0))},
                                  {0.15, BeliefAtom(vec2(2.0 / 3.0, 1.0 / 3.0))},
                                  {0.15, BeliefAtom(vec2(2.0 / 3.0, 1.0 / 3.0))},
                                  {0.6, BeliefAtom(vec2(1.0 / 3.0, 2.0 / 3.0))}});
    const auto reduced = reduce_support(prior, tau, *w);
    CHECK(reduced.size() <= 3);
    const Profile p = unconditional_profile(*w, prior, reduced);
    CHECK((p - vec2(0.6, 0.9)).cwiseAbs().maxCoeff() < 1e-7);
  }

  SUBCASE("single atoms pass through") {
    const auto tau = BeliefDistribution::point_mass(vec2(0.5, 0.5));
    CHECK(reduce_support(prior, tau, *w).size() == 1);
  }

  SUBCASE("random 8-atom distributions with a 5-piece payoff, N = 3") {
    std::mt19937_64 rng(5);
    const int n = 3;
    for (int rep = 0; rep < 25; ++rep) {
      const Prior p3 = random_prior(rng, n);
      const auto w3 = random_step_payoff(rng, n, 5);
      const BeliefDistribution tau = random_tau(rng, p3, 8);
      const Profile target = unconditional_profile(*w3, p3, tau);
      const auto reduced = reduce_support(p3, tau, *w3);
      CHECK(reduced.size() <= 2 * n - 1);
      const Profile got = unconditional_profile(*w3, p3, reduced);
      CHECK((got - target).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("min_signals on the marketplace example") {
  const Prior prior = half_half();
  const auto w = marketplace_payoff();
  const Profile target = vec2(0.6, 0.9);

  CHECK(!min_signals(*w, prior, target, 2));
  CHECK(min_signals(*w, prior, target, 3));
  CHECK(min_signals(*w, prior, vec2(0.5, 0.5), 1));
}

TEST_CASE("oracle equivalence of the grid support") {
  std::mt19937_64 rng(31);
  const Prior prior = half_half();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = random_step_payoff(rng, 2, 3);
    const BeliefGrid grid = BeliefGrid::for_payoff(prior, *w);
    Vector lambda = vec2(2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0);
    if (lambda.cwiseAbs().maxCoeff() < 0.1) lambda = vec2(1.0, -1.0);
    const double via_lp = support_value(*w, prior, grid, lambda).value;
    const double via_oracle = brute_force_support(*w, prior, lambda, 4000);
    CHECK(via_lp == doctest::Approx(via_oracle).epsilon(1e-5));
  }
}
