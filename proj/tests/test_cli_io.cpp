#include "ipsets/problem_io.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace ipsets;
using namespace testutil;
namespace io = ipsets::io;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "fixtures"
#endif

namespace {

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("parsing the bundled problem files") {
  SUBCASE("marketplace step payoff") {
    const auto spec = io::parse_problem(fixture("example1.json"));
    CHECK(spec.kind == io::ProblemKind::tabulated);
    REQUIRE(spec.prior.has_value());
    CHECK(spec.prior->num_types() == 2);
    REQUIRE(spec.payoff != nullptr);
    CHECK(spec.payoff->value(BeliefAtom(vec2(0.5, 0.5)), 0) == doctest::Approx(0.5));
    CHECK(spec.payoff->value(BeliefAtom(vec2(0.2, 0.8)), 1) == doctest::Approx(1.0));
    CHECK(spec.grid_resolution == 400);
    CHECK(spec.direction_count == 64);
    CHECK(spec.warnings.empty());
  }

  SUBCASE("derived receiver game") {
    const auto spec = io::parse_problem(fixture("example1-persuasion.json"));
    CHECK(spec.kind == io::ProblemKind::persuasion);
    REQUIRE(spec.game.has_value());
    CHECK(spec.game->num_actions() == 3);
  }

  SUBCASE("three-type reputation vector") {
    const auto spec = io::parse_problem(fixture("linear-3.json"));
    CHECK(spec.kind == io::ProblemKind::linear);
    const auto* lin = dynamic_cast<const LinearReputationPayoff*>(spec.payoff.get());
    REQUIRE(lin != nullptr);
    CHECK(lin->rho()[1] == doctest::Approx(0.5));
  }

  SUBCASE("precision family") {
    const auto spec = io::parse_problem(fixture("cohort-sigma.json"));
    CHECK(spec.kind == io::ProblemKind::cohort);
    REQUIRE(spec.cohort != nullptr);
    CHECK(spec.sigma_family.size() == 4);
  }
}

TEST_CASE("schema errors carry field paths") {
  SUBCASE("negative prior entry") {
    nlohmann::ordered_json j = {
        {"kind", "tabulated"},
        {"prior", {-0.2, 1.2}},
        {"payoff", {{"cutoffs", nlohmann::ordered_json::array()},
                    {"values", {{0.0, 0.0}}}}}};
    try {
      io::parse_problem_json(j, "bad");
      FAIL("expected SchemaError");
    } catch (const io::SchemaError& e) {
      CHECK(std::string(e.what()).find("prior[0]") != std::string::npos);
    }
  }

  SUBCASE("missing payoff") {
    nlohmann::ordered_json j = {{"kind", "linear"}, {"prior", {0.5, 0.5}}};
    CHECK_THROWS_AS(io::parse_problem_json(j, "bad"), io::SchemaError);
  }

  SUBCASE("ragged values") {
    nlohmann::ordered_json j = {
        {"kind", "tabulated"},
        {"prior", {0.5, 0.5}},
        {"payoff", {{"cutoffs", {0.5}}, {"values", {{0.0, 0.0}, {1.0}}}}}};
    CHECK_THROWS_AS(io::parse_problem_json(j, "bad"), io::SchemaError);
  }

  SUBCASE("slightly off probabilities renormalize with a warning") {
    nlohmann::ordered_json j = {
        {"kind", "linear"},
        {"prior", {0.5, 0.5 + 5e-8}},
        {"payoff", {{"rho", {0.0, 1.0}}}}};
    const auto spec = io::parse_problem_json(j, "warned");
    REQUIRE(spec.warnings.size() == 1);
    CHECK(spec.warnings[0].find("prior") != std::string::npos);
    CHECK(std::abs(spec.prior->probs().sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("command dispatch") {
  const auto example1 = io::parse_problem(fixture("example1.json"));

  SUBCASE("membership inside and outside") {
    io::RunFlags flags;
    flags.target = vec2(0.6, 0.9);
    auto bundle = io::run("membership", example1, flags);
    CHECK(bundle.data["inside"].get<bool>());

    flags.target = vec2(1.0, 1.0);
    bundle = io::run("membership", example1, flags);
    CHECK(!bundle.data["inside"].get<bool>());
    CHECK(bundle.data.contains("separating_direction"));
  }

  SUBCASE("set on the marketplace example") {
    io::RunFlags flags;
    const auto bundle = io::run("set", example1, flags);
    const auto& set = bundle.data["set"];
    CHECK(set["support_samples"].size() == 64);
    bool found_cautious = false;
    for (const auto& v : set["inner_vertices"]) {
      if (std::abs(v[0].get<double>() - 2.0 / 3.0) < 0.02 &&
          std::abs(v[1].get<double>() - 5.0 / 6.0) < 0.02)
        found_cautious = true;
    }
    CHECK(found_cautious);
  }

  SUBCASE("maxmin and commeq on the persuasion spec") {
    const auto spec = io::parse_problem(fixture("example1-persuasion.json"));
    io::RunFlags flags;
    auto bundle = io::run("maxmin", spec, flags);
    CHECK(bundle.data["value"].get<double>() == doctest::Approx(2.0 / 3.0));
    bundle = io::run("commeq", spec, flags);
    CHECK(bundle.data["interval"][0].get<double>() == doctest::Approx(0.5));
    CHECK(bundle.data["interval"][1].get<double>() == doctest::Approx(0.5));
  }

  SUBCASE("bipool on the linear spec") {
    const auto spec = io::parse_problem(fixture("linear-2.json"));
    io::RunFlags flags;
    flags.target_type = 1;
    const auto bundle = io::run("bipool", spec, flags);
    CHECK(bundle.data["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("diagnose emits certificates") {
    const auto spec = io::parse_problem(fixture("linear-2.json"));
    io::RunFlags flags;
    flags.lambda = vec2(0.0, 1.0);
    const auto bundle = io::run("diagnose", spec, flags);
    CHECK(bundle.data["cp_verdict"].get<std::string>() == "certified");
    CHECK(bundle.data["markov"]["detailed_balance_ok"].get<bool>());
    CHECK(bundle.data["majorized"].get<bool>());
  }

  SUBCASE("reduce thins a certificate") {
    io::RunFlags flags;
    flags.target = vec2(0.6, 0.9);
    const auto bundle = io::run("reduce", example1, flags);
    CHECK(bundle.data["inside"].get<bool>());
    CHECK(bundle.data["atoms_after"].get<int>() <= 3);
  }

  SUBCASE("incompatible commands are rejected") {
    io::RunFlags flags;
    CHECK_THROWS_AS(io::run("commeq", example1, flags), io::IncompatibleCommand);
    CHECK_THROWS_AS(io::run("bipool", example1, flags), io::IncompatibleCommand);
    const auto cohort = io::parse_problem(fixture("cohort-sigma.json"));
    CHECK_THROWS_AS(io::run("set", cohort, flags), io::IncompatibleCommand);
  }
}

TEST_CASE("determinism and round trips") {
  const auto example1 = io::parse_problem(fixture("example1.json"));
  io::RunFlags flags;
  flags.seed = 0;

  SUBCASE("identical runs render byte-identical text") {
    const auto a = io::run("set", example1, flags).to_text();
    const auto b = io::run("set", example1, flags).to_text();
    CHECK(a == b);
  }

  SUBCASE("bundle text round-trips losslessly") {
    const auto bundle = io::run("set", example1, flags);
    const auto back = io::ResultBundle::from_text(bundle.to_text());
    CHECK(back.data == bundle.data);
    CHECK(back.to_text() == bundle.to_text());
  }
}

TEST_CASE("emitters") {
  const auto example1 = io::parse_problem(fixture("example1.json"));
  io::RunFlags flags;
  const auto bundle = io::run("set", example1, flags);

  SUBCASE("csv lists vertices and support samples") {
    const std::string csv = io::to_csv(bundle);
    CHECK(csv.find("vertex,") != std::string::npos);
    CHECK(csv.find("support,") != std::string::npos);
    // 9 significant digits on a known value: the ex ante optimum 0.75 shows
    // up as the support value in the direction (cos 45, sin 45) scaled.
    CHECK(csv.find("nan") == std::string::npos);
  }

  SUBCASE("svg draws the filled hull") {
    const std::string svg = io::to_svg(bundle);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
    CHECK(svg.find("w1") != std::string::npos);
  }

  SUBCASE("sigma sweep renders nested polygons") {
    const auto cohort = io::parse_problem(fixture("cohort-sigma.json"));
    const auto sweep = io::run("cohort-set", cohort, flags);
    REQUIRE(sweep.data["sets"].size() == 4);
    const std::string svg = io::to_svg(sweep);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 8);
    const std::string csv = io::to_csv(sweep);
    CHECK(csv.find("vertex,0.55") != std::string::npos);
  }

  SUBCASE("svg needs a set-shaped bundle") {
    io::RunFlags f2;
    f2.target = vec2(0.5, 0.5);
    const auto membership = io::run("membership", example1, f2);
    CHECK_THROWS_AS(io::to_svg(membership), io::UnsupportedDimension);
  }

  SUBCASE("single-point sets emit a single vertex row") {
    const auto cohort = io::parse_problem(fixture("cohort-sigma.json"));
    io::RunFlags f2;
    f2.sigmas = {0.55};
    const auto bundle2 = io::run("cohort-set", cohort, f2);
    const std::string csv = io::to_csv(bundle2);
    CHECK(csv.find("vertex,0.55,0.5,0.5") != std::string::npos);
  }
}
