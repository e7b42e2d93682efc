// Command-line front end: parse a problem file, dispatch one command, emit
// the result as structured text, CSV, or SVG.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include "ipsets/problem_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using ipsets::Vector;

Vector parse_components(const std::string& csv, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ipsets::io::ParseError(what + ": cannot parse '" + item + "'");
    }
  }
  if (vals.empty()) throw ipsets::io::ParseError(what + ": empty vector");
  Vector v(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interim payoff sets: membership, support geometry, and design "
               "diagnostics for Bayesian information structures"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string spec_path;
  std::string out_path;
  std::string format = "text";
  ipsets::io::RunFlags flags;
  std::string target_csv;
  std::string lambda_csv;
  std::string sense = "max";
  std::string sigmas_csv;

  app.add_option("--out", out_path, "Write the result to this file");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "svg"}));
  app.add_option("--directions,-d", flags.directions,
                 "Number of support directions (0: spec default)");
  app.add_option("--grid,-g", flags.grid, "Grid resolution (0: spec default)");
  app.add_option("--tol", flags.tol, "Membership tolerance override");
  app.add_option("--seed", flags.seed, "Seed for stochastic searches");

  std::map<std::string, CLI::App*> commands;
  for (const char* name : {"membership", "boundary", "set", "maxmin", "commeq",
                           "bipool", "cohort-set", "diagnose", "reduce"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("spec", spec_path, "Problem file (JSON)")->required();
    commands[name] = sub;
  }
  commands["membership"]->add_option("--target", target_csv,
                                     "Profile to test, comma separated");
  commands["reduce"]->add_option("--target", target_csv,
                                 "Profile whose certificate to thin");
  commands["boundary"]->add_option("--lambda", lambda_csv,
                                   "Support direction, comma separated");
  commands["diagnose"]->add_option("--lambda", lambda_csv,
                                   "Boundary direction (default: the prior)");
  commands["bipool"]->add_option("--type", flags.target_type,
                                 "Target type (1-based)");
  commands["bipool"]
      ->add_option("--sense", sense, "max or min")
      ->check(CLI::IsMember({"max", "min"}));
  commands["cohort-set"]->add_option("--sigmas", sigmas_csv,
                                     "Precision sweep override, comma separated");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!target_csv.empty()) flags.target = parse_components(target_csv, "--target");
    if (!lambda_csv.empty()) flags.lambda = parse_components(lambda_csv, "--lambda");
    if (!sigmas_csv.empty()) {
      const Vector s = parse_components(sigmas_csv, "--sigmas");
      flags.sigmas.assign(s.data(), s.data() + s.size());
    }
    flags.sense =
        sense == "min" ? ipsets::OptimizeSense::min : ipsets::OptimizeSense::max;

    const std::string command = app.get_subcommands().front()->get_name();
    const ipsets::io::ProblemSpec spec = ipsets::io::parse_problem(spec_path);
    for (const std::string& w : spec.warnings) std::cerr << "warning: " << w << "\n";

    const ipsets::io::ResultBundle bundle = ipsets::io::run(command, spec, flags);

    std::string rendered;
    if (format == "csv") {
      rendered = ipsets::io::to_csv(bundle);
    } else if (format == "svg") {
      rendered = ipsets::io::to_svg(bundle);
    } else {
      rendered = bundle.to_text();
    }

    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw ipsets::io::ParseError("cannot write '" + out_path + "'");
      out << rendered;
    } else {
      std::cout << rendered;
    }
    std::cerr << "elapsed: " << bundle.elapsed_seconds << "s\n";
    return 0;
  } catch (const ipsets::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ipsets::ConvergenceFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ipsets::ReductionFailed& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ipsets::Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}
