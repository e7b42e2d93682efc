#pragma once

#include "ipsets/cohort.hpp"
#include "ipsets/ipset.hpp"
#include "ipsets/persuasion.hpp"
#include "ipsets/reputation.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ipsets::io {

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IncompatibleCommand : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

enum class ProblemKind { tabulated, linear, persuasion, cohort };

std::string to_string(ProblemKind kind);

// A problem file: prior + payoff payload + solver options. Exactly one of
// payoff/game/cohort carries the payload, depending on the kind.
struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::tabulated;
  std::optional<Prior> prior;  // absent for cohort problems (data marginal rules)
  std::shared_ptr<const Payoff> payoff;            // tabulated, linear
  std::optional<ReceiverGame> game;                // persuasion
  std::shared_ptr<const CohortProblem> cohort;     // cohort
  std::vector<double> sigma_family;                // optional precision sweep
  int grid_resolution = 0;     // 0: dimension default
  int direction_count = 64;
  double membership_tol = kPlausibilityTol;
  std::vector<std::string> warnings;  // e.g. renormalized probability vectors
};

ProblemSpec parse_problem(const std::string& path);
ProblemSpec parse_problem_json(const nlohmann::ordered_json& root,
                               const std::string& name);

// Everything a command produced, as an ordered tree. The rendered forms are
// deterministic functions of the tree; wall-clock timing is kept out of it.
struct ResultBundle {
  nlohmann::ordered_json data;
  double elapsed_seconds = 0.0;

  std::string to_text() const;  // pretty JSON, byte-stable for fixed inputs
  static ResultBundle from_text(const std::string& text);
};

struct RunFlags {
  int directions = 0;             // 0: use the spec's count
  int grid = 0;                   // 0: use the spec's resolution
  double tol = 0.0;               // 0: use the spec's tolerance
  unsigned long seed = 0;
  std::optional<Vector> target;   // membership / reduce / min-signal queries
  std::optional<Vector> lambda;   // boundary / diagnose direction
  int target_type = 1;            // 1-based, bipool
  OptimizeSense sense = OptimizeSense::max;
  std::vector<double> sigmas;     // cohort-set override
};

// Dispatches one command against a parsed spec. Commands:
//   membership, boundary, set, maxmin, commeq, bipool, cohort-set, diagnose,
//   reduce.
ResultBundle run(const std::string& command, const ProblemSpec& spec,
                 const RunFlags& flags);

// Polygon vertices and support samples, 9 significant digits.
std::string to_csv(const ResultBundle& bundle);

// Filled inner hull plus stroked outer boundary; two-dimensional profile
// spaces only.
std::string to_svg(const ResultBundle& bundle);

}  // namespace ipsets::io
