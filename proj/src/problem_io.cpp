#include "ipsets/problem_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ipsets::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<double>();
}

Vector vector_at(const json& j, const std::string& path, int expected_size = -1) {
  if (!j.is_array()) schema_fail(path, "expected an array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = number_at(j[i], path + "[" + std::to_string(i) + "]");
  if (expected_size >= 0 && v.size() != expected_size)
    schema_fail(path, "expected " + std::to_string(expected_size) + " entries, got " +
                          std::to_string(v.size()));
  return v;
}

Matrix matrix_at(const json& j, const std::string& path, int cols = -1) {
  if (!j.is_array() || j.empty()) schema_fail(path, "expected an array of rows");
  const int rows = static_cast<int>(j.size());
  Matrix m;
  for (int r = 0; r < rows; ++r) {
    const Vector row = vector_at(j[r], path + "[" + std::to_string(r) + "]", cols);
    if (r == 0) {
      m.resize(rows, row.size());
    } else if (row.size() != m.cols()) {
      schema_fail(path, "ragged rows");
    }
    m.row(r) = row;
  }
  return m;
}

// Probability vectors are renormalized when slightly off; badly off is an
// input error.
Vector probability_vector_at(const json& j, const std::string& path,
                             std::vector<std::string>& warnings) {
  Vector v = vector_at(j, path);
  for (int i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      schema_fail(path + "[" + std::to_string(i) + "]", "negative probability");
  const double total = v.sum();
  if (std::abs(total - 1.0) > 1e-6)
    schema_fail(path, "probabilities sum to " + std::to_string(total));
  if (std::abs(total - 1.0) > kInputTol)
    warnings.push_back(path + ": renormalized (sum was " + std::to_string(total) + ")");
  return v / total;
}

std::shared_ptr<const Payoff> parse_tabulated_payoff(const json& j,
                                                     const std::string& path, int n) {
  std::vector<double> cutoffs;
  for (const auto& c : field(j, path, "cutoffs"))
    cutoffs.push_back(number_at(c, path + ".cutoffs"));
  const Matrix values = matrix_at(field(j, path, "values"), path + ".values", n);
  if (values.rows() != static_cast<int>(cutoffs.size()) + 1)
    schema_fail(path + ".values", "need one row per piece (cutoffs + 1)");
  Vector score;
  if (j.contains("score")) {
    score = vector_at(j["score"], path + ".score", n);
  } else {
    score = Vector::Zero(n);
    score[n - 1] = 1.0;
  }
  std::vector<bool> closed_above;
  if (j.contains("closed_above")) {
    const auto& ca = j["closed_above"];
    if (!ca.is_array() || ca.size() != cutoffs.size())
      schema_fail(path + ".closed_above", "expected one flag per cutoff");
    for (const auto& b : ca) {
      if (!b.is_boolean()) schema_fail(path + ".closed_above", "expected booleans");
      closed_above.push_back(b.get<bool>());
    }
  }
  try {
    return std::make_shared<TabulatedPayoff>(score, cutoffs, values, closed_above);
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

ReceiverGame parse_game(const json& j, const std::string& path, int n) {
  std::vector<std::string> actions;
  if (j.contains("actions")) {
    for (const auto& a : j["actions"]) {
      if (!a.is_string()) schema_fail(path + ".actions", "expected strings");
      actions.push_back(a.get<std::string>());
    }
  }
  const Matrix u = matrix_at(field(j, path, "receiver"), path + ".receiver", n);
  const Matrix v = matrix_at(field(j, path, "sender"), path + ".sender", n);
  try {
    return ReceiverGame(actions, u, v);
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

std::shared_ptr<const Payoff> parse_state_payoff(const json& j, const std::string& path,
                                                 int num_states) {
  const auto& kind = field(j, path, "kind");
  if (!kind.is_string()) schema_fail(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "tabulated") return parse_tabulated_payoff(j, path, num_states);
  if (k == "linear") {
    const Vector rho = vector_at(field(j, path, "rho"), path + ".rho", num_states);
    return std::make_shared<LinearReputationPayoff>(rho);
  }
  schema_fail(path + ".kind", "unsupported state payoff kind '" + k + "'");
}

void parse_cohort_payload(const json& root, ProblemSpec& spec,
                          std::vector<std::string>& warnings) {
  const std::string path = "payoff";
  const json& payload = field(root, "", "payoff");

  if (payload.contains("family")) {
    const json& fam = payload["family"];
    const auto& type = field(fam, path + ".family", "type");
    if (!type.is_string() || type.get<std::string>() != "binary-precision")
      schema_fail(path + ".family.type", "unsupported family");
    std::vector<double> sigmas;
    if (fam.contains("sigmas")) {
      for (const auto& s : fam["sigmas"])
        sigmas.push_back(number_at(s, path + ".family.sigmas"));
    } else {
      sigmas.push_back(
          number_at(field(fam, path + ".family", "sigma"), path + ".family.sigma"));
    }
    if (sigmas.empty()) schema_fail(path + ".family.sigmas", "empty sweep");
    for (double s : sigmas)
      if (s < 0.5 || s > 1.0)
        schema_fail(path + ".family", "precision must lie in [1/2, 1]");
    const auto w = parse_state_payoff(field(payload, path, "state_payoff"),
                                      path + ".state_payoff", 2);
    spec.sigma_family = sigmas;
    spec.cohort =
        std::make_shared<CohortProblem>(binary_precision_problem(sigmas.back(), w));
    return;
  }

  const json& joint_json = field(payload, path, "joint");
  if (!joint_json.is_array() || joint_json.empty())
    schema_fail(path + ".joint", "expected [cohort][state][data] probabilities");
  std::vector<Matrix> joint;
  for (size_t c = 0; c < joint_json.size(); ++c)
    joint.push_back(matrix_at(joint_json[c], path + ".joint[" + std::to_string(c) + "]"));
  double total = 0.0;
  for (const Matrix& slab : joint) total += slab.sum();
  if (std::abs(total - 1.0) > 1e-6)
    schema_fail(path + ".joint", "joint probabilities sum to " + std::to_string(total));
  if (std::abs(total - 1.0) > kInputTol)
    warnings.push_back(path + ".joint: renormalized (sum was " + std::to_string(total) +
                       ")");
  for (Matrix& slab : joint) slab /= total;

  auto labels = [&](const char* key, int expected) {
    std::vector<std::string> out;
    if (!payload.contains(key)) return out;
    for (const auto& s : payload[key]) {
      if (!s.is_string()) schema_fail(path + "." + key, "expected strings");
      out.push_back(s.get<std::string>());
    }
    if (static_cast<int>(out.size()) != expected)
      schema_fail(path + "." + key, "label count mismatch");
    return out;
  };
  const int ns = static_cast<int>(joint.front().rows());
  const auto w = parse_state_payoff(field(payload, path, "state_payoff"),
                                    path + ".state_payoff", ns);
  try {
    spec.cohort = std::make_shared<CohortProblem>(
        labels("cohorts", static_cast<int>(joint.size())), labels("states", ns),
        labels("data", static_cast<int>(joint.front().cols())), std::move(joint),
        std::make_shared<BeliefStatePayoff>(w));
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r)
    out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

json distribution_to_json(const BeliefDistribution& tau) {
  json atoms = json::array();
  for (const auto& e : tau.atoms()) {
    json a;
    a["weight"] = e.weight;
    a["belief"] = vector_to_json(e.atom.belief);
    if (e.atom.side != Side::exact) a["side"] = ipsets::to_string(e.atom.side);
    atoms.push_back(std::move(a));
  }
  return atoms;
}

json set_to_json(const SetApprox& approx) {
  json out;
  json samples = json::array();
  for (const auto& s : approx.samples) {
    json one;
    one["direction"] = vector_to_json(s.direction);
    one["value"] = s.value;
    one["profile"] = vector_to_json(s.profile);
    if (!s.attained) one["attained"] = false;
    samples.push_back(std::move(one));
  }
  out["support_samples"] = std::move(samples);
  json inner = json::array();
  for (const auto& v : approx.inner_vertices) inner.push_back(vector_to_json(v));
  out["inner_vertices"] = std::move(inner);
  json outer = json::array();
  for (const auto& [lambda, offset] : approx.outer_halfspaces) {
    json h;
    h["normal"] = vector_to_json(lambda);
    h["offset"] = offset;
    outer.push_back(std::move(h));
  }
  out["outer_halfspaces"] = std::move(outer);
  return out;
}

struct ActiveOptions {
  int resolution;
  int directions;
  double tol;
};

ActiveOptions resolve_options(const ProblemSpec& spec, const RunFlags& flags) {
  ActiveOptions o;
  o.resolution = flags.grid > 0 ? flags.grid : spec.grid_resolution;
  o.directions = flags.directions > 0 ? flags.directions : spec.direction_count;
  o.tol = flags.tol > 0.0 ? flags.tol : spec.membership_tol;
  return o;
}

const Prior& require_prior(const ProblemSpec& spec) {
  if (!spec.prior) throw IncompatibleCommand("this command needs a prior-based spec");
  return *spec.prior;
}

const Payoff& require_payoff(const ProblemSpec& spec) {
  if (!spec.payoff)
    throw IncompatibleCommand("this command needs a tabulated or linear payoff");
  return *spec.payoff;
}

Vector require_target(const RunFlags& flags, int dim) {
  if (!flags.target || flags.target->size() != dim)
    throw IncompatibleCommand("this command needs --target with " +
                              std::to_string(dim) + " components");
  return *flags.target;
}

std::vector<Vector> sampling_directions(int dim, int count, const Vector& anchor,
                                        unsigned long seed) {
  if (dim == 2) return circle_directions(count);
  return default_directions(dim, count, anchor, seed);
}

json run_set_command(const ProblemSpec& spec, const ActiveOptions& opts,
                     unsigned long seed) {
  const Prior& prior = require_prior(spec);
  std::vector<AdjustedColumn> columns;
  if (spec.kind == ProblemKind::persuasion) {
    const BeliefGrid grid = grid_for_game(*spec.game, prior, opts.resolution);
    columns = sender_columns(*spec.game, prior, grid);
  } else {
    const BeliefGrid grid =
        BeliefGrid::for_payoff(prior, require_payoff(spec), opts.resolution);
    columns = adjusted_columns(require_payoff(spec), prior, grid);
  }
  const auto dirs =
      sampling_directions(prior.num_types(), opts.directions, prior.probs(), seed);
  return set_to_json(approximate_from_columns(columns, prior.probs(), dirs));
}

json run_cohort_set_command(const ProblemSpec& spec, const ActiveOptions& opts,
                            const RunFlags& flags, unsigned long seed) {
  std::vector<double> sigmas = !flags.sigmas.empty() ? flags.sigmas : spec.sigma_family;

  json sets = json::array();
  if (!sigmas.empty()) {
    const auto* bsp = dynamic_cast<const BeliefStatePayoff*>(&spec.cohort->payoff());
    if (bsp == nullptr)
      throw IncompatibleCommand("precision sweeps need a plain belief payoff");
    const std::shared_ptr<const Payoff> w(spec.cohort->payoff_ptr(), &bsp->inner());
    for (double s : sigmas) {
      const CohortProblem p = binary_precision_problem(s, w);
      const BeliefGrid grid = data_grid(p, opts.resolution);
      const auto dirs = sampling_directions(p.num_cohorts(), opts.directions,
                                            p.data_marginal(), seed);
      json one;
      one["sigma"] = s;
      one["set"] = set_to_json(cohort_set(p, grid, dirs));
      sets.push_back(std::move(one));
    }
  } else {
    const CohortProblem& p = *spec.cohort;
    const BeliefGrid grid = data_grid(p, opts.resolution);
    const auto dirs =
        sampling_directions(p.num_cohorts(), opts.directions, p.data_marginal(), seed);
    json one;
    one["set"] = set_to_json(cohort_set(p, grid, dirs));
    sets.push_back(std::move(one));
  }
  return sets;
}

void format_csv_number(std::string& out, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  out += buf;
}

void append_set_csv(std::string& out, const json& set, const std::string& tag) {
  for (const auto& v : set["inner_vertices"]) {
    out += "vertex";
    if (!tag.empty()) out += "," + tag;
    for (const auto& x : v) {
      out += ',';
      format_csv_number(out, x.get<double>());
    }
    out += '\n';
  }
  for (const auto& s : set["support_samples"]) {
    out += "support";
    if (!tag.empty()) out += "," + tag;
    for (const auto& x : s["direction"]) {
      out += ',';
      format_csv_number(out, x.get<double>());
    }
    out += ',';
    format_csv_number(out, s["value"].get<double>());
    out += '\n';
  }
}

struct Bounds {
  double xmin = 1e30, xmax = -1e30, ymin = 1e30, ymax = -1e30;
  void take(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
};

// Counterclockwise order around the centroid; the inputs are support-sampled
// boundary profiles, so this traces the hull.
std::vector<std::pair<double, double>> ccw_order(
    std::vector<std::pair<double, double>> pts) {
  double cx = 0.0, cy = 0.0;
  for (auto& [x, y] : pts) {
    cx += x;
    cy += y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [cx, cy](const auto& a, const auto& b) {
    return std::atan2(a.second - cy, a.first - cx) <
           std::atan2(b.second - cy, b.first - cx);
  });
  return pts;
}

// Vertices of the planar outer polytope: intersections of angularly adjacent
// halfspace boundaries.
std::vector<std::pair<double, double>> outer_polygon(const json& set) {
  std::vector<std::pair<Vector, double>> hs;
  for (const auto& h : set["outer_halfspaces"]) {
    if (h["normal"].size() != 2) return {};
    Vector n(2);
    n << h["normal"][0].get<double>(), h["normal"][1].get<double>();
    if (n.norm() < 1e-12) continue;
    hs.emplace_back(n, h["offset"].get<double>());
  }
  std::sort(hs.begin(), hs.end(), [](const auto& a, const auto& b) {
    return std::atan2(a.first[1], a.first[0]) < std::atan2(b.first[1], b.first[0]);
  });
  std::vector<std::pair<double, double>> pts;
  const size_t k = hs.size();
  for (size_t i = 0; i < k; ++i) {
    const auto& [n1, c1] = hs[i];
    const auto& [n2, c2] = hs[(i + 1) % k];
    const double det = n1[0] * n2[1] - n1[1] * n2[0];
    if (std::abs(det) < 1e-12) continue;
    pts.emplace_back((c1 * n2[1] - c2 * n1[1]) / det,
                     (n1[0] * c2 - n2[0] * c1) / det);
  }
  return pts;
}

void svg_polygon(std::string& out, const std::vector<std::pair<double, double>>& pts,
                 const std::string& style, const Bounds& b, double scale,
                 double margin) {
  if (pts.size() < 2) return;
  out += "  <polygon points=\"";
  char buf[64];
  for (const auto& [x, y] : pts) {
    const double px = margin + (x - b.xmin) * scale;
    const double py = margin + (b.ymax - y) * scale;
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", px, py);
    out += buf;
  }
  out += "\" " + style + "/>\n";
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::tabulated:
      return "tabulated";
    case ProblemKind::linear:
      return "linear";
    case ProblemKind::persuasion:
      return "persuasion";
    case ProblemKind::cohort:
      return "cohort";
  }
  return "tabulated";
}

ProblemSpec parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos)
    name = name.substr(0, dot);
  return parse_problem_json(root, name);
}

ProblemSpec parse_problem_json(const json& root, const std::string& name) {
  ProblemSpec spec;
  spec.name = name;
  if (root.contains("name") && root["name"].is_string())
    spec.name = root["name"].get<std::string>();

  const auto& kind = field(root, "", "kind");
  if (!kind.is_string()) schema_fail("kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "tabulated") {
    spec.kind = ProblemKind::tabulated;
  } else if (k == "linear") {
    spec.kind = ProblemKind::linear;
  } else if (k == "persuasion") {
    spec.kind = ProblemKind::persuasion;
  } else if (k == "cohort") {
    spec.kind = ProblemKind::cohort;
  } else {
    schema_fail("kind", "unknown kind '" + k + "'");
  }

  if (spec.kind != ProblemKind::cohort) {
    const Vector p =
        probability_vector_at(field(root, "", "prior"), "prior", spec.warnings);
    for (int i = 0; i < p.size(); ++i)
      if (p[i] <= 0.0)
        schema_fail("prior[" + std::to_string(i) + "]", "prior needs full support");
    spec.prior = Prior(p);
  }

  const int n = spec.prior ? spec.prior->num_types() : 0;
  switch (spec.kind) {
    case ProblemKind::tabulated:
      spec.payoff = parse_tabulated_payoff(field(root, "", "payoff"), "payoff", n);
      break;
    case ProblemKind::linear: {
      const Vector rho =
          vector_at(field(field(root, "", "payoff"), "payoff", "rho"), "payoff.rho", n);
      try {
        spec.payoff = std::make_shared<LinearReputationPayoff>(rho);
      } catch (const Error& e) {
        schema_fail("payoff.rho", e.what());
      }
      break;
    }
    case ProblemKind::persuasion:
      spec.game = parse_game(field(root, "", "payoff"), "payoff", n);
      break;
    case ProblemKind::cohort:
      parse_cohort_payload(root, spec, spec.warnings);
      break;
  }

  if (root.contains("grid") && root["grid"].contains("resolution")) {
    spec.grid_resolution =
        static_cast<int>(number_at(root["grid"]["resolution"], "grid.resolution"));
    if (spec.grid_resolution < 1) schema_fail("grid.resolution", "must be positive");
  }
  if (root.contains("directions") && root["directions"].contains("count")) {
    spec.direction_count =
        static_cast<int>(number_at(root["directions"]["count"], "directions.count"));
    if (spec.direction_count < 2) schema_fail("directions.count", "need at least 2");
  }
  if (root.contains("tolerances") && root["tolerances"].contains("membership")) {
    spec.membership_tol =
        number_at(root["tolerances"]["membership"], "tolerances.membership");
    if (spec.membership_tol <= 0.0)
      schema_fail("tolerances.membership", "must be positive");
  }
  return spec;
}

std::string ResultBundle::to_text() const { return data.dump(2) + "\n"; }

ResultBundle ResultBundle::from_text(const std::string& text) {
  ResultBundle b;
  b.data = json::parse(text);
  return b;
}

ResultBundle run(const std::string& command, const ProblemSpec& spec,
                 const RunFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const ActiveOptions opts = resolve_options(spec, flags);

  ResultBundle bundle;
  json& out = bundle.data;
  out["command"] = command;
  out["spec"] = spec.name;
  out["kind"] = to_string(spec.kind);
  out["options"]["grid_resolution"] = opts.resolution;
  out["options"]["directions"] = opts.directions;
  out["options"]["tolerance"] = opts.tol;
  out["options"]["seed"] = flags.seed;
  if (!spec.warnings.empty()) out["warnings"] = spec.warnings;

  if (command == "membership") {
    if (spec.kind != ProblemKind::tabulated && spec.kind != ProblemKind::linear)
      throw IncompatibleCommand("membership needs a tabulated or linear spec");
    const Prior& prior = require_prior(spec);
    const Vector target = require_target(flags, prior.num_types());
    const BeliefGrid grid =
        BeliefGrid::for_payoff(prior, require_payoff(spec), opts.resolution);
    const auto r = membership(require_payoff(spec), prior, grid, target, opts.tol);
    out["target"] = vector_to_json(target);
    out["inside"] = r.inside;
    out["violation"] = r.violation;
    if (r.inside) {
      out["certificate"] = distribution_to_json(r.certificate);
    } else {
      out["separating_direction"] = vector_to_json(r.separating);
    }
  } else if (command == "boundary") {
    const Prior& prior = require_prior(spec);
    if (!flags.lambda || flags.lambda->size() != prior.num_types())
      throw IncompatibleCommand("boundary needs --lambda with " +
                                std::to_string(prior.num_types()) + " components");
    SupportResult r;
    if (spec.kind == ProblemKind::persuasion) {
      const BeliefGrid grid = grid_for_game(*spec.game, prior, opts.resolution);
      r = v_set_support(*spec.game, prior, grid, *flags.lambda);
    } else {
      const BeliefGrid grid =
          BeliefGrid::for_payoff(prior, require_payoff(spec), opts.resolution);
      r = support_value(require_payoff(spec), prior, grid, *flags.lambda);
    }
    out["direction"] = vector_to_json(*flags.lambda);
    out["value"] = r.value;
    out["attained"] = r.attained;
    out["profile"] = vector_to_json(r.profile);
    out["argmax"] = distribution_to_json(r.argmax);
    out["duals"] = vector_to_json(r.duals);
  } else if (command == "set") {
    if (spec.kind == ProblemKind::cohort)
      throw IncompatibleCommand("use cohort-set for cohort specs");
    out["set"] = run_set_command(spec, opts, flags.seed);
  } else if (command == "maxmin") {
    if (spec.kind != ProblemKind::persuasion)
      throw IncompatibleCommand("maxmin needs a persuasion spec");
    const Prior& prior = require_prior(spec);
    const BeliefGrid grid = grid_for_game(*spec.game, prior, opts.resolution);
    const auto r = cautious_value(*spec.game, prior, grid);
    out["value"] = r.value;
    out["profile"] = vector_to_json(r.profile);
    out["certificate"] = distribution_to_json(r.tau);
  } else if (command == "commeq") {
    if (spec.kind != ProblemKind::persuasion)
      throw IncompatibleCommand("commeq needs a persuasion spec");
    const Prior& prior = require_prior(spec);
    const BeliefGrid grid = grid_for_game(*spec.game, prior, opts.resolution);
    const auto [lo, hi] = comm_eq_profiles(*spec.game, prior, grid);
    out["interval"] = json::array({lo, hi});
  } else if (command == "bipool") {
    if (spec.kind != ProblemKind::linear)
      throw IncompatibleCommand("bipool needs a linear spec");
    const Prior& prior = require_prior(spec);
    const auto* lin = dynamic_cast<const LinearReputationPayoff*>(spec.payoff.get());
    const int target = flags.target_type - 1;
    if (target < 0 || target >= prior.num_types())
      throw IncompatibleCommand("bipool needs --type between 1 and " +
                                std::to_string(prior.num_types()));
    const auto r = bipool_optimize(prior, lin->rho(), target, flags.sense);
    out["type"] = flags.target_type;
    out["sense"] = flags.sense == OptimizeSense::max ? "max" : "min";
    out["value"] = r.value;
    out["pool_probs"] = vector_to_json(r.policy.pool_probs);
    out["threshold"] = r.policy.threshold + 1;
    out["structure"] = matrix_to_json(bipool_structure(prior, r.policy).likelihoods());
  } else if (command == "cohort-set") {
    if (spec.kind != ProblemKind::cohort || !spec.cohort)
      throw IncompatibleCommand("cohort-set needs a cohort spec");
    out["sets"] = run_cohort_set_command(spec, opts, flags, flags.seed);
  } else if (command == "diagnose") {
    if (spec.kind != ProblemKind::linear)
      throw IncompatibleCommand("diagnose needs a linear spec");
    const Prior& prior = require_prior(spec);
    const auto* lin = dynamic_cast<const LinearReputationPayoff*>(spec.payoff.get());
    const Vector lambda = flags.lambda.value_or(prior.probs());
    const BeliefGrid grid = BeliefGrid::for_payoff(prior, *lin, opts.resolution);
    const auto support = support_value(*lin, prior, grid, lambda);
    const auto cert = cp_certificate(prior, support.argmax);
    const auto check = cp_check(cert.C, prior);
    const auto markov = markov_checks(cert.C, prior, lin->rho());
    const auto diag = rs_diagnostics(prior, lin->rho(), lambda, support.argmax);
    out["direction"] = vector_to_json(lambda);
    out["value"] = support.value;
    out["profile"] = vector_to_json(support.profile);
    out["argmax"] = distribution_to_json(support.argmax);
    out["cp_matrix"] = matrix_to_json(cert.C);
    out["cp_verdict"] = check.verdict == CPVerdict::Certified  ? "certified"
                        : check.verdict == CPVerdict::NotCP    ? "not-cp"
                                                               : "inconclusive";
    out["markov"]["stationary_ok"] = markov.stationary_ok;
    out["markov"]["stochastic_ok"] = markov.stochastic_ok;
    out["markov"]["detailed_balance_ok"] = markov.detailed_balance_ok;
    out["markov"]["mean_reversion_gap"] = markov.mean_reversion_gap;
    out["markov"]["second_eigenvalue"] = markov.second_eigenvalue;
    out["markov"]["unit_eigenvalue_repeated"] = markov.unit_eigenvalue_repeated;
    out["structure"]["ordered_ok"] = diag.ordered_ok;
    out["structure"]["segment_slopes_ok"] = diag.segment_slopes_ok;
    out["structure"]["generic"] = diag.generic;
    out["structure"]["pairwise_ok"] = diag.pairwise_ok;
    if (prior.is_uniform())
      out["majorized"] = majorization_check(lin->rho(), support.profile, prior);
  } else if (command == "reduce") {
    if (spec.kind != ProblemKind::tabulated && spec.kind != ProblemKind::linear)
      throw IncompatibleCommand("reduce needs a tabulated or linear spec");
    const Prior& prior = require_prior(spec);
    const Vector target = require_target(flags, prior.num_types());
    const BeliefGrid grid =
        BeliefGrid::for_payoff(prior, require_payoff(spec), opts.resolution);
    const auto mem = membership(require_payoff(spec), prior, grid, target, opts.tol);
    out["target"] = vector_to_json(target);
    out["inside"] = mem.inside;
    if (mem.inside) {
      const auto reduced = reduce_support(prior, mem.certificate, require_payoff(spec));
      out["atoms_before"] = mem.certificate.size();
      out["atoms_after"] = reduced.size();
      out["certificate"] = distribution_to_json(reduced);
      out["structure"] =
          matrix_to_json(structure_from_tau(prior, reduced).likelihoods());
    } else {
      out["separating_direction"] = vector_to_json(mem.separating);
    }
  } else {
    throw IncompatibleCommand("unknown command '" + command + "'");
  }

  bundle.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return bundle;
}

std::string to_csv(const ResultBundle& bundle) {
  const json& d = bundle.data;
  std::string out;
  if (d.contains("set")) {
    out += "row,values...\n";
    append_set_csv(out, d["set"], "");
  } else if (d.contains("sets")) {
    out += "row,sigma,values...\n";
    for (const auto& one : d["sets"]) {
      std::string tag;
      if (one.contains("sigma")) format_csv_number(tag, one["sigma"].get<double>());
      append_set_csv(out, one["set"], tag);
    }
  } else {
    out += "key,value\n";
    for (const auto& [key, value] : d.items()) {
      if (value.is_number()) {
        out += key + ",";
        format_csv_number(out, value.get<double>());
        out += '\n';
      } else if (value.is_boolean()) {
        out += key + std::string(",") + (value.get<bool>() ? "true" : "false") + "\n";
      }
    }
  }
  return out;
}

std::string to_svg(const ResultBundle& bundle) {
  const json& d = bundle.data;
  std::vector<const json*> sets;
  std::vector<std::string> labels;
  if (d.contains("set")) {
    sets.push_back(&d["set"]);
    labels.emplace_back("");
  } else if (d.contains("sets")) {
    for (const auto& one : d["sets"]) {
      sets.push_back(&one["set"]);
      if (one.contains("sigma")) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "sigma=%.4g", one["sigma"].get<double>());
        labels.emplace_back(buf);
      } else {
        labels.emplace_back("");
      }
    }
  } else {
    throw UnsupportedDimension("svg output needs a set-producing command");
  }

  Bounds b;
  for (const json* set : sets) {
    for (const auto& v : (*set)["inner_vertices"]) {
      if (v.size() != 2)
        throw UnsupportedDimension("svg output supports two-dimensional sets only");
      b.take(v[0].get<double>(), v[1].get<double>());
    }
  }
  const double margin = 48.0;
  const double span = std::max({b.xmax - b.xmin, b.ymax - b.ymin, 1e-6});
  const double scale = 480.0 / span;
  const double width = margin * 2 + (b.xmax - b.xmin) * scale;
  const double height = margin * 2 + (b.ymax - b.ymin) * scale;

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                "width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  out += buf;
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const char* fills[] = {"#c4d3ef", "#9db8e8", "#7aa0e0", "#5688d8"};
  for (size_t i = 0; i < sets.size(); ++i) {
    std::vector<std::pair<double, double>> inner;
    for (const auto& v : (*sets[i])["inner_vertices"])
      inner.emplace_back(v[0].get<double>(), v[1].get<double>());
    svg_polygon(out, ccw_order(std::move(inner)),
                std::string("fill=\"") + fills[i % 4] +
                    "\" fill-opacity=\"0.6\" stroke=\"none\"",
                b, scale, margin);
    svg_polygon(out, ccw_order(outer_polygon(*sets[i])),
                "fill=\"none\" stroke=\"#1a3a7a\" stroke-width=\"1\" "
                "stroke-dasharray=\"4 3\"",
                b, scale, margin);
  }

  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"14\">w1</text>\n",
                width / 2, height - 8.0);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"10\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"14\">w2</text>\n",
                height / 2);
  out += buf;
  for (size_t i = 0; i < sets.size(); ++i) {
    if (labels[i].empty()) continue;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%s</text>\n",
                  width - margin - 90.0, margin + 16.0 * (i + 1), labels[i].c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ipsets::io
