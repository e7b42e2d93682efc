#include "ipsets/ipset.hpp"

#include "ipsets/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace ipsets {
namespace {

// Moment matrix [beliefs; adjusted payoffs] of the given atoms.
Matrix moment_columns(const Payoff& w, const Prior& prior,
                      const std::vector<BeliefDistribution::Entry>& atoms) {
  const int n = prior.num_types();
  Matrix q(2 * n, static_cast<int>(atoms.size()));
  for (size_t j = 0; j < atoms.size(); ++j) {
    q.col(static_cast<int>(j)).head(n) = atoms[j].atom.belief;
    q.col(static_cast<int>(j)).tail(n) = adjusted_payoff(w, prior, atoms[j].atom);
  }
  return q;
}

// Merges atoms that share an affine piece of the adjusted payoff at their
// weighted barycenter. Belief rows are linear and the payoff is constant on a
// piece, so the represented moments do not move.
std::vector<BeliefDistribution::Entry> merge_by_piece(
    const Payoff& w, const std::vector<BeliefDistribution::Entry>& atoms) {
  std::map<long, std::vector<const BeliefDistribution::Entry*>> groups;
  for (const auto& e : atoms) {
    const auto piece = w.piece_index(e.atom);
    if (!piece) return atoms;  // payoff is not piecewise constant
    groups[*piece].push_back(&e);
  }
  std::vector<BeliefDistribution::Entry> out;
  for (const auto& [piece, members] : groups) {
    double weight = 0.0;
    Vector belief = Vector::Zero(members.front()->atom.dim());
    for (const auto* e : members) {
      weight += e->weight;
      belief += e->weight * e->atom.belief;
    }
    belief /= weight;
    Side side = Side::exact;
    if (w.on_breakpoint(belief)) side = members.front()->atom.side;
    BeliefAtom merged(belief, side);
    if (w.piece_index(merged) != piece) {
      // Barycenter drifted across the piece boundary numerically; keep the
      // group unmerged rather than move the profile.
      for (const auto* e : members) out.push_back(*e);
    } else {
      out.push_back({weight, merged});
    }
  }
  return out;
}

// Removes atoms until the moment columns of the survivors are linearly
// independent, sliding along null-space directions. Weight sums are preserved
// because the belief rows add up to the all-ones row.
std::vector<BeliefDistribution::Entry> prune_to_basic(
    const Payoff& w, const Prior& prior,
    std::vector<BeliefDistribution::Entry> atoms) {
  while (true) {
    const Matrix q = moment_columns(w, prior, atoms);
    Eigen::FullPivLU<Matrix> lu(q);
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() == 0) return atoms;
    Vector gamma = lu.kernel().col(0);
    gamma /= gamma.cwiseAbs().maxCoeff();

    double step_pos = std::numeric_limits<double>::infinity();
    double step_neg = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < atoms.size(); ++j) {
      const double g = gamma[static_cast<int>(j)];
      if (g > 1e-14) step_pos = std::min(step_pos, atoms[j].weight / g);
      if (g < -1e-14) step_neg = std::min(step_neg, atoms[j].weight / (-g));
    }
    const bool use_pos = step_pos <= step_neg;
    const double t = use_pos ? step_pos : -step_neg;
    if (!std::isfinite(t)) return atoms;  // kernel orthogonal to the weights

    std::vector<BeliefDistribution::Entry> next;
    for (size_t j = 0; j < atoms.size(); ++j) {
      const double wj = atoms[j].weight - t * gamma[static_cast<int>(j)];
      if (wj > 1e-12) next.push_back({wj, atoms[j].atom});
    }
    if (next.size() >= atoms.size())
      throw ReductionFailed("null-space pivot failed to drop an atom");
    atoms = std::move(next);
  }
}

struct SparseSearchConfig {
  unsigned long seed = 0;
  int restarts = 400;
  double tol = 1e-5;
};

// Exact k-atom feasibility for piecewise-constant payoffs with a fixed
// assignment of atoms to pieces. In the scaled beliefs z_i = p_i * mu_i all
// moment equations and the piece-interval constraints are linear, so the
// search is one phase-1 LP per assignment:
//   sum_i z_i = mu0,   sum_i (values(j_i, t)/mu0_t) z_it = target_t,
//   lower_j * sum(z_i) <= score . z_i <= upper_j * sum(z_i),   z >= 0.
std::optional<BeliefDistribution> assignment_representation(
    const AffinePieces& pieces, const Payoff& w, const Prior& prior,
    const Profile& target, const std::vector<int>& assignment, double tol) {
  const int n = prior.num_types();
  const int k = static_cast<int>(assignment.size());

  std::vector<std::pair<int, Vector>> bound_rows;  // (atom, row over its z block)
  for (int i = 0; i < k; ++i) {
    const int piece = assignment[i];
    if (std::isfinite(pieces.lower[piece]))
      bound_rows.emplace_back(
          i, Vector(pieces.score - pieces.lower[piece] * Vector::Ones(n)));
    if (std::isfinite(pieces.upper[piece]))
      bound_rows.emplace_back(
          i, Vector(pieces.upper[piece] * Vector::Ones(n) - pieces.score));
  }

  const int rows = 2 * n + static_cast<int>(bound_rows.size());
  const int cols = k * n + static_cast<int>(bound_rows.size());
  lp::Problem p;
  p.A = Matrix::Zero(rows, cols);
  p.b = Vector::Zero(rows);
  p.c = Vector::Zero(cols);
  p.b.head(n) = prior.probs();
  p.b.segment(n, n) = target;
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < n; ++t) {
      const int col = i * n + t;
      p.A(t, col) = 1.0;
      p.A(n + t, col) = pieces.values(assignment[i], t) / prior(t);
    }
  }
  for (size_t r = 0; r < bound_rows.size(); ++r) {
    const auto& [atom, coeffs] = bound_rows[r];
    const int row = 2 * n + static_cast<int>(r);
    p.A.row(row).segment(atom * n, n) = coeffs.transpose();
    p.A(row, k * n + static_cast<int>(r)) = -1.0;  // slack
  }

  const lp::Solution sol = lp::solve(p);
  if (sol.infeasibility > tol) return std::nullopt;

  std::vector<BeliefDistribution::Entry> entries;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const Vector z = sol.x.segment(i * n, n);
    const double weight = z.sum();
    if (weight <= 1e-10) continue;
    Vector mu = (z / weight).cwiseMax(0.0);
    mu /= mu.sum();
    // Choose the evaluation side that keeps the atom in its assigned piece.
    BeliefAtom atom(mu);
    if (w.piece_index(atom) != assignment[i]) {
      for (Side side : {Side::lower, Side::upper}) {
        BeliefAtom sided(mu, side);
        if (w.piece_index(sided) == assignment[i]) {
          atom = sided;
          break;
        }
      }
      if (w.piece_index(atom) != assignment[i]) return std::nullopt;
    }
    entries.push_back({weight, atom});
    total += weight;
  }
  if (entries.empty() || std::abs(total - 1.0) > 1e-6) return std::nullopt;
  for (auto& e : entries) e.weight /= total;
  BeliefDistribution tau(std::move(entries));
  if (!tau.is_bayes_plausible(prior, std::max(tol, 1e-8))) return std::nullopt;
  const Profile check = unconditional_profile(w, prior, tau);
  if ((check - target).cwiseAbs().maxCoeff() > std::max(tol, 1e-7))
    return std::nullopt;
  return tau.merged();
}

void enumerate_multisets(int num_pieces, int k, std::vector<int>& scratch,
                         const std::function<bool(const std::vector<int>&)>& visit,
                         bool& stop, int from = 0) {
  if (stop) return;
  if (static_cast<int>(scratch.size()) == k) {
    if (visit(scratch)) stop = true;
    return;
  }
  for (int piece = from; piece < num_pieces && !stop; ++piece) {
    scratch.push_back(piece);
    enumerate_multisets(num_pieces, k, scratch, visit, stop, piece);
    scratch.pop_back();
  }
}

// Complete decision for piecewise-constant payoffs: a k-atom representation
// exists (within tol, in closure semantics) iff one of the piece assignments
// is LP-feasible.
std::optional<BeliefDistribution> piecewise_representation(
    const Payoff& w, const Prior& prior, const Profile& target, int k, double tol) {
  const auto pieces = w.affine_pieces();
  if (!pieces) return std::nullopt;
  const int num_pieces = static_cast<int>(pieces->values.rows());

  std::optional<BeliefDistribution> found;
  auto visit = [&](const std::vector<int>& assignment) {
    found = assignment_representation(*pieces, w, prior, target, assignment, tol);
    return found.has_value();
  };
  std::vector<int> scratch;
  bool stop = false;
  enumerate_multisets(num_pieces, k, scratch, visit, stop);
  return found;
}

// Searches for a k-atom representation of (mean, target). Atoms are sampled
// from Dirichlet draws, breakpoint sides, vertices, and hints; weights come
// from a least-violation LP.
std::optional<BeliefDistribution> sparse_representation(
    const Payoff& w, const Prior& prior, const Profile& target, int k,
    const std::vector<BeliefAtom>& hints, const SparseSearchConfig& cfg) {
  const int n = prior.num_types();
  std::mt19937_64 rng(cfg.seed);
  std::gamma_distribution<double> gamma_draw(1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<BeliefAtom> specials;
  for (const Vector& b : w.breakpoint_beliefs()) {
    specials.emplace_back(b, Side::lower);
    specials.emplace_back(b, Side::upper);
  }
  for (int i = 0; i < n; ++i) {
    Vector v = Vector::Zero(n);
    v[i] = 1.0;
    specials.emplace_back(v);
  }
  specials.emplace_back(prior.probs());
  for (const BeliefAtom& h : hints) specials.push_back(h);

  const double scale = 1.0 + target.cwiseAbs().maxCoeff();
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<BeliefDistribution::Entry> entries;
    for (int a = 0; a < k; ++a) {
      BeliefAtom atom;
      if (!specials.empty() && unif(rng) < 0.5) {
        atom = specials[static_cast<size_t>(unif(rng) * specials.size()) %
                        specials.size()];
      } else {
        Vector b(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
          b[i] = gamma_draw(rng) + 1e-12;
          total += b[i];
        }
        atom = BeliefAtom(b / total);
      }
      entries.push_back({1.0 / k, atom});
    }

    lp::Problem p;
    p.A = moment_columns(w, prior, entries);
    p.b = Vector(2 * n);
    p.b.head(n) = prior.probs();
    p.b.tail(n) = target;
    p.c = Vector::Zero(k);
    const lp::Solution sol = lp::solve(p);
    if (sol.infeasibility > cfg.tol * scale) continue;

    std::vector<BeliefDistribution::Entry> found;
    double total = 0.0;
    for (int j = 0; j < k; ++j)
      if (sol.x[j] > 1e-10) total += sol.x[j];
    if (total <= 0.0) continue;
    for (int j = 0; j < k; ++j)
      if (sol.x[j] > 1e-10) found.push_back({sol.x[j] / total, entries[j].atom});
    BeliefDistribution tau(std::move(found));
    if (!tau.is_bayes_plausible(prior, cfg.tol)) continue;
    return tau.merged();
  }
  return std::nullopt;
}

// True unless the distribution leans on one-sided atoms whose value differs
// from the exact payoff at that belief.
bool attainment_of(const Payoff& w, const Prior& prior,
                   const BeliefDistribution& argmax) {
  for (const auto& e : argmax.atoms()) {
    if (e.atom.side == Side::exact) continue;
    const Vector sided = adjusted_payoff(w, prior, e.atom);
    const Vector exact = adjusted_payoff(w, prior, BeliefAtom(e.atom.belief));
    if ((sided - exact).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

}  // namespace

MembershipResult membership(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                            const Profile& target, double tol) {
  return membership_over_columns(adjusted_columns(w, prior, grid), prior.probs(),
                                 target, tol);
}

SupportResult support_value(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                            const Vector& direction) {
  SupportResult r = support_over_columns(adjusted_columns(w, prior, grid),
                                         prior.probs(), direction);
  r.attained = attainment_of(w, prior, r.argmax);
  return r;
}

Profile boundary_profile(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                         const Vector& direction) {
  return support_value(w, prior, grid, direction).profile;
}

SetApprox approximate_set(const Payoff& w, const Prior& prior, const BeliefGrid& grid,
                          const std::vector<Vector>& directions) {
  SetApprox out = approximate_from_columns(adjusted_columns(w, prior, grid),
                                           prior.probs(), directions);
  for (SupportSample& s : out.samples)
    s.attained = attainment_of(w, prior, s.argmax);
  return out;
}

BeliefDistribution reduce_support(const Prior& prior, const BeliefDistribution& tau,
                                  const Payoff& w) {
  tau.require_bayes_plausible(prior);
  const int n = prior.num_types();
  const int max_atoms = 2 * n - 1;
  const Profile target = unconditional_profile(w, prior, tau);

  std::vector<BeliefDistribution::Entry> atoms = tau.merged().atoms();
  atoms = merge_by_piece(w, atoms);
  if (static_cast<int>(atoms.size()) > max_atoms)
    atoms = prune_to_basic(w, prior, atoms);

  if (static_cast<int>(atoms.size()) > max_atoms) {
    // Independent moment columns with 2N atoms: a smaller representation
    // needs beliefs outside the current support.
    std::vector<BeliefAtom> hints;
    for (const auto& e : atoms) hints.push_back(e.atom);
    SparseSearchConfig cfg;
    cfg.tol = kPlausibilityTol * 10;
    auto found = sparse_representation(w, prior, target, max_atoms, hints, cfg);
    if (!found)
      throw ReductionFailed("no " + std::to_string(max_atoms) +
                            "-atom representation found");
    atoms = found->atoms();
  }

  BeliefDistribution reduced(std::move(atoms));
  const Profile check = unconditional_profile(w, prior, reduced);
  if ((check - target).cwiseAbs().maxCoeff() > 10 * kPlausibilityTol)
    throw ReductionFailed("reduction moved the interim profile");
  return reduced;
}

bool min_signals(const Payoff& w, const Prior& prior, const Profile& target, int k,
                 const MinSignalsOptions& options) {
  const int n = prior.num_types();
  if (k < 1) return false;
  const double tol = options.tol;

  if (k == 1) {
    // Bayes plausibility pins the single atom to the prior.
    for (Side side : {Side::exact, Side::lower, Side::upper}) {
      const Vector v = adjusted_payoff(w, prior, BeliefAtom(prior.probs(), side));
      if ((v - target).cwiseAbs().maxCoeff() <= tol) return true;
    }
    return false;
  }

  // Quick acceptance: reduce a membership certificate.
  if (k >= 2) {
    try {
      BeliefGrid grid = BeliefGrid::for_payoff(prior, w, options.base_resolution);
      MembershipResult mem = membership(w, prior, grid, target, tol);
      if (mem.inside) {
        BeliefDistribution reduced = reduce_support(prior, mem.certificate, w);
        if (reduced.size() <= k) {
          const Profile p = unconditional_profile(w, prior, reduced);
          if ((p - target).cwiseAbs().maxCoeff() <= tol) return true;
        }
      }
    } catch (const Error&) {
      // fall through to the searches below
    }
  }

  if (n == 2 && k <= 3) {
    // Exhaustive pair/triple search over a refined one-dimensional grid.
    const int base = options.base_resolution > 0 ? options.base_resolution
                                                 : BeliefGrid::default_resolution(2);
    const int fine = k == 2 ? base * std::max(options.refinement, 1) : base / 2;
    std::vector<BeliefAtom> atoms;
    for (int i = 0; i <= fine; ++i) {
      Vector b(2);
      b << 1.0 - static_cast<double>(i) / fine, static_cast<double>(i) / fine;
      atoms.emplace_back(b);
    }
    for (const Vector& b : w.breakpoint_beliefs()) {
      atoms.emplace_back(b, Side::lower);
      atoms.emplace_back(b, Side::upper);
    }
    std::vector<Vector> payoffs;
    payoffs.reserve(atoms.size());
    for (const BeliefAtom& a : atoms) payoffs.push_back(adjusted_payoff(w, prior, a));

    const double m0 = prior(1);
    const size_t na = atoms.size();
    if (k == 2) {
      for (size_t i = 0; i < na; ++i) {
        const double mi = atoms[i].belief[1];
        if (mi > m0 + 1e-12) continue;
        for (size_t j = 0; j < na; ++j) {
          const double mj = atoms[j].belief[1];
          if (mj < m0 - 1e-12 || mj - mi < 1e-12) continue;
          const double p = (mj - m0) / (mj - mi);
          const Vector prof = p * payoffs[i] + (1.0 - p) * payoffs[j];
          if ((prof - target).cwiseAbs().maxCoeff() <= tol) return true;
        }
      }
      return false;
    }
    // k == 3: least-squares weights per belief triple.
    Vector rhs(4);
    rhs << 1.0, m0, target[0], target[1];
    for (size_t i = 0; i < na; ++i) {
      for (size_t j = i + 1; j < na; ++j) {
        for (size_t l = j + 1; l < na; ++l) {
          Matrix a(4, 3);
          const size_t idx[3] = {i, j, l};
          for (int col = 0; col < 3; ++col) {
            a(0, col) = 1.0;
            a(1, col) = atoms[idx[col]].belief[1];
            a(2, col) = payoffs[idx[col]][0];
            a(3, col) = payoffs[idx[col]][1];
          }
          const Vector p = a.colPivHouseholderQr().solve(rhs);
          if (p.minCoeff() < -1e-9) continue;
          if ((a * p - rhs).cwiseAbs().maxCoeff() <= tol) return true;
        }
      }
    }
    return false;
  }

  SparseSearchConfig cfg;
  cfg.seed = options.seed;
  cfg.restarts = options.restarts;
  cfg.tol = tol;
  return sparse_representation(w, prior, target, k, {}, cfg).has_value();
}

}  // namespace ipsets
