#include "ipsets/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ipsets {
namespace {

void lattice_recurse(int dim, int resolution, int coord, int remaining, Vector& scratch,
                     std::vector<Vector>& out) {
  if (coord == dim - 1) {
    scratch[coord] = static_cast<double>(remaining) / resolution;
    out.push_back(scratch);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    scratch[coord] = static_cast<double>(k) / resolution;
    lattice_recurse(dim, resolution, coord + 1, remaining - k, scratch, out);
  }
}

bool contains_atom(const std::vector<BeliefAtom>& atoms, const BeliefAtom& a,
                   double tol = 1e-12) {
  for (const BeliefAtom& b : atoms) {
    if (b.side == a.side && (b.belief - a.belief).cwiseAbs().maxCoeff() <= tol)
      return true;
  }
  return false;
}

}  // namespace

BeliefGrid BeliefGrid::build(int dim, int resolution, const Vector& anchor,
                             const std::vector<Vector>& breakpoint_beliefs,
                             const std::function<bool(const Vector&)>& on_breakpoint) {
  if (dim < 1) throw Error("BeliefGrid: dimension must be positive");
  if (resolution < 1) throw Error("BeliefGrid: resolution must be positive");
  if (anchor.size() != dim) throw DimensionMismatch("BeliefGrid: anchor dimension");

  BeliefGrid grid;
  grid.dim_ = dim;
  grid.resolution_ = resolution;

  std::vector<Vector> lattice;
  Vector scratch(dim);
  lattice_recurse(dim, resolution, 0, resolution, scratch, lattice);

  for (const Vector& mu : lattice) {
    if (on_breakpoint && on_breakpoint(mu)) {
      grid.atoms_.emplace_back(mu, Side::lower);
      grid.atoms_.emplace_back(mu, Side::upper);
    } else {
      grid.atoms_.emplace_back(mu);
    }
  }

  std::vector<BeliefAtom> extra;
  extra.emplace_back(anchor);
  for (const Vector& mu : breakpoint_beliefs) {
    extra.emplace_back(mu, Side::lower);
    extra.emplace_back(mu, Side::upper);
  }
  grid.add_atoms(extra);
  return grid;
}

int BeliefGrid::default_resolution(int dim) {
  switch (dim) {
    case 1:
      return 1;
    case 2:
      return 400;
    case 3:
      return 60;
    default:
      return 20;
  }
}

BeliefGrid BeliefGrid::for_payoff(const Prior& prior, const Payoff& payoff,
                                  int resolution) {
  const int dim = prior.num_types();
  if (payoff.num_types() != dim)
    throw DimensionMismatch("BeliefGrid::for_payoff: payoff/prior dimension");
  if (resolution <= 0) resolution = default_resolution(dim);
  return build(dim, resolution, prior.probs(), payoff.breakpoint_beliefs(),
               [&payoff](const Vector& mu) { return payoff.on_breakpoint(mu); });
}

void BeliefGrid::add_atoms(const std::vector<BeliefAtom>& extra) {
  for (const BeliefAtom& a : extra) {
    if (a.dim() != dim_) throw DimensionMismatch("BeliefGrid::add_atoms: dimension");
    if (!contains_atom(atoms_, a)) atoms_.push_back(a);
  }
}

std::vector<Vector> circle_directions(int count) {
  std::vector<Vector> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / count;
    Vector d(2);
    d << std::cos(angle), std::sin(angle);
    out.push_back(d);
  }
  return out;
}

std::vector<Vector> default_directions(int dim, int count, const Vector& anchor,
                                       unsigned long seed) {
  if (dim == 2) {
    auto dirs = circle_directions(std::max(count, 4));
    Vector a = anchor;
    if (a.size() == dim && a.norm() > 0) dirs.push_back(a / a.norm());
    return dirs;
  }
  std::vector<Vector> out;
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 1.0;
    out.push_back(e);
    out.push_back(-e);
  }
  if (anchor.size() == dim && anchor.norm() > 0) out.push_back(anchor / anchor.norm());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d[i] = normal(rng);
    const double n = d.norm();
    if (n > 1e-9) out.push_back(d / n);
  }
  return out;
}

}  // namespace ipsets
