#pragma once

#include "ipsets/model.hpp"

#include <functional>
#include <vector>

namespace ipsets {

// Finite atom cover of a belief simplex used to discretize the programs over
// distributions of posteriors. Always contains the simplex vertices and the
// anchor (prior); every breakpoint belief it stores appears with both a
// lower- and an upper-side atom so the LPs can realize either one-sided limit.
class BeliefGrid {
 public:
  const std::vector<BeliefAtom>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  int dim() const { return dim_; }
  int resolution() const { return resolution_; }

  // Regular simplex lattice with denominator `resolution`, plus the anchor,
  // plus two one-sided atoms per breakpoint belief. `on_breakpoint` marks
  // lattice atoms that happen to sit on a discontinuity; those are stored
  // one-sided as well.
  static BeliefGrid build(int dim, int resolution, const Vector& anchor,
                          const std::vector<Vector>& breakpoint_beliefs = {},
                          const std::function<bool(const Vector&)>& on_breakpoint = {});

  // Grid for a payoff over the type simplex: resolution defaults to
  // 400 (N=2), 60 (N=3), 20 (N>=4).
  static BeliefGrid for_payoff(const Prior& prior, const Payoff& payoff,
                               int resolution = 0);

  static int default_resolution(int dim);

  // Additional atoms appended verbatim (deduplicated).
  void add_atoms(const std::vector<BeliefAtom>& extra);

 private:
  std::vector<BeliefAtom> atoms_;
  int dim_ = 0;
  int resolution_ = 0;
};

// Evenly spaced unit directions on the circle (dim == 2), used for planar
// set approximation.
std::vector<Vector> circle_directions(int count);

// Signed coordinate axes, the anchor direction, and seeded unit vectors to
// reach `count` directions in any dimension.
std::vector<Vector> default_directions(int dim, int count, const Vector& anchor,
                                       unsigned long seed = 0);

}  // namespace ipsets
