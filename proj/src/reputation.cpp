#include "ipsets/reputation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ipsets {
namespace {

void require_row_sums(const Matrix& C, const Prior& prior) {
  if (C.rows() != prior.num_types() || C.cols() != prior.num_types())
    throw DimensionMismatch("matrix dimension does not match the prior");
  const Vector row_sums = C.rowwise().sum();
  const double gap = (row_sums - prior.probs()).cwiseAbs().maxCoeff();
  if (gap > kPlausibilityTol) {
    std::ostringstream os;
    os << "rows sum to the prior only within " << gap;
    throw RowSumMismatch(os.str());
  }
}

// Projection of v onto the probability simplex.
Vector project_to_simplex(Vector v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  int rho_idx = 0;
  for (int i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho_idx = i;
      theta = t;
    }
  }
  (void)rho_idx;
  for (int i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
  return v;
}

// Pooling objective for a fixed pool: f(p) = sum_j p_j E[rho | s_j], where
// type `target` mixes with probabilities p over the pool signals and every
// other type reports itself. Each summand is concave (convex) in p_j when
// rho_j >= rho_target (<=), so ascent (descent) over the simplex is exact.
struct PoolProgram {
  const Prior& prior;
  const Vector& rho;
  int target;
  std::vector<int> pool;  // signal owners, target itself included via own index

  double term(int j, double p) const {
    if (j == target) return p * rho[target];
    const double a = prior(j) * rho[j];
    const double b = prior(target) * rho[target];
    const double c = prior(j);
    const double d = prior(target);
    return p * (a + b * p) / (c + d * p);
  }

  double term_grad(int j, double p) const {
    if (j == target) return rho[target];
    const double a = prior(j) * rho[j];
    const double b = prior(target) * rho[target];
    const double c = prior(j);
    const double d = prior(target);
    const double den = c + d * p;
    return ((a + 2.0 * b * p) * den - d * (a * p + b * p * p)) / (den * den);
  }

  double value(const Vector& p) const {
    double v = 0.0;
    for (size_t i = 0; i < pool.size(); ++i) v += term(pool[i], p[static_cast<int>(i)]);
    return v;
  }

  Vector grad(const Vector& p) const {
    Vector g(static_cast<int>(pool.size()));
    for (size_t i = 0; i < pool.size(); ++i)
      g[static_cast<int>(i)] = term_grad(pool[i], p[static_cast<int>(i)]);
    return g;
  }
};

// Projected gradient with backtracking; sense=+1 ascends, -1 descends.
Vector solve_pool_program(const PoolProgram& prog, Vector p0, double sense,
                          double grad_tol, int max_iter) {
  Vector p = project_to_simplex(std::move(p0));
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const double f = prog.value(p);
    const Vector g = prog.grad(p);
    Vector trial;
    double f_trial = f;
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = project_to_simplex(p + sense * step * g);
      f_trial = prog.value(trial);
      if (sense * (f_trial - f) > 0.0) {
        improved = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!improved) break;
    const double move = (trial - p).cwiseAbs().maxCoeff();
    p = trial;
    step = std::min(step * 2.0, 1e6);
    if (move < grad_tol && it > 4) break;
  }
  return p;
}

}  // namespace

CPCertificate cp_certificate(const Prior& prior, const BeliefDistribution& tau) {
  tau.require_bayes_plausible(prior);
  const int n = prior.num_types();
  CPCertificate cert;
  cert.C = Matrix::Zero(n, n);
  for (const auto& e : tau.atoms()) {
    cert.C += e.weight * e.atom.belief * e.atom.belief.transpose();
    cert.alphas.push_back(e.weight);
    cert.posteriors.push_back(e.atom.belief);
    cert.factors.push_back(std::sqrt(e.weight) * e.atom.belief);
  }
  return cert;
}

Profile profile_from_cp(const Matrix& C, const Prior& prior, const Vector& rho) {
  require_row_sums(C, prior);
  if (rho.size() != prior.num_types())
    throw DimensionMismatch("profile_from_cp: rho dimension");
  return prior.scale_by_reciprocal(C * rho);
}

CPCheckResult cp_check(const Matrix& C, const Prior& prior) {
  CPCheckResult out;
  const int n = prior.num_types();
  if (C.rows() != n || C.cols() != n) {
    out.verdict = CPVerdict::NotCP;
    out.reason = "dimension mismatch with the prior";
    return out;
  }
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > kInputTol) {
    out.verdict = CPVerdict::NotCP;
    out.reason = "not symmetric";
    return out;
  }
  if (C.minCoeff() < -1e-12) {
    out.verdict = CPVerdict::NotCP;
    out.reason = "negative entry";
    return out;
  }
  {
    const double gap = (C.rowwise().sum() - prior.probs()).cwiseAbs().maxCoeff();
    if (gap > kPlausibilityTol) {
      std::ostringstream os;
      os << "row sums deviate from the prior by " << gap;
      out.verdict = CPVerdict::NotCP;
      out.reason = os.str();
      return out;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
  if (eig.eigenvalues().minCoeff() < -1e-8) {
    std::ostringstream os;
    os << "not positive semidefinite: eigenvalue " << eig.eigenvalues().minCoeff();
    out.verdict = CPVerdict::NotCP;
    out.reason = os.str();
    return out;
  }

  out.verdict = n <= 4 ? CPVerdict::Certified : CPVerdict::Inconclusive;

  // Factor search: any decomposition C = sum x_m x_m' with x_m >= 0 will do.
  auto harvest = [&](const Matrix& F) -> bool {
    Matrix clipped = F.cwiseMax(0.0);
    if ((F - clipped).cwiseAbs().maxCoeff() > 1e-9) return false;
    if ((clipped * clipped.transpose() - C).cwiseAbs().maxCoeff() > 1e-7) return false;
    std::vector<Vector> factors;
    for (int j = 0; j < clipped.cols(); ++j) {
      if (clipped.col(j).sum() > 1e-12) factors.push_back(clipped.col(j));
    }
    std::vector<BeliefDistribution::Entry> entries;
    for (const Vector& x : factors) {
      const double mass = x.sum();
      entries.push_back({mass * mass, BeliefAtom(x / mass)});
    }
    double total = 0.0;
    for (const auto& e : entries) total += e.weight;
    if (std::abs(total - 1.0) > 1e-6) return false;
    for (auto& e : entries) e.weight /= total;
    BeliefDistribution tau(std::move(entries));
    if (!tau.is_bayes_plausible(prior, 1e-6)) return false;
    out.factors = std::move(factors);
    out.reconstructed = std::move(tau);
    return true;
  };

  Matrix vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Matrix root = eig.eigenvectors() * vals * eig.eigenvectors().transpose();
  bool have = harvest(root);
  if (!have) {
    Eigen::LLT<Matrix> llt(C + 1e-14 * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) have = harvest(Matrix(llt.matrixL()));
  }
  if (!have) {
    // Random Givens rotations of the square root, retained when they shrink
    // the total negativity.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix F = root;
    auto negativity = [](const Matrix& M) { return (-M.cwiseMin(0.0)).sum(); };
    double neg = negativity(F);
    for (int it = 0; it < 4000 && neg > 1e-12; ++it) {
      const int a = static_cast<int>(unif(rng) * n) % n;
      int b = static_cast<int>(unif(rng) * n) % n;
      if (a == b) b = (b + 1) % n;
      const double angle = (unif(rng) - 0.5) * 0.5;
      Matrix G = Matrix::Identity(n, n);
      G(a, a) = std::cos(angle);
      G(b, b) = std::cos(angle);
      G(a, b) = -std::sin(angle);
      G(b, a) = std::sin(angle);
      const Matrix trial = F * G;
      const double trial_neg = negativity(trial);
      if (trial_neg < neg) {
        F = trial;
        neg = trial_neg;
      }
    }
    if (neg <= 1e-12) harvest(F);
  }
  return out;
}

MarkovReport markov_checks(const Matrix& C, const Prior& prior, const Vector& rho) {
  require_row_sums(C, prior);
  const int n = prior.num_types();
  MarkovReport report;
  report.P = Matrix(n, n);
  for (int i = 0; i < n; ++i) report.P.row(i) = C.row(i) / prior(i);

  report.stochastic_ok =
      (report.P.rowwise().sum() - Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-8;
  report.stationary_ok =
      (report.P.transpose() * prior.probs() - prior.probs()).cwiseAbs().maxCoeff() <=
      1e-8;
  double db_gap = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      db_gap = std::max(db_gap,
                        std::abs(prior(i) * report.P(i, j) - prior(j) * report.P(j, i)));
  report.detailed_balance_ok = db_gap <= 1e-8;

  // Spectrum via the symmetric similarity transform diag(sqrt(mu0)) P
  // diag(1/sqrt(mu0)).
  const Vector sq = prior.probs().cwiseSqrt();
  Matrix sym(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sym(i, j) = sq[i] * report.P(i, j) / sq[j];
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.transpose()));
  const auto& ev = eig.eigenvalues();
  report.second_eigenvalue = n >= 2 ? ev[n - 2] : ev[0];
  report.unit_eigenvalue_repeated = n >= 2 && ev[n - 2] > 1.0 - 1e-12;

  const Vector w = profile_from_cp(C, prior, rho);
  Vector iterate = w;
  for (int k = 0; k < 50; ++k) iterate = report.P * iterate;
  const double ex_ante = prior.probs().dot(rho);
  report.mean_reversion_gap =
      (iterate - ex_ante * Vector::Ones(n)).cwiseAbs().maxCoeff();
  return report;
}

TruthDriftResult truth_drifting(const Prior& prior, const InformationStructure& pi,
                                const Vector& beta) {
  const int n = prior.num_types();
  if (beta.size() != n) throw DimensionMismatch("truth_drifting: beta dimension");
  for (int i = 0; i < n; ++i)
    if (beta[i] < -1e-12 || beta[i] > 1.0 + 1e-12)
      throw Error("truth_drifting: beta entries must lie in [0, 1]");

  TruthDriftResult out;
  out.rhs = prior.probs().dot(beta);
  if (out.rhs <= 0.0) {
    out.lhs = out.rhs;
    out.holds = true;
    return out;
  }

  // P_ij = E[posterior of type j | type i].
  Matrix P = Matrix::Zero(n, n);
  for (int s = 0; s < pi.num_signals(); ++s) {
    const Vector joint = prior.probs().cwiseProduct(pi.likelihoods().col(s));
    const double prob = joint.sum();
    if (prob <= kSignalProbFloor) continue;
    const Vector post = joint / prob;
    for (int i = 0; i < n; ++i) P.row(i) += pi(i, s) * post.transpose();
  }

  out.lhs = 0.0;
  for (int i = 0; i < n; ++i)
    out.lhs += prior(i) * beta[i] / out.rhs * P.row(i).dot(beta);
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

bool majorization_check(const Vector& rho, const Profile& profile, const Prior& prior) {
  if (!prior.is_uniform())
    throw NonUniformPrior("majorization_check requires a uniform prior");
  if (rho.size() != profile.size())
    throw DimensionMismatch("majorization_check: dimension mismatch");
  std::vector<double> a(rho.data(), rho.data() + rho.size());
  std::vector<double> b(profile.data(), profile.data() + profile.size());
  std::sort(a.begin(), a.end(), std::greater<double>());
  std::sort(b.begin(), b.end(), std::greater<double>());
  double sa = 0.0;
  double sb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sb > sa + kPlausibilityTol) return false;
  }
  return std::abs(sa - sb) <= kPlausibilityTol;
}

BiPoolResult bipool_optimize(const Prior& prior, const Vector& rho, int target,
                             OptimizeSense sense) {
  const int n = prior.num_types();
  if (rho.size() != n) throw DimensionMismatch("bipool_optimize: rho dimension");
  if (!std::is_sorted(rho.data(), rho.data() + n))
    throw Error("bipool_optimize: rho must be sorted ascending");
  if (target < 0 || target >= n) throw Error("bipool_optimize: bad target index");

  const double sgn = sense == OptimizeSense::max ? 1.0 : -1.0;
  std::mt19937_64 rng(0);
  std::gamma_distribution<double> gam(1.0, 1.0);

  BiPoolResult best;
  best.value = -sgn * std::numeric_limits<double>::infinity();
  bool found = false;

  // Thresholds scan from the target outward; the widest pool already nests
  // the optima of the narrower ones, narrower scans break value ties toward
  // smaller pools.
  const int lo = sense == OptimizeSense::max ? target : 0;
  const int hi = sense == OptimizeSense::max ? n - 1 : target;
  for (int threshold = lo; threshold <= hi; ++threshold) {
    PoolProgram prog{prior, rho, target, {}};
    if (sense == OptimizeSense::max) {
      for (int j = threshold; j < n; ++j) prog.pool.push_back(j);
    } else {
      for (int j = 0; j <= threshold; ++j) prog.pool.push_back(j);
    }
    const int k = static_cast<int>(prog.pool.size());

    Vector incumbent;
    double incumbent_value = -sgn * std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 16; ++restart) {
      Vector p0(k);
      if (restart == 0) {
        p0.setConstant(1.0 / k);
      } else {
        for (int i = 0; i < k; ++i) p0[i] = gam(rng) + 1e-9;
        p0 /= p0.sum();
      }
      const Vector p = solve_pool_program(prog, p0, sgn, 1e-10, 20000);
      const double v = prog.value(p);
      if (sgn * (v - incumbent_value) > 0.0) {
        incumbent_value = v;
        incumbent = p;
      }
    }
    if (!std::isfinite(incumbent_value))
      throw ConvergenceFailure("bipool_optimize: no restart converged");

    // Take strictly better values; on ties prefer the smaller pool (for max
    // the pool shrinks as the threshold rises, for min the first hit wins).
    const bool strictly_better = found && sgn * (incumbent_value - best.value) > 1e-12;
    const bool tie_with_smaller_pool =
        found && std::abs(incumbent_value - best.value) <= 1e-12 &&
        sense == OptimizeSense::max;
    if (!found || strictly_better || tie_with_smaller_pool) {
      Vector probs = Vector::Zero(n);
      for (int i = 0; i < k; ++i) probs[prog.pool[i]] = incumbent[i];
      best.policy = {target, probs, threshold};
      best.value = incumbent_value;
      found = true;
    }
  }
  if (!found) throw ConvergenceFailure("bipool_optimize: threshold scan failed");
  return best;
}

InformationStructure bipool_structure(const Prior& prior, const BiPoolPolicy& policy) {
  const int n = prior.num_types();
  Matrix pi = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (j == policy.target) continue;
    pi(j, j) = 1.0;
  }
  Vector probs = policy.pool_probs;
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kInputTol)
    throw Error("bipool_structure: pool probabilities must sum to 1");
  pi.row(policy.target) = probs.transpose() / total;
  std::vector<std::string> labels;
  for (int j = 0; j < n; ++j) labels.push_back("pool-with-" + std::to_string(j + 1));
  return InformationStructure(std::move(pi), std::move(labels));
}

StructuralDiagnostics rs_diagnostics(const Prior& prior, const Vector& rho,
                                     const Vector& direction,
                                     const BeliefDistribution& tau) {
  tau.require_bayes_plausible(prior);
  const int n = prior.num_types();
  if (rho.size() != n || direction.size() != n)
    throw DimensionMismatch("rs_diagnostics: dimension mismatch");

  StructuralDiagnostics out;
  const Vector gamma = prior.scale_by_reciprocal(direction);

  for (const auto& e : tau.atoms())
    out.atom_points.emplace_back(gamma.dot(e.atom.belief), rho.dot(e.atom.belief));

  // (a) comonotone ordering of the atom points.
  auto sorted = out.atom_points;
  std::sort(sorted.begin(), sorted.end());
  out.ordered_ok = true;
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].second < sorted[i - 1].second - 1e-9) out.ordered_ok = false;

  // (b) pooled types never have both a larger gamma and a larger rho.
  out.segment_slopes_ok = true;
  for (const auto& e : tau.atoms()) {
    std::vector<int> support;
    for (int t = 0; t < n; ++t)
      if (e.atom.belief[t] > 1e-9) support.push_back(t);
    for (size_t a = 0; a < support.size(); ++a) {
      for (size_t b = a + 1; b < support.size(); ++b) {
        const int i = support[a];
        const int j = support[b];
        const bool both_up = (gamma[i] - gamma[j] > 1e-9 && rho[i] - rho[j] > 1e-9) ||
                             (gamma[j] - gamma[i] > 1e-9 && rho[j] - rho[i] > 1e-9);
        if (both_up) out.segment_slopes_ok = false;
      }
    }
  }

  // (c) pairwise pooling, meaningful only under genericity (no three of the
  // type points collinear).
  out.generic = true;
  for (int i = 0; i < n && out.generic; ++i) {
    for (int j = i + 1; j < n && out.generic; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double area = (gamma[j] - gamma[i]) * (rho[k] - rho[i]) -
                            (gamma[k] - gamma[i]) * (rho[j] - rho[i]);
        if (std::abs(area) <= 1e-9) {
          out.generic = false;
          break;
        }
      }
    }
  }
  out.pairwise_ok = true;
  for (const auto& e : tau.atoms()) {
    int support = 0;
    for (int t = 0; t < n; ++t)
      if (e.atom.belief[t] > 1e-9) ++support;
    if (support > 2) out.pairwise_ok = false;
  }
  return out;
}

}  // namespace ipsets
