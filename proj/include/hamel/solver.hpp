#pragma once

#include <string>
#include <vector>

#include "hamel/boundary.hpp"
#include "hamel/field.hpp"
#include "hamel/spectral.hpp"

namespace hamel {

struct GridConfig {
  double r_max = kDefaultRMax;
  int nodes_per_decade = kDefaultNodesPerDecade;
  double tail_exponent_floor = 0.0;
};

struct SolverConfig {
  int cutoff = 16;
  GridConfig grid;
  /// Fixed-point stop: weighted sup norm of the stream-function increment.
  double tol_fp = 1e-10;
  int max_iter = 200;
  /// 1 is plain Picard; smaller values under-relax.
  double relaxation = 1.0;
  double tol_mu = 1e-10;
  int max_shoot = 40;
  /// Increments growing past this factor times the first one count as divergence.
  double divergence_factor = 1e6;

  void validate() const;
  RadialGrid make_grid() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> increment_history;
  double contraction_ratio = 0.0;
  /// Weighted sup norm of X - S(NL(X), v*) at the returned iterate.
  double fixed_point_residual = 0.0;
  double alpha = 0.0;
  double mu_final = 0.0;
  std::vector<double> mu_history;
  int shoot_iterations = 0;
  /// U^m norms of the stream function with weight alpha, kappa = 4, m = 0..2.
  std::vector<double> norms;
  DecayProfile decay;
  double ns_residual = 0.0;
  std::vector<std::string> warnings;
  std::string message;
};

struct SolveResult {
  SpectralSolution solution;
  SolveReport report;
};

/// Radial weight of the convergence norm: alpha_window clipped to [1e-3, 1].
double convergence_alpha(const ReferenceFlow& flow);

/// sup_{n, r} r^alpha (1+|n|)^4 |gamma_n|.
double increment_norm(const SpectralSolution& s, double alpha);

/// Picard iteration X <- (1-relax) X + relax S(NL(X), v*) from X = S(0, v*).
/// The target circulation is flow.circulation + Re v*_{theta,0}.
/// Non-convergence is reported, not thrown; the degenerate flux band throws.
SolveResult picard_solve(const ReferenceFlow& flow, const BoundarySpectrum& boundary,
                         const SolverConfig& config);

/// Circulation shooting for flux <= 2: finds mu with mu = mu0 + gamma_0'(1),
/// re-projecting the raw trace at every trial mu.
SolveResult shoot_mu(double flux, double mu0, const BoundaryTrace& trace, const SolverConfig& config);

struct BranchMember {
  double mu = 0.0;
  bool ok = false;
  std::string error;
  SolveResult result;
};

/// One Picard solve per circulation for the same raw trace, run in parallel.
/// Requires flux > 2 outside the degenerate band.
std::vector<BranchMember> branch_sweep(double flux, double mu0, const std::vector<double>& mu_list,
                                       const BoundaryTrace& trace, const SolverConfig& config);

}  // namespace hamel
