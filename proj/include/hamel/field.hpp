#pragma once

#include <iosfwd>
#include <vector>

#include "hamel/boundary.hpp"
#include "hamel/spectral.hpp"

namespace hamel {

/// Velocity and vorticity on the (r, theta) tensor grid; rows are radial
/// nodes, columns are angles theta_k = 2 pi k / M.
struct PhysicalField {
  RealArray radius;
  RealArray theta;
  Eigen::ArrayXXd ur;
  Eigen::ArrayXXd utheta;
  Eigen::ArrayXXd vorticity;
};

/// Default angular resolution, 4 cutoff (at least 8).
int default_theta_points(const SpectralSolution& s);

/// u = u_ref + grad-perp gamma, with u_r = -flux/r + sum i n gamma_n e^{in theta}/r
/// and u_theta = mu/r - sum gamma_n' e^{in theta}. theta_points <= 0 selects the default.
PhysicalField reconstruct(const SpectralSolution& s, int theta_points = 0);

/// Velocity at radial node j on `samples` uniform angles.
BoundaryTrace velocity_trace(const SpectralSolution& s, Eigen::Index node, int samples);

/// Residual of the steady vorticity equation
/// w_rr + (flux+1) w_r/r + w_thth/r^2 - mu w_th/r^2 - (gamma_th/r) w_r + (gamma_r/r) w_th,
/// relative to the sum of term magnitudes at each radius, maximized over
/// interior nodes. Zero for the unperturbed flow.
double ns_residual(const SpectralSolution& s);

/// Sup over the tensor grid of the finite-difference divergence of u.
double divergence_residual(const SpectralSolution& s, int theta_points = 0);

/// lim r <u_theta>_theta r, from a fit c0 + c1 r^-q to c(r) = mu - r gamma_0'(r)
/// over the last two decades. Throws NumericalError if the fit has q <= 0.
double asymptotic_circulation(const SpectralSolution& s);

struct ModeDecay {
  int n = 0;
  bool skipped = false;
  double slope = 0.0;
  double fit_residual = 0.0;
  /// Slowest decay the theory allows for this mode.
  double predicted = 0.0;
  /// predicted - slope; nonnegative when the mode decays at least as fast.
  double margin = 0.0;
};

struct DecayProfile {
  std::vector<ModeDecay> modes;
  /// min over fitted modes of -slope, -slope of mode 1, min over |n| >= 2.
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta_sup1 = 0.0;
  std::vector<int> skipped;
};

/// Slowest admissible stream-function decay for mode n at weight alpha.
double predicted_decay(const ReferenceFlow& flow, int n, double alpha);

/// Least-squares slopes of log|gamma_n| over the last two decades. Modes
/// below 1e-13 of the largest are skipped.
DecayProfile decay_fit(const SpectralSolution& s, double alpha);

/// CSV with header r,theta,u_r,u_theta,w.
void write_field_csv(std::ostream& os, const PhysicalField& f);

}  // namespace hamel
