#pragma once

#include <span>
#include <vector>

#include "hamel/types.hpp"

namespace hamel {

/// Fourier coefficients of the boundary perturbation v* = u* + flux e_r -
/// circulation e_theta for modes 0..cutoff; negative modes are conjugates.
struct BoundarySpectrum {
  int cutoff = 0;
  ComplexArray vr;
  ComplexArray vtheta;

  static BoundarySpectrum zero(int cutoff);
};

/// Boundary velocity u* sampled at theta_j = 2 pi j / M.
struct BoundaryTrace {
  std::vector<double> ur;
  std::vector<double> utheta;
};

/// Residual |v*_{r,0}| tolerated after removing the flux.
inline constexpr double kResidualFluxTol = 1e-10;

/// DFT projection of u_r* + flux and u_theta* - circulation. Requires at
/// least 2 cutoff + 2 samples; throws InvalidInput if the shifted radial
/// trace keeps a mean above kResidualFluxTol.
BoundarySpectrum project_boundary(std::span<const double> ur, std::span<const double> utheta,
                                  int cutoff, double flux, double circulation);
BoundarySpectrum project_boundary(const BoundaryTrace& trace, int cutoff, double flux,
                                  double circulation);

/// Samples u* = -flux e_r + circulation e_theta + v* on `samples` uniform
/// angles (inverse of project_boundary for band-limited data).
BoundaryTrace synthesize_trace(const BoundarySpectrum& spectrum, double flux, double circulation,
                               int samples);

}  // namespace hamel
