#pragma once

#include <span>
#include <utility>

#include "hamel/types.hpp"

namespace hamel {

/// Potential flow -flux/r e_r + circulation/r e_theta around the unit disk.
/// Both constants are normalized by 2*pi.
struct ReferenceFlow {
  double flux = 0.0;
  double circulation = 0.0;
};

/// Hamel spiral: v_r = -flux/r, v_theta = swirl r^(1-flux) + circulation/r.
struct HamelParams {
  double flux = 0.0;
  double circulation = 0.0;
  double swirl = 0.0;
};

struct PolarVelocity {
  double radial = 0.0;
  double angular = 0.0;
};

/// Characteristic exponents of the linearized vorticity equation for mode n:
/// r^2 w'' + (flux+1) r w' - (i n circulation + n^2) w = 0 has solutions
/// r^growing and r^decaying.
struct ModeExponents {
  int n = 0;
  Complex growing;
  Complex decaying;
  /// Principal root of flux^2 + 4 (i n circulation + n^2).
  Complex discriminant_root;
};

PolarVelocity hamel_velocity(const HamelParams& p, double r, double theta);
PolarVelocity ref_velocity(const ReferenceFlow& f, double r);

ModeExponents mode_exponents(const ReferenceFlow& f, int n);

/// Closed forms of Re(growing) and Re(decaying), used to cross-check the
/// complex square root.
double growing_real_part(const ReferenceFlow& f, int n);
double decaying_real_part(const ReferenceFlow& f, int n);

/// Slowest decay rate |Re decaying| over n != 0, attained at n = +-1.
double rho_decay(const ReferenceFlow& f);

struct AlphaWindow {
  double alpha_star = 0.0;
  bool feasible = false;
};

/// alpha_star = min(rho - 2, 1) / 2; feasible iff rho > 2.
AlphaWindow alpha_window(const ReferenceFlow& f);

/// Parameter region where the first modes decay fast enough for the
/// fixed-point construction.
bool existence_condition(double flux, double circulation);

/// Flux and circulation of a boundary trace sampled on a uniform theta grid
/// theta_j = 2 pi j / M, with u* = u_r e_r + u_theta e_theta.
/// Throws InvalidInput for fewer than 8 samples or mismatched lengths.
ReferenceFlow flux_circulation(std::span<const double> ur, std::span<const double> utheta);

}  // namespace hamel
