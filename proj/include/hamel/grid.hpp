#pragma once

#include <Eigen/Core>

#include "hamel/types.hpp"

namespace hamel {

/// Geometric node set r_j = exp(h j), j = 0..J, on [1, r_max].
struct RadialGrid {
  RealArray radius;
  RealArray log_radius;
  double log_step = 0.0;
  double r_max = 1.0;
  /// Slowest power law assumed for integrands beyond r_max: a fitted tail
  /// exponent with real part above this value is clamped to it.
  double tail_exponent_floor = 0.0;

  Eigen::Index size() const { return radius.size(); }
  Eigen::Index last() const { return radius.size() - 1; }
};

inline constexpr int kDefaultNodesPerDecade = 64;
inline constexpr double kDefaultRMax = 1.0e4;
inline constexpr int kMinIntervals = 32;

/// J = ceil(nodes_per_decade * log10(r_max)); J >= 32 is enforced.
RadialGrid build_grid(double r_max, int nodes_per_decade, double tail_exponent_floor = 0.0);

/// Complex power law f(s) ~ value * (s / r_max)^exponent beyond r_max.
struct PowerLawTail {
  Complex value;
  Complex exponent;
};

/// Least-squares fit of log f (phase unwrapped) against log r over the last
/// five nodes; Re(exponent) is clamped to grid.tail_exponent_floor.
PowerLawTail fit_tail(const RadialGrid& grid, const ComplexArray& f);

/// Out_j = int_{r_j}^inf s f(s) (r_j/s)^zeta ds at every node.
/// Eighth-order interpolatory panels in x = log s, closed-form power-law tail.
/// Throws NumericalError on non-finite samples or a divergent tail.
ComplexArray integrate_out(const RadialGrid& grid, const ComplexArray& f, Complex zeta);

/// In_j = int_1^{r_j} s f(s) (r_j/s)^zeta ds at every node (In_0 = 0).
ComplexArray integrate_in(const RadialGrid& grid, const ComplexArray& f, Complex zeta);

/// Single-node forms of the two integrals.
Complex integrate_out(const RadialGrid& grid, const ComplexArray& f, Eigen::Index j, Complex zeta);
Complex integrate_in(const RadialGrid& grid, const ComplexArray& f, Eigen::Index j, Complex zeta);

/// Real-valued convenience overloads.
template <typename Derived>
ComplexArray integrate_out(const RadialGrid& grid, const Eigen::ArrayBase<Derived>& f, double zeta) {
  return integrate_out(grid, ComplexArray(f.template cast<Complex>()), Complex(zeta, 0.0));
}
template <typename Derived>
ComplexArray integrate_in(const RadialGrid& grid, const Eigen::ArrayBase<Derived>& f, double zeta) {
  return integrate_in(grid, ComplexArray(f.template cast<Complex>()), Complex(zeta, 0.0));
}

/// d/dr of grid samples: eighth-order finite differences in log r, one-sided
/// near the ends.
ComplexArray differentiate(const RadialGrid& grid, const ComplexArray& f);
/// d2/dr2 of grid samples, same stencils.
ComplexArray differentiate2(const RadialGrid& grid, const ComplexArray& f);

/// Least-squares slope of log|f| against log r over nodes with r >= r_from.
double log_log_slope(const RadialGrid& grid, const ComplexArray& f, double r_from);

namespace detail {
/// Finite-difference weights (Fornberg) for derivatives 0..max_order at z,
/// on the given abscissae. Result(k, m) is the weight of node k for order m.
Eigen::MatrixXd fd_weights(double z, const Eigen::VectorXd& nodes, int max_order);
}  // namespace detail

}  // namespace hamel
