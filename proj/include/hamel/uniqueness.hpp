#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>

#include "hamel/types.hpp"

namespace hamel {

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_legendre(int points);

/// Value and first two derivatives of a radial profile.
struct RadialSample {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// C^1 piecewise cubic Hermite interpolant on increasing knots.
class HermiteProfile {
 public:
  HermiteProfile(Eigen::VectorXd knots, Eigen::VectorXd values, Eigen::VectorXd slopes);
  RadialSample eval(double r) const;
  const Eigen::VectorXd& knots() const { return knots_; }
  double lower() const { return knots_(0); }
  double upper() const { return knots_(knots_.size() - 1); }

 private:
  Eigen::VectorXd knots_, values_, slopes_;
};

/// Random Hermite profile on [1, upper] with zero values at both ends.
HermiteProfile random_hermite(std::mt19937_64& rng, double upper, int interior_knots);

struct HardyResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// lhs = int_1^M w^2 r^(alpha-2), rhs = 4/(alpha-1)^2 int_1^M w'^2 r^alpha,
/// integrated exactly per knot interval. Requires alpha > 1 and
/// w(1) = w(M) = 0; ok iff lhs <= rhs (1 + 1e-8).
HardyResult hardy_check(const HermiteProfile& w, double alpha);

/// Near-extremal family w = r^((1-alpha)/2) sin(pi log r / log M) on [1, M];
/// returns lhs/rhs, which tends to 1 as M grows.
double hardy_sharpness_ratio(double alpha, double upper);

/// 1 - 4/(alpha-1)^2 ((flux-1) - (flux+1-alpha)(alpha-1)/2); alpha > 1.
double positivity_factor(double alpha, double flux);

/// Zero crossings of positivity_factor in alpha located by bisection to
/// `tol` on brackets scanned over (1, 2 flux + 2).
std::vector<double> positivity_roots(double flux, double tol = 1e-12);

/// Bump ((r-a)(b-r))^3 P(u), u = (r-a)/(b-a), zero outside [a, b].
/// Derivatives are exact polynomial derivatives.
/// Compactly supported C^2 profile on [a, b]. In radius mode the profile is
/// (u(1-u))^3 P(u) with u linear in r; in log mode it is r (s(1-s))^3 P(s)
/// with s linear in log r, which lets slowly varying shapes span decades.
enum class BumpVariable { radius, log_radius };

class BumpProfile {
 public:
  BumpProfile(double a, double b, const Eigen::VectorXd& shape, BumpVariable variable = BumpVariable::radius);
  RadialSample eval(double r) const;
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  double a_, b_;
  BumpVariable variable_;
  Eigen::VectorXd poly_, dpoly_, ddpoly_;  // coefficients in u
};

/// Radial profile of one angular mode: amplitude * sum_i coeff_i bump_i(r).
struct StreamMode {
  int k = 1;
  Complex amplitude{1.0};
  std::vector<double> coeffs;
  std::vector<BumpProfile> bumps;

  RadialSample eval(double r) const;
  double lower() const;
  double upper() const;
};

/// Stream function sum_k phi_k(r) e^{i k theta} + c.c. over distinct k >= 1.
using TestStream = std::vector<StreamMode>;

/// Random bumps supported in [1, upper] on the given modes.
TestStream random_stream(std::mt19937_64& rng, const std::vector<int>& modes, double upper);

struct PoincareResult {
  bool ok = true;
  /// min over nodes of sum k^4|phi|^2 - 4 sum k^2|phi|^2 (and the r-derivative analogue).
  double margin_theta = 0.0;
  double margin_mixed = 0.0;
};

/// Angular Poincare-Wirtinger bounds at every radius in `radii`.
/// Throws InvalidInput if a mode with k <= 1 is present.
PoincareResult poincare_wirtinger_check(const TestStream& stream, const Eigen::VectorXd& radii);

struct QFormResult {
  double q_plus = 0.0;
  double q_1 = 0.0;
  double q_sup1 = 0.0;
  double lower_bound_rhs = 0.0;
  double gradient_norm = 0.0;
  double weighted_norm = 0.0;
  /// |q_plus - q_1 - q_sup1| / scale.
  double decomposition_error = 0.0;
  double scale = 0.0;
  /// Positivity is only asserted for flux in (2, 3].
  bool asserted = false;
  bool q1_ok = true;
  bool sup1_ok = true;
  /// q_sup1 / (gradient_norm + weighted_norm), 0 without |k| >= 2 modes.
  double constant = 0.0;
};

/// Quadratic form of the velocity-like field w = grad-perp phi: the full
/// form from its definition, the k = +-1 part from its simplified
/// expression and the |k| >= 2 part from its expanded expression. Values
/// are sums over k in Z of the radial integrals (theta average, not integral).
QFormResult q_form(double flux, const TestStream& stream);

struct ProbeResult {
  bool found = false;
  int samples = 0;
  /// Smallest q_1 / (int |phi''|^2 r dr) observed.
  double min_ratio = 0.0;
  TestStream witness;
};

/// Random search (with Rayleigh-Ritz refinement over random bump bases)
/// for a mode-1 stream with q_1 < 0.
ProbeResult probe_q1_negative(double flux, int samples, std::uint64_t seed);

}  // namespace hamel
