#include "hamel/flows.hpp"

#include <cmath>
#include <numeric>

namespace hamel {

PolarVelocity hamel_velocity(const HamelParams& p, double r, double /*theta*/) {
  if (!(r >= 1.0)) throw InvalidInput("hamel_velocity: r must be >= 1");
  return {-p.flux / r, p.swirl * std::pow(r, 1.0 - p.flux) + p.circulation / r};
}

PolarVelocity ref_velocity(const ReferenceFlow& f, double r) {
  if (!(r >= 1.0)) throw InvalidInput("ref_velocity: r must be >= 1");
  return {-f.flux / r, f.circulation / r};
}

ModeExponents mode_exponents(const ReferenceFlow& f, int n) {
  const double nn = static_cast<double>(n);
  const Complex disc{f.flux * f.flux + 4.0 * nn * nn, 4.0 * nn * f.circulation};
  // std::sqrt on complex is the principal branch, Re >= 0.
  const Complex root = std::sqrt(disc);
  ModeExponents e;
  e.n = n;
  e.discriminant_root = root;
  e.growing = -0.5 * f.flux + 0.5 * root;
  e.decaying = -0.5 * f.flux - 0.5 * root;
  return e;
}

namespace {
double root_real_part(const ReferenceFlow& f, int n) {
  const double nn = static_cast<double>(n);
  const double a = f.flux * f.flux + 4.0 * nn * nn;
  const double b2 = 16.0 * nn * nn * f.circulation * f.circulation;
  return std::sqrt(a + std::sqrt(a * a + b2)) / (2.0 * std::sqrt(2.0));
}
}  // namespace

double growing_real_part(const ReferenceFlow& f, int n) {
  return -0.5 * f.flux + root_real_part(f, n);
}

double decaying_real_part(const ReferenceFlow& f, int n) {
  return -0.5 * f.flux - root_real_part(f, n);
}

double rho_decay(const ReferenceFlow& f) { return -decaying_real_part(f, 1); }

AlphaWindow alpha_window(const ReferenceFlow& f) {
  const double rho = rho_decay(f);
  return {0.5 * std::min(rho - 2.0, 1.0), rho > 2.0};
}

bool existence_condition(double flux, double circulation) {
  if (flux < 0.0) throw InvalidInput("existence_condition: flux must be nonnegative");
  if (flux > 1.5) return true;
  return std::abs(circulation) > (4.0 - flux) * std::sqrt(3.0 - 2.0 * flux);
}

ReferenceFlow flux_circulation(std::span<const double> ur, std::span<const double> utheta) {
  if (ur.size() != utheta.size())
    throw InvalidInput("flux_circulation: ur and utheta lengths differ");
  if (ur.size() < 8) throw InvalidInput("flux_circulation: need at least 8 theta samples");
  const double m = static_cast<double>(ur.size());
  // Trapezoid rule on a periodic uniform grid is the plain mean.
  const double mean_r = std::accumulate(ur.begin(), ur.end(), 0.0) / m;
  const double mean_t = std::accumulate(utheta.begin(), utheta.end(), 0.0) / m;
  return {-mean_r, mean_t};
}

}  // namespace hamel
