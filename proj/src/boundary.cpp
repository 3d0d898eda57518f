#include "hamel/boundary.hpp"

#include <cmath>
#include <string>

namespace hamel {

BoundarySpectrum BoundarySpectrum::zero(int cutoff) {
  if (cutoff < 0) throw InvalidInput("BoundarySpectrum: cutoff must be nonnegative");
  return {cutoff, ComplexArray::Zero(cutoff + 1), ComplexArray::Zero(cutoff + 1)};
}

BoundarySpectrum project_boundary(std::span<const double> ur, std::span<const double> utheta,
                                  int cutoff, double flux, double circulation) {
  if (cutoff < 0) throw InvalidInput("project_boundary: cutoff must be nonnegative");
  if (ur.size() != utheta.size()) throw InvalidInput("project_boundary: trace lengths differ");
  const auto m = static_cast<Eigen::Index>(ur.size());
  if (m < 2 * cutoff + 2)
    throw InvalidInput("project_boundary: need at least " + std::to_string(2 * cutoff + 2) +
                       " samples for cutoff " + std::to_string(cutoff));

  const Eigen::Map<const Eigen::ArrayXd> radial(ur.data(), m);
  const Eigen::Map<const Eigen::ArrayXd> angular(utheta.data(), m);
  const ComplexArray shifted_r = (radial + flux).cast<Complex>();
  const ComplexArray shifted_t = (angular - circulation).cast<Complex>();

  BoundarySpectrum out = BoundarySpectrum::zero(cutoff);
  for (int n = 0; n <= cutoff; ++n) {
    ComplexArray phase(m);
    for (Eigen::Index j = 0; j < m; ++j)
      phase(j) = std::polar(1.0, -kTwoPi * static_cast<double>(n) * static_cast<double>(j) /
                                     static_cast<double>(m));
    out.vr(n) = (shifted_r * phase).mean();
    out.vtheta(n) = (shifted_t * phase).mean();
  }
  if (std::abs(out.vr(0)) > kResidualFluxTol)
    throw InvalidInput("project_boundary: radial trace has net flux different from -flux");
  out.vr(0) = 0.0;
  out.vtheta(0) = out.vtheta(0).real();
  return out;
}

BoundarySpectrum project_boundary(const BoundaryTrace& trace, int cutoff, double flux,
                                  double circulation) {
  return project_boundary(trace.ur, trace.utheta, cutoff, flux, circulation);
}

BoundaryTrace synthesize_trace(const BoundarySpectrum& s, double flux, double circulation,
                               int samples) {
  if (samples < 1) throw InvalidInput("synthesize_trace: samples must be positive");
  BoundaryTrace t{std::vector<double>(samples), std::vector<double>(samples)};
  for (int j = 0; j < samples; ++j) {
    const double theta = kTwoPi * j / samples;
    double r = -flux + s.vr(0).real();
    double a = circulation + s.vtheta(0).real();
    for (int n = 1; n <= s.cutoff; ++n) {
      const Complex e = std::polar(1.0, n * theta);
      r += 2.0 * (s.vr(n) * e).real();
      a += 2.0 * (s.vtheta(n) * e).real();
    }
    t.ur[j] = r;
    t.utheta[j] = a;
  }
  return t;
}

}  // namespace hamel
