#include <doctest.h>

#include <cmath>
#include <random>

#include "hamel/nonlinearity.hpp"

using namespace hamel;

namespace {

ComplexArray power(const RadialGrid& g, Complex p) {
  ComplexArray out(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) out(j) = std::exp(p * g.log_radius(j));
  return out;
}

SpectralSolution random_solution(const RadialGrid& g, int cutoff, int active, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  SpectralSolution s = SpectralSolution::zero(g, {2.5, 0.2}, cutoff);
  const ComplexArray r = g.radius.cast<Complex>();
  for (int n = 0; n <= active; ++n) {
    const Complex a{gauss(rng), n == 0 ? 0.0 : gauss(rng)}, b{gauss(rng), n == 0 ? 0.0 : gauss(rng)};
    const Complex pg{-1.0 - n * 0.3, n == 0 ? 0.0 : gauss(rng)}, pw{-3.0 - n * 0.2, n == 0 ? 0.0 : gauss(rng)};
    const ComplexArray gm = a * power(g, pg), wm = b * power(g, pw);
    s.gamma.row(n) = gm.transpose();
    s.dgamma.row(n) = (pg * gm / r).transpose();
    s.w.row(n) = wm.transpose();
    s.dw.row(n) = (pw * wm / r).transpose();
  }
  return s;
}

}  // namespace

TEST_CASE("zero input gives zero sources") {
  const auto g = build_grid(1e2, 32);
  const auto s = SpectralSolution::zero(g, {2.5, 0.2}, 4);
  CHECK(compute_sources(s).abs().maxCoeff() == 0.0);
}

TEST_CASE("a single real mode pair produces no zero-mode forcing") {
  const auto g = build_grid(1e2, 32);
  auto s = SpectralSolution::zero(g, {2.5, 0.2}, 3);
  const ComplexArray r = g.radius.cast<Complex>();
  s.gamma.row(1) = power(g, -2.0).transpose();
  s.dgamma.row(1) = (-2.0 * power(g, -3.0)).transpose();
  s.w.row(1) = power(g, -3.0).transpose();
  s.dw.row(1) = (-3.0 * power(g, -4.0)).transpose();
  const ModeTable f = compute_sources(s);
  CHECK(f.row(0).abs().maxCoeff() < 1e-15);
  // F_2 = (i/r)(1 gamma_1 w_1' - 1 gamma_1' w_1) = (i/r)(-3 + 2) r^-6
  const ComplexArray want = -kI * power(g, -7.0);
  CHECK((f.row(2).transpose() - want).abs().maxCoeff() < 1e-14);
}

TEST_CASE("sources match the physical-space advection term") {
  std::mt19937_64 rng(17);
  const auto g = build_grid(1e2, 32);
  const int cutoff = 8, active = 4;
  const auto s = random_solution(g, cutoff, active, rng);
  const ModeTable f = compute_sources(s);
  const int m = 4 * cutoff;
  double worst = 0.0, scale = f.abs().maxCoeff();
  for (Eigen::Index j = 0; j < g.size(); j += 5) {
    const double r = g.radius(j);
    Eigen::ArrayXcd adv(m);
    for (int t = 0; t < m; ++t) {
      const double th = kTwoPi * t / m;
      Complex gt = 0.0, gr = 0.0, wt = 0.0, wr = 0.0;
      for (int k = -cutoff; k <= cutoff; ++k) {
        const Complex e = std::polar(1.0, k * th);
        gt += kI * double(k) * s.mode(s.gamma, k)(j) * e;
        gr += s.mode(s.dgamma, k)(j) * e;
        wt += kI * double(k) * s.mode(s.w, k)(j) * e;
        wr += s.mode(s.dw, k)(j) * e;
      }
      adv(t) = (gt / r) * wr - (gr / r) * wt;
    }
    for (int n = 0; n <= cutoff; ++n) {
      Complex c = 0.0;
      for (int t = 0; t < m; ++t) c += adv(t) * std::polar(1.0, -kTwoPi * n * t / m);
      c /= double(m);
      worst = std::max(worst, std::abs(c - f(n, j)));
    }
  }
  CHECK(worst < 1e-10 * scale);
}

TEST_CASE("sources are quadratic and truncation-consistent") {
  std::mt19937_64 rng(23);
  const auto g = build_grid(1e2, 32);
  auto s = random_solution(g, 8, 4, rng);
  const ModeTable f = compute_sources(s);
  auto scaled = s;
  scaled *= 3.0;
  CHECK((compute_sources(scaled) - 9.0 * f).abs().maxCoeff() < 1e-12 * f.abs().maxCoeff());

  // Same data embedded at cutoff 16.
  SpectralSolution wide = SpectralSolution::zero(g, s.flow, 16);
  wide.gamma.topRows(9) = s.gamma;
  wide.dgamma.topRows(9) = s.dgamma;
  wide.w.topRows(9) = s.w;
  wide.dw.topRows(9) = s.dw;
  const ModeTable fw = compute_sources(wide);
  CHECK((fw.topRows(5) - f.topRows(5)).abs().maxCoeff() == 0.0);
  CHECK(f.row(0).imag().abs().maxCoeff() == 0.0);
}

TEST_CASE("sources of decaying modes decay at least like r^-4") {
  std::mt19937_64 rng(29);
  const auto g = build_grid(1e4, 64);
  const auto s = random_solution(g, 6, 3, rng);
  const ModeTable f = compute_sources(s);
  for (int n = 0; n <= 6; ++n) {
    if (f.row(n).abs().maxCoeff() == 0.0) continue;
    CHECK(log_log_slope(g, f.row(n).transpose(), 1e3) <= -3.5);
  }
}

TEST_CASE("missing derivative samples are rejected") {
  const auto g = build_grid(1e2, 32);
  auto s = SpectralSolution::zero(g, {2.5, 0.2}, 4);
  s.dw = ModeTable();
  CHECK_THROWS_AS(compute_sources(s), InvalidInput);
}
