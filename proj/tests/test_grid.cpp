#include <doctest.h>

#include <cmath>
#include <random>

#include "hamel/grid.hpp"

using namespace hamel;

namespace {

ComplexArray power(const RadialGrid& g, Complex p) {
  return g.radius.cast<Complex>().unaryExpr([p](Complex r) { return std::pow(r, p); });
}

double max_rel_error(const ComplexArray& got, const ComplexArray& want) {
  return ((got - want).abs() / want.abs()).maxCoeff();
}

}  // namespace

TEST_CASE("build_grid sizes and geometry") {
  auto g = build_grid(10.0, 32);
  CHECK(g.size() == 33);
  CHECK(g.radius(g.last()) == 10.0);
  CHECK(g.radius(0) == 1.0);
  CHECK(build_grid(1e4, 32).size() == 129);
  CHECK(build_grid(1e4, 64).size() == 257);
  CHECK_THROWS_AS(build_grid(1.0, 32), InvalidInput);
  CHECK_THROWS_AS(build_grid(0.5, 32), InvalidInput);
  CHECK_THROWS_AS(build_grid(1e4, 8), InvalidInput);
  g = build_grid(1e4, 64);
  for (Eigen::Index j = 0; j + 1 < g.size(); ++j) {
    CHECK(g.radius(j + 1) > g.radius(j));
    CHECK(std::abs(g.radius(j + 1) / g.radius(j) - std::exp(g.log_step)) < 1e-12);
  }
}

TEST_CASE("integrate_out: power-law oracles") {
  const auto g = build_grid(kDefaultRMax, kDefaultNodesPerDecade);
  CHECK(std::abs(integrate_out(g, ComplexArray::Zero(g.size()), 0, Complex(1.0))) == 0.0);

  // int_1^inf s^-5 ds = 1/4
  const Complex v = integrate_out(g, power(g, -5.0), 0, Complex(1.0));
  CHECK(std::abs(v - 0.25) / 0.25 < 1e-6);

  // f = s^-3, zeta = 2 + i: Out(r) = 1 / (r (1 + zeta)) at every node.
  const Complex zeta{2.0, 1.0};
  const ComplexArray got = integrate_out(g, power(g, -3.0), zeta);
  const ComplexArray want = 1.0 / (g.radius.cast<Complex>() * (1.0 + zeta));
  CHECK(max_rel_error(got, want) < 1e-6);
}

TEST_CASE("integrate_in: power-law oracles") {
  const auto g = build_grid(kDefaultRMax, kDefaultNodesPerDecade);
  const ComplexArray got = integrate_in(g, power(g, -5.0), Complex(-2.0));
  CHECK(got(0) == Complex(0.0));
  // int_1^r s^-4 (r/s)^-2 ds = r^-2 (1 - 1/r); at r = e this is e^-2 (1 - e^-1).
  const ComplexArray r = g.radius.cast<Complex>();
  const ComplexArray want = (1.0 - 1.0 / r) / (r * r);
  CHECK(((got - want).abs().tail(g.size() - 1) / want.abs().tail(g.size() - 1)).maxCoeff() < 1e-6);

  // Oscillating complex exponent.
  const Complex zeta{1.5, -2.0};
  const Complex p{-3.0, 0.7};
  const ComplexArray f = power(g, p);
  // int_1^r s^(1+p) (r/s)^zeta ds = r^zeta (r^(2+p-zeta) - 1) / (2+p-zeta)
  const Complex q = 2.0 + p - zeta;
  ComplexArray exact(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j)
    exact(j) = std::pow(r(j), zeta) * (std::pow(r(j), q) - 1.0) / q;
  const ComplexArray num = integrate_in(g, f, zeta);
  CHECK(((num - exact).abs().tail(g.size() - 1) / exact.abs().tail(g.size() - 1)).maxCoeff() < 1e-6);
}

TEST_CASE("quadrature error drops by at least 3.5x when h is halved") {
  const Complex zeta{2.0, 1.0};
  double prev = 0.0;
  for (int npd : {16, 32}) {
    const auto g = build_grid(kDefaultRMax, npd);
    const ComplexArray got = integrate_out(g, power(g, Complex(-3.0, 4.0)), zeta);
    // Out(r) = r^{-1 + 4i} / (1 + zeta - 4i)
    const ComplexArray want = power(g, Complex(-1.0, 4.0)) / (1.0 + zeta - Complex(0.0, 4.0));
    const double err = max_rel_error(got, want);
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("tail model: doubling r_max barely changes decaying integrals") {
  const auto a = build_grid(1e4, 64);
  const auto b = build_grid(2e4, 64);
  for (double p : {-3.0, -4.5, -6.0}) {
    const Complex va = integrate_out(a, power(a, p), 0, Complex(0.5));
    const Complex vb = integrate_out(b, power(b, p), 0, Complex(0.5));
    CHECK(std::abs(va - vb) / std::abs(vb) < 1e-8);
  }
}

TEST_CASE("integrate_out rejects divergent tails and non-finite samples") {
  const auto g = build_grid(1e4, 64);
  CHECK_THROWS_AS(integrate_out(g, power(g, -1.0), Complex(1.0)), NumericalError);
  ComplexArray bad = power(g, -4.0);
  bad(10) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate_out(g, bad, Complex(1.0)), NumericalError);
  CHECK_THROWS_AS(integrate_in(g, bad, Complex(1.0)), NumericalError);
}

TEST_CASE("fit_tail recovers power laws and respects the floor") {
  auto g = build_grid(1e4, 64);
  auto t = fit_tail(g, power(g, Complex(-2.3, 1.1)));
  CHECK(std::abs(t.exponent - Complex(-2.3, 1.1)) < 1e-10);
  t = fit_tail(g, power(g, 0.5));
  CHECK(t.exponent.real() == doctest::Approx(0.0));
  g.tail_exponent_floor = -1.5;
  t = fit_tail(g, power(g, -1.0));
  CHECK(t.exponent.real() == doctest::Approx(-1.5));
}

TEST_CASE("finite differences are exact-to-rounding for smooth power laws") {
  const auto g = build_grid(1e4, 64);
  for (Complex p : {Complex(-2.0), Complex(-1.3, 0.8), Complex(0.5)}) {
    const ComplexArray f = power(g, p);
    const ComplexArray d1 = differentiate(g, f);
    const ComplexArray d2 = differentiate2(g, f);
    const ComplexArray e1 = p * power(g, p - 1.0);
    const ComplexArray e2 = p * (p - 1.0) * power(g, p - 2.0);
    CHECK(max_rel_error(d1, e1) < 1e-7);
    CHECK(max_rel_error(d2, e2) < 1e-6);
  }
}

TEST_CASE("fd_weights reproduce classical centred stencils") {
  Eigen::VectorXd x(3);
  x << -1.0, 0.0, 1.0;
  const Eigen::MatrixXd w = detail::fd_weights(0.0, x, 2);
  CHECK(w(0, 1) == doctest::Approx(-0.5));
  CHECK(w(2, 1) == doctest::Approx(0.5));
  CHECK(w(1, 2) == doctest::Approx(-2.0));
  CHECK(w(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("log_log_slope") {
  const auto g = build_grid(1e4, 64);
  CHECK(log_log_slope(g, power(g, -2.7), 100.0) == doctest::Approx(-2.7).epsilon(1e-10));
  CHECK_THROWS_AS(log_log_slope(g, ComplexArray::Zero(g.size()), 100.0), NumericalError);
}

TEST_CASE("integration is linear in the integrand (random property)") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  const auto g = build_grid(1e3, 32);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex a{gauss(rng), gauss(rng)}, b{gauss(rng), gauss(rng)};
    const ComplexArray f1 = power(g, Complex(-3.0 - std::abs(gauss(rng)), gauss(rng)));
    const ComplexArray f2 = power(g, Complex(-4.0, gauss(rng)));
    const Complex zeta{1.0, gauss(rng)};
    const ComplexArray lhs = integrate_in(g, ComplexArray(a * f1 + b * f2), zeta);
    const ComplexArray rhs = a * integrate_in(g, f1, zeta) + b * integrate_in(g, f2, zeta);
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-12 * (1.0 + rhs.abs().maxCoeff()));
  }
}
