#include <doctest.h>

#include <cmath>
#include <random>

#include "hamel/uniqueness.hpp"

using namespace hamel;

namespace {

StreamMode single_mode(int k, const BumpProfile& b, Complex amp = 1.0) {
  StreamMode m;
  m.k = k;
  m.amplitude = amp;
  m.coeffs = {1.0};
  m.bumps = {b};
  return m;
}

BumpProfile plain_bump(double a, double b) {
  Eigen::VectorXd shape(2);
  shape << 1.0, 0.5;
  return {a, b, shape / std::pow(b - a, 6)};
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const QuadratureRule q = gauss_legendre(6);
  CHECK(q.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  for (int p = 0; p <= 11; ++p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < q.nodes.size(); ++i) s += q.weights(i) * std::pow(q.nodes(i), p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
  CHECK_THROWS_AS(gauss_legendre(0), InvalidInput);
}

TEST_CASE("hermite profile interpolates values and slopes") {
  Eigen::VectorXd k(3), v(3), s(3);
  k << 1.0, 2.0, 4.0;
  v << 0.0, 1.5, 0.0;
  s << 2.0, -1.0, 0.5;
  HermiteProfile h(k, v, s);
  for (int i = 0; i < 3; ++i) {
    CHECK(h.eval(k(i)).value == doctest::Approx(v(i)));
    CHECK(h.eval(k(i)).d1 == doctest::Approx(s(i)));
  }
  // Second derivative against a centred difference.
  const double r = 2.7, e = 1e-5;
  CHECK(h.eval(r).d2 == doctest::Approx((h.eval(r + e).d1 - h.eval(r - e).d1) / (2 * e)).epsilon(1e-6));
  CHECK(h.eval(5.0).value == 0.0);
}

TEST_CASE("hardy_check trivial cases and errors") {
  Eigen::VectorXd k(2), z = Eigen::VectorXd::Zero(2);
  k << 1.0, 10.0;
  const HardyResult zero = hardy_check(HermiteProfile(k, z, z), 3.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.ok);
  CHECK_THROWS_AS(hardy_check(HermiteProfile(k, z, z), 1.0), InvalidInput);
  Eigen::VectorXd v(2);
  v << 0.0, 1.0;
  CHECK_THROWS_AS(hardy_check(HermiteProfile(k, v, z), 3.0), InvalidInput);
}

TEST_CASE("hardy inequality needs vanishing at the outer end") {
  // w = ln r / r with alpha = 3 and M = e^3 violates the bound; the check refuses it.
  const double upper = std::exp(3.0);
  const int n = 200;
  Eigen::VectorXd k(n), v(n), s(n);
  for (int i = 0; i < n; ++i) {
    k(i) = std::exp(3.0 * i / (n - 1));
    v(i) = std::log(k(i)) / k(i);
    s(i) = (1.0 - std::log(k(i))) / (k(i) * k(i));
  }
  k(n - 1) = upper;
  CHECK_THROWS_AS(hardy_check(HermiteProfile(k, v, s), 3.0), InvalidInput);
}

TEST_CASE("hardy_check has no violations on random admissible profiles") {
  std::mt19937_64 rng(20240601);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double upper = std::pow(10.0, 0.3 + 3.7 * (i % 11) / 10.0);
    const HermiteProfile w = random_hermite(rng, upper, 1 + i % 15);
    for (double alpha : {2.0, 3.0, 4.0}) {
      const HardyResult r = hardy_check(w, alpha);
      if (!r.ok) ++violations;
      if (r.rhs > 0) worst = std::max(worst, r.lhs / r.rhs);
    }
  }
  CHECK(violations == 0);
  CHECK(worst < 1.0);
}

TEST_CASE("hardy constant is nearly attained") {
  CHECK(hardy_sharpness_ratio(3.0, 1e6) > 0.9);
  // Longer intervals approach the constant.
  CHECK(hardy_sharpness_ratio(3.0, 1e8) > hardy_sharpness_ratio(3.0, 1e4));
  for (double alpha : {2.0, 3.0, 4.0}) {
    const double len = std::log(1e6);
    const double a1 = alpha - 1.0;
    const double expected = 1.0 / (1.0 + 4.0 * kPi * kPi / (a1 * a1 * len * len));
    CHECK(hardy_sharpness_ratio(alpha, 1e6) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("positivity_factor examples and window") {
  CHECK(std::abs(positivity_factor(3.0, 2.5)) < 1e-14);
  CHECK(std::abs(positivity_factor(4.0, 2.5)) < 1e-14);
  CHECK(positivity_factor(3.5, 2.5) == doctest::Approx(0.04).epsilon(1e-12));
  for (double flux : {2.2, 2.5, 3.0}) {
    const auto roots = positivity_roots(flux);
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - 3.0) < 1e-9);
    CHECK(std::abs(roots[1] - (2.0 * flux - 1.0)) < 1e-9);
    for (double a = 1.05; a < 2.0 * flux + 2.0; a += 0.01) {
      const bool inside = a > 3.0 + 1e-9 && a < 2.0 * flux - 1.0 - 1e-9;
      const bool outside = a < 3.0 - 1e-9 || a > 2.0 * flux - 1.0 + 1e-9;
      if (inside) CHECK(positivity_factor(a, flux) > 0.0);
      if (outside) CHECK(positivity_factor(a, flux) < 0.0);
    }
  }
}

TEST_CASE("bump profile derivatives match finite differences") {
  Eigen::VectorXd shape(3);
  shape << 1.0, -2.0, 0.7;
  for (BumpVariable var : {BumpVariable::radius, BumpVariable::log_radius}) {
    const BumpProfile b(2.0, 30.0, shape, var);
    for (double r : {2.5, 7.0, 19.0}) {
      const double e = 1e-5 * r;
      CHECK(b.eval(r).d1 == doctest::Approx((b.eval(r + e).value - b.eval(r - e).value) / (2 * e)).epsilon(1e-7));
      CHECK(b.eval(r).d2 == doctest::Approx((b.eval(r + e).d1 - b.eval(r - e).d1) / (2 * e)).epsilon(1e-7));
    }
    CHECK(b.eval(2.0).value == 0.0);
    CHECK(std::abs(b.eval(2.0 + 1e-6).d2) < 1e-4 * std::abs(b.eval(7.0).d2));
  }
  CHECK_THROWS_AS(BumpProfile(0.5, 2.0, shape), InvalidInput);
}

TEST_CASE("poincare_wirtinger examples") {
  const Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(50, 1.5, 9.5);
  const BumpProfile b = plain_bump(1.0, 10.0);
  const PoincareResult two = poincare_wirtinger_check({single_mode(2, b)}, radii);
  CHECK(two.ok);
  CHECK(std::abs(two.margin_theta) < 1e-12);
  const PoincareResult three = poincare_wirtinger_check({single_mode(3, b)}, radii);
  CHECK(three.ok);
  CHECK(three.margin_theta >= 0.0);
  // Strict at a point where the profile is nonzero: 81 > 36.
  const Eigen::VectorXd mid = Eigen::VectorXd::Constant(1, 5.0);
  const double phi = b.eval(5.0).value;
  CHECK(poincare_wirtinger_check({single_mode(3, b)}, mid).margin_theta ==
        doctest::Approx((81.0 - 36.0) * phi * phi));
  CHECK_THROWS_AS(poincare_wirtinger_check({single_mode(1, b)}, radii), InvalidInput);
}

TEST_CASE("poincare_wirtinger holds on random multi-mode streams") {
  std::mt19937_64 rng(77);
  const Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(400, 1.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const TestStream s = random_stream(rng, {2, 3, 4, 7}, 100.0);
    CHECK(poincare_wirtinger_check(s, radii).ok);
  }
}

TEST_CASE("q_form of the zero stream") {
  const QFormResult q = q_form(2.5, {});
  CHECK(q.q_plus == 0.0);
  CHECK(q.q_1 == 0.0);
  CHECK(q.q_sup1 == 0.0);
  CHECK(q.lower_bound_rhs == 0.0);
  CHECK(q.asserted);
  CHECK(!q_form(3.5, {}).asserted);
}

TEST_CASE("q_form at flux 3 reduces to twice the second-derivative energy") {
  const BumpProfile b = plain_bump(1.5, 20.0);
  const Complex amp(0.3, -1.1);
  const QFormResult q = q_form(3.0, {single_mode(1, b, amp)});
  // Independent quadrature of 2 |amp|^2 int |phi''|^2 r dr on a fine uniform grid.
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = 1.5 + (20.0 - 1.5) * (i + 0.5) / n;
    const double d2 = b.eval(r).d2;
    s += d2 * d2 * r;
  }
  s *= 2.0 * std::norm(amp) * (20.0 - 1.5) / n;
  CHECK(q.q_1 == doctest::Approx(s).epsilon(1e-8));
  CHECK(q.q_sup1 == 0.0);
  CHECK(q.decomposition_error < 1e-10);
}

TEST_CASE("q_form decomposition and positivity on random streams") {
  std::mt19937_64 rng(4242);
  double worst_identity = 0.0, min_constant = 1e300;
  int q1_fail = 0, sup1_fail = 0;
  for (int i = 0; i < 500; ++i) {
    const TestStream s = random_stream(rng, {1, 2, 3, 5}, 100.0);
    for (double flux : {2.1, 2.5, 3.0}) {
      const QFormResult q = q_form(flux, s);
      CHECK(q.asserted);
      worst_identity = std::max(worst_identity, q.decomposition_error);
      if (!q.q1_ok) ++q1_fail;
      if (!q.sup1_ok) ++sup1_fail;
      min_constant = std::min(min_constant, q.constant);
    }
  }
  CHECK(worst_identity < 1e-10);
  CHECK(q1_fail == 0);
  CHECK(sup1_fail == 0);
  CHECK(min_constant >= 0.2);
}

TEST_CASE("q_form rejects malformed streams") {
  const BumpProfile b = plain_bump(1.0, 5.0);
  CHECK_THROWS_AS(q_form(2.5, {single_mode(2, b), single_mode(2, b)}), InvalidInput);
  CHECK_THROWS_AS(q_form(2.5, {single_mode(0, b)}), InvalidInput);
}

TEST_CASE("q1 probe finds negativity only beyond flux 4") {
  const ProbeResult above = probe_q1_negative(4.5, 200, 3);
  REQUIRE(above.found);
  CHECK(q_form(4.5, above.witness).q_1 < 0.0);
  // Mode-1 energy is (4 - flux)|g'|^2 + |g''|^2 in log variables, so no witness exists here.
  const ProbeResult below = probe_q1_negative(3.2, 200, 3);
  CHECK(!below.found);
  CHECK(below.min_ratio > 0.0);
}
