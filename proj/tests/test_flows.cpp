#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hamel/flows.hpp"

using namespace hamel;

TEST_CASE("hamel_velocity closed forms") {
  auto v = hamel_velocity({1.0, 0.0, 0.0}, 2.0, 0.7);
  CHECK(v.radial == doctest::Approx(-0.5));
  CHECK(v.angular == doctest::Approx(0.0));
  v = hamel_velocity({0.0, 1.0, 0.0}, 1.0, 0.0);
  CHECK(v.radial == doctest::Approx(0.0));
  CHECK(v.angular == doctest::Approx(1.0));
  v = hamel_velocity({3.0, 1.0, 2.0}, 2.0, 0.0);
  CHECK(v.radial == doctest::Approx(-1.5));
  CHECK(v.angular == doctest::Approx(1.0));
  CHECK_THROWS_AS(hamel_velocity({1.0, 0.0, 0.0}, 0.5, 0.0), InvalidInput);
}

TEST_CASE("hamel swirl vanishes at infinity iff swirl = 0 or flux > 1") {
  CHECK(std::abs(hamel_velocity({1.5, 0.0, 1.0}, 1e12, 0.0).angular) < 1e-5);
  CHECK(std::abs(hamel_velocity({0.5, 0.0, 1.0}, 1e12, 0.0).angular) > 1.0);
  CHECK(std::abs(hamel_velocity({0.5, 0.0, 0.0}, 1e12, 0.0).angular) < 1e-10);
}

TEST_CASE("ref_velocity") {
  auto v = ref_velocity({0.0, 0.0}, 7.0);
  CHECK(v.radial == 0.0);
  CHECK(v.angular == 0.0);
  v = ref_velocity({2.0, 3.0}, 1.0);
  CHECK(v.radial == doctest::Approx(-2.0));
  CHECK(v.angular == doctest::Approx(3.0));
  v = ref_velocity({2.5, 0.3}, 10.0);
  CHECK(v.radial == doctest::Approx(-0.25));
  CHECK(v.angular == doctest::Approx(0.03));
}

TEST_CASE("mode exponents: frozen values") {
  auto e = mode_exponents({0.0, 0.0}, 1);
  CHECK(e.growing.real() == doctest::Approx(1.0));
  CHECK(e.decaying.real() == doctest::Approx(-1.0));
  e = mode_exponents({3.0, 0.0}, 0);
  CHECK(std::abs(e.growing) < 1e-15);
  CHECK(e.decaying.real() == doctest::Approx(-3.0));
  e = mode_exponents({0.0, 4.0 * std::sqrt(3.0)}, 1);
  CHECK(e.decaying.real() == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(e.decaying.imag() == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("mode exponents: Vieta identities and sign structure on a random sweep") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> flux(0.0, 5.0), circ(-10.0, 10.0);
  std::uniform_int_distribution<int> mode(-64, 64);
  for (int trial = 0; trial < 2000; ++trial) {
    const ReferenceFlow f{flux(rng), circ(rng)};
    const int n = mode(rng);
    const auto e = mode_exponents(f, n);
    const Complex sum = e.growing + e.decaying;
    const Complex prod = e.growing * e.decaying;
    const Complex want{-static_cast<double>(n) * n, -static_cast<double>(n) * f.circulation};
    CHECK(std::abs(sum + f.flux) <= 1e-12 * std::max(1.0, f.flux));
    CHECK(std::abs(prod - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    CHECK(e.growing.real() >= 0.0);
    CHECK(e.decaying.real() < 0.0);
    if (n != 0) CHECK(e.growing.real() > 0.0);
    const auto c = mode_exponents(f, -n);
    CHECK(std::abs(c.growing - std::conj(e.growing)) < 1e-12 * (1.0 + std::abs(e.growing)));
    CHECK(std::abs(e.growing.real() - growing_real_part(f, n)) <= 1e-12 * (1.0 + std::abs(e.growing)));
    CHECK(std::abs(e.decaying.real() - decaying_real_part(f, n)) <= 1e-12 * (1.0 + std::abs(e.decaying)));
  }
}

TEST_CASE("decay rate is monotone in |n| and exponents scale like 1 + |n|") {
  double lo = 1e300, hi = 0.0;
  for (double flux = 0.0; flux <= 4.0; flux += 0.5) {
    for (double circ = -8.0; circ <= 8.0; circ += 2.0) {
      const ReferenceFlow f{flux, circ};
      double prev = -decaying_real_part(f, 0);
      for (int n = 1; n <= 64; ++n) {
        const double cur = -decaying_real_part(f, n);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
        const auto e = mode_exponents(f, n);
        for (Complex z : {e.growing, e.decaying}) {
          lo = std::min(lo, std::abs(z) / (1.0 + n));
          hi = std::max(hi, std::abs(z) / (1.0 + n));
        }
      }
    }
  }
  CHECK(lo > 0.05);
  CHECK(hi < 10.0);
}

TEST_CASE("rho and alpha window") {
  CHECK(rho_decay({0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(rho_decay({3.0, 0.0}) == doctest::Approx((3.0 + std::sqrt(13.0)) / 2.0).epsilon(1e-13));
  CHECK(rho_decay({0.0, 4.0 * std::sqrt(3.0)}) == doctest::Approx(2.0).epsilon(1e-13));
  auto w = alpha_window({0.0, 0.0});
  CHECK(w.alpha_star == doctest::Approx(-0.5));
  CHECK_FALSE(w.feasible);
  w = alpha_window({3.0, 0.0});
  CHECK(w.alpha_star == doctest::Approx(0.5));
  CHECK(w.feasible);
  // rho = 2 up to rounding: the window is empty or degenerate.
  w = alpha_window({0.0, 4.0 * std::sqrt(3.0)});
  CHECK(std::abs(w.alpha_star) < 1e-14);
}

TEST_CASE("existence condition: frozen cases") {
  CHECK(existence_condition(0.0, 6.94));
  CHECK_FALSE(existence_condition(0.0, 6.92));
  CHECK(existence_condition(2.0, 0.0));
  CHECK(existence_condition(1.5, 0.01));
  CHECK_FALSE(existence_condition(1.5, 0.0));
  CHECK_THROWS_AS(existence_condition(-0.1, 1.0), InvalidInput);
}

TEST_CASE("existence condition agrees with rho > 2 away from the boundary curve") {
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double flux = 4.0 * i / 99.0;
      const double circ = -12.0 + 24.0 * j / 99.0;
      const double rho = rho_decay({flux, circ});
      if (std::abs(rho - 2.0) < 1e-9) continue;
      CHECK(existence_condition(flux, circ) == (rho > 2.0));
      ++compared;
    }
  }
  CHECK(compared > 9900);
}

TEST_CASE("flux and circulation of sampled traces") {
  const int m = 32;
  std::vector<double> ur(m), ut(m);
  for (int j = 0; j < m; ++j) {
    ur[j] = -2.0;
    ut[j] = 3.0;
  }
  auto f = flux_circulation(ur, ut);
  CHECK(f.flux == doctest::Approx(2.0));
  CHECK(f.circulation == doctest::Approx(3.0));

  for (int j = 0; j < m; ++j) {
    const double th = kTwoPi * j / m;
    ur[j] = -1.0 + 0.1 * std::cos(th);
    ut[j] = 0.0;
  }
  f = flux_circulation(ur, ut);
  CHECK(f.flux == doctest::Approx(1.0));
  CHECK(std::abs(f.circulation) < 1e-15);

  for (int j = 0; j < m; ++j) {
    const auto v = hamel_velocity({2.5, 0.3, 0.0}, 1.0, kTwoPi * j / m);
    ur[j] = v.radial;
    ut[j] = v.angular;
  }
  f = flux_circulation(ur, ut);
  CHECK(f.flux == doctest::Approx(2.5));
  CHECK(f.circulation == doctest::Approx(0.3));

  std::vector<double> few(7, 0.0);
  CHECK_THROWS_AS(flux_circulation(few, few), InvalidInput);
  std::vector<double> other(9, 0.0);
  CHECK_THROWS_AS(flux_circulation(ur, other), InvalidInput);
}
