#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hamel/field.hpp"
#include "hamel/flows.hpp"
#include "hamel/grid.hpp"
#include "hamel/linear_solver.hpp"
#include "hamel/solver.hpp"

using namespace hamel;

namespace {

SolveResult small_branch_solve(int npd = 64) {
  SolverConfig cfg;
  cfg.cutoff = 8;
  cfg.grid.nodes_per_decade = npd;
  BoundarySpectrum b = BoundarySpectrum::zero(cfg.cutoff);
  b.vtheta(1) = 0.01;
  b.vr(2) = 0.01;
  return picard_solve({2.5, 0.2}, b, cfg);
}

}  // namespace

TEST_CASE("zero perturbation reconstructs the reference flow") {
  const RadialGrid grid = build_grid(100.0, 32);
  const ReferenceFlow flow{2.5, 0.3};
  const SpectralSolution s = SpectralSolution::zero(grid, flow, 4);
  const PhysicalField f = reconstruct(s);
  CHECK(f.theta.size() == 16);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const PolarVelocity ref = ref_velocity(flow, grid.radius(j));
    CHECK((f.ur.row(j) - ref.radial).abs().maxCoeff() == 0.0);
    CHECK((f.utheta.row(j) - ref.angular).abs().maxCoeff() == 0.0);
    CHECK(f.vorticity.row(j).abs().maxCoeff() == 0.0);
  }
  CHECK(ns_residual(s) == 0.0);
  CHECK(asymptotic_circulation(s) == 0.3);
}

TEST_CASE("axisymmetric stream function gives the expected velocity and vorticity") {
  const RadialGrid grid = build_grid(100.0, 64);
  SpectralSolution s = SpectralSolution::zero(grid, {2.5, 0.3}, 2);
  const RealArray& r = grid.radius;
  s.gamma.row(0) = r.inverse().cast<Complex>();
  s.dgamma.row(0) = (-r.square().inverse()).cast<Complex>();
  s.w.row(0) = (-r.cube().inverse()).cast<Complex>();
  s.dw.row(0) = (3.0 * r.pow(-4.0)).cast<Complex>();
  const PhysicalField f = reconstruct(s, 12);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    CHECK((f.utheta.row(j) - (0.3 / r(j) + 1.0 / (r(j) * r(j)))).abs().maxCoeff() < 1e-15);
    CHECK((f.vorticity.row(j) + 1.0 / (r(j) * r(j) * r(j))).abs().maxCoeff() < 1e-15);
  }
  // Curl of the reconstructed velocity by finite differences agrees with w = -Lap gamma.
  const ComplexArray ru = (r * f.utheta.col(0)).cast<Complex>();
  const ComplexArray curl = differentiate(grid, ru) / r.cast<Complex>();
  for (Eigen::Index j = 4; j + 4 < grid.size(); ++j)
    CHECK(std::abs(curl(j).real() - f.vorticity(j, 0)) < 1e-9 / (r(j) * r(j) * r(j)) + 1e-14);
}

TEST_CASE("converged solve: trace, divergence, residual, circulation") {
  const SolveResult res = small_branch_solve();
  REQUIRE(res.report.converged);
  const BoundaryTrace trace = velocity_trace(res.solution, 0, 64);
  BoundarySpectrum b = BoundarySpectrum::zero(8);
  b.vtheta(1) = 0.01;
  b.vr(2) = 0.01;
  const BoundaryTrace expected = synthesize_trace(b, 2.5, 0.2, 64);
  double err = 0.0;
  for (int k = 0; k < 64; ++k) {
    err = std::max(err, std::abs(trace.ur[k] - expected.ur[k]));
    err = std::max(err, std::abs(trace.utheta[k] - expected.utheta[k]));
  }
  CHECK(err < 1e-6);
  CHECK(divergence_residual(res.solution) < 1e-6);
  CHECK(ns_residual(res.solution) < 1e-4);
  CHECK(asymptotic_circulation(res.solution) == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("corrupting one mode raises the residual tenfold") {
  const SolveResult res = small_branch_solve();
  REQUIRE(res.report.converged);
  const double base = ns_residual(res.solution);
  SpectralSolution bad = res.solution;
  bad.gamma.row(2) *= 1.01;
  bad.dgamma.row(2) *= 1.01;
  CHECK(ns_residual(bad) >= 10.0 * base);
}

TEST_CASE("residual shrinks under grid refinement") {
  const double coarse = ns_residual(small_branch_solve(32).solution);
  const double fine = ns_residual(small_branch_solve(64).solution);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("decay fit on a converged solve") {
  const SolveResult res = small_branch_solve();
  REQUIRE(res.report.converged);
  const double alpha = res.report.alpha;
  const DecayProfile d = decay_fit(res.solution, alpha);
  int fitted = 0;
  for (const ModeDecay& m : d.modes) {
    if (m.skipped) continue;
    ++fitted;
    CHECK(std::isfinite(m.slope));
    CHECK(m.slope <= -alpha + 0.05);
  }
  CHECK(fitted >= 3);
  CHECK(d.beta1 > 0.0);
}

TEST_CASE("zero mode of a branch member decays like r^(2 - flux)") {
  SolverConfig cfg;
  cfg.cutoff = 4;
  cfg.grid.r_max = 1e8;
  BoundarySpectrum b = BoundarySpectrum::zero(cfg.cutoff);
  b.vtheta(0) = 0.05;  // mu = 0.15 against mu0 = 0.2
  const SolveResult res = picard_solve({2.5, 0.15}, b, cfg);
  REQUIRE(res.report.converged);
  const double slope = log_log_slope(res.solution.grid, res.solution.gamma.row(0).transpose(), 1e6);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("predicted decay ceilings") {
  const ReferenceFlow flow{2.5, 0.2};
  CHECK(predicted_decay(flow, 0, 0.4) == doctest::Approx(-0.5));
  const ModeExponents e = mode_exponents(flow, 2);
  CHECK(predicted_decay(flow, 2, 0.4) == doctest::Approx(std::max({-2.0, e.decaying.real() + 2.0, -0.8})));
}

TEST_CASE("field csv layout") {
  const RadialGrid grid = build_grid(10.0, 32);
  const PhysicalField f = reconstruct(SpectralSolution::zero(grid, {1.0, 2.0}, 1), 8);
  std::ostringstream os;
  write_field_csv(os, f);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "r,theta,u_r,u_theta,w");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == grid.size() * 8);
}
