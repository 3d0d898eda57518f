#include "hamel/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "hamel/field.hpp"
#include "hamel/flows.hpp"
#include "hamel/linear_solver.hpp"
#include "hamel/solver.hpp"
#include "hamel/uniqueness.hpp"

namespace hamel {

namespace {

template <typename Body>
CheckResult timed(std::string name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult res;
  res.name = std::move(name);
  try {
    body(res);
  } catch (const std::exception& e) {
    res.passed = false;
    res.summary = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

ComplexArray power(const RadialGrid& g, Complex p) {
  ComplexArray out(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) out(j) = std::exp(p * g.log_radius(j));
  return out;
}

double rel_err(const ComplexArray& got, const ComplexArray& want) {
  return (got - want).abs().maxCoeff() / want.abs().maxCoeff();
}

BoundarySpectrum acceptance_boundary(int cutoff, double amplitude) {
  BoundarySpectrum b = BoundarySpectrum::zero(cutoff);
  b.vtheta(1) = amplitude;
  b.vr(2) = amplitude;
  return b;
}

Eigen::Index node_at(const RadialGrid& g, double r) {
  Eigen::Index j = 0;
  while (j < g.last() && g.radius(j) < r * (1.0 - 1e-12)) ++j;
  return j;
}

double trace_difference(const BoundaryTrace& a, const BoundaryTrace& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.ur.size(); ++k)
    d = std::max({d, std::abs(a.ur[k] - b.ur[k]), std::abs(a.utheta[k] - b.utheta[k])});
  return d;
}

}  // namespace

double mode_ode_residual(const RadialGrid& g, const ReferenceFlow& f, int n, const ComplexArray& gamma,
                         const ComplexArray& w, const ComplexArray& dw, const ComplexArray& source) {
  const ComplexArray r = g.radius.cast<Complex>();
  const double nn = n;
  const ComplexArray dgamma = differentiate(g, gamma);
  const ComplexArray gxx = differentiate2(g, gamma);
  const ComplexArray wxx = differentiate(g, dw);
  const Complex c{nn * nn, nn * f.circulation};
  const ComplexArray t1 = gxx, t2 = dgamma / r, t3 = -nn * nn * gamma / (r * r), t4 = w;
  const ComplexArray s1 = wxx, s2 = (f.flux + 1.0) * dw / r, s3 = -c * w / (r * r), s4 = -source;
  const Eigen::Index lo = 4, len = g.size() - 8;
  const RealArray res1 = (t1 + t2 + t3 + t4).abs().segment(lo, len);
  const RealArray sc1 = (t1.abs() + t2.abs() + t3.abs() + t4.abs()).segment(lo, len);
  const RealArray res2 = (s1 + s2 + s3 + s4).abs().segment(lo, len);
  const RealArray sc2 = (s1.abs() + s2.abs() + s3.abs() + s4.abs()).segment(lo, len);
  // A mode that vanishes identically has zero residual.
  return std::max((res1 / sc1.max(1e-300)).maxCoeff(), (res2 / sc2.max(1e-300)).maxCoeff());
}

CheckResult check_existence_threshold() {
  return timed("existence threshold at flux 0", [](CheckResult& res) {
    const double exact = 4.0 * std::sqrt(3.0);
    double worst = 0.0;
    for (double sign : {1.0, -1.0}) {
      double inside = sign * 8.0, outside = sign * 6.0;
      if (!existence_condition(0.0, inside) || existence_condition(0.0, outside))
        throw NumericalError("bracket does not straddle the threshold");
      for (int it = 0; it < 200 && std::abs(inside - outside) > 1e-13; ++it) {
        const double mid = 0.5 * (inside + outside);
        (existence_condition(0.0, mid) ? inside : outside) = mid;
      }
      worst = std::max(worst, std::abs(std::abs(0.5 * (inside + outside)) - exact));
    }
    res.metrics = {{"threshold_error", worst}};
    res.passed = worst < 1e-9;
    res.summary = "flip located within " + fmt(worst) + " of 4 sqrt 3";
  });
}

CheckResult check_exponent_identities() {
  return timed("exponent identities", [](CheckResult& res) {
    double vieta = 0.0, closed = 0.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const ReferenceFlow f{5.0 * i / 49.0, -10.0 + 20.0 * j / 49.0};
        for (int n = -32; n <= 32; ++n) {
          const ModeExponents e = mode_exponents(f, n);
          const Complex prod_want{-double(n) * n, -double(n) * f.circulation};
          vieta = std::max(vieta, std::abs(e.growing + e.decaying + f.flux) / std::max(1.0, f.flux));
          vieta = std::max(vieta, std::abs(e.growing * e.decaying - prod_want) / std::max(1.0, std::abs(prod_want)));
          closed = std::max(closed, std::abs(e.growing.real() - growing_real_part(f, n)) / (1.0 + std::abs(e.growing)));
          closed = std::max(closed, std::abs(e.decaying.real() - decaying_real_part(f, n)) / (1.0 + std::abs(e.decaying)));
        }
      }
    }
    res.metrics = {{"vieta_rel_error", vieta}, {"real_part_rel_error", closed}};
    res.passed = vieta <= 1e-12 && closed <= 1e-12;
    res.summary = "Vieta " + fmt(vieta) + ", closed forms " + fmt(closed);
  });
}

CheckResult check_manufactured_oracles() {
  return timed("manufactured linear-solver oracles", [](CheckResult& res) {
    struct Case { int n; double flux, circ, a; };
    double worst = 0.0, worst_gain = 1e300;
    auto record = [&](double coarse, double fine) {
      worst = std::max(worst, coarse);
      worst_gain = std::min(worst_gain, coarse / fine);
    };
    for (Case cs : {Case{1, 2.5, 0.3, 2.5}, Case{2, 2.5, 0.0, 3.0}, Case{3, 3.0, 1.0, 4.0}}) {
      const ReferenceFlow f{cs.flux, cs.circ};
      const ModeExponents e = mode_exponents(f, cs.n);
      const Complex c = cs.a * cs.a - cs.a * cs.flux - Complex(cs.n * cs.n, cs.n * cs.circ);
      double err[2];
      for (int k = 0; k < 2; ++k) {
        const RadialGrid g = build_grid(kDefaultRMax, kDefaultNodesPerDecade << k);
        const ModeProfile p = solve_w_particular(g, f, cs.n, c * power(g, -(cs.a + 2.0)));
        const ComplexArray want =
            -power(g, -cs.a) + (c / e.discriminant_root) * power(g, e.decaying) / (cs.a + e.decaying);
        err[k] = rel_err(p.value, want);
      }
      record(err[0], err[1]);
      res.metrics.push_back({"n" + std::to_string(cs.n) + "_error", err[0]});
      res.metrics.push_back({"n" + std::to_string(cs.n) + "_refinement_gain", err[0] / err[1]});
    }
    // Zero mode: F = a (a - flux) s^-(a+2) reproduces r^-a exactly.
    const double flux = 2.5, a = 3.0;
    double err[2];
    for (int k = 0; k < 2; ++k) {
      const RadialGrid g = build_grid(kDefaultRMax, kDefaultNodesPerDecade << k);
      const ModeProfile p = solve_w_zero(g, {flux, 0.0}, a * (a - flux) * power(g, -(a + 2.0)));
      err[k] = rel_err(p.value, power(g, -a));
    }
    record(err[0], err[1]);
    res.metrics.push_back({"n0_error", err[0]});
    res.metrics.push_back({"n0_refinement_gain", err[0] / err[1]});
    res.metrics.push_back({"max_error", worst});
    res.metrics.push_back({"min_refinement_gain", worst_gain});
    res.passed = worst < 1e-6 && worst_gain >= 3.5;
    res.summary = "max rel error " + fmt(worst) + ", min gain on halving h " + fmt(worst_gain);
  });
}

CheckResult check_ode_residuals(std::uint64_t seed) {
  return timed("mode ODE residuals", [seed](CheckResult& res) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const RadialGrid g = build_grid(kDefaultRMax, kDefaultNodesPerDecade);
    const int cutoff = 8;
    double worst = 0.0;
    int modes = 0;
    struct Case { double flux, circ, mu0; };
    for (Case cs : {Case{2.5, 0.15, 0.2}, Case{1.0, 5.0, 5.0}, Case{3.0, 1.0, 1.3}, Case{0.0, 8.0, 8.0},
                    Case{16.0 / 5.0, 0.0, 0.1} /* resonant for n = 3 */}) {
      LinearSolveInput in;
      in.flow = {cs.flux, cs.circ};
      in.target_circulation = cs.mu0;
      in.boundary = BoundarySpectrum::zero(cutoff);
      in.boundary.vtheta(0) = cs.mu0 - cs.circ;
      for (int n = 1; n <= cutoff; ++n) {
        in.boundary.vr(n) = 0.01 * Complex(gauss(rng), gauss(rng)) / double(n * n);
        in.boundary.vtheta(n) = 0.01 * Complex(gauss(rng), gauss(rng)) / double(n * n);
      }
      in.sources = ModeTable(cutoff + 1, g.size());
      for (int n = 0; n <= cutoff; ++n)
        in.sources.row(n) =
            (Complex(gauss(rng), n == 0 ? 0.0 : gauss(rng)) * power(g, Complex(-5.5, 0.3 * n))).transpose();
      in.sources.row(0) = in.sources.row(0).real().cast<Complex>();
      const SpectralSolution s = solve_linear(g, in);
      for (int n = 0; n <= cutoff; ++n) {
        worst = std::max(worst, mode_ode_residual(g, in.flow, n, s.gamma.row(n).transpose(), s.w.row(n).transpose(),
                                                  s.dw.row(n).transpose(), in.sources.row(n).transpose()));
        ++modes;
      }
    }
    res.metrics = {{"max_residual", worst}, {"modes_checked", double(modes)}, {"seed", double(seed)}};
    res.passed = worst < 1e-4;
    res.summary = std::to_string(modes) + " assembled modes, max residual " + fmt(worst);
  });
}

CheckResult check_branch_nonuniqueness() {
  return timed("non-uniqueness branch at flux 2.5", [](CheckResult& res) {
    const SolverConfig cfg;
    const double flux = 2.5, mu0 = 0.2;
    const std::vector<double> mus{0.15, 0.2, 0.25};
    const BoundaryTrace trace = synthesize_trace(acceptance_boundary(cfg.cutoff, 0.01), flux, mu0, 4 * cfg.cutoff + 4);
    const auto members = branch_sweep(flux, mu0, mus, trace, cfg);
    bool all_ok = true;
    double trace_diff = 0.0, field_diff = 1e300, circ_err = 0.0;
    std::vector<BoundaryTrace> at_one, at_ten;
    for (const auto& m : members) {
      all_ok = all_ok && m.ok;
      if (!m.ok) continue;
      const SpectralSolution& s = m.result.solution;
      at_one.push_back(velocity_trace(s, 0, 64));
      at_ten.push_back(velocity_trace(s, node_at(s.grid, 10.0), 64));
      circ_err = std::max(circ_err, std::abs(asymptotic_circulation(s) - m.mu) / std::abs(m.mu));
    }
    for (std::size_t a = 0; a < at_one.size(); ++a)
      for (std::size_t b = a + 1; b < at_one.size(); ++b) {
        trace_diff = std::max(trace_diff, trace_difference(at_one[a], at_one[b]));
        field_diff = std::min(field_diff, trace_difference(at_ten[a], at_ten[b]));
      }
    res.metrics = {{"members_converged", all_ok ? 1.0 : 0.0},
                   {"trace_sup_difference", trace_diff},
                   {"field_sup_difference_r10_min", field_diff},
                   {"circulation_rel_error", circ_err}};
    res.passed = all_ok && members.size() == 3 && trace_diff < 1e-6 && field_diff > 1e-3 && circ_err < 0.05;
    res.summary = "trace diff " + fmt(trace_diff) + ", field diff at r=10 " + fmt(field_diff) +
                  ", circulation error " + fmt(100.0 * circ_err) + "%";
  });
}

CheckResult check_shooting_scaling() {
  return timed("shooting closure at flux 1", [](CheckResult& res) {
    const SolverConfig cfg;
    double shift[2];
    const double eps[2] = {1e-2, 5e-3};
    for (int k = 0; k < 2; ++k) {
      const BoundaryTrace t = synthesize_trace(acceptance_boundary(cfg.cutoff, eps[k]), 1.0, 5.0, 4 * cfg.cutoff + 4);
      const SolveResult r = shoot_mu(1.0, 5.0, t, cfg);
      if (!r.report.converged) throw NumericalError("shooting did not converge: " + r.report.message);
      shift[k] = std::abs(r.report.mu_final - 5.0);
      res.metrics.push_back({"mu_shift_eps" + std::to_string(k), shift[k]});
    }
    const double ratio = shift[0] / shift[1];
    res.metrics.push_back({"ratio", ratio});
    res.passed = ratio >= 2.0 && ratio <= 8.0;
    res.summary = "|mu - mu0| = " + fmt(shift[0]) + ", " + fmt(shift[1]) + ", ratio " + fmt(ratio);
  });
}

CheckResult check_decay_rates() {
  return timed("decay diagnostics", [](CheckResult& res) {
    // Homogeneous modes on a long grid, fitted over the last two decades.
    const RadialGrid g = build_grid(1e8, kDefaultNodesPerDecade);
    const ReferenceFlow f{2.5, 0.0};
    const ModeProfile none = ModeProfile::zero(g.size());
    double worst_w = 0.0, worst_gamma = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const ModeConstants c = boundary_constants(f, n, 0.0, 0.0, 0.0, 0.01);
      const AssembledMode a = assemble_mode(g, f, c, none, none);
      const Complex z = mode_exponents(f, n).decaying;
      worst_w = std::max(worst_w, std::abs(log_log_slope(g, a.w.value, 1e6) - z.real()));
      worst_gamma = std::max(worst_gamma,
                             std::abs(log_log_slope(g, a.gamma.value, 1e6) - std::max(-double(n), z.real() + 2.0)));
    }
    // Nonlinear solve: every fitted slope within the decay ceiling.
    const SolverConfig cfg;
    const SolveResult r = picard_solve({2.5, 0.2}, acceptance_boundary(cfg.cutoff, 0.01), cfg);
    if (!r.report.converged) throw NumericalError("nonlinear solve did not converge");
    double worst_excess = -1e300;
    int fitted = 0;
    for (const ModeDecay& m : r.report.decay.modes) {
      if (m.skipped) continue;
      ++fitted;
      worst_excess = std::max(worst_excess, m.slope + r.report.alpha);
    }
    res.metrics = {{"homogeneous_w_slope_error", worst_w},
                   {"homogeneous_gamma_slope_error", worst_gamma},
                   {"nonlinear_max_slope_plus_alpha", worst_excess},
                   {"nonlinear_modes_fitted", double(fitted)},
                   {"alpha", r.report.alpha}};
    res.passed = worst_w < 0.05 && worst_gamma < 0.05 && fitted > 0 && worst_excess <= 0.05;
    res.summary = "homogeneous slope errors " + fmt(worst_w) + " (w), " + fmt(worst_gamma) +
                  " (gamma); nonlinear max slope + alpha " + fmt(worst_excess);
  });
}

CheckResult check_hardy_suite(std::uint64_t seed, int profiles) {
  return timed("refined Hardy inequality", [seed, profiles](CheckResult& res) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < profiles; ++i) {
      const double upper = std::pow(10.0, 0.3 + 3.7 * (i % 11) / 10.0);
      const HermiteProfile w = random_hermite(rng, upper, 1 + i % 15);
      for (double alpha : {2.0, 3.0, 4.0}) {
        const HardyResult h = hardy_check(w, alpha);
        if (!h.ok) ++violations;
        if (h.rhs > 0.0) worst = std::max(worst, h.lhs / h.rhs);
      }
    }
    const double sharp = hardy_sharpness_ratio(3.0, 1e6);
    res.metrics = {{"profiles", double(profiles)},
                   {"violations", double(violations)},
                   {"max_ratio_random", worst},
                   {"sharpness_ratio", sharp},
                   {"seed", double(seed)}};
    res.passed = violations == 0 && sharp > 0.9;
    res.summary = std::to_string(profiles) + " profiles x 3 weights, " + std::to_string(violations) +
                  " violations, sharpness ratio " + fmt(sharp);
  });
}

CheckResult check_poincare_suite(std::uint64_t seed, int streams) {
  return timed("angular Poincare-Wirtinger", [seed, streams](CheckResult& res) {
    std::mt19937_64 rng(seed);
    const Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(400, 1.0, 100.0);
    int failures = 0;
    double margin = 1e300;
    for (int i = 0; i < streams; ++i) {
      const PoincareResult p = poincare_wirtinger_check(random_stream(rng, {2, 3, 4, 7}, 100.0), radii);
      if (!p.ok) ++failures;
      margin = std::min({margin, p.margin_theta, p.margin_mixed});
    }
    res.metrics = {{"streams", double(streams)}, {"failures", double(failures)}, {"min_margin", margin},
                   {"seed", double(seed)}};
    res.passed = failures == 0;
    res.summary = std::to_string(streams) + " streams, " + std::to_string(failures) + " failures";
  });
}

CheckResult check_qform_suite(std::uint64_t seed, int streams) {
  return timed("quadratic-form decomposition and positivity", [seed, streams](CheckResult& res) {
    std::mt19937_64 rng(seed);
    double identity = 0.0, constant = 1e300, q1_min = 1e300;
    int q1_fail = 0, sup1_fail = 0;
    for (int i = 0; i < streams; ++i) {
      const TestStream s = random_stream(rng, {1, 2, 3, 5}, 100.0);
      for (double flux : {2.1, 2.5, 3.0}) {
        const QFormResult q = q_form(flux, s);
        identity = std::max(identity, q.decomposition_error);
        q1_min = std::min(q1_min, q.q_1 / q.scale);
        if (!q.q1_ok) ++q1_fail;
        if (!q.sup1_ok) ++sup1_fail;
        constant = std::min(constant, q.constant);
      }
    }
    double root_err = 0.0;
    for (double flux : {2.2, 2.5, 3.0}) {
      const auto roots = positivity_roots(flux);
      if (roots.size() != 2) {
        root_err = 1e300;
        continue;
      }
      root_err = std::max({root_err, std::abs(roots[0] - 3.0), std::abs(roots[1] - (2.0 * flux - 1.0))});
    }
    res.metrics = {{"streams", double(streams)},          {"identity_error", identity},
                   {"q1_failures", double(q1_fail)},       {"min_q1_over_scale", q1_min},
                   {"sup1_failures", double(sup1_fail)},   {"min_constant", constant},
                   {"positivity_root_error", root_err},    {"seed", double(seed)}};
    res.passed = identity < 1e-10 && q1_fail == 0 && sup1_fail == 0 && constant >= 0.2 && root_err < 1e-9;
    res.summary = "identity " + fmt(identity) + ", constant " + fmt(constant) + ", root error " + fmt(root_err) +
                  ", " + std::to_string(q1_fail + sup1_fail) + " positivity failures";
  });
}

CheckResult check_ns_refinement() {
  return timed("end-to-end NS residual", [](CheckResult& res) {
    double worst = 0.0;
    std::vector<double> by_npd;
    for (int npd : {32, 64}) {
      SolverConfig cfg;
      cfg.grid.nodes_per_decade = npd;
      const SolveResult r = picard_solve({2.5, 0.2}, acceptance_boundary(cfg.cutoff, 0.01), cfg);
      if (!r.report.converged) throw NumericalError("solve at npd " + std::to_string(npd) + " did not converge");
      worst = std::max(worst, r.report.ns_residual);
      by_npd.push_back(r.report.ns_residual);
    }
    // Other converged solves of the suite: branch members and the shooting case.
    const SolverConfig cfg;
    const BoundaryTrace branch_trace = synthesize_trace(acceptance_boundary(cfg.cutoff, 0.01), 2.5, 0.2, 68);
    for (const auto& m : branch_sweep(2.5, 0.2, {0.15, 0.25}, branch_trace, cfg))
      if (m.ok) worst = std::max(worst, m.result.report.ns_residual);
    const BoundaryTrace shoot_trace = synthesize_trace(acceptance_boundary(cfg.cutoff, 0.01), 1.0, 5.0, 68);
    const SolveResult s = shoot_mu(1.0, 5.0, shoot_trace, cfg);
    if (s.report.converged) worst = std::max(worst, s.report.ns_residual);
    const double gain = by_npd[0] / by_npd[1];
    res.metrics = {{"max_ns_residual", worst}, {"residual_npd32", by_npd[0]}, {"residual_npd64", by_npd[1]},
                   {"refinement_gain", gain}};
    res.passed = worst < 1e-4 && gain >= 3.5;
    res.summary = "max residual " + fmt(worst) + ", gain on halving h " + fmt(gain);
  });
}

CheckResult check_q1_probe(double flux, int samples, std::uint64_t seed) {
  return timed("q1 negativity probe", [=](CheckResult& res) {
    const ProbeResult p = probe_q1_negative(flux, samples, seed);
    res.informational = true;
    res.passed = true;
    res.metrics = {{"flux", flux},
                   {"samples", double(p.samples)},
                   {"found", p.found ? 1.0 : 0.0},
                   {"min_ratio", p.min_ratio},
                   {"seed", double(seed)}};
    res.summary = p.found ? "negative q1 found after " + std::to_string(p.samples) + " samples"
                          : "inconclusive: no negative q1 in " + std::to_string(p.samples) +
                                " samples (min ratio " + fmt(p.min_ratio) + ")";
  });
}

}  // namespace hamel
