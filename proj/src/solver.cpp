#include "hamel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hamel/linear_solver.hpp"
#include "hamel/nonlinearity.hpp"
#include "hamel/parallel.hpp"

namespace hamel {

void SolverConfig::validate() const {
  if (cutoff < 0) throw InvalidInput("config: cutoff must be nonnegative");
  if (!(tol_fp > 0.0)) throw InvalidInput("config: tol_fp must be positive");
  if (max_iter < 1) throw InvalidInput("config: max_iter must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw InvalidInput("config: relaxation must lie in (0, 1]");
  if (!(tol_mu > 0.0)) throw InvalidInput("config: tol_mu must be positive");
  if (max_shoot < 1) throw InvalidInput("config: max_shoot must be >= 1");
}

RadialGrid SolverConfig::make_grid() const {
  return build_grid(grid.r_max, grid.nodes_per_decade, grid.tail_exponent_floor);
}

double convergence_alpha(const ReferenceFlow& flow) {
  return std::clamp(alpha_window(flow).alpha_star, 1e-3, 1.0);
}

double increment_norm(const SpectralSolution& s, double alpha) {
  return field_norm(s.grid, s.gamma, s.dgamma, alpha, 4.0, 0);
}

namespace {

SpectralSolution difference(const SpectralSolution& a, const SpectralSolution& b) {
  SpectralSolution d = a;
  SpectralSolution nb = b;
  nb *= -1.0;
  d += nb;
  return d;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void fill_diagnostics(SolveResult& out) {
  const SpectralSolution& s = out.solution;
  SolveReport& rep = out.report;
  rep.norms.clear();
  for (int m = 0; m <= 2; ++m) rep.norms.push_back(field_norm(s.grid, s.gamma, s.dgamma, rep.alpha, 4.0, m));
  rep.decay = decay_fit(s, rep.alpha);
  rep.ns_residual = ns_residual(s);
}

}  // namespace

SolveResult picard_solve(const ReferenceFlow& flow, const BoundarySpectrum& boundary,
                         const SolverConfig& config) {
  config.validate();
  if (boundary.cutoff != config.cutoff)
    throw InvalidInput("picard_solve: boundary cutoff differs from config cutoff");
  const RadialGrid grid = config.make_grid();
  SolveResult out;
  SolveReport& rep = out.report;
  rep.alpha = convergence_alpha(flow);
  rep.mu_final = flow.circulation;
  if (!existence_condition(flow.flux, flow.circulation))
    rep.warnings.push_back("existence condition fails for this (flux, circulation); attempting anyway");

  LinearSolveInput input;
  input.flow = flow;
  input.boundary = boundary;
  input.target_circulation = flow.circulation + boundary.vtheta(0).real();

  SpectralSolution x = solve_linear(grid, input);
  auto apply = [&](const SpectralSolution& state) {
    input.sources = compute_sources(state);
    return solve_linear(grid, input);
  };

  for (int it = 1; it <= config.max_iter; ++it) {
    SpectralSolution next;
    try {
      next = apply(x);
    } catch (const NumericalError& e) {
      rep.message = std::string("iteration failed: ") + e.what();
      break;
    }
    if (config.relaxation < 1.0) {
      SpectralSolution blended = x;
      blended *= 1.0 - config.relaxation;
      next *= config.relaxation;
      next += blended;
    }
    const double inc = increment_norm(difference(next, x), rep.alpha);
    rep.iterations = it;
    rep.increment_history.push_back(inc);
    x = std::move(next);
    if (!std::isfinite(inc) ||
        inc > config.divergence_factor * std::max(rep.increment_history.front(), 1e-300)) {
      rep.message = "diverged";
      break;
    }
    if (inc < config.tol_fp) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && rep.message.empty()) rep.message = "max_iter reached";

  std::vector<double> ratios;
  for (std::size_t k = 1; k < rep.increment_history.size(); ++k)
    if (rep.increment_history[k - 1] > 0.0)
      ratios.push_back(rep.increment_history[k] / rep.increment_history[k - 1]);
  rep.contraction_ratio = median(ratios);

  out.solution = std::move(x);
  if (rep.converged) {
    rep.fixed_point_residual = increment_norm(difference(apply(out.solution), out.solution), rep.alpha);
    fill_diagnostics(out);
  }
  return out;
}

SolveResult shoot_mu(double flux, double mu0, const BoundaryTrace& trace, const SolverConfig& config) {
  config.validate();
  if (flux > 2.0) throw InvalidInput("shoot_mu: requires flux <= 2 (use picard_solve or branch_sweep)");
  if (!existence_condition(flux, mu0))
    throw InvalidInput("shoot_mu: existence condition fails for (flux, mu0)");

  // g(mu) = mu0 + gamma_0'(1) - mu; the fixed-point map is mu + g(mu).
  auto evaluate = [&](double mu, SolveResult& res) {
    const BoundarySpectrum b = project_boundary(trace, config.cutoff, flux, mu);
    res = picard_solve({flux, mu}, b, config);
    if (!res.report.converged)
      throw NumericalError("shoot_mu: inner Picard failed at mu = " + std::to_string(mu) + " (" +
                           res.report.message + ")");
    return mu0 + res.solution.dgamma(0, 0).real() - mu;
  };

  std::vector<double> history;
  SolveResult current;
  double mu = mu0;
  double g = evaluate(mu, current);
  history.push_back(mu);
  double prev_mu = mu, prev_g = g;
  bool secant = false;
  int failures = 0;
  int iter = 0;
  while (std::abs(g) >= config.tol_mu) {
    if (++iter > config.max_shoot) {
      current.report.converged = false;
      current.report.message = "max_shoot reached";
      break;
    }
    double next_mu;
    if (secant && g != prev_g) next_mu = mu - g * (mu - prev_mu) / (g - prev_g);
    else next_mu = mu + g;
    SolveResult trial;
    const double next_g = evaluate(next_mu, trial);
    if (!secant && std::abs(next_g) >= std::abs(g) && ++failures >= 2) secant = true;
    prev_mu = mu;
    prev_g = g;
    mu = next_mu;
    g = next_g;
    current = std::move(trial);
    history.push_back(mu);
  }
  current.report.mu_final = mu;
  current.report.mu_history = std::move(history);
  current.report.shoot_iterations = iter;
  return current;
}

std::vector<BranchMember> branch_sweep(double flux, double mu0, const std::vector<double>& mu_list,
                                       const BoundaryTrace& trace, const SolverConfig& config) {
  config.validate();
  if (!(flux > 2.0 + kDegenerateBand))
    throw InvalidInput("branch_sweep: requires flux > 2 (outside the degenerate band)");
  std::vector<BranchMember> members(mu_list.size());
  parallel_for(mu_list.size(), [&](std::size_t i) {
    BranchMember& m = members[i];
    m.mu = mu_list[i];
    try {
      const BoundarySpectrum b = project_boundary(trace, config.cutoff, flux, m.mu);
      m.result = picard_solve({flux, m.mu}, b, config);
      if (std::abs(m.mu - mu0) > 1.0)
        m.result.report.warnings.push_back("circulation far from mu0; perturbative regime doubtful");
      m.ok = m.result.report.converged;
      if (!m.ok) m.error = m.result.report.message;
    } catch (const std::exception& e) {
      m.ok = false;
      m.error = e.what();
    }
  });
  return members;
}

}  // namespace hamel
