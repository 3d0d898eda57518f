#include "hamel/linear_solver.hpp"

#include <cmath>
#include <cstdlib>

#include "hamel/parallel.hpp"

namespace hamel {

namespace {

ComplexArray radius_power(const RadialGrid& grid, Complex p) {
  ComplexArray out(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) out(j) = std::exp(p * grid.log_radius(j));
  return out;
}

void require_nonzero_mode(int n, const char* who) {
  if (n == 0) throw InvalidInput(std::string(who) + ": n must be nonzero (use the zero-mode solver)");
}

void require_samples(const RadialGrid& grid, const ComplexArray& f, const char* who) {
  if (f.size() != grid.size())
    throw InvalidInput(std::string(who) + ": sample count does not match the grid");
}

bool above_degenerate_band(double flux) {
  if (flux > 2.0 && flux < 2.0 + kDegenerateBand)
    throw NumericalError("zero mode: flux within the degenerate band just above 2");
  return flux > 2.0;
}

}  // namespace

ModeProfile solve_w_particular(const RadialGrid& grid, const ReferenceFlow& flow, int n,
                               const ComplexArray& source) {
  require_nonzero_mode(n, "solve_w_particular");
  require_samples(grid, source, "solve_w_particular");
  const ModeExponents e = mode_exponents(flow, n);
  if (std::abs(e.discriminant_root) == 0.0)
    throw NumericalError("solve_w_particular: vanishing discriminant");
  const ComplexArray out = integrate_out(grid, source, e.growing);
  const ComplexArray in = integrate_in(grid, source, e.decaying);
  const ComplexArray r = grid.radius.cast<Complex>();
  ModeProfile p;
  p.value = (out + in) / e.discriminant_root;
  p.derivative = (e.growing * out + e.decaying * in) / (e.discriminant_root * r);
  return p;
}

ModeProfile solve_w_zero(const RadialGrid& grid, const ReferenceFlow& flow,
                         const ComplexArray& source) {
  require_samples(grid, source, "solve_w_zero");
  const ComplexArray r = grid.radius.cast<Complex>();
  // inner(s) = int_s^inf (t/s)^(flux+1) F(t) dt
  const ComplexArray inner =
      integrate_out(grid, ComplexArray(source / r), Complex(-(flow.flux + 1.0), 0.0));
  ModeProfile p;
  p.value = integrate_out(grid, ComplexArray(inner / r), Complex(0.0));
  p.derivative = -inner;
  return p;
}

ModeProfile solve_gamma_particular(const RadialGrid& grid, int n, const ComplexArray& w) {
  require_nonzero_mode(n, "solve_gamma_particular");
  require_samples(grid, w, "solve_gamma_particular");
  const double m = std::abs(n);
  const ComplexArray out = integrate_out(grid, w, Complex(m));
  const ComplexArray in = integrate_in(grid, w, Complex(-m));
  const ComplexArray r = grid.radius.cast<Complex>();
  ModeProfile p;
  p.value = (out + in) / (2.0 * m);
  p.derivative = (out - in) / (2.0 * r);
  return p;
}

ModeProfile solve_gamma_zero(const RadialGrid& grid, const ComplexArray& w) {
  require_samples(grid, w, "solve_gamma_zero");
  const ComplexArray r = grid.radius.cast<Complex>();
  // slope(s) = (1/s) int_s^inf sigma w(sigma) dsigma
  const ComplexArray slope = integrate_out(grid, w, Complex(0.0)) / r;
  ModeProfile p;
  p.value = -integrate_out(grid, ComplexArray(slope / r), Complex(0.0));
  p.derivative = slope;
  return p;
}

ModeConstants boundary_constants(const ReferenceFlow& flow, int n, Complex trace_gamma,
                                 Complex trace_dgamma, Complex vr, Complex vtheta) {
  require_nonzero_mode(n, "boundary_constants");
  const double m = std::abs(n);
  const double sign = n > 0 ? 1.0 : -1.0;
  const Complex z2 = mode_exponents(flow, n).decaying + 2.0;
  const Complex radial = kI * sign * vr / m;  // i sgn(n) v_r / |n|
  ModeConstants c;
  c.n = n;
  if (std::abs(z2 + m) < kResonanceTol) {
    if (std::abs(z2 - m) < kResonanceTol)
      throw NumericalError("boundary_constants: degenerate exponents");
    c.resonant = true;
    c.gamma_bar = trace_gamma - radial;
    c.w_bar = 2.0 * m * (m * trace_gamma - m * radial + trace_dgamma - vtheta);
    return c;
  }
  const Complex k = z2 * z2 - m * m;
  const Complex denom = z2 + m;
  c.w_bar = -k / denom * (m * trace_gamma - m * radial + trace_dgamma - vtheta);
  c.gamma_bar = -(z2 * (radial - trace_gamma) + trace_dgamma - vtheta) / denom;
  return c;
}

AssembledMode assemble_mode(const RadialGrid& grid, const ReferenceFlow& flow,
                            const ModeConstants& c, const ModeProfile& w_part,
                            const ModeProfile& gamma_part) {
  require_nonzero_mode(c.n, "assemble_mode");
  const double m = std::abs(c.n);
  const Complex zeta = mode_exponents(flow, c.n).decaying;
  const ComplexArray r = grid.radius.cast<Complex>();
  const ComplexArray decay = radius_power(grid, zeta);
  const ComplexArray inv_m = radius_power(grid, Complex(-m));

  AssembledMode a;
  a.w.value = c.w_bar * decay - w_part.value;
  a.w.derivative = c.w_bar * zeta * decay / r - w_part.derivative;

  if (c.resonant) {
    const ComplexArray logr = grid.log_radius.cast<Complex>();
    const Complex s = c.w_bar / (2.0 * m);
    a.gamma.value = (c.gamma_bar + s * logr) * inv_m - gamma_part.value;
    a.gamma.derivative = (-m * c.gamma_bar + s * (1.0 - m * logr)) * inv_m / r - gamma_part.derivative;
  } else {
    const Complex z2 = zeta + 2.0;
    const Complex k = z2 * z2 - m * m;
    const ComplexArray lifted = radius_power(grid, z2);
    a.gamma.value = c.gamma_bar * inv_m - c.w_bar * lifted / k - gamma_part.value;
    a.gamma.derivative =
        (-m * c.gamma_bar * inv_m - c.w_bar * z2 * lifted / k) / r - gamma_part.derivative;
  }
  return a;
}

SpectralSolution solve_linear(const RadialGrid& grid, const LinearSolveInput& input) {
  const int cutoff = input.boundary.cutoff;
  if (input.boundary.vr.size() != cutoff + 1 || input.boundary.vtheta.size() != cutoff + 1)
    throw InvalidInput("solve_linear: boundary spectrum size does not match its cutoff");
  const bool has_sources = input.sources.size() > 0;
  if (has_sources && (input.sources.rows() != cutoff + 1 || input.sources.cols() != grid.size()))
    throw InvalidInput("solve_linear: source table shape does not match cutoff and grid");
  const ReferenceFlow& flow = input.flow;
  const bool free_zero_constant = above_degenerate_band(flow.flux);
  if (std::abs(input.boundary.vtheta(0) - (input.target_circulation - flow.circulation)) > 1e-10)
    throw InvalidInput("solve_linear: zero angular boundary mode must equal mu0 - mu");

  SpectralSolution sol = SpectralSolution::zero(grid, flow, cutoff);
  const ComplexArray none = ComplexArray::Zero(grid.size());

  parallel_for(static_cast<std::size_t>(cutoff + 1), [&](std::size_t idx) {
    const int n = static_cast<int>(idx);
    const ComplexArray source = has_sources ? ComplexArray(input.sources.row(n).transpose()) : none;
    const bool quiet = !has_sources || (source == 0.0).all();

    if (n == 0) {
      ModeProfile w = quiet ? ModeProfile::zero(grid.size()) : solve_w_zero(grid, flow, source);
      w.value = w.value.real().cast<Complex>();
      w.derivative = w.derivative.real().cast<Complex>();
      ModeProfile g = quiet ? ModeProfile::zero(grid.size()) : solve_gamma_zero(grid, w.value);
      ModeConstants c;
      if (free_zero_constant) {
        const double excess = flow.flux - 2.0;
        const double circulation_gap = input.target_circulation - flow.circulation;
        c.w_bar = -excess * (circulation_gap + g.derivative(0).real());
        const ComplexArray r = grid.radius.cast<Complex>();
        const ComplexArray decay = radius_power(grid, Complex(-flow.flux));
        w.value += c.w_bar * decay;
        w.derivative += -flow.flux * c.w_bar * decay / r;
        const ComplexArray lifted = radius_power(grid, Complex(2.0 - flow.flux));
        g.value += -c.w_bar * lifted / (excess * excess);
        g.derivative += c.w_bar * lifted / (excess * r);
      }
      sol.gamma.row(0) = g.value.transpose();
      sol.dgamma.row(0) = g.derivative.transpose();
      sol.w.row(0) = w.value.transpose();
      sol.dw.row(0) = w.derivative.transpose();
      sol.constants[0] = c;
      return;
    }

    const ModeProfile wp =
        quiet ? ModeProfile::zero(grid.size()) : solve_w_particular(grid, flow, n, source);
    const ModeProfile gp =
        quiet ? ModeProfile::zero(grid.size()) : solve_gamma_particular(grid, n, wp.value);
    const ModeConstants c = boundary_constants(flow, n, gp.value(0), gp.derivative(0),
                                               input.boundary.vr(n), input.boundary.vtheta(n));
    const AssembledMode a = assemble_mode(grid, flow, c, wp, gp);
    sol.gamma.row(n) = a.gamma.value.transpose();
    sol.dgamma.row(n) = a.gamma.derivative.transpose();
    sol.w.row(n) = a.w.value.transpose();
    sol.dw.row(n) = a.w.derivative.transpose();
    sol.constants[n] = c;
  });
  return sol;
}

}  // namespace hamel
