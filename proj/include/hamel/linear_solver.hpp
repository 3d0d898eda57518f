#pragma once

#include "hamel/boundary.hpp"
#include "hamel/spectral.hpp"

namespace hamel {

/// |decaying + 2 + |n|| below this selects the logarithmic Green function.
inline constexpr double kResonanceTol = 1e-8;
/// Flux band (2, 2 + kDegenerateBand) where the zero-mode construction is
/// rejected; flux = 2 itself uses the no-free-constant branch.
inline constexpr double kDegenerateBand = 1e-6;

/// Particular vorticity w_n[F] solving
/// w'' + (flux+1) w'/r - (i n circ + n^2) w/r^2 = -F, decaying like the
/// source or like r^decaying. n != 0.
ModeProfile solve_w_particular(const RadialGrid& grid, const ReferenceFlow& flow, int n,
                               const ComplexArray& source);

/// Zero-mode vorticity w_0[F] = int_r^inf int_s^inf (t/s)^(flux+1) F(t) dt ds,
/// solving w'' + (flux+1) w'/r = F.
ModeProfile solve_w_zero(const RadialGrid& grid, const ReferenceFlow& flow,
                         const ComplexArray& source);

/// Stream function gamma_n[w] with gamma'' + gamma'/r - n^2 gamma/r^2 = -w,
/// built from the r^(+-|n|) Green function. n != 0.
ModeProfile solve_gamma_particular(const RadialGrid& grid, int n, const ComplexArray& w);

/// Zero-mode stream function gamma_0[w] = -int_r^inf (1/s) int_s^inf sigma w dsigma ds,
/// with gamma'' + gamma'/r = -w; derivative taken from the inner integral.
ModeProfile solve_gamma_zero(const RadialGrid& grid, const ComplexArray& w);

/// Constants matching i n gamma_n(1) = vr and -gamma_n'(1) = vtheta, given
/// the traces of the particular stream function. n != 0.
/// Throws NumericalError when both the regular and the logarithmic
/// formulas are singular.
ModeConstants boundary_constants(const ReferenceFlow& flow, int n, Complex trace_gamma,
                                 Complex trace_dgamma, Complex vr, Complex vtheta);

struct AssembledMode {
  ModeProfile gamma;
  ModeProfile w;
};

/// w_n = w_bar r^decaying - w_part;
/// gamma_n = gamma_bar r^-|n| - w_bar r^(2+decaying)/((2+decaying)^2 - n^2) - gamma_part,
/// or the logarithmic variant when resonant. n != 0.
AssembledMode assemble_mode(const RadialGrid& grid, const ReferenceFlow& flow,
                            const ModeConstants& constants, const ModeProfile& w_part,
                            const ModeProfile& gamma_part);

struct LinearSolveInput {
  ReferenceFlow flow;
  BoundarySpectrum boundary;
  /// Source modes F_0..F_N on the grid; empty means F = 0.
  ModeTable sources;
  /// Target circulation mu0 (zero-mode constant when flux > 2).
  double target_circulation = 0.0;
};

/// Full linear solution operator, modes solved in parallel.
/// For flux <= 2 the zero mode carries no free constant and
/// -gamma_0'(1) = mu0 - mu is left to the outer shooting.
SpectralSolution solve_linear(const RadialGrid& grid, const LinearSolveInput& input);

}  // namespace hamel
