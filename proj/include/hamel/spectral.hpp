#pragma once

#include <vector>

#include "hamel/flows.hpp"
#include "hamel/grid.hpp"
#include "hamel/types.hpp"

namespace hamel {

/// Radial profile of one Fourier mode with its analytic r-derivative.
struct ModeProfile {
  ComplexArray value;
  ComplexArray derivative;

  static ModeProfile zero(Eigen::Index nodes) {
    return {ComplexArray::Zero(nodes), ComplexArray::Zero(nodes)};
  }
};

/// Free constants of one assembled mode: stream amplitude of r^-|n| and
/// vorticity amplitude of r^decaying (r^-flux for n = 0).
struct ModeConstants {
  int n = 0;
  Complex gamma_bar{0.0};
  Complex w_bar{0.0};
  bool resonant = false;
};

/// Stream function and vorticity modes 0..cutoff on a radial grid; rows are
/// modes, columns nodes. Mode -n is the conjugate of mode n.
struct SpectralSolution {
  RadialGrid grid;
  ReferenceFlow flow;
  int cutoff = 0;
  ModeTable gamma;
  ModeTable dgamma;
  ModeTable w;
  ModeTable dw;
  std::vector<ModeConstants> constants;

  static SpectralSolution zero(const RadialGrid& grid, const ReferenceFlow& flow, int cutoff);

  /// Mode k in -cutoff..cutoff, expanded through conjugate symmetry.
  ComplexArray mode(const ModeTable& table, int k) const;

  SpectralSolution& operator+=(const SpectralSolution& other);
  SpectralSolution& operator*=(double s);
};

/// Weighted sup norms of the contraction spaces.
/// seq_norm: sup_n (1+|n|)^kappa |c_n|.
double seq_norm(const ComplexArray& coeffs, double kappa);

/// sup over modes, nodes and l <= m of r^(alpha+l) (1+|n|)^(kappa-l) |d^l phi_n|.
/// Second derivatives come from differentiating first-derivative samples.
/// Throws InvalidInput unless m in {0,1,2} and m < kappa.
double field_norm(const RadialGrid& grid, const ModeTable& values, const ModeTable& derivatives,
                  double alpha, double kappa, int m);

}  // namespace hamel
