#include "hamel/spectral.hpp"

#include <cmath>

namespace hamel {

SpectralSolution SpectralSolution::zero(const RadialGrid& grid, const ReferenceFlow& flow,
                                        int cutoff) {
  if (cutoff < 0) throw InvalidInput("SpectralSolution: cutoff must be nonnegative");
  SpectralSolution s;
  s.grid = grid;
  s.flow = flow;
  s.cutoff = cutoff;
  s.gamma = ModeTable::Zero(cutoff + 1, grid.size());
  s.dgamma = s.gamma;
  s.w = s.gamma;
  s.dw = s.gamma;
  s.constants.resize(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) s.constants[n].n = n;
  return s;
}

ComplexArray SpectralSolution::mode(const ModeTable& table, int k) const {
  if (k > cutoff || k < -cutoff) return ComplexArray::Zero(table.cols());
  if (k >= 0) return table.row(k).transpose();
  return table.row(-k).transpose().conjugate();
}

SpectralSolution& SpectralSolution::operator+=(const SpectralSolution& o) {
  if (o.cutoff != cutoff || o.grid.size() != grid.size())
    throw InvalidInput("SpectralSolution: shape mismatch");
  gamma += o.gamma;
  dgamma += o.dgamma;
  w += o.w;
  dw += o.dw;
  for (int n = 0; n <= cutoff; ++n) {
    constants[n].gamma_bar += o.constants[n].gamma_bar;
    constants[n].w_bar += o.constants[n].w_bar;
  }
  return *this;
}

SpectralSolution& SpectralSolution::operator*=(double s) {
  gamma *= s;
  dgamma *= s;
  w *= s;
  dw *= s;
  for (auto& c : constants) {
    c.gamma_bar *= s;
    c.w_bar *= s;
  }
  return *this;
}

double seq_norm(const ComplexArray& coeffs, double kappa) {
  double best = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n)
    best = std::max(best, std::pow(1.0 + static_cast<double>(n), kappa) * std::abs(coeffs(n)));
  return best;
}

double field_norm(const RadialGrid& grid, const ModeTable& values, const ModeTable& derivatives,
                  double alpha, double kappa, int m) {
  if (m < 0 || m > 2) throw InvalidInput("field_norm: derivative order must be 0, 1 or 2");
  if (!(m < kappa)) throw InvalidInput("field_norm: derivative order must be below kappa");
  if (m >= 1 && derivatives.rows() != values.rows())
    throw InvalidInput("field_norm: derivative samples missing");
  double best = 0.0;
  for (Eigen::Index n = 0; n < values.rows(); ++n) {
    const double nw = 1.0 + static_cast<double>(n);
    auto weighted = [&](const ComplexArray& f, int l) {
      const RealArray w = grid.radius.pow(alpha + l) * std::pow(nw, kappa - l);
      best = std::max(best, (w * f.abs()).maxCoeff());
    };
    weighted(values.row(n).transpose(), 0);
    if (m >= 1) weighted(derivatives.row(n).transpose(), 1);
    if (m >= 2) weighted(differentiate(grid, derivatives.row(n).transpose()), 2);
  }
  return best;
}

}  // namespace hamel
