#include "hamel/nonlinearity.hpp"

#include "hamel/parallel.hpp"

namespace hamel {

ModeTable compute_sources(const SpectralSolution& s) {
  const int cutoff = s.cutoff;
  const Eigen::Index nodes = s.grid.size();
  if (s.gamma.rows() != cutoff + 1 || s.dgamma.rows() != cutoff + 1 || s.w.rows() != cutoff + 1 ||
      s.dw.rows() != cutoff + 1)
    throw InvalidInput("compute_sources: missing mode or derivative samples");

  // Full -N..N tables, index k + N.
  const int width = 2 * cutoff + 1;
  ModeTable g(width, nodes), dg(width, nodes), w(width, nodes), dw(width, nodes);
  for (int k = -cutoff; k <= cutoff; ++k) {
    g.row(k + cutoff) = s.mode(s.gamma, k).transpose();
    dg.row(k + cutoff) = s.mode(s.dgamma, k).transpose();
    w.row(k + cutoff) = s.mode(s.w, k).transpose();
    dw.row(k + cutoff) = s.mode(s.dw, k).transpose();
  }

  const Eigen::ArrayXXcd inv_r = (1.0 / s.grid.radius).cast<Complex>().transpose();
  ModeTable out = ModeTable::Zero(cutoff + 1, nodes);
  parallel_for(static_cast<std::size_t>(cutoff + 1), [&](std::size_t idx) {
    const int n = static_cast<int>(idx);
    Eigen::ArrayXXcd acc = Eigen::ArrayXXcd::Zero(1, nodes);
    for (int k = std::max(-cutoff, n - cutoff); k <= std::min(cutoff, n + cutoff); ++k) {
      const int l = n - k;
      acc += static_cast<double>(l) * g.row(l + cutoff) * dw.row(k + cutoff) -
             static_cast<double>(k) * dg.row(l + cutoff) * w.row(k + cutoff);
    }
    acc *= kI * inv_r;
    if (n == 0) acc = acc.real().cast<Complex>();
    out.row(n) = acc;
  });
  return out;
}

}  // namespace hamel
