#pragma once

#include "hamel/spectral.hpp"

namespace hamel {

/// Mode sources of the advection term,
/// F_n(r) = (i/r) sum_{k+l=n, |k|,|l|<=N} (l gamma_l w_k' - k gamma_l' w_k),
/// for n = 0..N. F_0 is real by conjugate symmetry and stored as such.
ModeTable compute_sources(const SpectralSolution& solution);

}  // namespace hamel
