#pragma once

#include <cstdint>

namespace gapforge {

// Dickman's rho to ~1e-8 absolute. Solves u*rho'(u) = -rho(u-1) by
// stepwise Simpson quadrature on a dyadic grid with Richardson
// extrapolation; rho == 1 on [0,1].
double dickman_rho(double u);

// Exact count of z-smooth integers in [1, y] (1 counts as smooth).
// Oracle-scale only: y <= 1e8.
uint64_t smooth_count_exact(uint64_t y, uint64_t z);

} // namespace gapforge
