#pragma once

#include <limits>

#include "ringctl/ring.hpp"

namespace ringctl {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Quadrature L^p norm over the circle; p must be 1, 2 or infinity
/// (p = infinity returns the max sample magnitude).
double lp_norm(const RingField& f, double p);

/// Kullback-Leibler divergence between the two densities after normalizing
/// each to unit quadrature integral. Zero cells: 0 log 0 = 0, and the
/// reference probability is clamped below 1e-12. Small negative samples
/// (within 1e-9 of the field scale) are treated as zero.
double kl_divergence(const RingField& rho, const RingField& rho_d);

/// Density proportional to exp(k cos(x - mu)), rescaled so the quadrature
/// integral equals mass.
RingField von_mises_field(double mu, double k, double mass, const RingGrid& grid);

}  // namespace ringctl
