#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dlg/ensemble.hpp"
#include "dlg/kmc.hpp"
#include "dlg/lattice.hpp"
#include "dlg/statistics.hpp"

namespace dlg {

struct TwoBlockParams {
  std::function<double(double)> F = [](double rho) { return rho * rho; };
  // Test function on the unit torus, evaluated at x / L.
  std::function<double(std::span<const double>)> phi = [](std::span<const double>) { return 1.0; };
  int micro_radius = 1;  // K
  double delta = 0.25;   // macro radius floor(delta L)
};

int macro_radius(int L, double delta);

// m_x^r: mean occupation over the distinct torus sites within sup-distance r
// of x. For 2r + 1 >= L along an axis the window covers that whole axis.
std::vector<double> block_averages(const LatticeGeometry& geom, std::span<const std::uint8_t> occupancy, int radius);

// L^{-d} |sum_x phi(x/L) (F(m_x^K) - F(m_x^{floor(delta L)}))| for one configuration.
double two_block_sum(const LatticeGeometry& geom, std::span<const std::uint8_t> occupancy,
                     const TwoBlockParams& params);

// Equilibrium expectation by i.i.d. exact sampling from the canonical measure.
MeanEstimate two_block_statistic(const LatticeGeometry& geom, const CanonicalMeasure& measure,
                                 const TwoBlockParams& params, std::size_t samples, std::uint64_t seed);

// Same quantity along a Kawasaki trajectory sampled every `spacing` time units.
MeanEstimate two_block_statistic(KmcState& state, const TwoBlockParams& params, std::size_t samples,
                                 double spacing);

// E_mu[two_block_sum * f] - L^{2-d} D_Kaw(sqrt f) for a density f (indexed by
// rank in the N-particle space) with f >= 0 and E_mu[f] = 1.
double two_block_functional(const LatticeGeometry& geom, const CanonicalMeasure& measure,
                            std::span<const double> density, const TwoBlockParams& params);

}  // namespace dlg
