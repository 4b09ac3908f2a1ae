#include "dlg/two_block.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dlg/forms.hpp"

namespace dlg {

namespace {

void check_params(const LatticeGeometry& geom, const TwoBlockParams& params) {
  if (geom.boundary() != Boundary::kPeriodic) throw std::invalid_argument("two-block statistic needs a periodic box");
  const int L = geom.side_lengths()[0];
  for (int s : geom.side_lengths())
    if (s != L) throw std::invalid_argument("two-block statistic needs a cube");
  if (params.micro_radius < 1) throw std::invalid_argument("micro window radius must be >= 1");
  const int R = macro_radius(L, params.delta);
  if (R < 1) throw std::invalid_argument("macro window floor(delta L) must be >= 1");
  if (R < params.micro_radius) throw std::invalid_argument("macro window smaller than micro window");
}

// Distinct offsets along one axis of length L within distance r.
std::vector<int> axis_offsets(int L, int r) {
  std::vector<int> off;
  if (2 * r + 1 >= L) {
    for (int k = 0; k < L; ++k) off.push_back(k);
  } else {
    for (int k = -r; k <= r; ++k) off.push_back(k);
  }
  return off;
}

}  // namespace

int macro_radius(int L, double delta) { return static_cast<int>(std::floor(delta * L + 1e-12)); }

std::vector<double> block_averages(const LatticeGeometry& geom, std::span<const std::uint8_t> occupancy, int radius) {
  if (occupancy.size() != geom.site_count()) throw std::invalid_argument("occupancy size mismatch");
  const int d = geom.dimension();
  const auto sides = geom.side_lengths();
  std::vector<std::vector<int>> offsets(d);
  std::size_t window = 1;
  for (int a = 0; a < d; ++a) {
    offsets[a] = axis_offsets(sides[a], radius);
    window *= offsets[a].size();
  }
  std::vector<double> m(geom.site_count());
  std::vector<int> c(d), idx(d);
  for (std::size_t s = 0; s < m.size(); ++s) {
    const auto base = geom.coordinates(static_cast<Site>(s));
    std::fill(idx.begin(), idx.end(), 0);
    double sum = 0.0;
    for (std::size_t w = 0; w < window; ++w) {
      for (int a = 0; a < d; ++a) c[a] = ((base[a] + offsets[a][idx[a]]) % sides[a] + sides[a]) % sides[a];
      sum += occupancy[geom.site_at(c)];
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < static_cast<int>(offsets[a].size())) break;
        idx[a] = 0;
      }
    }
    m[s] = sum / static_cast<double>(window);
  }
  return m;
}

double two_block_sum(const LatticeGeometry& geom, std::span<const std::uint8_t> occupancy,
                     const TwoBlockParams& params) {
  check_params(geom, params);
  const int L = geom.side_lengths()[0];
  const int d = geom.dimension();
  const auto micro = block_averages(geom, occupancy, params.micro_radius);
  const auto macro = block_averages(geom, occupancy, macro_radius(L, params.delta));
  std::vector<double> u(d);
  double sum = 0.0;
  for (std::size_t s = 0; s < micro.size(); ++s) {
    const auto c = geom.coordinates(static_cast<Site>(s));
    for (int a = 0; a < d; ++a) u[a] = static_cast<double>(c[a]) / L;
    sum += params.phi(u) * (params.F(micro[s]) - params.F(macro[s]));
  }
  return std::abs(sum) / std::pow(static_cast<double>(L), d);
}

MeanEstimate two_block_statistic(const LatticeGeometry& geom, const CanonicalMeasure& measure,
                                 const TwoBlockParams& params, std::size_t samples, std::uint64_t seed) {
  check_params(geom, params);
  if (measure.sites() != geom.site_count()) throw std::invalid_argument("measure does not match geometry");
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  values.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) values.push_back(two_block_sum(geom, measure.exact_sample(rng), params));
  return mean_estimate(values);
}

MeanEstimate two_block_statistic(KmcState& state, const TwoBlockParams& params, std::size_t samples,
                                 double spacing) {
  const auto& geom = state.geometry();
  check_params(geom, params);
  const auto values =
      sample_on_grid(state, spacing, samples, [&](const Occupancy& occ) { return two_block_sum(geom, occ, params); });
  return mean_estimate(values);
}

double two_block_functional(const LatticeGeometry& geom, const CanonicalMeasure& measure,
                            std::span<const double> density, const TwoBlockParams& params) {
  check_params(geom, params);
  const auto base = make_measured_space(measure);
  const auto& space = base->space;
  if (density.size() != space.dimension()) throw std::invalid_argument("density dimension does not match space");
  double mass = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (density[i] < 0.0) throw std::invalid_argument("density has negative entries");
    mass += base->probabilities[i] * density[i];
  }
  if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("density must satisfy E_mu[f] = 1");

  double expectation_term = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (density[i] == 0.0) continue;
    const Configuration eta(space.state_bits(i), space.sites());
    expectation_term += base->probabilities[i] * density[i] * two_block_sum(geom, eta.occupancy(), params);
  }
  std::vector<double> root(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) root[i] = std::sqrt(density[i]);
  const double dirichlet = measure.degenerate() ? 0.0 : build_kawasaki(geom, base).form.value(root);
  const int L = geom.side_lengths()[0];
  return expectation_term - std::pow(static_cast<double>(L), 2 - geom.dimension()) * dirichlet;
}

}  // namespace dlg
