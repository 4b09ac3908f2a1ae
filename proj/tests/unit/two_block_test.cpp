#include "dlg/two_block.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dlg/forms.hpp"
#include "oracles.hpp"

namespace dlg {
namespace {

// Direct one-dimensional evaluation with explicit window sums.
double ring_two_block(const Occupancy& occ, int micro, int macro) {
  const int L = static_cast<int>(occ.size());
  auto mean = [&](int x, int r) {
    if (2 * r + 1 >= L) {
      double s = 0.0;
      for (auto o : occ) s += o;
      return s / L;
    }
    double s = 0.0;
    for (int k = -r; k <= r; ++k) s += occ[((x + k) % L + L) % L];
    return s / (2 * r + 1);
  };
  double sum = 0.0;
  for (int x = 0; x < L; ++x) sum += std::pow(mean(x, micro), 2) - std::pow(mean(x, macro), 2);
  return std::abs(sum) / L;
}

TEST(BlockAverageTest, MatchesDirectSums) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  const Occupancy occ{1, 0, 0, 1, 1, 0, 1, 0};
  const auto m = block_averages(geom, occ, 1);
  EXPECT_DOUBLE_EQ(m[0], (0 + 1 + 0) / 3.0);
  EXPECT_DOUBLE_EQ(m[4], (1 + 1 + 0) / 3.0);
  const auto full = block_averages(geom, occ, 4);
  for (double v : full) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(BlockAverageTest, SquareWindows) {
  const auto geom = build_box(2, 5, Boundary::kPeriodic);
  Occupancy occ(25, 0);
  occ[geom.site_at(std::vector<int>{0, 0})] = 1;
  const auto m = block_averages(geom, occ, 1);
  EXPECT_DOUBLE_EQ(m[geom.site_at(std::vector<int>{4, 4})], 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(m[geom.site_at(std::vector<int>{2, 2})], 0.0);
}

TEST(TwoBlockTest, FrozenConfigurationGivesZero) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  EXPECT_EQ(two_block_sum(geom, Occupancy(8, 1), {}), 0.0);
  EXPECT_EQ(two_block_sum(geom, Occupancy(8, 0), {}), 0.0);
}

TEST(TwoBlockTest, FullWindowsGiveZero) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  TwoBlockParams p;
  p.micro_radius = 4;
  p.delta = 0.5;
  EXPECT_NEAR(two_block_sum(geom, Occupancy{1, 0, 0, 1, 1, 0, 1, 0}, p), 0.0, 1e-15);
}

TEST(TwoBlockTest, Validation) {
  TwoBlockParams p;
  EXPECT_THROW(two_block_sum(build_box(1, 8, Boundary::kFree), Occupancy(8, 0), p), std::invalid_argument);
  p.micro_radius = 3;  // macro radius floor(8/4) = 2 < 3
  EXPECT_THROW(two_block_sum(build_box(1, 8, Boundary::kPeriodic), Occupancy(8, 0), p), std::invalid_argument);
  TwoBlockParams q;
  EXPECT_THROW(two_block_sum(build_box(1, 3, Boundary::kPeriodic), Occupancy(3, 0), q), std::invalid_argument);
  EXPECT_EQ(macro_radius(16, 0.25), 4);
}

TEST(TwoBlockTest, SumMatchesDirectEvaluation) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  for (auto m : oracle::masks(8, 4)) {
    Occupancy occ(8);
    for (int x = 0; x < 8; ++x) occ[x] = (m >> x) & 1u;
    EXPECT_NEAR(two_block_sum(geom, occ, {}), ring_two_block(occ, 1, 2), 1e-15);
  }
}

TEST(TwoBlockTest, SampledMeanMatchesEnumeration) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  const auto a = oracle::uniform_field(8, 1.0, 3);
  const CanonicalMeasure mu(DisorderField(a, 1.0), 4);
  const auto ms = oracle::masks(8, 4);
  const auto p = oracle::canonical_probs(a, 4);
  double exact = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Occupancy occ(8);
    for (int x = 0; x < 8; ++x) occ[x] = (ms[i] >> x) & 1u;
    exact += p[i] * ring_two_block(occ, 1, 2);
  }
  const auto est = two_block_statistic(geom, mu, {}, 40000, 5);
  EXPECT_NEAR(est.mean, exact, 4 * est.standard_error);

  // A Kawasaki trajectory targets the same expectation.
  KmcState state(geom, DisorderField(a, 1.0), mu.exact_sample(6), 7);
  const auto traj = two_block_statistic(state, {}, 20000, 1.0);
  EXPECT_NEAR(traj.mean, exact, 0.1 * exact);
}

TEST(TwoBlockFunctionalTest, UniformDensityIsExpectation) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  const auto a = oracle::uniform_field(8, 1.0, 4);
  const CanonicalMeasure mu(DisorderField(a, 1.0), 3);
  const std::vector<double> ones(ConfigSpace(8, 3).dimension(), 1.0);
  const auto ms = oracle::masks(8, 3);
  const auto p = oracle::canonical_probs(a, 3);
  double exact = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Occupancy occ(8);
    for (int x = 0; x < 8; ++x) occ[x] = (ms[i] >> x) & 1u;
    exact += p[i] * ring_two_block(occ, 1, 2);
  }
  EXPECT_NEAR(two_block_functional(geom, mu, ones, {}), exact, 1e-14);

  // The canonical measure does not see a constant shift of the field.
  const CanonicalMeasure shifted(DisorderField(a, 1.0).shifted(0.3), 3);
  EXPECT_NEAR(two_block_functional(geom, shifted, ones, {}), exact, 1e-13);
}

TEST(TwoBlockFunctionalTest, ZeroTestFunctionLeavesMinusDirichlet) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  const CanonicalMeasure mu(DisorderField::zero(8), 4);
  const auto base = make_measured_space(mu);
  TwoBlockParams p;
  p.phi = [](std::span<const double>) { return 0.0; };
  // Point mass on one configuration, as a density.
  std::vector<double> f(base->space.dimension(), 0.0);
  f[0] = 1.0 / base->probabilities[0];
  std::vector<double> root(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) root[i] = std::sqrt(f[i]);
  const double dirichlet = build_kawasaki(geom, base).form.value(root);
  EXPECT_GT(dirichlet, 0.0);
  EXPECT_NEAR(two_block_functional(geom, mu, f, p), -8.0 * dirichlet, 1e-10 * dirichlet);
}

TEST(TwoBlockFunctionalTest, RejectsInvalidDensities) {
  const auto geom = build_box(1, 8, Boundary::kPeriodic);
  const CanonicalMeasure mu(DisorderField::zero(8), 4);
  std::vector<double> f(70, 1.0);
  f[0] = -1.0;
  EXPECT_THROW(two_block_functional(geom, mu, f, {}), std::invalid_argument);
  std::vector<double> g(70, 2.0);
  EXPECT_THROW(two_block_functional(geom, mu, g, {}), std::invalid_argument);
  EXPECT_THROW(two_block_functional(geom, mu, std::vector<double>(5, 1.0), {}), std::invalid_argument);
}

}  // namespace
}  // namespace dlg
