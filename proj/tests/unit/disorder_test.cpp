#include "dlg/disorder.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <sstream>

namespace dlg {
namespace {

TEST(DisorderTest, ZeroBoundGivesZeroField) {
  const auto f = generate_iid(build_box(1, 10, Boundary::kFree), 0.0, 3);
  for (double a : f.values()) EXPECT_EQ(a, 0.0);
}

TEST(DisorderTest, SeedDeterminism) {
  const auto g = build_box(1, 4, Boundary::kFree);
  const auto a = generate_iid(g, 1.0, 42);
  const auto b = generate_iid(g, 1.0, 42);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto c = generate_iid(g, 1.0, 43);
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(DisorderTest, UniformMomentsAndBound) {
  const auto g = build_box(1, 100000, Boundary::kFree);
  const auto f = generate_iid(g, 1.0, 7);
  double mean = 0.0;
  for (double a : f.values()) {
    EXPECT_LE(std::abs(a), 1.0);
    mean += a;
  }
  mean /= 1e5;
  EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(3e5));
}

TEST(DisorderTest, RejectsNegativeBoundAndOutOfRangeValues) {
  EXPECT_THROW(generate_iid(build_box(1, 3, Boundary::kFree), -0.1, 1), std::invalid_argument);
  EXPECT_THROW(DisorderField({0.5, 1.5}, 1.0), std::invalid_argument);
}

TEST(QuantizeTest, GridPointsAreFixed) {
  const DisorderField f({-1.0, -0.5, 0.0, 0.5, 1.0}, 1.0);
  const auto q = quantize_to_grid(f, 2);
  EXPECT_FALSE(q.degenerate);
  for (std::size_t x = 0; x < f.size(); ++x) EXPECT_EQ(q.field[x], f[x]);
}

TEST(QuantizeTest, NearestGridPoint) {
  const DisorderField f({0.3}, 1.0);
  EXPECT_EQ(quantize_to_grid(f, 2).field[0], 0.5);
}

TEST(QuantizeTest, TiesRoundTowardPlusK) {
  const DisorderField f({0.25, -0.25}, 1.0);
  const auto q = quantize_to_grid(f, 2);
  EXPECT_EQ(q.field[0], 0.5);
  EXPECT_EQ(q.field[1], 0.0);
}

TEST(QuantizeTest, ErrorBoundAndIdempotence) {
  for (int L : {1, 2, 5, 8, 13}) {
    for (double K : {0.5, 1.0, 3.0}) {
      const auto f = generate_iid(build_box(1, 200, Boundary::kFree), K, 11 * L);
      const auto q = quantize_to_grid(f, L);
      for (std::size_t x = 0; x < f.size(); ++x) {
        EXPECT_LE(std::abs(f[x] - q.field[x]), K / (2.0 * L) + 1e-15);
        const double j = q.field[x] * L / K;
        EXPECT_NEAR(j, std::round(j), 1e-9);
      }
      const auto qq = quantize_to_grid(q.field, L);
      for (std::size_t x = 0; x < f.size(); ++x) EXPECT_EQ(qq.field[x], q.field[x]);
    }
  }
}

TEST(QuantizeTest, ZeroBoundIsDegenerate) {
  const auto q = quantize_to_grid(DisorderField::zero(5), 4);
  EXPECT_TRUE(q.degenerate);
  for (double a : q.field.values()) EXPECT_EQ(a, 0.0);
  EXPECT_THROW(quantize_to_grid(DisorderField::zero(5), 0), std::invalid_argument);
}

// exp{sum_{x in A} alpha_x} before and after quantization differ by at most
// e^{K/2} when |A| <= L.
TEST(QuantizeTest, RadonNikodymBound) {
  for (int L = 2; L <= 12; ++L) {
    const double K = 1.0;
    const auto f = generate_iid(build_box(1, L, Boundary::kFree), K, 100 + L);
    const auto q = quantize_to_grid(f, L).field;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << L); ++m) {
      double diff = 0.0;
      for (int x = 0; x < L; ++x)
        if ((m >> x) & 1u) diff += f[x] - q[x];
      EXPECT_LE(std::exp(diff), std::exp(K / 2) * (1 + 1e-12));
      EXPECT_GE(std::exp(diff), std::exp(-K / 2) * (1 - 1e-12));
    }
  }
}

TEST(PeakSetTest, ConstantField) {
  const DisorderField f(std::vector<double>(6, 1.5), 1.5);
  EXPECT_EQ(peak_set(f), (std::vector<Site>{0, 1, 2, 3, 4, 5}));
}

TEST(PeakSetTest, EndpointsOnly) {
  const DisorderField f({1.0, 0.0, -1.0, 0.5, 1.0}, 1.0);
  EXPECT_EQ(peak_set(f), (std::vector<Site>{0, 4}));
}

TEST(PeakSetTest, MatchesLinearScan) {
  const int L = 8;
  const auto f = generate_iid(build_box(1, L, Boundary::kFree), 1.0, 2024);
  const auto q = force_endpoints(quantize_to_grid(f, L).field);
  std::vector<Site> scan;
  for (int x = 0; x < L; ++x)
    if (q[x] == 1.0) scan.push_back(x);
  EXPECT_EQ(peak_set(q), scan);
  EXPECT_EQ(peak_set(q).front(), 0);
  EXPECT_EQ(peak_set(q).back(), L - 1);
}

TEST(PeakSetTest, RejectsUnforcedEndpoints) {
  EXPECT_THROW(peak_set(DisorderField({0.0, 1.0}, 1.0)), std::invalid_argument);
}

TEST(FieldIoTest, ExactRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = generate_iid(build_box(1, 37, Boundary::kFree), 2.7, seed);
    std::stringstream ss;
    write_field(ss, f);
    const auto g = read_field(ss);
    ASSERT_EQ(g.size(), f.size());
    EXPECT_EQ(g.bound(), f.bound());
    for (std::size_t x = 0; x < f.size(); ++x) EXPECT_EQ(std::bit_cast<std::uint64_t>(g[x]), std::bit_cast<std::uint64_t>(f[x]));
  }
}

TEST(FieldIoTest, PlainFormatAndErrors) {
  std::stringstream ss("0 0.25\n1 -1\n");
  const auto f = read_field(ss);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.bound(), 1.0);
  std::stringstream bad("0 0.25\n2 1\n");
  EXPECT_THROW(read_field(bad), std::invalid_argument);
  std::stringstream junk("0 abc\n");
  EXPECT_THROW(read_field(junk), std::invalid_argument);
}

}  // namespace
}  // namespace dlg
