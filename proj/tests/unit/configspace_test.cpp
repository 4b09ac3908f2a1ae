#include "dlg/configspace.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>

#include "oracles.hpp"

namespace dlg {
namespace {

TEST(ConfigSpaceTest, EmptySector) {
  const ConfigSpace s(7, 0);
  ASSERT_EQ(s.dimension(), 1u);
  EXPECT_EQ(s.rank(Configuration(0, 7)), 0u);
  EXPECT_EQ(s.unrank(0), Configuration(0, 7));
}

TEST(ConfigSpaceTest, FourSitesTwoParticles) {
  const ConfigSpace s(4, 2);
  ASSERT_EQ(s.dimension(), 6u);
  std::set<std::uint64_t> ranks;
  for (auto m : oracle::masks(4, 2)) ranks.insert(s.rank_bits(m));
  EXPECT_EQ(ranks, (std::set<std::uint64_t>{0, 1, 2, 3, 4, 5}));
}

// Colex rank equals the position among same-popcount words sorted numerically.
TEST(ConfigSpaceTest, RankMatchesSortedEnumeration) {
  for (int n = 1; n <= 12; ++n) {
    for (int N = 0; N <= n; ++N) {
      const ConfigSpace s(n, N);
      const auto ms = oracle::masks(n, N);
      ASSERT_EQ(s.dimension(), ms.size());
      for (std::size_t i = 0; i < ms.size(); ++i) {
        EXPECT_EQ(s.rank_bits(ms[i]), i);
        EXPECT_EQ(s.state_bits(i), ms[i]);
        EXPECT_EQ(s.unrank(i).bits(), ms[i]);
      }
    }
  }
}

TEST(ConfigSpaceTest, RandomRoundTripsOnTwentySites) {
  const ConfigSpace s(20, 10);
  EXPECT_EQ(s.dimension(), 184756u);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> pick(0, s.dimension() - 1);
  for (int i = 0; i < 1000; ++i) {
    const auto r = pick(rng);
    EXPECT_EQ(s.rank(s.unrank(r)), r);
  }
}

TEST(ConfigSpaceTest, EnumerationIsFastAndIncreasing) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigSpace s(20, 10);
  for (std::size_t i = 0; i < s.dimension(); ++i) ASSERT_EQ(s.rank_bits(s.state_bits(i)), i);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 1.0);
  for (std::size_t i = 1; i < s.dimension(); ++i) EXPECT_LT(s.state_bits(i - 1), s.state_bits(i));
}

TEST(ConfigSpaceTest, FullSpaceRanksAreBits) {
  const auto s = ConfigSpace::full(5);
  EXPECT_EQ(s.dimension(), 32u);
  EXPECT_FALSE(s.conserving());
  EXPECT_EQ(s.rank_bits(0b10110), 0b10110u);
  EXPECT_THROW(ConfigSpace::full(27), std::invalid_argument);
}

TEST(ConfigSpaceTest, SixtyFourSites) {
  const ConfigSpace s(64, 1);
  EXPECT_EQ(s.dimension(), 64u);
  EXPECT_EQ(s.unrank(63).bits(), std::uint64_t{1} << 63);
  EXPECT_EQ(s.rank(Configuration(std::uint64_t{1} << 63, 64)), 63u);
}

TEST(ConfigSpaceTest, Errors) {
  const ConfigSpace s(4, 2);
  EXPECT_THROW(s.rank(Configuration(0b0111, 4)), std::invalid_argument);
  EXPECT_THROW(s.rank(Configuration(0b0011, 5)), std::invalid_argument);
  EXPECT_THROW(s.unrank(6), std::out_of_range);
  EXPECT_THROW(ConfigSpace(4, 5), std::invalid_argument);
  EXPECT_THROW(ConfigSpace(4, -1), std::invalid_argument);
  EXPECT_THROW(ConfigSpace(65, 1), std::invalid_argument);
  EXPECT_THROW(ConfigSpace(40, 20), std::invalid_argument);
}

TEST(BinomialTest, Values) {
  EXPECT_EQ(binomial_coefficient(20, 10), 184756u);
  EXPECT_EQ(binomial_coefficient(5, 0), 1u);
  EXPECT_EQ(binomial_coefficient(5, 6), 0u);
  EXPECT_EQ(binomial_coefficient(64, 32), 1832624140942590534u);
}

TEST(SwapTest, Examples) {
  EXPECT_EQ(apply_swap(Configuration::parse("1000"), 0, 3).to_string(), "0001");
  EXPECT_EQ(apply_swap(Configuration::parse("1001"), 0, 3).to_string(), "1001");
  EXPECT_EQ(apply_swap(Configuration::parse("1010"), 2, 2).to_string(), "1010");
  EXPECT_THROW(apply_swap(Configuration::parse("10"), 0, 2), std::out_of_range);
}

TEST(SwapTest, InvolutionAndRankConsistency) {
  const ConfigSpace s(8, 3);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const Configuration eta = s.unrank(i);
    for (Site x = 0; x < 8; ++x) {
      for (Site y = 0; y < 8; ++y) {
        const Configuration t = apply_swap(eta, x, y);
        EXPECT_EQ(apply_swap(t, x, y), eta);
        EXPECT_EQ(t.particles(), 3);
        EXPECT_EQ(s.unrank(s.rank(t)), t);
        EXPECT_EQ(t.bits(), oracle::swapped(eta.bits(), x, y));
      }
    }
  }
}

TEST(FlipTest, Examples) {
  EXPECT_EQ(apply_flip(Configuration::parse("00"), 0).to_string(), "10");
  const auto eta = Configuration::parse("01101");
  for (Site x = 0; x < 5; ++x) {
    const auto t = apply_flip(eta, x);
    EXPECT_EQ(std::abs(t.particles() - eta.particles()), 1);
    EXPECT_EQ(apply_flip(t, x), eta);
  }
  EXPECT_THROW(apply_flip(eta, 5), std::out_of_range);
}

TEST(ConfigurationTest, ParseAndOccupancy) {
  const auto eta = Configuration::parse("0110");
  EXPECT_EQ(eta.bits(), 0b0110u);
  EXPECT_EQ(eta.occupancy(), (std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(Configuration::from_occupancy(eta.occupancy()), eta);
  EXPECT_THROW(Configuration::parse("01x"), std::invalid_argument);
  EXPECT_THROW(Configuration(0b100, 2), std::invalid_argument);
}

}  // namespace
}  // namespace dlg
