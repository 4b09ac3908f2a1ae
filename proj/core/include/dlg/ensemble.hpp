#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dlg/configspace.hpp"
#include "dlg/disorder.hpp"
#include "dlg/logmath.hpp"

namespace dlg {

using Occupancy = std::vector<std::uint8_t>;

// Product Bernoulli measure with p_x = e^{alpha_x} / (1 + e^{alpha_x}).
class GrandMeasure {
 public:
  explicit GrandMeasure(DisorderField field);

  const DisorderField& field() const { return field_; }
  std::size_t sites() const { return field_.size(); }
  double occupation(Site x) const { return p_[x]; }
  std::span<const double> occupations() const { return p_; }
  // log Z = sum_x log(1 + e^{alpha_x}).
  double log_partition() const { return log_z_; }
  double log_weight(const Configuration& eta) const;
  double probability(const Configuration& eta) const;
  // Probabilities indexed by rank in `space` (full or fixed-N).
  std::vector<double> probabilities(const ConfigSpace& space) const;

 private:
  DisorderField field_;
  std::vector<double> p_;
  double log_z_ = 0.0;
};

struct PartitionValue {
  double log_z = 0.0;     // log Z_{alpha,Lambda,N}
  double log_zeta = 0.0;  // log of Z / C(|Lambda|, N)
};

// Site-by-site DP for the N-particle partition sum, in log space.
PartitionValue partition_dp(std::span<const double> alpha, int N);
// log Z_{alpha,Lambda,n} for every n = 0..|Lambda|.
std::vector<double> log_partition_all(std::span<const double> alpha);

// The grand measure conditioned on exactly N particles. Holds the prefix
// table log Z_{alpha,{0..m-1},n}, so memory is O(|Lambda| N).
class CanonicalMeasure {
 public:
  CanonicalMeasure(DisorderField field, int N);

  const DisorderField& field() const { return field_; }
  std::size_t sites() const { return field_.size(); }
  int particles() const { return N_; }
  // Point mass: N == 0 or N == |Lambda|.
  bool degenerate() const { return N_ == 0 || static_cast<std::size_t>(N_) == sites(); }

  double log_partition() const { return prefix(sites(), N_); }
  double log_zeta() const { return log_partition() - log_binomial(static_cast<int>(sites()), N_); }

  double log_weight(const Configuration& eta) const;
  double weight(const Configuration& eta) const;
  double log_weight(std::span<const std::uint8_t> occupancy) const;

  // mu(eta_x = 1) = e^{alpha_x} Z_{Lambda\x,N-1} / Z_{Lambda,N}.
  double occupation_prob(Site x) const;
  // All sites at once from prefix/suffix tables.
  std::vector<double> occupation_probs() const;

  // Sequential conditional sampling from the last site down.
  Occupancy exact_sample(std::mt19937_64& rng) const;
  Occupancy exact_sample(std::uint64_t seed) const;

  // Probabilities indexed by rank in `space`; space must match (sites, N).
  std::vector<double> probabilities(const ConfigSpace& space) const;

 private:
  double prefix(std::size_t m, int n) const;

  DisorderField field_;
  int N_ = 0;
  std::vector<double> table_;  // (sites+1) x (N+1)
};

// Moments of an observable on an enumerated space, given rank-indexed
// probabilities. Centered summation so variance is never negative.
double expectation(std::span<const double> probs, std::span<const double> f);
double covariance(std::span<const double> probs, std::span<const double> f, std::span<const double> g);
double variance(std::span<const double> probs, std::span<const double> f);

double variance(const CanonicalMeasure& measure, const ConfigSpace& space, std::span<const double> f);
double covariance(const CanonicalMeasure& measure, const ConfigSpace& space, std::span<const double> f,
                  std::span<const double> g);

}  // namespace dlg
