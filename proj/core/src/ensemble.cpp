#include "dlg/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dlg/logmath.hpp"

namespace dlg {

GrandMeasure::GrandMeasure(DisorderField field) : field_(std::move(field)) {
  p_.resize(field_.size());
  for (std::size_t x = 0; x < p_.size(); ++x) {
    const double a = field_[x];
    p_[x] = std::exp(a) / (1.0 + std::exp(a));
    log_z_ += log_add(0.0, a);
  }
}

double GrandMeasure::log_weight(const Configuration& eta) const {
  if (static_cast<std::size_t>(eta.sites()) != sites()) throw std::invalid_argument("configuration size mismatch");
  double h = 0.0;
  for (std::uint64_t b = eta.bits(); b; b &= b - 1) h += field_[std::countr_zero(b)];
  return h;
}

double GrandMeasure::probability(const Configuration& eta) const {
  return std::exp(log_weight(eta) - log_z_);
}

std::vector<double> GrandMeasure::probabilities(const ConfigSpace& space) const {
  if (static_cast<std::size_t>(space.sites()) != sites()) throw std::invalid_argument("space size mismatch");
  std::vector<double> probs(space.dimension());
  for (std::size_t i = 0; i < probs.size(); ++i)
    probs[i] = probability(Configuration(space.state_bits(i), space.sites()));
  return probs;
}

std::vector<double> log_partition_all(std::span<const double> alpha) {
  const std::size_t n = alpha.size();
  std::vector<double> row(n + 1, kLogZero);
  row[0] = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = m + 1; k >= 1; --k) row[k] = log_add(row[k], alpha[m] + row[k - 1]);
  }
  return row;
}

PartitionValue partition_dp(std::span<const double> alpha, int N) {
  if (N < 0 || static_cast<std::size_t>(N) > alpha.size())
    throw std::invalid_argument("particle number outside [0, |Lambda|]");
  std::vector<double> row(N + 1, kLogZero);
  row[0] = 0.0;
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    const int top = std::min<int>(N, static_cast<int>(m) + 1);
    for (int k = top; k >= 1; --k) row[k] = log_add(row[k], alpha[m] + row[k - 1]);
  }
  PartitionValue v;
  v.log_z = row[N];
  v.log_zeta = v.log_z - log_binomial(static_cast<int>(alpha.size()), N);
  return v;
}

CanonicalMeasure::CanonicalMeasure(DisorderField field, int N) : field_(std::move(field)), N_(N) {
  const std::size_t n = field_.size();
  if (N < 0 || static_cast<std::size_t>(N) > n)
    throw std::invalid_argument("particle number " + std::to_string(N) + " outside [0, " + std::to_string(n) + "]");
  const std::size_t w = static_cast<std::size_t>(N) + 1;
  table_.assign((n + 1) * w, kLogZero);
  table_[0] = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double a = field_[m];
    const double* prev = &table_[m * w];
    double* cur = &table_[(m + 1) * w];
    cur[0] = 0.0;
    for (std::size_t k = 1; k < w; ++k) cur[k] = log_add(prev[k], a + prev[k - 1]);
  }
}

double CanonicalMeasure::prefix(std::size_t m, int n) const {
  if (n < 0 || n > N_) return kLogZero;
  return table_[m * (static_cast<std::size_t>(N_) + 1) + n];
}

double CanonicalMeasure::log_weight(const Configuration& eta) const {
  if (static_cast<std::size_t>(eta.sites()) != sites()) throw std::invalid_argument("configuration size mismatch");
  if (eta.particles() != N_) throw std::invalid_argument("configuration particle count differs from N");
  double h = 0.0;
  for (std::uint64_t b = eta.bits(); b; b &= b - 1) h += field_[std::countr_zero(b)];
  return h - log_partition();
}

double CanonicalMeasure::weight(const Configuration& eta) const { return std::exp(log_weight(eta)); }

double CanonicalMeasure::log_weight(std::span<const std::uint8_t> occupancy) const {
  if (occupancy.size() != sites()) throw std::invalid_argument("occupancy size mismatch");
  double h = 0.0;
  int count = 0;
  for (std::size_t x = 0; x < occupancy.size(); ++x) {
    if (occupancy[x]) {
      h += field_[x];
      ++count;
    }
  }
  if (count != N_) throw std::invalid_argument("occupancy particle count differs from N");
  return h - log_partition();
}

double CanonicalMeasure::occupation_prob(Site x) const {
  if (x < 0 || static_cast<std::size_t>(x) >= sites()) throw std::out_of_range("site outside lattice");
  if (N_ == 0) return 0.0;
  if (static_cast<std::size_t>(N_) == sites()) return 1.0;
  std::vector<double> rest;
  rest.reserve(sites() - 1);
  for (std::size_t y = 0; y < sites(); ++y)
    if (static_cast<Site>(y) != x) rest.push_back(field_[y]);
  const double log_rest = partition_dp(rest, N_ - 1).log_z;
  return std::exp(field_[x] + log_rest - log_partition());
}

std::vector<double> CanonicalMeasure::occupation_probs() const {
  const std::size_t n = sites();
  std::vector<double> probs(n, N_ == 0 ? 0.0 : 1.0);
  if (degenerate()) return probs;

  // suffix[k] = log Z over sites {x+1..n-1} with k particles, updated as x decreases.
  const std::size_t w = static_cast<std::size_t>(N_);
  std::vector<double> suffix(w, kLogZero);
  suffix[0] = 0.0;
  const double log_z = log_partition();
  for (std::size_t xi = n; xi-- > 0;) {
    // Z_{Lambda\x, N-1} = sum_k prefix(x, k) * suffix(N-1-k)
    double acc = kLogZero;
    for (std::size_t k = 0; k < w; ++k) acc = log_add(acc, prefix(xi, static_cast<int>(k)) + suffix[w - 1 - k]);
    probs[xi] = std::exp(field_[xi] + acc - log_z);
    for (std::size_t k = w - 1; k >= 1; --k) suffix[k] = log_add(suffix[k], field_[xi] + suffix[k - 1]);
  }
  return probs;
}

Occupancy CanonicalMeasure::exact_sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Occupancy occ(sites(), 0);
  int remaining = N_;
  for (std::size_t m = sites(); m-- > 0 && remaining > 0;) {
    // P(eta_m = 1 | `remaining` particles among sites 0..m)
    if (static_cast<std::size_t>(remaining) == m + 1) {
      occ[m] = 1;
      --remaining;
      continue;
    }
    const double p = std::exp(field_[m] + prefix(m, remaining - 1) - prefix(m + 1, remaining));
    if (unit(rng) < p) {
      occ[m] = 1;
      --remaining;
    }
  }
  return occ;
}

Occupancy CanonicalMeasure::exact_sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return exact_sample(rng);
}

std::vector<double> CanonicalMeasure::probabilities(const ConfigSpace& space) const {
  if (static_cast<std::size_t>(space.sites()) != sites() || space.particles() != N_)
    throw std::invalid_argument("configuration space does not match measure");
  std::vector<double> probs(space.dimension());
  for (std::size_t i = 0; i < probs.size(); ++i)
    probs[i] = std::exp(log_weight(Configuration(space.state_bits(i), space.sites())));
  return probs;
}

double expectation(std::span<const double> probs, std::span<const double> f) {
  if (probs.size() != f.size()) throw std::invalid_argument("observable dimension does not match space");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += probs[i] * f[i];
  return s;
}

double covariance(std::span<const double> probs, std::span<const double> f, std::span<const double> g) {
  if (probs.size() != g.size()) throw std::invalid_argument("observable dimension does not match space");
  const double ef = expectation(probs, f);
  const double eg = expectation(probs, g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += probs[i] * (f[i] - ef) * (g[i] - eg);
  return s;
}

double variance(std::span<const double> probs, std::span<const double> f) { return covariance(probs, f, f); }

double variance(const CanonicalMeasure& measure, const ConfigSpace& space, std::span<const double> f) {
  return variance(measure.probabilities(space), f);
}

double covariance(const CanonicalMeasure& measure, const ConfigSpace& space, std::span<const double> f,
                  std::span<const double> g) {
  return covariance(measure.probabilities(space), f, g);
}

}  // namespace dlg
