#include "dlg/configspace.hpp"

#include <stdexcept>

namespace dlg {

namespace {

void check_sites(int sites) {
  if (sites < 0 || sites > kMaxEnumeratedSites)
    throw std::invalid_argument("enumerated spaces support 0.." + std::to_string(kMaxEnumeratedSites) + " sites");
}

std::uint64_t low_mask(int sites) {
  return sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sites) - 1;
}

}  // namespace

Configuration::Configuration(std::uint64_t bits, int sites) : bits_(bits), sites_(sites) {
  check_sites(sites);
  if ((bits & ~low_mask(sites)) != 0) throw std::invalid_argument("occupied bit beyond lattice size");
}

Configuration Configuration::from_occupancy(std::span<const std::uint8_t> occupancy) {
  check_sites(static_cast<int>(occupancy.size()));
  std::uint64_t bits = 0;
  for (std::size_t x = 0; x < occupancy.size(); ++x)
    if (occupancy[x]) bits |= std::uint64_t{1} << x;
  return Configuration(bits, static_cast<int>(occupancy.size()));
}

Configuration Configuration::parse(const std::string& text) {
  check_sites(static_cast<int>(text.size()));
  std::uint64_t bits = 0;
  for (std::size_t x = 0; x < text.size(); ++x) {
    if (text[x] == '1') bits |= std::uint64_t{1} << x;
    else if (text[x] != '0') throw std::invalid_argument("configuration string must contain only 0 and 1");
  }
  return Configuration(bits, static_cast<int>(text.size()));
}

std::vector<std::uint8_t> Configuration::occupancy() const {
  std::vector<std::uint8_t> occ(sites_);
  for (int x = 0; x < sites_; ++x) occ[x] = occupied(x) ? 1 : 0;
  return occ;
}

std::string Configuration::to_string() const {
  std::string s(sites_, '0');
  for (int x = 0; x < sites_; ++x)
    if (occupied(x)) s[x] = '1';
  return s;
}

Configuration apply_swap(const Configuration& eta, Site x, Site y) {
  if (x < 0 || y < 0 || x >= eta.sites() || y >= eta.sites()) throw std::out_of_range("swap site outside lattice");
  return Configuration(swap_bits(eta.bits(), x, y), eta.sites());
}

Configuration apply_flip(const Configuration& eta, Site x) {
  if (x < 0 || x >= eta.sites()) throw std::out_of_range("flip site outside lattice");
  return Configuration(eta.bits() ^ (std::uint64_t{1} << x), eta.sites());
}

std::uint64_t binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > UINT64_MAX) throw std::overflow_error("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

ConfigSpace::ConfigSpace(int sites, int particles) : ConfigSpace(sites, std::optional<int>(particles)) {}

ConfigSpace ConfigSpace::full(int sites) { return ConfigSpace(sites, std::nullopt); }

ConfigSpace::ConfigSpace(int sites, std::optional<int> particles) : sites_(sites), particles_(particles) {
  check_sites(sites);
  if (particles_ && (*particles_ < 0 || *particles_ > sites))
    throw std::invalid_argument("particle number must lie in [0, sites]");

  binom_.assign(static_cast<std::size_t>(sites + 1) * (sites + 1), 0);
  for (int n = 0; n <= sites; ++n) {
    binom_[static_cast<std::size_t>(n) * (sites + 1)] = 1;
    for (int k = 1; k <= n; ++k) {
      const std::uint64_t a = binom_[static_cast<std::size_t>(n - 1) * (sites + 1) + k - 1];
      const std::uint64_t b = k <= n - 1 ? binom_[static_cast<std::size_t>(n - 1) * (sites + 1) + k] : 0;
      binom_[static_cast<std::size_t>(n) * (sites + 1) + k] = a + b;  // saturates meaningfully only below 2^64
    }
  }

  if (!particles_) {
    if (sites > 26) throw std::invalid_argument("full space too large to enumerate");
    states_.resize(std::size_t{1} << sites);
    for (std::size_t i = 0; i < states_.size(); ++i) states_[i] = i;
    return;
  }

  const int N = *particles_;
  const std::uint64_t dim = binomial_coefficient(sites, N);
  if (dim > kMaxDimension) throw std::invalid_argument("configuration space too large to enumerate");
  states_.reserve(dim);
  if (N == 0) {
    states_.push_back(0);
    return;
  }
  // Gosper's hack: next larger word with the same popcount.
  std::uint64_t v = low_mask(N);
  const std::uint64_t limit = low_mask(sites);
  for (std::uint64_t i = 0; i < dim; ++i) {
    states_.push_back(v);
    if (i + 1 == dim) break;
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
    if (v > limit) throw std::logic_error("enumeration overran the lattice");
  }
}

std::uint64_t ConfigSpace::rank_bits(std::uint64_t bits) const {
  if ((bits & ~low_mask(sites_)) != 0) throw std::invalid_argument("configuration does not fit this space");
  if (!particles_) return bits;
  if (std::popcount(bits) != *particles_) throw std::invalid_argument("particle count mismatch for rank");
  std::uint64_t r = 0;
  int i = 1;
  while (bits) {
    const int pos = std::countr_zero(bits);
    r += binomial(pos, i++);
    bits &= bits - 1;
  }
  return r;
}

std::uint64_t ConfigSpace::rank(const Configuration& eta) const {
  if (eta.sites() != sites_) throw std::invalid_argument("configuration lattice size mismatch");
  return rank_bits(eta.bits());
}

Configuration ConfigSpace::unrank(std::uint64_t index) const {
  if (index >= dimension()) throw std::out_of_range("rank outside configuration space");
  if (!particles_) return Configuration(index, sites_);
  std::uint64_t bits = 0;
  int pos = sites_ - 1;
  for (int i = *particles_; i >= 1; --i) {
    while (binomial(pos, i) > index) --pos;
    bits |= std::uint64_t{1} << pos;
    index -= binomial(pos, i);
    --pos;
  }
  return Configuration(bits, sites_);
}

}  // namespace dlg
