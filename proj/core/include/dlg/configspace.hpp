#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlg/lattice.hpp"

namespace dlg {

inline constexpr int kMaxEnumeratedSites = 64;

// Occupancy of up to 64 sites packed into one word; bit x is site x.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::uint64_t bits, int sites);
  static Configuration from_occupancy(std::span<const std::uint8_t> occupancy);
  // Parses a 0/1 string in site order.
  static Configuration parse(const std::string& text);

  std::uint64_t bits() const { return bits_; }
  int sites() const { return sites_; }
  int particles() const { return std::popcount(bits_); }
  bool occupied(Site x) const { return (bits_ >> x) & 1u; }

  std::vector<std::uint8_t> occupancy() const;
  std::string to_string() const;

  bool operator==(const Configuration&) const = default;

 private:
  std::uint64_t bits_ = 0;
  int sites_ = 0;
};

inline std::uint64_t swap_bits(std::uint64_t bits, Site x, Site y) {
  const std::uint64_t diff = ((bits >> x) ^ (bits >> y)) & 1u;
  return bits ^ ((diff << x) | (diff << y));
}

// T_{x,y}: exchange the contents of x and y. x == y is the identity.
Configuration apply_swap(const Configuration& eta, Site x, Site y);
// sigma_x: toggle site x.
Configuration apply_flip(const Configuration& eta, Site x);

// All N-particle configurations on `sites` sites (or all 2^sites of them for
// the non-conserving space), ranked in colexicographic order. Colex rank order
// coincides with increasing numeric value of the packed word.
class ConfigSpace {
 public:
  static constexpr std::size_t kMaxDimension = std::size_t{1} << 26;

  ConfigSpace(int sites, int particles);
  static ConfigSpace full(int sites);

  int sites() const { return sites_; }
  std::optional<int> particles() const { return particles_; }
  bool conserving() const { return particles_.has_value(); }
  std::size_t dimension() const { return states_.size(); }

  std::uint64_t rank_bits(std::uint64_t bits) const;
  std::uint64_t rank(const Configuration& eta) const;
  Configuration unrank(std::uint64_t index) const;

  std::uint64_t state_bits(std::size_t index) const { return states_[index]; }
  std::span<const std::uint64_t> states() const { return states_; }

  bool same_as(const ConfigSpace& other) const {
    return sites_ == other.sites_ && particles_ == other.particles_;
  }

 private:
  ConfigSpace(int sites, std::optional<int> particles);
  std::uint64_t binomial(int n, int k) const {
    return k < 0 || k > n ? 0 : binom_[static_cast<std::size_t>(n) * (sites_ + 1) + k];
  }

  int sites_ = 0;
  std::optional<int> particles_;
  std::vector<std::uint64_t> binom_;
  std::vector<std::uint64_t> states_;
};

// Exact binomial coefficient (throws on overflow).
std::uint64_t binomial_coefficient(int n, int k);

}  // namespace dlg
