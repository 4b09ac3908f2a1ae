#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dlg/lattice.hpp"

namespace dlg {

// Site field alpha_x with |alpha_x| <= K checked on construction.
class DisorderField {
 public:
  DisorderField() = default;
  DisorderField(std::vector<double> values, double bound);

  static DisorderField zero(std::size_t sites) {
    return DisorderField(std::vector<double>(sites, 0.0), 0.0);
  }

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t x) const { return values_[x]; }
  std::size_t size() const { return values_.size(); }
  double bound() const { return bound_; }

  // alpha_x + c for every site; the bound grows by |c|.
  DisorderField shifted(double c) const;

 private:
  std::vector<double> values_;
  double bound_ = 0.0;
};

// I.i.d. uniform values on [-K, K] from a seeded stream.
DisorderField generate_iid(const LatticeGeometry& geom, double K, std::uint64_t seed);

struct QuantizedField {
  DisorderField field;
  bool degenerate = false;  // K == 0: the grid collapses to {0}
};

// Nearest grid point K j / L, j in [-L, L]; exact midpoints round toward +K.
QuantizedField quantize_to_grid(const DisorderField& field, int L);

// Sets the first and last site to +K.
DisorderField force_endpoints(const DisorderField& field);

// Increasing list of sites where alpha == K exactly. Requires both endpoints
// to already sit at K (see force_endpoints).
std::vector<Site> peak_set(const DisorderField& field);

// Plain text: optional "# K <bound>" header, then "site value" per line.
// Values use shortest round-trip decimal form.
void write_field(std::ostream& out, const DisorderField& field);
DisorderField read_field(std::istream& in);

}  // namespace dlg
