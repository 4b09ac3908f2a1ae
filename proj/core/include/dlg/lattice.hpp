#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dlg {

using Site = std::int32_t;

enum class Boundary { kFree, kPeriodic };

// Unordered nearest-neighbour pair, stored with a < b.
struct Bond {
  Site a = 0;
  Site b = 0;
  auto operator<=>(const Bond&) const = default;
};

Bond make_bond(Site x, Site y);

// Box {y + [0, L_1) x ... x [0, L_d)} with row-major site indexing: the last
// coordinate varies fastest. Immutable once built.
class LatticeGeometry {
 public:
  LatticeGeometry(std::vector<int> side_lengths, Boundary boundary,
                  std::vector<int> origin = {});

  int dimension() const { return static_cast<int>(sides_.size()); }
  std::span<const int> side_lengths() const { return sides_; }
  std::span<const int> origin() const { return origin_; }
  Boundary boundary() const { return boundary_; }
  std::size_t site_count() const { return site_count_; }
  bool contains(Site s) const {
    return s >= 0 && static_cast<std::size_t>(s) < site_count_;
  }

  // Sorted, duplicate-free.
  std::span<const Bond> bonds() const { return bonds_; }
  // Distinct neighbours of s in increasing site order.
  std::span<const Site> neighbours(Site s) const;
  // Index of `bond` in bonds(), or -1.
  std::ptrdiff_t bond_index(Bond bond) const;

  // Coordinates relative to the box corner, each in [0, L_i).
  std::vector<int> coordinates(Site s) const;
  Site site_at(std::span<const int> coords) const;
  std::vector<int> absolute_coordinates(Site s) const;

 private:
  std::vector<int> sides_;
  std::vector<int> origin_;
  std::vector<std::size_t> strides_;
  Boundary boundary_;
  std::size_t site_count_ = 0;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> neighbour_offsets_;
  std::vector<Site> neighbour_list_;
};

LatticeGeometry build_box(int d, int L, Boundary boundary);

struct SwapPath {
  Site from = 0;
  Site to = 0;
  std::vector<Bond> bonds;  // in traversal order from `from` to `to`
  std::size_t length() const { return bonds.size(); }
};

// Axis-ordered staircase between x and y. The route is built from the
// lower-indexed endpoint (first axis first, then the second, ...) and reversed
// when x > y, so that path(x, y) and path(y, x) use the same bonds. Never uses
// wrap-around bonds, even on periodic geometries.
SwapPath canonical_path(const LatticeGeometry& geom, Site x, Site y);

struct CongestionReport {
  std::vector<std::int64_t> usage;  // aligned with geom.bonds()
  std::int64_t max_usage = 0;
  Bond max_bond{};
  // d (L/2)^{d+1} with L the largest side.
  double nominal = 0.0;
  // Counts are over unordered pairs; ordered-pair sums are this factor larger.
  int ordered_pair_factor = 2;
  std::size_t max_path_length = 0;
};

CongestionReport congestion(const LatticeGeometry& geom);

}  // namespace dlg
