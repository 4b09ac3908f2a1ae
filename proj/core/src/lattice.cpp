#include "dlg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dlg {

Bond make_bond(Site x, Site y) { return x < y ? Bond{x, y} : Bond{y, x}; }

LatticeGeometry::LatticeGeometry(std::vector<int> side_lengths, Boundary boundary,
                                 std::vector<int> origin)
    : sides_(std::move(side_lengths)), origin_(std::move(origin)), boundary_(boundary) {
  if (sides_.empty()) throw std::invalid_argument("lattice dimension must be >= 1");
  if (origin_.empty()) origin_.assign(sides_.size(), 0);
  if (origin_.size() != sides_.size())
    throw std::invalid_argument("origin offset has wrong dimension");
  for (int s : sides_) {
    if (s <= 0) throw std::invalid_argument("side length must be >= 1, got " + std::to_string(s));
    if (boundary_ == Boundary::kPeriodic && s < 2)
      throw std::invalid_argument("periodic boundary requires side length >= 2");
  }

  const std::size_t d = sides_.size();
  strides_.assign(d, 1);
  for (std::size_t i = d - 1; i > 0; --i) strides_[i - 1] = strides_[i] * sides_[i];
  site_count_ = strides_[0] * sides_[0];
  if (site_count_ > static_cast<std::size_t>(INT32_MAX))
    throw std::invalid_argument("lattice too large");

  for (std::size_t s = 0; s < site_count_; ++s) {
    for (std::size_t axis = 0; axis < d; ++axis) {
      const int c = static_cast<int>((s / strides_[axis]) % sides_[axis]);
      int next = c + 1;
      if (next == sides_[axis]) {
        if (boundary_ == Boundary::kFree) continue;
        next = 0;
      }
      if (next == c) continue;
      const std::size_t t = s + (static_cast<std::ptrdiff_t>(next) - c) * strides_[axis];
      bonds_.push_back(make_bond(static_cast<Site>(s), static_cast<Site>(t)));
    }
  }
  std::sort(bonds_.begin(), bonds_.end());
  bonds_.erase(std::unique(bonds_.begin(), bonds_.end()), bonds_.end());

  std::vector<std::vector<Site>> adj(site_count_);
  for (const Bond& b : bonds_) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  neighbour_offsets_.reserve(site_count_ + 1);
  neighbour_offsets_.push_back(0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    neighbour_list_.insert(neighbour_list_.end(), list.begin(), list.end());
    neighbour_offsets_.push_back(neighbour_list_.size());
  }
}

std::span<const Site> LatticeGeometry::neighbours(Site s) const {
  if (!contains(s)) throw std::out_of_range("site outside geometry");
  return std::span<const Site>(neighbour_list_)
      .subspan(neighbour_offsets_[s], neighbour_offsets_[s + 1] - neighbour_offsets_[s]);
}

std::ptrdiff_t LatticeGeometry::bond_index(Bond bond) const {
  auto it = std::lower_bound(bonds_.begin(), bonds_.end(), bond);
  if (it == bonds_.end() || *it != bond) return -1;
  return it - bonds_.begin();
}

std::vector<int> LatticeGeometry::coordinates(Site s) const {
  if (!contains(s)) throw std::out_of_range("site outside geometry");
  std::vector<int> c(sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i)
    c[i] = static_cast<int>((static_cast<std::size_t>(s) / strides_[i]) % sides_[i]);
  return c;
}

Site LatticeGeometry::site_at(std::span<const int> coords) const {
  if (coords.size() != sides_.size()) throw std::invalid_argument("coordinate dimension mismatch");
  std::size_t s = 0;
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (coords[i] < 0 || coords[i] >= sides_[i]) throw std::out_of_range("coordinate outside box");
    s += coords[i] * strides_[i];
  }
  return static_cast<Site>(s);
}

std::vector<int> LatticeGeometry::absolute_coordinates(Site s) const {
  auto c = coordinates(s);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += origin_[i];
  return c;
}

LatticeGeometry build_box(int d, int L, Boundary boundary) {
  if (d <= 0) throw std::invalid_argument("dimension must be >= 1");
  if (L <= 0) throw std::invalid_argument("side length must be >= 1");
  return LatticeGeometry(std::vector<int>(d, L), boundary);
}

SwapPath canonical_path(const LatticeGeometry& geom, Site x, Site y) {
  if (!geom.contains(x) || !geom.contains(y)) throw std::out_of_range("path endpoint outside geometry");
  SwapPath path{x, y, {}};
  if (x == y) return path;

  const Site lo = std::min(x, y);
  const Site hi = std::max(x, y);
  auto cur = geom.coordinates(lo);
  const auto target = geom.coordinates(hi);
  Site here = lo;
  for (std::size_t axis = 0; axis < cur.size(); ++axis) {
    const int step = target[axis] > cur[axis] ? 1 : -1;
    while (cur[axis] != target[axis]) {
      cur[axis] += step;
      const Site next = geom.site_at(cur);
      path.bonds.push_back(make_bond(here, next));
      here = next;
    }
  }
  if (x > y) std::reverse(path.bonds.begin(), path.bonds.end());
  return path;
}

CongestionReport congestion(const LatticeGeometry& geom) {
  CongestionReport report;
  report.usage.assign(geom.bonds().size(), 0);
  const auto n = static_cast<Site>(geom.site_count());
  for (Site x = 0; x < n; ++x) {
    for (Site y = x + 1; y < n; ++y) {
      const SwapPath path = canonical_path(geom, x, y);
      report.max_path_length = std::max(report.max_path_length, path.length());
      for (const Bond& b : path.bonds) {
        const auto idx = geom.bond_index(b);
        // Staircase steps are always free-boundary bonds, present in either geometry.
        ++report.usage.at(static_cast<std::size_t>(idx));
      }
    }
  }
  for (std::size_t i = 0; i < report.usage.size(); ++i) {
    if (report.usage[i] > report.max_usage) {
      report.max_usage = report.usage[i];
      report.max_bond = geom.bonds()[i];
    }
  }
  const int L = *std::max_element(geom.side_lengths().begin(), geom.side_lengths().end());
  const int d = geom.dimension();
  report.nominal = d * std::pow(L / 2.0, d + 1);
  return report;
}

}  // namespace dlg
