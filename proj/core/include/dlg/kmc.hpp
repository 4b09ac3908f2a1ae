#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dlg/configspace.hpp"
#include "dlg/disorder.hpp"
#include "dlg/ensemble.hpp"
#include "dlg/lattice.hpp"

namespace dlg {

// Binary sum tree over nonnegative leaf weights. Internal nodes are always
// left + right of their children, so a rebuild from the same leaves is
// bit-identical to incremental maintenance.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves = 0);

  std::size_t size() const { return leaves_; }
  double total() const { return nodes_.empty() ? 0.0 : nodes_[1]; }
  double leaf(std::size_t i) const { return nodes_[capacity_ + i]; }
  void set(std::size_t i, double value);
  // Leaf i with prefix(i) <= u < prefix(i + 1), for u in [0, total()).
  std::size_t find(double u) const;
  void rebuild();

 private:
  std::size_t leaves_ = 0;
  std::size_t capacity_ = 1;
  std::vector<double> nodes_;
};

// Multiplies the rate of one directed jump; used only as a negative control.
struct DirectedCorruption {
  Site from = 0;
  Site to = 0;
  double factor = 1.0;
};

struct KmcOptions {
  std::optional<DirectedCorruption> corruption;
  // Full catalog rebuild and comparison every this many events (0: never).
  std::uint64_t revalidate_every = 100000;
};

struct KmcEvent {
  Site from = 0;
  Site to = 0;
  double dt = 0.0;
};

struct CatalogCheck {
  std::size_t mismatched_slots = 0;
  double total_relative_error = 0.0;
};

// Continuous-time Kawasaki dynamics: a particle at x jumps to an empty
// neighbour y at rate 1 + e^{alpha_y - alpha_x}. The catalog holds one slot
// per directed neighbour pair; slots for blocked or empty moves have rate 0.
class KmcState {
 public:
  KmcState(const LatticeGeometry& geom, DisorderField field, Occupancy initial, std::uint64_t seed,
           KmcOptions options = {});

  const LatticeGeometry& geometry() const { return *geom_; }
  const DisorderField& field() const { return field_; }
  const Occupancy& occupancy() const { return occ_; }
  int particles() const { return particles_; }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  double total_rate() const { return tree_.total(); }

  // Rate the catalog should hold for from -> to in the current state.
  double move_rate(Site from, Site to) const;
  // Sum of catalog rates out of a site.
  double exit_rate(Site s) const;
  std::size_t legal_moves() const;

  // Exponential waiting time at the current total rate (state unchanged).
  double draw_waiting_time();
  // Select a move with probability rate / total and apply it; time advances by dt.
  KmcEvent apply_move(double dt);
  KmcEvent step();

  // Rebuilds the catalog from scratch and compares it with the incremental one.
  CatalogCheck revalidate();

 private:
  std::size_t slot_begin(Site s) const { return slot_offsets_[s]; }
  double slot_rate(std::size_t slot) const;
  void refresh_site(Site s);

  const LatticeGeometry* geom_;
  DisorderField field_;
  Occupancy occ_;
  KmcOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> slot_offsets_;
  std::vector<Site> slot_from_;
  std::vector<Site> slot_to_;
  SumTree tree_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  int particles_ = 0;
};

// Records the state on the grid t0 + dt, t0 + 2 dt, ...; the value at a grid
// time is that of the configuration occupied at that time.
template <typename Observable>
std::vector<double> sample_on_grid(KmcState& state, double dt, std::size_t samples, Observable&& observe) {
  std::vector<double> out;
  out.reserve(samples);
  double next = state.time() + dt;
  while (out.size() < samples) {
    const double wait = state.draw_waiting_time();
    while (out.size() < samples && next < state.time() + wait) {
      out.push_back(observe(state.occupancy()));
      next += dt;
    }
    if (out.size() == samples) break;
    state.apply_move(wait);
  }
  return out;
}

enum class CheckStatus { kPass, kFail, kInconclusive };
const char* to_string(CheckStatus status);

struct EquilibriumReport {
  CheckStatus status = CheckStatus::kInconclusive;
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
  double effective_samples = 0.0;  // gap * T / 2
  double total_time = 0.0;
  std::uint64_t events = 0;
  std::size_t states = 0;
  double threshold = 1e-3;
};

// Time-weighted occupation frequencies against the canonical weights.
// Correlations are accounted for with n_eff = gap * T / 2, which never
// exceeds T / (2 tau_int) for any indicator.
EquilibriumReport equilibrium_check_given_gap(KmcState& state, const CanonicalMeasure& measure,
                                              std::uint64_t events, double gap, double threshold = 1e-3);
// Computes the Kawasaki gap of the state's geometry and field first.
EquilibriumReport equilibrium_check(KmcState& state, const CanonicalMeasure& measure, std::uint64_t events,
                                    double threshold = 1e-3);

struct FluxReport {
  double statistic = 0.0;  // sum over state pairs (n_ij - n_ji)^2 / (n_ij + n_ji)
  double dof = 0.0;
  double p_value = 0.0;
};

// Counts jumps between enumerated states and compares forward with reverse.
FluxReport flux_balance_check(KmcState& state, std::uint64_t events);

struct RelaxationEstimate {
  double tau = 0.0;
  double tau_error = 0.0;
  double exponential_tau = 0.0;
  double horizon = 0.0;
  double grid_dt = 0.0;
  std::size_t samples = 0;
  bool inconclusive = false;  // horizon < 50 tau
};

// Integrated autocorrelation time of the linear observable sum_x w_x eta_x,
// sampled on a fixed time grid over [t, t + horizon]. The sampled series is
// copied to `series` when given.
RelaxationEstimate relaxation_time(KmcState& state, std::span<const double> weights, double horizon,
                                   double grid_dt, std::vector<double>* series = nullptr);

// Slowest linear mode of symmetric exclusion on a free segment of L sites:
// w_x = cos(pi (x + 1/2) / L).
std::vector<double> first_fourier_mode(std::size_t L);

}  // namespace dlg
