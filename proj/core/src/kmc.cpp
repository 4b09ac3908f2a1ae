#include "dlg/kmc.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "dlg/forms.hpp"
#include "dlg/spectra.hpp"
#include "dlg/statistics.hpp"

namespace dlg {

SumTree::SumTree(std::size_t leaves) : leaves_(leaves) {
  while (capacity_ < leaves_) capacity_ <<= 1;
  nodes_.assign(2 * capacity_, 0.0);
}

void SumTree::set(std::size_t i, double value) {
  std::size_t node = capacity_ + i;
  nodes_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t SumTree::find(double u) const {
  std::size_t node = 1;
  while (node < capacity_) {
    const double left = nodes_[2 * node];
    if (u < left || nodes_[2 * node + 1] == 0.0) {
      node = 2 * node;
    } else {
      u -= left;
      node = 2 * node + 1;
    }
  }
  std::size_t i = node - capacity_;
  // Rounding can land on a zero leaf at the right edge; step back to a live one.
  while (i > 0 && nodes_[capacity_ + i] == 0.0) --i;
  return i;
}

void SumTree::rebuild() {
  for (std::size_t node = capacity_ - 1; node >= 1; --node) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

KmcState::KmcState(const LatticeGeometry& geom, DisorderField field, Occupancy initial, std::uint64_t seed,
                   KmcOptions options)
    : geom_(&geom), field_(std::move(field)), occ_(std::move(initial)), options_(options), rng_(seed) {
  const std::size_t n = geom.site_count();
  if (field_.size() != n || occ_.size() != n) throw std::invalid_argument("field/occupancy size does not match lattice");
  for (auto o : occ_) particles_ += o ? 1 : 0;
  if (particles_ == 0 || static_cast<std::size_t>(particles_) == n)
    throw std::invalid_argument("frozen sector: N = " + std::to_string(particles_) + " admits no moves");

  slot_offsets_.reserve(n + 1);
  slot_offsets_.push_back(0);
  for (Site s = 0; s < static_cast<Site>(n); ++s) {
    for (Site t : geom.neighbours(s)) {
      slot_from_.push_back(s);
      slot_to_.push_back(t);
    }
    slot_offsets_.push_back(slot_from_.size());
  }
  tree_ = SumTree(slot_from_.size());
  for (std::size_t k = 0; k < slot_from_.size(); ++k) tree_.set(k, slot_rate(k));
}

double KmcState::move_rate(Site from, Site to) const {
  if (!occ_[from] || occ_[to]) return 0.0;
  double r = 1.0 + std::exp(field_[to] - field_[from]);
  if (options_.corruption && options_.corruption->from == from && options_.corruption->to == to)
    r *= options_.corruption->factor;
  return r;
}

double KmcState::slot_rate(std::size_t slot) const { return move_rate(slot_from_[slot], slot_to_[slot]); }

double KmcState::exit_rate(Site s) const {
  double r = 0.0;
  for (std::size_t k = slot_offsets_[s]; k < slot_offsets_[s + 1]; ++k) r += tree_.leaf(k);
  return r;
}

std::size_t KmcState::legal_moves() const {
  std::size_t count = 0;
  for (std::size_t k = 0; k < tree_.size(); ++k) count += tree_.leaf(k) > 0.0 ? 1 : 0;
  return count;
}

void KmcState::refresh_site(Site s) {
  for (std::size_t k = slot_offsets_[s]; k < slot_offsets_[s + 1]; ++k) tree_.set(k, slot_rate(k));
}

double KmcState::draw_waiting_time() {
  std::exponential_distribution<double> wait(tree_.total());
  return wait(rng_);
}

KmcEvent KmcState::apply_move(double dt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t slot = tree_.find(unit(rng_) * tree_.total());
  const Site from = slot_from_[slot];
  const Site to = slot_to_[slot];
  occ_[from] = 0;
  occ_[to] = 1;
  // Only slots out of x, y and their neighbours can change.
  refresh_site(from);
  refresh_site(to);
  for (Site z : geom_->neighbours(from)) refresh_site(z);
  for (Site z : geom_->neighbours(to)) refresh_site(z);
  time_ += dt;
  ++events_;
  if (options_.revalidate_every && events_ % options_.revalidate_every == 0) {
    const CatalogCheck check = revalidate();
    if (check.mismatched_slots != 0 || check.total_relative_error > 1e-9)
      throw std::logic_error("incremental catalog drifted from full rebuild");
  }
  return {from, to, dt};
}

KmcEvent KmcState::step() { return apply_move(draw_waiting_time()); }

CatalogCheck KmcState::revalidate() {
  CatalogCheck check;
  SumTree fresh(slot_from_.size());
  for (std::size_t k = 0; k < slot_from_.size(); ++k) {
    const double r = slot_rate(k);
    if (r != tree_.leaf(k)) ++check.mismatched_slots;
    fresh.set(k, r);
  }
  double direct = 0.0;
  for (std::size_t k = 0; k < slot_from_.size(); ++k) direct += fresh.leaf(k);
  check.total_relative_error = std::abs(tree_.total() - direct) / std::max(direct, 1e-300);
  if (fresh.total() != tree_.total()) ++check.mismatched_slots;
  return check;
}

namespace {

std::uint64_t occupancy_bits(const Occupancy& occ) {
  std::uint64_t b = 0;
  for (std::size_t x = 0; x < occ.size(); ++x)
    if (occ[x]) b |= std::uint64_t{1} << x;
  return b;
}

}  // namespace

EquilibriumReport equilibrium_check_given_gap(KmcState& state, const CanonicalMeasure& measure,
                                              std::uint64_t events, double gap, double threshold) {
  const int sites = static_cast<int>(state.geometry().site_count());
  if (sites > kMaxEnumeratedSites) throw std::invalid_argument("equilibrium check needs an enumerable lattice");
  if (measure.sites() != static_cast<std::size_t>(sites) || measure.particles() != state.particles())
    throw std::invalid_argument("measure does not match simulated sector");
  const ConfigSpace space(sites, state.particles());
  if (space.dimension() > 10000) throw std::invalid_argument("equilibrium check limited to 10^4 states");
  const std::vector<double> p = measure.probabilities(space);

  std::vector<double> held(space.dimension(), 0.0);
  std::uint64_t bits = occupancy_bits(state.occupancy());
  const double t0 = state.time();
  for (std::uint64_t e = 0; e < events; ++e) {
    const double wait = state.draw_waiting_time();
    held[space.rank_bits(bits)] += wait;
    const KmcEvent ev = state.apply_move(wait);
    bits ^= (std::uint64_t{1} << ev.from) | (std::uint64_t{1} << ev.to);
  }

  EquilibriumReport r;
  r.threshold = threshold;
  r.events = events;
  r.states = space.dimension();
  r.total_time = state.time() - t0;
  r.effective_samples = gap * r.total_time / 2.0;
  double chi = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dev = held[i] / r.total_time - p[i];
    chi += dev * dev / p[i];
  }
  r.statistic = r.effective_samples * chi;
  r.dof = static_cast<double>(p.size() - 1);
  r.p_value = p.size() > 1 ? chi_square_pvalue(r.statistic, r.dof) : 1.0;
  if (static_cast<double>(events) < 100.0 * static_cast<double>(p.size()))
    r.status = CheckStatus::kInconclusive;
  else
    r.status = r.p_value > threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

EquilibriumReport equilibrium_check(KmcState& state, const CanonicalMeasure& measure, std::uint64_t events,
                                    double threshold) {
  const auto base = make_measured_space(measure);
  const double gap = spectral_gap(build_kawasaki(state.geometry(), base).form).gap;
  return equilibrium_check_given_gap(state, measure, events, gap, threshold);
}

FluxReport flux_balance_check(KmcState& state, std::uint64_t events) {
  if (state.geometry().site_count() > static_cast<std::size_t>(kMaxEnumeratedSites))
    throw std::invalid_argument("flux check needs an enumerable lattice");
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> jumps;
  std::uint64_t bits = occupancy_bits(state.occupancy());
  for (std::uint64_t e = 0; e < events; ++e) {
    const KmcEvent ev = state.step();
    const std::uint64_t next = bits ^ ((std::uint64_t{1} << ev.from) | (std::uint64_t{1} << ev.to));
    ++jumps[{bits, next}];
    bits = next;
  }
  FluxReport r;
  for (const auto& [key, forward] : jumps) {
    if (key.first > key.second) continue;
    const auto it = jumps.find({key.second, key.first});
    const double backward = it == jumps.end() ? 0.0 : static_cast<double>(it->second);
    const double f = static_cast<double>(forward);
    r.statistic += (f - backward) * (f - backward) / (f + backward);
    r.dof += 1.0;
  }
  for (const auto& [key, count] : jumps) {
    // Pairs seen only in the descending direction.
    if (key.first > key.second && !jumps.contains({key.second, key.first})) {
      r.statistic += static_cast<double>(count);
      r.dof += 1.0;
    }
  }
  r.p_value = r.dof > 0 ? chi_square_pvalue(r.statistic, r.dof) : 1.0;
  return r;
}

RelaxationEstimate relaxation_time(KmcState& state, std::span<const double> weights, double horizon,
                                   double grid_dt, std::vector<double>* series_out) {
  if (weights.size() != state.geometry().site_count()) throw std::invalid_argument("observable weights size mismatch");
  if (!(grid_dt > 0.0) || !(horizon > grid_dt)) throw std::invalid_argument("need 0 < grid_dt < horizon");
  const auto samples = static_cast<std::size_t>(horizon / grid_dt);
  const auto series = sample_on_grid(state, grid_dt, samples, [&](const Occupancy& occ) {
    double s = 0.0;
    for (std::size_t x = 0; x < occ.size(); ++x)
      if (occ[x]) s += weights[x];
    return s;
  });
  const AutocorrelationTime act = autocorrelation_time(series, grid_dt);
  if (series_out) *series_out = series;
  RelaxationEstimate r;
  r.tau = act.tau;
  r.tau_error = act.tau_error;
  r.exponential_tau = act.exponential_tau;
  r.horizon = horizon;
  r.grid_dt = grid_dt;
  r.samples = samples;
  r.inconclusive = horizon < 50.0 * r.tau;
  return r;
}

std::vector<double> first_fourier_mode(std::size_t L) {
  std::vector<double> w(L);
  for (std::size_t x = 0; x < L; ++x) w[x] = std::cos(M_PI * (x + 0.5) / static_cast<double>(L));
  return w;
}

}  // namespace dlg
