#include "dlg/forms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dlg {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

void add_conductance(std::vector<Triplet>& t, std::size_t i, std::size_t j, double w) {
  t.emplace_back(i, i, w);
  t.emplace_back(j, j, w);
  t.emplace_back(i, j, -w);
  t.emplace_back(j, i, -w);
}

Dynamics make_dynamics(const MeasuredSpacePtr& base, std::vector<Triplet>& rates, std::vector<Triplet>& form,
                       std::string label) {
  const std::size_t n = base->space.dimension();
  SparseMatrix gen = from_triplets(n, rates);
  std::vector<Triplet> diag;
  for (Eigen::Index r = 0; r < gen.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(gen, r); it; ++it) s += it.value();
    if (s != 0.0) diag.emplace_back(r, r, -s);
  }
  if (!diag.empty()) {
    SparseMatrix d(gen.rows(), gen.cols());
    d.setFromTriplets(diag.begin(), diag.end());
    gen += d;
    gen.makeCompressed();
  }
  return Dynamics{SparseGenerator(std::move(gen), base), QuadraticForm(from_triplets(n, form), base, std::move(label)),
                  n <= 1};
}

}  // namespace

MeasuredSpacePtr make_measured_space(const CanonicalMeasure& measure) {
  ConfigSpace space(static_cast<int>(measure.sites()), measure.particles());
  auto probs = measure.probabilities(space);
  return std::make_shared<const MeasuredSpace>(MeasuredSpace{std::move(space), measure.field(), std::move(probs)});
}

MeasuredSpacePtr make_measured_space(const GrandMeasure& measure) {
  if (measure.sites() > 20) throw std::invalid_argument("full configuration space limited to 20 sites");
  ConfigSpace space = ConfigSpace::full(static_cast<int>(measure.sites()));
  auto probs = measure.probabilities(space);
  return std::make_shared<const MeasuredSpace>(MeasuredSpace{std::move(space), measure.field(), std::move(probs)});
}

SparseGenerator::SparseGenerator(SparseMatrix matrix, MeasuredSpacePtr base)
    : matrix_(std::move(matrix)), base_(std::move(base)) {}

double SparseGenerator::max_row_sum_error() const {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) s += it.value();
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double SparseGenerator::detailed_balance_error() const {
  const auto& mu = base_->probabilities;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) {
      if (it.col() == r) continue;
      const double forward = mu[r] * it.value();
      const double backward = mu[it.col()] * matrix_.coeff(it.col(), r);
      const double scale = std::max(forward, backward);
      if (scale > 0.0) worst = std::max(worst, std::abs(forward - backward) / scale);
    }
  }
  return worst;
}

double SparseGenerator::dirichlet(std::span<const double> f) const {
  if (f.size() != dimension()) throw std::invalid_argument("observable dimension mismatch");
  const auto& mu = base_->probabilities;
  double s = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    double lf = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) lf += it.value() * f[it.col()];
    s -= mu[r] * f[r] * lf;
  }
  return s;
}

QuadraticForm::QuadraticForm(SparseMatrix matrix, MeasuredSpacePtr base, std::string label)
    : matrix_(std::move(matrix)), base_(std::move(base)), label_(std::move(label)) {}

double QuadraticForm::value(std::span<const double> f) const {
  if (f.size() != dimension()) throw std::invalid_argument("observable dimension mismatch");
  double s = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    double qf = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) qf += it.value() * f[it.col()];
    s += f[r] * qf;
  }
  return s;
}

QuadraticForm QuadraticForm::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  SparseMatrix m = matrix_ * factor;
  return QuadraticForm(std::move(m), base_, label_);
}

Dynamics build_exchange_dynamics(MeasuredSpacePtr base, std::span<const Bond> pairs, std::string label,
                                 bool include_identity_moves) {
  if (!base->space.conserving()) throw std::invalid_argument("exchange dynamics need a fixed-N space");
  const auto& space = base->space;
  const auto& mu = base->probabilities;
  const auto& alpha = base->field;
  for (const Bond& b : pairs)
    if (b.a == b.b || b.a < 0 || b.b >= space.sites()) throw std::invalid_argument("invalid exchange pair");

  std::vector<Triplet> rates, form;
  rates.reserve(space.dimension() * pairs.size() / 2);
  form.reserve(space.dimension() * pairs.size() * 2);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const std::uint64_t bits = space.state_bits(i);
    for (const Bond& b : pairs) {
      const bool occ_a = (bits >> b.a) & 1u;
      const bool occ_b = (bits >> b.b) & 1u;
      if (occ_a == occ_b) {
        if (include_identity_moves) {
          form.emplace_back(i, i, 2.0 * mu[i]);
          form.emplace_back(i, i, -2.0 * mu[i]);
        }
        continue;
      }
      const Site from = occ_a ? b.a : b.b;
      const Site to = occ_a ? b.b : b.a;
      const std::size_t j = space.rank_bits(swap_bits(bits, b.a, b.b));
      rates.emplace_back(i, j, 1.0 + std::exp(alpha[to] - alpha[from]));
      if (i < j) add_conductance(form, i, j, mu[i] + mu[j]);
    }
  }
  return make_dynamics(base, rates, form, std::move(label));
}

Dynamics build_kawasaki(const LatticeGeometry& geom, MeasuredSpacePtr base) {
  if (geom.site_count() != static_cast<std::size_t>(base->space.sites()))
    throw std::invalid_argument("geometry and state space disagree on site count");
  return build_exchange_dynamics(std::move(base), geom.bonds(), "kawasaki");
}

Dynamics build_bl(MeasuredSpacePtr base) {
  const Site n = base->space.sites();
  std::vector<Bond> pairs;
  for (Site x = 0; x < n; ++x)
    for (Site y = x + 1; y < n; ++y) pairs.push_back({x, y});
  return build_exchange_dynamics(std::move(base), pairs, "bernoulli-laplace");
}

Dynamics build_glauber(MeasuredSpacePtr base) {
  const auto& space = base->space;
  if (space.conserving()) throw std::invalid_argument("Glauber dynamics need the full configuration space");
  if (space.sites() > 20) throw std::invalid_argument("Glauber exact build limited to 20 sites");
  const auto& mu = base->probabilities;
  const auto& alpha = base->field;
  std::vector<Triplet> rates, form;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    for (Site x = 0; x < space.sites(); ++x) {
      const std::size_t j = i ^ (std::size_t{1} << x);
      const double eta_x = static_cast<double>((i >> x) & 1u);
      rates.emplace_back(i, j, 1.0 + std::exp(alpha[x] * (1.0 - 2.0 * eta_x)));
      if (i < j) add_conductance(form, i, j, mu[i] + mu[j]);
    }
  }
  return make_dynamics(base, rates, form, "glauber");
}

Dynamics build_glauber(const GrandMeasure& measure) { return build_glauber(make_measured_space(measure)); }

QuadraticForm build_single_exchange(MeasuredSpacePtr base, Site x, Site y) {
  if (x == y) throw std::invalid_argument("single exchange needs two distinct sites");
  const Bond pair = make_bond(x, y);
  return build_exchange_dynamics(std::move(base), std::span<const Bond>(&pair, 1),
                                 "exchange(" + std::to_string(x) + "," + std::to_string(y) + ")")
      .form;
}

QuadraticForm weighted_sum(std::span<const QuadraticForm> forms, std::span<const double> weights) {
  if (forms.empty() || forms.size() != weights.size())
    throw std::invalid_argument("weighted_sum needs one positive weight per form");
  const auto& base = forms.front().base();
  SparseMatrix total(forms.front().matrix().rows(), forms.front().matrix().cols());
  std::string label;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto& other = forms[i].base();
    if (other != base &&
        (!other->space.same_as(base->space) || other->probabilities != base->probabilities))
      throw std::invalid_argument("weighted_sum over forms on different spaces or measures");
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    total += weights[i] * forms[i].matrix();
    if (i) label += "+";
    label += forms[i].label();
  }
  total.prune(0.0);
  total.makeCompressed();
  return QuadraticForm(std::move(total), base, "sum[" + label + "]");
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix) {
  char buf[64];
  for (Eigen::Index r = 0; r < matrix.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix, r); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
      out << r << ' ' << it.col() << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
}

}  // namespace dlg
