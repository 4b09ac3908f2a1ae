#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "dlg/configspace.hpp"
#include "dlg/disorder.hpp"
#include "dlg/ensemble.hpp"
#include "dlg/lattice.hpp"

namespace dlg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// An enumerated state space together with the stationary law on it.
struct MeasuredSpace {
  ConfigSpace space;
  DisorderField field;
  std::vector<double> probabilities;  // indexed by rank
};
using MeasuredSpacePtr = std::shared_ptr<const MeasuredSpace>;

MeasuredSpacePtr make_measured_space(const CanonicalMeasure& measure);
// Full 2^|Lambda| space under the product measure.
MeasuredSpacePtr make_measured_space(const GrandMeasure& measure);

// Continuous-time generator: nonnegative off-diagonal rates, diagonal equal to
// minus the row sum.
class SparseGenerator {
 public:
  SparseGenerator(SparseMatrix matrix, MeasuredSpacePtr base);

  const SparseMatrix& matrix() const { return matrix_; }
  const MeasuredSpacePtr& base() const { return base_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  double rate(std::size_t from, std::size_t to) const { return matrix_.coeff(from, to); }

  double max_row_sum_error() const;
  // max over stored transitions of |mu_i c_ij - mu_j c_ji| / max(mu_i c_ij, mu_j c_ji)
  double detailed_balance_error() const;
  // <f, (-L) f>_mu
  double dirichlet(std::span<const double> f) const;

 private:
  SparseMatrix matrix_;
  MeasuredSpacePtr base_;
};

// f -> f^T Q f for a symmetric PSD operator Q of Laplacian type:
// Q = sum over state pairs of w_{ij} (e_i - e_j)(e_i - e_j)^T.
class QuadraticForm {
 public:
  QuadraticForm(SparseMatrix matrix, MeasuredSpacePtr base, std::string label);

  const SparseMatrix& matrix() const { return matrix_; }
  const MeasuredSpacePtr& base() const { return base_; }
  const std::string& label() const { return label_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  bool degenerate() const { return dimension() <= 1; }

  double value(std::span<const double> f) const;
  QuadraticForm scaled(double factor) const;

 private:
  SparseMatrix matrix_;
  MeasuredSpacePtr base_;
  std::string label_;
};

struct Dynamics {
  SparseGenerator generator;
  QuadraticForm form;
  bool degenerate = false;
};

// Exchange dynamics over an arbitrary list of site pairs: the jump x -> y of
// a particle happens at rate 1 + e^{alpha_y - alpha_x}, and the form is
// sum_eta mu(eta) sum_{pairs} (f(T_{xy} eta) - f(eta))^2 over unordered pairs.
// Equal-occupancy swaps are identities; with include_identity_moves they are
// still visited and contribute an explicit zero.
Dynamics build_exchange_dynamics(MeasuredSpacePtr base, std::span<const Bond> pairs, std::string label,
                                 bool include_identity_moves = false);

Dynamics build_kawasaki(const LatticeGeometry& geom, MeasuredSpacePtr base);
Dynamics build_bl(MeasuredSpacePtr base);
// Flip dynamics at rate 1 + exp(alpha_x (1 - 2 eta_x)); needs the full space.
Dynamics build_glauber(MeasuredSpacePtr base);
Dynamics build_glauber(const GrandMeasure& measure);

QuadraticForm build_single_exchange(MeasuredSpacePtr base, Site x, Site y);
QuadraticForm weighted_sum(std::span<const QuadraticForm> forms, std::span<const double> weights);

// "row col value" per stored entry, row-major sorted, shortest round-trip decimals.
void write_triplets(std::ostream& out, const SparseMatrix& matrix);

}  // namespace dlg
