#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlg/disorder.hpp"
#include "dlg/forms.hpp"
#include "dlg/lanczos.hpp"
#include "dlg/lattice.hpp"

namespace dlg {

enum class SolveMethod { kAuto, kDense, kIterative };
std::string_view to_string(SolveMethod method);

// Dense eigensolves are used strictly below this many states under kAuto.
inline constexpr std::size_t kDenseStateLimit = 2000;

struct GapOptions {
  SolveMethod method = SolveMethod::kAuto;
  LanczosOptions lanczos{};
  double residual_tolerance = 1e-8;
};

struct GapResult {
  double gap = 0.0;
  SolveMethod method = SolveMethod::kDense;
  double residual = 0.0;  // ||S v - gap v|| / gap in the symmetrized basis
  bool degenerate = false;
  // Slowest mode f: Q f = gap diag(mu) f, E_mu[f] = 0, E_mu[f^2] = 1.
  std::vector<double> eigenfunction;
  int matvecs = 0;
};

// Component label per state of the graph of off-diagonal entries.
std::vector<std::size_t> connected_components(const SparseMatrix& matrix, std::size_t* count = nullptr);
// Throws ReducibleMoveSet when the form's move graph is disconnected.
void require_irreducible(const QuadraticForm& form);

// Smallest nonzero eigenvalue of Q in the mu-weighted inner product,
// i.e. min over nonconstant f of Q(f) / Var_mu(f).
GapResult spectral_gap(const QuadraticForm& form, const GapOptions& options = {});

struct PencilOptions {
  SolveMethod method = SolveMethod::kAuto;
  double kernel_tolerance = 1e-9;
  LanczosOptions lanczos{};
};

struct PencilResult {
  double lambda_max = 0.0;  // sup over f outside ker B of A(f) / B(f)
  double bound = 0.0;       // certificate bound, when one applies
  bool pass = true;
  std::size_t kernel_dimension = 0;
  SolveMethod method = SolveMethod::kDense;
  bool degenerate = false;
  double residual = 0.0;
};

// Throws KernelContainmentError when ker B is not inside ker A.
PencilResult pencil_ratio(const QuadraticForm& A, const QuadraticForm& B, const PencilOptions& options = {});

// Homogeneous segment of k sites: exchange(1, k) against
// sum_x rho_x^{-1} bond(x, x+1). Bound 1 (+ slack). Requires rho_x > 0,
// sum rho <= 1.
PencilResult certify_lemma2(int k, int N, std::span<const double> rho, double slack = 1e-9);

// Segment of L sites (L == field.size()) under mu_{alpha,N}: exchange(1, L)
// against the sum of nearest-neighbour bond forms. Bound e^{13K} L.
PencilResult certify_lemma1(int L, int N, const DisorderField& field, double slack = 1e-9);

struct Thm1Instance {
  DisorderField field;
  int N = 0;
  std::uint64_t seed = 0;
};

struct Thm1Row {
  std::size_t sites = 0;
  int N = 0;
  double K = 0.0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  double c_emp = 0.0;  // |Lambda| / gap(D_BL)
  bool degenerate = false;
  SolveMethod method = SolveMethod::kDense;
  double residual = 0.0;
};

std::vector<Thm1Row> certify_thm1(std::span<const Thm1Instance> instances, const GapOptions& options = {});

struct TrendCheck {
  std::vector<std::pair<std::size_t, double>> per_size;  // (|Lambda|, max C_emp), ascending size
  double first = 0.0;
  double last = 0.0;
  double largest = 0.0;
  double spread = 0.0;  // (max - min) / min over per_size
  bool pass = false;    // last <= factor * first
};

TrendCheck thm1_trend(std::span<const Thm1Row> rows, double trend_factor);

struct Thm3Instance {
  LatticeGeometry geometry;
  DisorderField field;
  int N = 0;
  std::uint64_t seed = 0;
};

struct Thm3Row {
  int d = 0;
  int L = 0;
  int N = 0;
  double K = 0.0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  double scaled = 0.0;  // gap * L^2
  SolveMethod method = SolveMethod::kDense;
  double residual = 0.0;
  bool excluded = false;  // degenerate or nonconvergent
  std::string note;
};

std::vector<Thm3Row> certify_thm3(std::span<const Thm3Instance> instances, const GapOptions& options = {});

struct BandCheck {
  double min = 0.0;
  double max = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

BandCheck thm3_band(std::span<const Thm3Row> rows, double allowed_ratio);

// floor(L^d / 2) for a cube of side L.
int default_particle_number(const LatticeGeometry& geom);

// The comparison chain Var <= (1/gap_BL) D_BL and, for every pair, the
// exchange form bounded by its canonical-path bond forms:
//   1/gap_Kaw <= (max_b sum_{pairs through b} r_xy) / gap_BL.
struct ComposedBound {
  double gap_bl = 0.0;
  double gap_kawasaki = 0.0;
  double c_emp = 0.0;
  double max_pair_ratio = 0.0;           // max r_xy
  double max_pair_ratio_over_length = 0.0;  // max r_xy / n_xy
  double weighted_congestion = 0.0;      // max_b sum_{pairs through b} r_xy
  double composed_inverse_gap = 0.0;     // weighted_congestion / gap_bl
  double direct_inverse_gap = 0.0;       // 1 / gap_kawasaki
  double paper_inverse_gap = 0.0;        // with r_xy replaced by e^{13K} n_xy
  bool dominates = false;
};

ComposedBound compose_thm3_chain(const LatticeGeometry& geom, const DisorderField& field, int N);

}  // namespace dlg
