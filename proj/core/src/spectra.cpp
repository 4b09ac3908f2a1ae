#include "dlg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include <Eigen/Dense>

#include "dlg/error.hpp"

namespace dlg {

namespace {

Eigen::MatrixXd to_dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

bool use_dense(SolveMethod method, std::size_t n) {
  if (method == SolveMethod::kDense) return true;
  if (method == SolveMethod::kIterative) return false;
  return n < kDenseStateLimit;
}

void check_same_base(const QuadraticForm& A, const QuadraticForm& B) {
  if (A.dimension() != B.dimension()) throw std::invalid_argument("forms act on spaces of different dimension");
  if (A.base() != B.base() && (!A.base()->space.same_as(B.base()->space) ||
                               A.base()->probabilities != B.base()->probabilities))
    throw std::invalid_argument("forms are built over different measures");
}

double inf_norm(const SparseMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) s += std::abs(it.value());
    worst = std::max(worst, s);
  }
  return worst;
}

// Jacobi-preconditioned CG for B z = b with b orthogonal to ker B; z is kept
// in the range by the caller's projection.
Eigen::VectorXd solve_laplacian(const SparseMatrix& B, const Eigen::VectorXd& b, const Eigen::VectorXd& inv_diag,
                                const std::function<void(Eigen::VectorXd&)>& project) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  project(r);
  const double target = 1e-13 * std::max(r.norm(), 1e-300);
  Eigen::VectorXd p = inv_diag.cwiseProduct(r);
  project(p);
  double rz = r.dot(p);
  const int max_iter = static_cast<int>(std::max<Eigen::Index>(10 * b.size(), 1000));
  for (int it = 0; it < max_iter && r.norm() > target; ++it) {
    Eigen::VectorXd Bp = B * p;
    const double denom = p.dot(Bp);
    if (denom <= 0.0) break;
    const double a = rz / denom;
    z += a * p;
    r -= a * Bp;
    Eigen::VectorXd zr = inv_diag.cwiseProduct(r);
    project(zr);
    const double rz_new = r.dot(zr);
    p = zr + (rz_new / rz) * p;
    rz = rz_new;
  }
  project(z);
  return z;
}

}  // namespace

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::kAuto:
      return "auto";
    case SolveMethod::kDense:
      return "dense";
    case SolveMethod::kIterative:
      return "iterative";
  }
  return "unknown";
}

std::vector<std::size_t> connected_components(const SparseMatrix& matrix, std::size_t* count) {
  const auto n = static_cast<std::size_t>(matrix.rows());
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, kUnset);
  std::size_t next = 0;
  std::queue<std::size_t> todo;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    todo.push(s);
    while (!todo.empty()) {
      const std::size_t u = todo.front();
      todo.pop();
      for (SparseMatrix::InnerIterator it(matrix, static_cast<Eigen::Index>(u)); it; ++it) {
        const auto v = static_cast<std::size_t>(it.col());
        if (v != u && it.value() != 0.0 && label[v] == kUnset) {
          label[v] = next;
          todo.push(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

void require_irreducible(const QuadraticForm& form) {
  std::size_t count = 0;
  const auto label = connected_components(form.matrix(), &count);
  if (count <= 1) return;
  const auto other = static_cast<std::size_t>(std::find_if(label.begin(), label.end(),
                                                           [](std::size_t l) { return l != 0; }) -
                                              label.begin());
  const auto& space = form.base()->space;
  throw ReducibleMoveSet("move set '" + form.label() + "' is reducible: states " +
                             space.unrank(0).to_string() + " and " + space.unrank(other).to_string() +
                             " do not communicate",
                         0, other);
}

GapResult spectral_gap(const QuadraticForm& form, const GapOptions& options) {
  GapResult result;
  const std::size_t n = form.dimension();
  if (n <= 1) {
    result.degenerate = true;
    return result;
  }
  require_irreducible(form);

  const auto& mu = form.base()->probabilities;
  Eigen::VectorXd inv_sqrt(n), root(n);
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = std::sqrt(mu[i]);
    inv_sqrt[i] = 1.0 / root[i];
  }
  root /= root.norm();

  Eigen::VectorXd v;
  if (use_dense(options.method, n)) {
    result.method = SolveMethod::kDense;
    const Eigen::MatrixXd S = inv_sqrt.asDiagonal() * to_dense(form.matrix()) * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    result.gap = es.eigenvalues()[1];
    v = es.eigenvectors().col(1);
    result.residual = (S * v - result.gap * v).norm() / result.gap;
  } else {
    result.method = SolveMethod::kIterative;
    const SparseMatrix& Q = form.matrix();
    KrylovProblem problem;
    problem.dimension = n;
    problem.apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out = inv_sqrt.cwiseProduct(Q * inv_sqrt.cwiseProduct(in));
    };
    problem.project = [&](Eigen::VectorXd& x) { x -= root.dot(x) * root; };
    LanczosOptions lanczos = options.lanczos;
    lanczos.tolerance = std::min(lanczos.tolerance, options.residual_tolerance);
    const EigenEstimate est = thick_restart_lanczos(problem, true, lanczos);
    result.gap = est.value;
    result.matvecs = est.matvecs;
    v = est.vector / est.vector.norm();
    Eigen::VectorXd Sv(n);
    problem.apply(v, Sv);
    result.residual = (Sv - result.gap * v).norm() / result.gap;
    if (!est.converged || !(result.residual <= options.residual_tolerance))
      throw NonConvergence("Lanczos did not converge for '" + form.label() + "'", result.residual);
  }

  result.eigenfunction.resize(n);
  double sign = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.eigenfunction[i] = v[i] * inv_sqrt[i];
    if (sign == 0.0 && std::abs(v[i]) > 1e-8) sign = v[i] > 0 ? 1.0 : -1.0;
  }
  for (double& f : result.eigenfunction) f *= sign == 0.0 ? 1.0 : sign;
  return result;
}

PencilResult pencil_ratio(const QuadraticForm& A, const QuadraticForm& B, const PencilOptions& options) {
  check_same_base(A, B);
  PencilResult result;
  const std::size_t n = A.dimension();
  if (n <= 1) {
    result.degenerate = true;
    result.kernel_dimension = n;
    return result;
  }

  // Jacobi equilibration f = D g keeps B well scaled when mu spans many decades.
  Eigen::VectorXd d(n), inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = B.matrix().coeff(i, i);
    d[i] = b > 0.0 ? 1.0 / std::sqrt(b) : 1.0;
    inv_diag[i] = b > 0.0 ? 1.0 / b : 0.0;
  }

  if (use_dense(options.method, n)) {
    result.method = SolveMethod::kDense;
    const Eigen::MatrixXd Bs = d.asDiagonal() * to_dense(B.matrix()) * d.asDiagonal();
    const Eigen::MatrixXd As = d.asDiagonal() * to_dense(A.matrix()) * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Bs);
    const double top = std::max(eb.eigenvalues().maxCoeff(), 1e-300);
    const double a_scale = std::max(As.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    std::vector<Eigen::Index> range;
    for (Eigen::Index i = 0; i < eb.eigenvalues().size(); ++i) {
      if (eb.eigenvalues()[i] <= 1e-10 * top) {
        ++result.kernel_dimension;
        const double leak = (As * eb.eigenvectors().col(i)).norm();
        if (leak > options.kernel_tolerance * a_scale)
          throw KernelContainmentError("ker B is not contained in ker A for '" + A.label() + "' vs '" +
                                       B.label() + "'");
      } else {
        range.push_back(i);
      }
    }
    if (range.empty()) {
      result.degenerate = true;
      return result;
    }
    Eigen::MatrixXd W(n, range.size());
    for (std::size_t c = 0; c < range.size(); ++c)
      W.col(c) = eb.eigenvectors().col(range[c]) / std::sqrt(eb.eigenvalues()[range[c]]);
    const Eigen::MatrixXd C = W.transpose() * As * W;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(C, Eigen::EigenvaluesOnly);
    result.lambda_max = std::max(ec.eigenvalues().maxCoeff(), 0.0);
    return result;
  }

  // Iterative: B is a weighted graph Laplacian, so ker B is spanned by the
  // indicators of its connected components.
  result.method = SolveMethod::kIterative;
  std::size_t components = 0;
  const auto label = connected_components(B.matrix(), &components);
  result.kernel_dimension = components;
  std::vector<double> size(components, 0.0);
  for (auto l : label) size[l] += 1.0;
  auto project = [&](Eigen::VectorXd& x) {
    std::vector<double> mean(components, 0.0);
    for (std::size_t i = 0; i < n; ++i) mean[label[i]] += x[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= mean[label[i]] / size[label[i]];
  };
  const double a_scale = std::max(inf_norm(A.matrix()), 1e-300);
  for (std::size_t c = 0; c < components; ++c) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < n; ++i)
      if (label[i] == c) ind[i] = 1.0 / std::sqrt(size[c]);
    if ((A.matrix() * ind).norm() > options.kernel_tolerance * a_scale)
      throw KernelContainmentError("ker B is not contained in ker A for '" + A.label() + "' vs '" + B.label() +
                                   "'");
  }
  if (components == n) {
    result.degenerate = true;
    return result;
  }
  const SparseMatrix& Am = A.matrix();
  const SparseMatrix& Bm = B.matrix();
  KrylovProblem problem;
  problem.dimension = n;
  problem.apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out = solve_laplacian(Bm, Am * in, inv_diag, project);
  };
  problem.inner = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(Bm * y); };
  problem.project = project;
  const EigenEstimate est = thick_restart_lanczos(problem, false, options.lanczos);
  result.lambda_max = std::max(est.value, 0.0);
  result.residual = est.residual;
  if (!est.converged) throw NonConvergence("pencil Lanczos did not converge", est.residual);
  return result;
}

PencilResult certify_lemma2(int k, int N, std::span<const double> rho, double slack) {
  if (k < 2) throw std::invalid_argument("Lemma-2 certificate needs k >= 2");
  if (rho.size() != static_cast<std::size_t>(k - 1)) throw std::invalid_argument("need one weight per bond (k-1)");
  double total = 0.0;
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("weights rho must be positive");
    total += r;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("weights must satisfy sum rho <= 1");

  const CanonicalMeasure measure(DisorderField::zero(k), N);
  const auto base = make_measured_space(measure);
  const QuadraticForm A = build_single_exchange(base, 0, k - 1);
  std::vector<QuadraticForm> bonds;
  std::vector<double> weights;
  for (int x = 0; x + 1 < k; ++x) {
    bonds.push_back(build_single_exchange(base, x, x + 1));
    weights.push_back(1.0 / rho[x]);
  }
  PencilResult r = pencil_ratio(A, weighted_sum(bonds, weights));
  r.bound = 1.0;
  r.pass = r.lambda_max <= r.bound + slack;
  return r;
}

PencilResult certify_lemma1(int L, int N, const DisorderField& field, double slack) {
  if (L < 2) throw std::invalid_argument("Lemma-1 certificate needs L >= 2");
  if (field.size() != static_cast<std::size_t>(L)) throw std::invalid_argument("field length must equal L");
  const CanonicalMeasure measure(field, N);
  const auto base = make_measured_space(measure);
  const auto geom = build_box(1, L, Boundary::kFree);
  const QuadraticForm A = build_single_exchange(base, 0, L - 1);
  const QuadraticForm B = build_kawasaki(geom, base).form;
  PencilResult r = pencil_ratio(A, B);
  r.bound = std::exp(13.0 * field.bound()) * L;
  r.pass = r.lambda_max <= r.bound + slack;
  return r;
}

std::vector<Thm1Row> certify_thm1(std::span<const Thm1Instance> instances, const GapOptions& options) {
  std::vector<Thm1Row> rows;
  rows.reserve(instances.size());
  for (const auto& inst : instances) {
    Thm1Row row;
    row.sites = inst.field.size();
    row.N = inst.N;
    row.K = inst.field.bound();
    row.seed = inst.seed;
    const CanonicalMeasure measure(inst.field, inst.N);
    if (measure.degenerate()) {
      row.degenerate = true;
      rows.push_back(row);
      continue;
    }
    const auto bl = build_bl(make_measured_space(measure));
    const GapResult g = spectral_gap(bl.form, options);
    row.gap = g.gap;
    row.c_emp = static_cast<double>(row.sites) / g.gap;
    row.method = g.method;
    row.residual = g.residual;
    rows.push_back(row);
  }
  return rows;
}

TrendCheck thm1_trend(std::span<const Thm1Row> rows, double trend_factor) {
  std::map<std::size_t, double> worst;
  for (const auto& r : rows) {
    if (r.degenerate) continue;
    auto [it, inserted] = worst.emplace(r.sites, r.c_emp);
    if (!inserted) it->second = std::max(it->second, r.c_emp);
  }
  TrendCheck t;
  if (worst.empty()) return t;
  t.per_size.assign(worst.begin(), worst.end());
  t.first = t.per_size.front().second;
  t.last = t.per_size.back().second;
  double lo = t.first;
  for (const auto& [sites, c] : t.per_size) {
    t.largest = std::max(t.largest, c);
    lo = std::min(lo, c);
  }
  t.spread = (t.largest - lo) / lo;
  t.pass = t.last <= trend_factor * t.first;
  return t;
}

std::vector<Thm3Row> certify_thm3(std::span<const Thm3Instance> instances, const GapOptions& options) {
  std::vector<Thm3Row> rows;
  for (const auto& inst : instances) {
    Thm3Row row;
    row.d = inst.geometry.dimension();
    row.L = inst.geometry.side_lengths()[0];
    row.N = inst.N;
    row.K = inst.field.bound();
    row.seed = inst.seed;
    const CanonicalMeasure measure(inst.field, inst.N);
    if (measure.degenerate()) {
      row.excluded = true;
      row.note = "degenerate";
      rows.push_back(row);
      continue;
    }
    const auto kaw = build_kawasaki(inst.geometry, make_measured_space(measure));
    try {
      const GapResult g = spectral_gap(kaw.form, options);
      row.gap = g.gap;
      row.method = g.method;
      row.residual = g.residual;
      row.scaled = g.gap * row.L * row.L;
    } catch (const NonConvergence& e) {
      row.excluded = true;
      row.method = SolveMethod::kIterative;
      row.residual = e.residual();
      row.note = "nonconvergent";
    }
    rows.push_back(row);
  }
  return rows;
}

BandCheck thm3_band(std::span<const Thm3Row> rows, double allowed_ratio) {
  BandCheck b;
  bool any = false;
  for (const auto& r : rows) {
    if (r.excluded) continue;
    if (!any) {
      b.min = b.max = r.scaled;
      any = true;
    }
    b.min = std::min(b.min, r.scaled);
    b.max = std::max(b.max, r.scaled);
  }
  if (!any) return b;
  b.ratio = b.max / b.min;
  b.pass = b.ratio <= allowed_ratio;
  return b;
}

int default_particle_number(const LatticeGeometry& geom) { return static_cast<int>(geom.site_count() / 2); }

ComposedBound compose_thm3_chain(const LatticeGeometry& geom, const DisorderField& field, int N) {
  if (field.size() != geom.site_count()) throw std::invalid_argument("field does not match geometry");
  const CanonicalMeasure measure(field, N);
  if (measure.degenerate()) throw std::invalid_argument("degenerate sector has no gap");
  const auto base = make_measured_space(measure);

  ComposedBound c;
  c.gap_bl = spectral_gap(build_bl(base).form).gap;
  c.gap_kawasaki = spectral_gap(build_kawasaki(geom, base).form).gap;
  c.c_emp = static_cast<double>(geom.site_count()) / c.gap_bl;

  std::vector<QuadraticForm> bond_forms;
  for (const Bond& b : geom.bonds()) bond_forms.push_back(build_single_exchange(base, b.a, b.b));
  std::vector<double> load(geom.bonds().size(), 0.0);
  std::vector<double> paper_load(geom.bonds().size(), 0.0);
  const double e13 = std::exp(13.0 * field.bound());

  const auto n = static_cast<Site>(geom.site_count());
  for (Site x = 0; x < n; ++x) {
    for (Site y = x + 1; y < n; ++y) {
      const SwapPath path = canonical_path(geom, x, y);
      std::vector<QuadraticForm> along;
      std::vector<std::size_t> idx;
      for (const Bond& b : path.bonds) {
        idx.push_back(static_cast<std::size_t>(geom.bond_index(b)));
        along.push_back(bond_forms[idx.back()]);
      }
      const std::vector<double> ones(along.size(), 1.0);
      const double r = pencil_ratio(build_single_exchange(base, x, y), weighted_sum(along, ones)).lambda_max;
      const auto len = static_cast<double>(path.length());
      c.max_pair_ratio = std::max(c.max_pair_ratio, r);
      c.max_pair_ratio_over_length = std::max(c.max_pair_ratio_over_length, r / len);
      for (auto i : idx) {
        load[i] += r;
        paper_load[i] += e13 * len;
      }
    }
  }
  c.weighted_congestion = *std::max_element(load.begin(), load.end());
  c.composed_inverse_gap = c.weighted_congestion / c.gap_bl;
  c.paper_inverse_gap = *std::max_element(paper_load.begin(), paper_load.end()) / c.gap_bl;
  c.direct_inverse_gap = 1.0 / c.gap_kawasaki;
  c.dominates = c.composed_inverse_gap >= c.direct_inverse_gap * (1.0 - 1e-9);
  return c;
}

}  // namespace dlg
