#include "dlg/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace dlg {

EigenEstimate thick_restart_lanczos(const KrylovProblem& problem, bool smallest, const LanczosOptions& options) {
  const std::size_t n = problem.dimension;
  auto inner = problem.inner;
  if (!inner) inner = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b); };
  auto project = problem.project;
  if (!project) project = [](Eigen::VectorXd&) {};
  auto norm = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(inner(v, v), 0.0)); };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = gauss(rng);
    project(v);
    return v;
  };

  const int m = std::max(2, std::min<int>(options.basis_size, static_cast<int>(n)));
  const int keep = std::clamp(options.keep, 1, m - 1);
  std::vector<Eigen::VectorXd> V, AV;
  V.reserve(m);
  AV.reserve(m);

  EigenEstimate result;
  auto orthogonalize = [&](Eigen::VectorXd& r) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : V) r -= inner(v, r) * v;
      project(r);
    }
  };

  Eigen::VectorXd q = random_vector();
  q /= norm(q);
  bool exhausted = false;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    while (static_cast<int>(V.size()) < m && !exhausted) {
      V.push_back(q);
      Eigen::VectorXd w(n);
      problem.apply(q, w);
      project(w);
      ++result.matvecs;
      AV.push_back(w);
      Eigen::VectorXd r = w;
      orthogonalize(r);
      double beta = norm(r);
      if (beta <= 1e-12 * std::max(norm(w), 1e-300)) {
        // Invariant subspace reached: continue from a fresh direction if one exists.
        r = random_vector();
        orthogonalize(r);
        beta = norm(r);
        if (beta <= 1e-10 * norm(random_vector())) {
          exhausted = true;
          break;
        }
      }
      q = r / beta;
    }

    const int k = static_cast<int>(V.size());
    Eigen::MatrixXd H(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) H(i, j) = H(j, i) = 0.5 * (inner(V[i], AV[j]) + inner(V[j], AV[i]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const auto& theta = es.eigenvalues();
    const int target = smallest ? 0 : k - 1;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n), ax = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) {
      x += es.eigenvectors()(i, target) * V[i];
      ax += es.eigenvectors()(i, target) * AV[i];
    }
    const double value = theta[target];
    const double res = norm(ax - value * x);
    const double scale = std::max(std::abs(value), 1e-300);
    result.value = value;
    result.vector = x;
    result.residual = res / scale;
    if (result.residual <= options.tolerance || exhausted) {
      result.converged = result.residual <= options.tolerance || exhausted;
      return result;
    }

    // Thick restart: keep the `keep` Ritz vectors nearest the target end.
    std::vector<Eigen::VectorXd> nV, nAV;
    for (int c = 0; c < keep && c < k; ++c) {
      const int col = smallest ? c : k - 1 - c;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n), ay = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < k; ++i) {
        y += es.eigenvectors()(i, col) * V[i];
        ay += es.eigenvectors()(i, col) * AV[i];
      }
      nV.push_back(std::move(y));
      nAV.push_back(std::move(ay));
    }
    V = std::move(nV);
    AV = std::move(nAV);
    // q is orthogonal to the old basis, hence to the retained span; refresh against rounding.
    orthogonalize(q);
    q /= norm(q);
  }
  result.converged = false;
  return result;
}

}  // namespace dlg
