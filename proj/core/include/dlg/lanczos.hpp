#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace dlg {

struct LanczosOptions {
  int basis_size = 64;  // Krylov basis kept between restarts
  int keep = 24;        // Ritz vectors retained at each thick restart
  int max_restarts = 4000;
  double tolerance = 1e-10;  // on ||Op x - theta x|| / |theta|
  std::uint64_t seed = 0x5eed;
};

struct EigenEstimate {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  // relative, in the operator's inner product
  int matvecs = 0;
  bool converged = false;
};

// Operator self-adjoint with respect to `inner` on the subspace kept
// invariant by `project`.
struct KrylovProblem {
  std::size_t dimension = 0;
  std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)> apply;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> inner;  // default: dot
  std::function<void(Eigen::VectorXd&)> project;                              // default: identity
};

// Thick-restart Lanczos with full reorthogonalization for one extreme
// eigenpair: the smallest when `smallest`, otherwise the largest.
EigenEstimate thick_restart_lanczos(const KrylovProblem& problem, bool smallest, const LanczosOptions& options = {});

}  // namespace dlg
