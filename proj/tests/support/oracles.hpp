#pragma once

// Independent reference computations for tests. Everything here works from
// the raw definitions (bit loops, explicit sums, dense matrices) and never
// calls the library's DP, ranking or sparse-form code.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dlg::oracle {

// All masks on n sites with popcount N, increasing numerically.
inline std::vector<std::uint64_t> masks(int n, int N) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
    if (std::popcount(m) == N) out.push_back(m);
  return out;
}

inline double energy(std::span<const double> alpha, std::uint64_t m) {
  double h = 0.0;
  for (std::size_t x = 0; x < alpha.size(); ++x)
    if ((m >> x) & 1u) h += alpha[x];
  return h;
}

// Z_{alpha,Lambda,N} as a plain sum over subsets.
inline double partition(std::span<const double> alpha, int N) {
  double z = 0.0;
  for (auto m : masks(static_cast<int>(alpha.size()), N)) z += std::exp(energy(alpha, m));
  return z;
}

// Canonical probabilities aligned with masks(n, N).
inline std::vector<double> canonical_probs(std::span<const double> alpha, int N) {
  const auto ms = masks(static_cast<int>(alpha.size()), N);
  std::vector<double> p;
  double z = 0.0;
  for (auto m : ms) {
    p.push_back(std::exp(energy(alpha, m)));
    z += p.back();
  }
  for (double& v : p) v /= z;
  return p;
}

inline std::uint64_t swapped(std::uint64_t m, int x, int y) {
  const bool a = (m >> x) & 1u, b = (m >> y) & 1u;
  if (a == b) return m;
  return m ^ ((std::uint64_t{1} << x) | (std::uint64_t{1} << y));
}

// sum_eta mu(eta) sum_{(x,y) in pairs} (f(T_xy eta) - f(eta))^2, f indexed
// like masks(n, N).
inline double exchange_form(std::span<const double> alpha, int N, const std::vector<std::pair<int, int>>& pairs,
                            std::span<const double> f) {
  const int n = static_cast<int>(alpha.size());
  const auto ms = masks(n, N);
  const auto p = canonical_probs(alpha, N);
  auto index_of = [&](std::uint64_t m) {
    return static_cast<std::size_t>(std::lower_bound(ms.begin(), ms.end(), m) - ms.begin());
  };
  double s = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (auto [x, y] : pairs) {
      const double d = f[index_of(swapped(ms[i], x, y))] - f[i];
      s += p[i] * d * d;
    }
  return s;
}

inline std::vector<std::pair<int, int>> segment_bonds(int L) {
  std::vector<std::pair<int, int>> b;
  for (int x = 0; x + 1 < L; ++x) b.push_back({x, x + 1});
  return b;
}

inline std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> b;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) b.push_back({x, y});
  return b;
}

// Dense generator of exchange dynamics, rate 1 + e^{alpha_to - alpha_from}.
inline Eigen::MatrixXd exchange_generator(std::span<const double> alpha, int N,
                                          const std::vector<std::pair<int, int>>& pairs) {
  const int n = static_cast<int>(alpha.size());
  const auto ms = masks(n, N);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ms.size(), ms.size());
  auto index_of = [&](std::uint64_t m) { return std::lower_bound(ms.begin(), ms.end(), m) - ms.begin(); };
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (auto [x, y] : pairs) {
      const bool ox = (ms[i] >> x) & 1u, oy = (ms[i] >> y) & 1u;
      if (ox == oy) continue;
      const int from = ox ? x : y, to = ox ? y : x;
      G(i, index_of(swapped(ms[i], x, y))) += 1.0 + std::exp(alpha[to] - alpha[from]);
    }
  for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, i) = -G.row(i).sum();
  return G;
}

// Smallest nonzero eigenvalue of -G for a reversible generator with law p.
inline double reversible_gap(const Eigen::MatrixXd& G, std::span<const double> p) {
  const Eigen::Index n = G.rows();
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) S(i, j) = -std::sqrt(p[i] / p[j]) * G(i, j);
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[1];
}

inline std::vector<double> uniform_field(std::size_t n, double K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-K, K);
  std::vector<double> a(n);
  for (double& v : a) v = u(rng);
  return a;
}

}  // namespace dlg::oracle
