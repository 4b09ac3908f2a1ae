#include "dlg/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace dlg {

double chi_square_pvalue(double stat, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("chi-square needs positive degrees of freedom");
  if (stat <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

double kolmogorov_pvalue(double D, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * D;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_exponential(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("KS test on empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  KsResult r;
  r.rate = 1.0 / mean;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = -std::expm1(-r.rate * x[i]);
    r.statistic = std::max({r.statistic, (i + 1) / n - F, F - i / n});
  }
  r.p_value = kolmogorov_pvalue(r.statistic, x.size());
  return r;
}

AutocorrelationTime autocorrelation_time(std::span<const double> series, double dt, double window_factor) {
  const std::size_t n = series.size();
  if (n < 4) throw std::invalid_argument("series too short for autocorrelation");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(series.size());
  for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - mean;
  double c0 = 0.0;
  for (double v : c) c0 += v * v;
  c0 /= static_cast<double>(n);
  AutocorrelationTime out;
  if (c0 == 0.0) return out;

  auto rho = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += c[i] * c[i + k];
    return s / (static_cast<double>(n) * c0);
  };
  const double rho1 = rho(1);
  if (rho1 > 0.0 && rho1 < 1.0) out.exponential_tau = -dt / std::log(rho1);

  double sum = 0.5;
  std::size_t W = 0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    sum += rho(k);
    W = k;
    if (static_cast<double>(k) >= window_factor * sum) break;
  }
  out.window = W;
  out.tau = dt * sum;
  out.tau_error = out.tau * std::sqrt(2.0 * (2.0 * W + 1.0) / static_cast<double>(n));
  return out;
}

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.standard_error = std::sqrt(ss / (values.size() - 1) / values.size());
  }
  return m;
}

}  // namespace dlg
