#pragma once

#include <span>

namespace dlg {

// Upper tail P(X >= stat) of a chi-square with `dof` degrees of freedom.
double chi_square_pvalue(double stat, double dof);

// Asymptotic Kolmogorov tail with Stephens' small-sample correction.
double kolmogorov_pvalue(double D, std::size_t n);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double rate = 0.0;  // fitted 1 / mean
};

// One-sample KS test against an exponential with rate fitted from the data.
KsResult ks_exponential(std::span<const double> samples);

struct AutocorrelationTime {
  double tau = 0.0;        // integrated, in time units: dt * (1/2 + sum_{k>=1} rho_k)
  double tau_error = 0.0;  // Sokal's estimate sqrt(2(2W+1)/n) tau
  double exponential_tau = 0.0;  // -dt / log rho_1 when rho_1 in (0,1)
  std::size_t window = 0;
};

// Self-consistent window W: smallest W with W >= c * tau_int(W) / dt.
AutocorrelationTime autocorrelation_time(std::span<const double> series, double dt, double window_factor = 6.0);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanEstimate mean_estimate(std::span<const double> values);

}  // namespace dlg
