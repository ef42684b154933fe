#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/stats.hpp"

namespace polymer {

/// A resolved inverse temperature for a size-dependent scaling.
struct IntermediateScaling {
  bool critical = false;  // false: beta_hat / sqrt(R_n); true: critical window with theta
  double parameter = 0.0;  // beta_hat, or theta for the critical window
  long n = 0;
  double beta_n = 0.0;
};

/// R_n = sum_{i <= n} p_{2i}(0), summed exactly.
double overlap_R(long n, int dim = 2);

/// beta_n = beta_hat / sqrt(R_n).
double interm_beta(long n, double beta_hat, int dim = 2);

/// beta_n > 0 solving sigma^2(beta_n) = (1 + theta / log n) / R_n (d = 2).
double critical_window_beta(long n, double theta, const DisorderSpec& spec = DisorderSpec::gaussian());

IntermediateScaling resolve_interm(long n, double beta_hat, int dim = 2);
IntermediateScaling resolve_critical(long n, double theta, const DisorderSpec& spec = DisorderSpec::gaussian());

struct LognormalOptions {
  long replicas = 300;
  std::uint64_t seed = 0;
  double window_sds = 6.0;  // diffusive truncation of the transfer matrix
  unsigned threads = 1;
};

struct LognormalResult {
  double beta_hat = 0.0;
  long n = 0;
  double beta_n = 0.0;
  double sigma_hat2 = 0.0;  // log(1 / (1 - beta_hat^2)); infinite for beta_hat >= 1
  std::vector<double> log_w;  // one per replica, in replica order
  Summary summary;
  double mean_deviation = 0.0;  // fitted mean + sigma_hat2 / 2
  double variance_deviation = 0.0;  // fitted variance / sigma_hat2 - 1
  double ks = 0.0;  // against N(-sigma_hat2 / 2, sigma_hat2)
  double median_w = 0.0;
};

/// log W_n at beta_n = beta_hat / sqrt(R_n), d = 2, over replicas.
LognormalResult lognormal_experiment(const DisorderSpec& spec, double beta_hat, long n,
                                     const LognormalOptions& options = {});

struct MedianPoint {
  long n = 0;
  double beta_n = 0.0;
  double median_w = 0.0;
  double median_log_w = 0.0;
};

/// Median of W_n across an n grid, each n at its own beta_n; replica r uses the same
/// environment seed for every n.
std::vector<MedianPoint> median_trajectory(const DisorderSpec& spec, double beta_hat,
                                           std::span<const long> n_grid, const LognormalOptions& options = {});

bool strictly_decreasing_medians(std::span<const MedianPoint> pts);

enum class FieldMode { d2_interm, d3_subL2 };

/// Test function on the rescaled grid y = x / sqrt(n); zero outside |y|_inf <= support.
struct TestFunction {
  std::function<double(std::span<const double>)> phi;
  double support = 1.0;
};

struct FieldAverageValue {
  double value = 0.0;       // normalized and amplified as the limit theorem states
  double unamplified = 0.0; // n^{-d/2} sum_x phi(x / sqrt n) (W_n(x) - 1)
};

/// Averaged field of W_n(x) - 1 for one environment, all starts from one backward sweep.
std::vector<FieldAverageValue> field_average(const DisorderField& field, double beta, long n,
                                             std::span<const TestFunction> phis, FieldMode mode);
FieldAverageValue field_average(const DisorderField& field, double beta, long n, const TestFunction& phi,
                                FieldMode mode);

inline constexpr double euler_gamma = 0.57721566490153286061;

/// G_theta(t) = int_0^inf exp((theta - euler_gamma) s) s t^{s-1} / Gamma(s + 1) ds, to relative accuracy eps.
double g_theta(double theta, double t, double eps = 1e-10);

}  // namespace polymer
