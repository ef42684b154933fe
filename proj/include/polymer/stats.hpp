#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace polymer {

struct Summary {
  long count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
  double median = 0.0;
};

/// Pairwise summation; result does not depend on how the input was produced.
double pairwise_sum(std::span<const double> v);
double mean(std::span<const double> v);
double variance(std::span<const double> v);
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);
Summary summarize(std::span<const double> v);

double normal_cdf(double x);

/// sup_x |F_n(x) - F(x)|.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares of log value against log n.
LineFit fit_exponent(std::span<const std::pair<double, double>> pairs);

/// Binomial estimate with its normal-approximation standard error.
struct Proportion {
  double estimate = 0.0;
  double stderr_value = 0.0;
};
Proportion proportion(long hits, long trials);

}  // namespace polymer
