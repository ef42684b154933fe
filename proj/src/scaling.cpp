#include "polymer/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "polymer/parallel.hpp"
#include "polymer/partition.hpp"
#include "polymer/rng.hpp"
#include "polymer/walk.hpp"

namespace polymer {

double overlap_R(long n, int dim) {
  if (n < 1) throw std::invalid_argument("overlap_R: n must be >= 1");
  return collision_sum(WalkSpec{dim, n}).at(n);
}

double interm_beta(long n, double beta_hat, int dim) {
  if (!(beta_hat >= 0.0)) throw std::domain_error("interm_beta: beta_hat must be >= 0");
  if (beta_hat == 0.0) return 0.0;
  return beta_hat / std::sqrt(overlap_R(n, dim));
}

double critical_window_beta(long n, double theta, const DisorderSpec& spec) {
  if (n < 2) throw std::invalid_argument("critical_window_beta: n must be >= 2");
  if (!spec.has_exponential_moments()) throw UnsupportedError("critical_window_beta: needs exponential moments");
  const double target = (1.0 + theta / std::log(static_cast<double>(n))) / overlap_R(n, 2);
  if (!(target > 0.0)) throw std::domain_error("critical_window_beta: right-hand side is not positive");
  auto f = [&](double b) { return sigma2(spec, b) - target; };
  double hi = 0.25;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 512.0) throw std::domain_error("critical_window_beta: sigma^2 never reaches the target");
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi),
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  // pick whichever end has the smaller residual
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

IntermediateScaling resolve_interm(long n, double beta_hat, int dim) {
  return {false, beta_hat, n, interm_beta(n, beta_hat, dim)};
}

IntermediateScaling resolve_critical(long n, double theta, const DisorderSpec& spec) {
  return {true, theta, n, critical_window_beta(n, theta, spec)};
}

namespace {

std::vector<double> replica_log_w(const DisorderSpec& spec, double beta, long n, const LognormalOptions& o,
                                  const char* tag) {
  if (o.replicas < 1) throw std::invalid_argument("lognormal_experiment: need >= 1 replica");
  std::vector<double> out(static_cast<std::size_t>(o.replicas));
  RunOptions run;
  run.window_sds = o.window_sds;
  parallel_for(out.size(), o.threads, [&](std::size_t r) {
    DisorderField f(spec, derive_seed(o.seed, tag, r), Window{2});
    out[r] = forward_partition(f, beta, n, 0, {}, run).log_W(n);
  });
  return out;
}

}  // namespace

LognormalResult lognormal_experiment(const DisorderSpec& spec, double beta_hat, long n,
                                     const LognormalOptions& options) {
  LognormalResult res;
  res.beta_hat = beta_hat;
  res.n = n;
  res.beta_n = interm_beta(n, beta_hat, 2);
  res.sigma_hat2 = beta_hat < 1.0 ? -std::log1p(-beta_hat * beta_hat) : std::numeric_limits<double>::infinity();
  res.log_w = replica_log_w(spec, res.beta_n, n, options, "lognormal");
  res.summary = summarize(res.log_w);
  res.median_w = std::exp(res.summary.median);
  if (beta_hat < 1.0) {
    const double m = -0.5 * res.sigma_hat2;
    res.mean_deviation = res.summary.mean - m;
    if (res.sigma_hat2 > 0.0) {
      res.variance_deviation = res.summary.variance / res.sigma_hat2 - 1.0;
      const double sd = std::sqrt(res.sigma_hat2);
      res.ks = ks_statistic(res.log_w, [&](double x) { return normal_cdf((x - m) / sd); });
    } else {
      res.variance_deviation = res.summary.variance;
      res.ks = std::all_of(res.log_w.begin(), res.log_w.end(), [](double v) { return v == 0.0; }) ? 0.0 : 1.0;
    }
  } else {
    res.mean_deviation = res.variance_deviation = res.ks = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

std::vector<MedianPoint> median_trajectory(const DisorderSpec& spec, double beta_hat,
                                           std::span<const long> n_grid, const LognormalOptions& options) {
  std::vector<MedianPoint> out;
  for (long n : n_grid) {
    MedianPoint p;
    p.n = n;
    p.beta_n = interm_beta(n, beta_hat, 2);
    auto lw = replica_log_w(spec, p.beta_n, n, options, "lognormal");
    p.median_log_w = median(lw);
    p.median_w = std::exp(p.median_log_w);
    out.push_back(p);
  }
  return out;
}

bool strictly_decreasing_medians(std::span<const MedianPoint> pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].median_w < pts[i - 1].median_w)) return false;
  }
  return true;
}

std::vector<FieldAverageValue> field_average(const DisorderField& field, double beta, long n,
                                             std::span<const TestFunction> phis, FieldMode mode) {
  const int d = field.dimension();
  if (mode == FieldMode::d2_interm && d != 2) throw UnsupportedError("field_average: d2_interm needs d = 2");
  if (mode == FieldMode::d3_subL2 && d < 3) throw UnsupportedError("field_average: d3_subL2 needs d >= 3");
  if (n < 1) throw std::invalid_argument("field_average: n must be >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  double support = 0.0;
  for (const auto& p : phis) {
    if (!(p.support >= 0.0)) throw std::invalid_argument("field_average: negative support");
    support = std::max(support, p.support);
  }
  const int radius = static_cast<int>(std::floor(support * rn));
  std::vector<FieldAverageValue> out(phis.size());
  if (phis.empty()) return out;
  const double vol = std::pow(rn, d);
  const double amp = mode == FieldMode::d2_interm ? std::sqrt(overlap_R(n, 2))
                                                  : std::pow(static_cast<double>(n), 0.25 * (d - 2));
  std::vector<double> sums(phis.size(), 0.0);
  if (beta != 0.0) {
    const auto w = backward_partition(field, beta, 0, n, radius);
    std::vector<double> y(static_cast<std::size_t>(d));
    std::vector<double> terms;
    for (std::size_t j = 0; j < phis.size(); ++j) {
      terms.clear();
      for_each_box_site(w.box, radius, [&](std::size_t i, const auto& x) {
        double norm = 0.0;
        for (int a = 0; a < d; ++a) {
          y[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] / rn;
          norm = std::max(norm, std::abs(y[static_cast<std::size_t>(a)]));
        }
        if (norm > phis[j].support) return;
        const double ph = phis[j].phi(y);
        if (ph == 0.0) return;
        terms.push_back(ph * std::expm1(std::log(w.values[i]) + w.log_scale));
      });
      sums[j] = pairwise_sum(terms);
    }
  }
  for (std::size_t j = 0; j < phis.size(); ++j) {
    out[j].unamplified = sums[j] / vol;
    out[j].value = amp * out[j].unamplified;
  }
  return out;
}

FieldAverageValue field_average(const DisorderField& field, double beta, long n, const TestFunction& phi,
                                FieldMode mode) {
  return field_average(field, beta, n, std::span<const TestFunction>(&phi, 1), mode)[0];
}

double g_theta(double theta, double t, double eps) {
  if (!(t > 0.0)) throw std::domain_error("g_theta: t must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("g_theta: eps must lie in (0, 1)");
  const double lt = std::log(t);
  auto logf = [&](double s) { return (theta - euler_gamma) * s + std::log(s) + (s - 1.0) * lt - std::lgamma(s + 1.0); };
  // locate the peak and the point past it where the integrand falls below eps * peak / 100
  const double h = 0.125;
  double peak = -std::numeric_limits<double>::infinity();
  double at_peak = h;
  double end = h;
  for (double s = h;; s += h) {
    const double v = logf(s);
    if (v > peak) {
      peak = v;
      at_peak = s;
    }
    if (v < peak + std::log(eps * 1e-2) && s > 1.0) {
      end = s;
      break;
    }
    if (s > 1e7) throw std::runtime_error("g_theta: integrand does not decay");
  }
  if (peak > std::log(std::numeric_limits<double>::max()) - 50.0) {
    throw std::overflow_error("g_theta: value exceeds double range");
  }
  auto f = [&](double u) { return u <= 0.0 ? 0.0 : std::exp(logf(u) - peak); };
  // panels about the width of the peak keep the adaptive rule local
  const double width = std::max(1.0, 0.5 * std::sqrt(at_peak));
  std::vector<double> parts;
  for (double a = 0.0; a < end; a += width) {
    const double b = std::min(end, a + width);
    parts.push_back(boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 0.1 * eps));
  }
  return std::exp(peak) * pairwise_sum(parts);
}

}  // namespace polymer
