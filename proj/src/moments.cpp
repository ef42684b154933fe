#include "polymer/moments.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polymer/chaos.hpp"
#include "polymer/enumerate.hpp"
#include "polymer/parallel.hpp"
#include "polymer/rng.hpp"
#include "polymer/stats.hpp"
#include "polymer/walk.hpp"

namespace polymer {

PairWalkTable::PairWalkTable(int dim, long horizon, double lambda2_value) : horizon_(horizon) {
  if (horizon < 0) throw std::invalid_argument("PairWalkTable: negative horizon");
  box_ = Box(dim, static_cast<int>(std::max(1L, 2 * horizon)));
  if (box_.size() > memory_budget_doubles() / 2) throw CapacityError("PairWalkTable: box exceeds the memory budget");
  slice_.assign(box_.size(), 0.0);
  std::vector<double> tmp(box_.size(), 0.0);
  slice_[box_.origin()] = 1.0;
  mass_.assign(static_cast<std::size_t>(horizon) + 1, 1.0);
  const double boost = std::exp(lambda2_value);
  const int r = box_.radius();
  for (long k = 1; k <= horizon; ++k) {
    // D moves by e - e', i.e. two independent simple-walk steps
    walk_step(box_, slice_, tmp, 2 * k - 1, r);
    walk_step(box_, tmp, slice_, 2 * k, r);
    slice_[box_.origin()] *= boost;
    double s = 0.0;
    for_each_cone_site(box_, 2 * k, r, [&](std::size_t i, const auto&) { s += slice_[i]; });
    mass_[static_cast<std::size_t>(k)] = s;
  }
}

double PairWalkTable::at(std::span<const int> x) const {
  if (!box_.contains(x) || !parity_ok(x, 2 * horizon_)) return 0.0;
  return slice_[box_.index(x)];
}

double second_moment_exact(const DisorderSpec& spec, double beta, long n, int dim) {
  return PairWalkTable(dim, n, lambda2(spec, beta)).second_moment(n);
}

L2Threshold l2_threshold(const DisorderSpec& spec, int dim, double tol) {
  if (!spec.has_exponential_moments()) throw UnsupportedError("l2_threshold: needs exponential moments");
  L2Threshold out;
  if (dim <= 2) {
    out.recurrent = true;
    return out;
  }
  out.escape = escape_probability_exact(dim);
  const double target = out.escape / (1.0 - out.escape);
  auto f = [&](double b) { return sigma2(spec, b) - target; };
  double hi = 0.5;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 256.0) {
      out.unbounded = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  std::uintmax_t iters = 200;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi), stop, iters);
  out.value = 0.5 * (a + b);
  return out;
}

double l2_limit(const DisorderSpec& spec, double beta, int dim) {
  if (dim <= 2) return beta == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double pi = escape_probability_exact(dim);
  const double x = sigma2(spec, beta) * (1.0 - pi) / pi;
  return x < 1.0 ? 1.0 / (1.0 - x) : std::numeric_limits<double>::infinity();
}

MomentEstimate fractional_moment(const DisorderSpec& spec, double beta, double gamma, long n,
                                 MomentMode mode, int dim, long replicas, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("fractional_moment: gamma must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("fractional_moment: n must be >= 1");
  MomentEstimate out;
  if (mode == MomentMode::exact_enum) {
    if (dim != 1) throw UnsupportedError("fractional_moment: exact enumeration is d = 1 only");
    if (n > 6) throw CapacityError("fractional_moment: exact enumeration is limited to n <= 6");
    double acc = 0.0;
    for_each_partition_value(spec, beta, n, WeightMode::normalized,
                             [&](double w, double p) { acc += p * std::pow(w, gamma); });
    out.value = acc;
    out.exact = true;
    return out;
  }
  if (replicas < 2) throw std::invalid_argument("fractional_moment: Monte Carlo needs >= 2 replicas");
  std::vector<double> v(static_cast<std::size_t>(replicas));
  for (long r = 0; r < replicas; ++r) {
    DisorderField f(spec, derive_seed(seed, "fractional_moment", static_cast<std::uint64_t>(r)), Window{dim});
    v[static_cast<std::size_t>(r)] = std::exp(gamma * forward_partition(f, beta, n).log_W(n));
  }
  auto s = summarize(v);
  out.value = s.mean;
  out.stderr_value = s.stderr_mean;
  out.replicas = replicas;
  return out;
}

double r_gamma(const DisorderSpec& spec, double beta, int dim, double gamma) {
  return std::pow(2.0 * dim, 1.0 - gamma) * std::exp(log_mgf(spec, gamma * beta) - gamma * log_mgf(spec, beta));
}

StrongDisorderCheck strong_disorder_sufficient(const DisorderSpec& spec, double beta, int dim) {
  StrongDisorderCheck out;
  const int grid = 1000;
  double best = std::numeric_limits<double>::infinity();
  int arg = 1;
  for (int i = 1; i <= grid; ++i) {
    const double g = static_cast<double>(i) / (grid + 1);
    const double r = r_gamma(spec, beta, dim, g);
    if (r < best) {
      best = r;
      arg = i;
    }
  }
  const double lo = static_cast<double>(arg - 1) / (grid + 1);
  const double hi = static_cast<double>(arg + 1) / (grid + 1);
  auto logr = [&](double g) { return std::log(r_gamma(spec, beta, dim, g)); };
  const auto [g, lr] = boost::math::tools::brent_find_minima(logr, lo, hi, 40);
  if (std::exp(lr) < best) {
    best = std::exp(lr);
    out.best_gamma = g;
  } else {
    out.best_gamma = static_cast<double>(arg) / (grid + 1);
  }
  out.best_r = best;
  out.holds = best < 1.0;
  const double h = 1e-5 * std::max(1.0, std::abs(beta));
  const double dl = (log_mgf(spec, beta + h) - log_mgf(spec, beta - h)) / (2 * h);
  out.headline_value = beta * dl - log_mgf(spec, beta);
  out.headline = out.headline_value > std::log(2.0 * dim);
  return out;
}

FirstMeeting::FirstMeeting(int dim, long horizon) : horizon_(horizon) {
  if (horizon < 1) throw std::invalid_argument("FirstMeeting: horizon must be >= 1");
  const HeatTable q(WalkSpec{dim, horizon});
  box_ = q.box();
  f_ = collision_renewal(q, -1.0);
  for (auto& s : f_) {
    for (double& v : s) v = std::max(v, 0.0);  // clear rounding noise of the alternating recursion
  }
}

double FirstMeeting::at(long n, std::span<const int> x) const {
  if (!box_.contains(x)) return 0.0;
  return f_.at(static_cast<std::size_t>(n))[box_.index(x)];
}

double FirstMeeting::total(long n) const {
  double s = 0.0;
  for (double v : f_.at(static_cast<std::size_t>(n))) s += v;
  return s;
}

std::vector<double> first_return_probabilities(int dim, long n) {
  const auto p = return_probabilities(dim, n);
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> r(N + 1, 0.0);
  for (std::size_t k = 1; k <= N; ++k) {
    double s = p[k];
    for (std::size_t m = 1; m < k; ++m) s -= r[m] * p[k - m];
    r[k] = s;
  }
  return r;
}

EvansDerridaResult evans_derrida_check(const DisorderSpec& spec, double beta, double gamma, int dim,
                                       long truncation) {
  if (dim < 3) throw std::invalid_argument("evans_derrida_check: needs d >= 3");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::domain_error("evans_derrida_check: gamma must lie in (0, 1]");
  if (truncation < 4) throw std::invalid_argument("evans_derrida_check: truncation must be >= 4");
  EvansDerridaResult out;
  out.prefactor = std::exp(log_mgf(spec, 2 * gamma * beta) - 2 * gamma * log_mgf(spec, beta));
  const FirstMeeting fm(dim, truncation);
  for (long n = 1; n <= truncation; ++n) {
    double s = 0.0;
    for (double v : fm.slice(n)) {
      if (v > 0.0) s += gamma == 1.0 ? v : std::pow(v, gamma);
    }
    out.level_sums.push_back(s);
    out.partial_sum += s;
  }
  // power-law fit over the upper half of the levels, same parity classes mixed
  std::vector<std::pair<double, double>> pts;
  for (long n = truncation / 2; n <= truncation; ++n) {
    const double v = out.level_sums[static_cast<std::size_t>(n - 1)];
    if (v > 0.0) pts.push_back({static_cast<double>(n), v});
  }
  const auto fit = fit_exponent(pts);
  const double a = -fit.slope;
  if (a > 1.0) {
    const double amp = std::exp(fit.intercept);
    const double x = static_cast<double>(truncation) + 0.5;
    out.tail_estimate = amp * std::pow(x, 1.0 - a) / (a - 1.0);
  } else {
    out.tail_summable = false;
    out.tail_estimate = std::numeric_limits<double>::infinity();
  }
  out.value = out.prefactor * (out.partial_sum + out.tail_estimate);
  out.holds = out.tail_summable && out.value < 1.0;
  return out;
}

PStarProbe pstar_probe(const DisorderSpec& spec, double beta, int dim, std::span<const double> p_grid,
                       std::span<const long> n_grid, long replicas, std::uint64_t seed) {
  if (p_grid.empty() || n_grid.size() < 2) throw std::invalid_argument("pstar_probe: need p values and >= 2 horizons");
  if (replicas < 2) throw std::invalid_argument("pstar_probe: need >= 2 replicas");
  if (!spec.has_exponential_moments()) throw UnsupportedError("pstar_probe: needs exponential moments");
  const long n_max = *std::max_element(n_grid.begin(), n_grid.end());
  std::vector<std::vector<double>> logw(n_grid.size());
  for (long r = 0; r < replicas; ++r) {
    DisorderField f(spec, derive_seed(seed, "pstar_probe", static_cast<std::uint64_t>(r)), Window{dim});
    const auto run = forward_partition(f, beta, n_max);
    for (std::size_t j = 0; j < n_grid.size(); ++j) logw[j].push_back(run.log_W(n_grid[j]));
  }
  PStarProbe out;
  for (double p : p_grid) {
    std::vector<double> xs, ys, se;
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
      std::vector<double> v;
      for (double lw : logw[j]) v.push_back(std::exp(p * lw));
      const auto s = summarize(v);
      out.rows.push_back({p, n_grid[j], s.mean, s.stderr_mean});
      xs.push_back(static_cast<double>(n_grid[j]));
      ys.push_back(std::log(s.mean));
      se.push_back(s.stderr_mean / s.mean);
    }
    GrowthFit g;
    g.p = p;
    const auto line = fit_line(xs, ys);
    g.rate = line.slope;
    const double mx = mean(xs);
    double sxx = 0.0;
    for (double x : xs) sxx += (x - mx) * (x - mx);
    double var = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) var += std::pow((xs[j] - mx) / sxx, 2) * se[j] * se[j];
    g.rate_stderr = std::sqrt(var);
    // flat: no growth beyond two standard errors plus a small per-step allowance
    g.flat = g.rate <= 2.0 * g.rate_stderr + 1e-3;
    out.fits.push_back(g);
  }
  out.p_star_hat = 1.0;
  for (const auto& g : out.fits) {
    if (g.flat) out.p_star_hat = std::max(out.p_star_hat, g.p);
  }
  return out;
}

std::vector<double> sup_log_martingale_samples(const DisorderSpec& spec, double beta, int dim, long n_max,
                                               long replicas, std::uint64_t seed, unsigned threads) {
  if (replicas < 1 || n_max < 1) throw std::invalid_argument("sup_martingale_tail: need replicas, n_max >= 1");
  std::vector<double> peak(static_cast<std::size_t>(replicas));
  parallel_for(peak.size(), threads, [&](std::size_t r) {
    DisorderField f(spec, derive_seed(seed, "sup_martingale_tail", r), Window{dim});
    const auto run = forward_partition(f, beta, n_max);
    peak[r] = *std::max_element(run.log_mass.begin(), run.log_mass.end());
  });
  return peak;
}

std::vector<TailRow> sup_martingale_tail(const DisorderSpec& spec, double beta, int dim,
                                         std::span<const double> t_grid, long n_max, long replicas,
                                         std::uint64_t seed, unsigned threads) {
  const double M = spec.sup_abs();
  if (!std::isfinite(M)) throw UnsupportedError("sup_martingale_tail: needs bounded disorder");
  const std::vector<double> peak = sup_log_martingale_samples(spec, beta, dim, n_max, replicas, seed, threads);
  const double K = std::exp(beta * M);
  std::vector<TailRow> out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::domain_error("sup_martingale_tail: t must be positive");
    long hits = 0;
    const double lt = std::log(t);
    for (double v : peak) hits += v >= lt ? 1 : 0;
    const auto pr = proportion(hits, replicas);
    TailRow row;
    row.t = t;
    row.empirical = pr.estimate;
    row.stderr_value = pr.stderr_value;
    row.lower95 = pr.estimate - 1.6448536269514722 * pr.stderr_value;
    row.bound = 1.0 / (4.0 * K * K * t);
    out.push_back(row);
  }
  return out;
}

int BlockFunctionalSpec::radius() const {
  return static_cast<int>(std::ceil(radius_factor * std::sqrt(static_cast<double>(length))));
}

double block_functional_X(const DisorderField& field, const BlockFunctionalSpec& spec, double beta,
                          long start_time) {
  if (spec.order < 1) throw std::invalid_argument("block_functional_X: order must be >= 1");
  if (spec.length < 1) throw std::invalid_argument("block_functional_X: length must be >= 1");
  if (spec.dimension != field.dimension()) throw std::invalid_argument("block_functional_X: dimension mismatch");
  if (beta == 0.0) throw std::domain_error("block_functional_X: beta must be nonzero");
  const Box box(spec.dimension, std::max(0, spec.radius()));
  std::vector<double> init(box.size(), 0.0);
  double count = 0.0;
  for_each_box_site(box, box.radius(), [&](std::size_t, const auto&) { count += 1.0; });
  for_each_box_site(box, box.radius(), [&](std::size_t i, const auto&) { init[i] = 1.0 / count; });
  const auto F = chaos_sweep(field, beta, start_time, spec.length, box, init, spec.order);
  double tk = 0.0;
  for (double v : F[static_cast<std::size_t>(spec.order)]) tk += v;
  const double R = collision_sum(WalkSpec{spec.dimension, spec.length}).at(spec.length);
  const double sigma = std::sqrt(sigma2(field.spec(), beta));
  return tk / std::pow(sigma * std::sqrt(R), spec.order);
}

}  // namespace polymer
