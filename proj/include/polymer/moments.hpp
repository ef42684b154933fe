#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/lattice.hpp"
#include "polymer/partition.hpp"

namespace polymer {

/// Law of the difference walk D_k = S_k - S'_k of two independent walks, reweighted by
/// exp(lambda_2) at every visit of 0 at times 1..k. Total mass at time k is E[W_k^2].
class PairWalkTable {
 public:
  PairWalkTable(int dim, long horizon, double lambda2_value);

  int dimension() const { return box_.dim(); }
  long horizon() const { return horizon_; }
  const Box& box() const { return box_; }
  /// Weighted mass of D_horizon at x.
  double at(std::span<const int> x) const;
  /// E[W_k^2], k = 0..horizon.
  double second_moment(long k) const { return mass_.at(static_cast<std::size_t>(k)); }

 private:
  Box box_;
  long horizon_;
  std::vector<double> slice_;
  std::vector<double> mass_;
};

/// E[W_n^2] from the difference-walk transfer matrix.
double second_moment_exact(const DisorderSpec& spec, double beta, long n, int dim);

struct L2Threshold {
  double value = 0.0;
  bool recurrent = false;  // d <= 2: beta_2 = 0
  bool unbounded = false;  // sigma^2 never reaches the threshold: beta_2 = +infinity
  double escape = 0.0;     // pi_d used
};

/// Root of sigma^2(beta) (1 - pi_d) / pi_d = 1.
L2Threshold l2_threshold(const DisorderSpec& spec, int dim, double tol = 1e-10);

/// sup_n E[W_n^2] = 1 / (1 - sigma^2 (1 - pi_d) / pi_d) below beta_2; infinity above.
double l2_limit(const DisorderSpec& spec, double beta, int dim);

enum class MomentMode { exact_enum, monte_carlo };

struct MomentEstimate {
  double value = 0.0;
  double stderr_value = 0.0;  // 0 for exact values
  bool exact = false;
  long replicas = 0;
};

/// E[W_n^gamma], gamma in (0, 1). Exact mode needs d = 1 and finite-support disorder.
MomentEstimate fractional_moment(const DisorderSpec& spec, double beta, double gamma, long n,
                                 MomentMode mode, int dim = 1, long replicas = 0,
                                 std::uint64_t seed = 0);

/// r(gamma) = (2d)^{1-gamma} exp(lambda(gamma beta) - gamma lambda(beta)).
double r_gamma(const DisorderSpec& spec, double beta, int dim, double gamma);

struct StrongDisorderCheck {
  bool holds = false;
  double best_gamma = 1.0;
  double best_r = 0.0;
  bool headline = false;          // beta lambda'(beta) - lambda(beta) > log(2d)
  double headline_value = 0.0;    // beta lambda'(beta) - lambda(beta)
};

StrongDisorderCheck strong_disorder_sufficient(const DisorderSpec& spec, double beta, int dim);

/// First meeting probabilities f(n, x) = P(min{k >= 1 : S_k = S'_k} = n, S_n = x).
class FirstMeeting {
 public:
  FirstMeeting(int dim, long horizon);

  long horizon() const { return horizon_; }
  const Box& box() const { return box_; }
  std::span<const double> slice(long n) const { return f_.at(static_cast<std::size_t>(n)); }
  double at(long n, std::span<const int> x) const;
  /// sum_x f(n, x)
  double total(long n) const;

 private:
  Box box_;
  long horizon_;
  std::vector<std::vector<double>> f_;
};

/// r(n) = P(D first returns to 0 at time n), n = 0..N (r(0) = 0), by scalar renewal.
std::vector<double> first_return_probabilities(int dim, long n);

struct EvansDerridaResult {
  double prefactor = 0.0;        // exp(lambda(2 gamma beta) - 2 gamma lambda(beta))
  double partial_sum = 0.0;      // sum_{n <= N, x} f(n, x)^gamma
  double tail_estimate = 0.0;    // power-law extrapolation of the per-level sums
  bool tail_summable = true;     // fitted decay exponent exceeds 1
  double value = 0.0;            // prefactor * (partial + tail)
  bool holds = false;            // value < 1 and the tail is summable
  std::vector<double> level_sums;  // sum_x f(n, x)^gamma, n = 1..N
};

EvansDerridaResult evans_derrida_check(const DisorderSpec& spec, double beta, double gamma, int dim,
                                       long truncation);

struct GrowthRow {
  double p = 0.0;
  long n = 0;
  double moment = 0.0;
  double stderr_value = 0.0;
};

struct GrowthFit {
  double p = 0.0;
  double rate = 0.0;  // slope of log E[W_n^p] against n
  double rate_stderr = 0.0;
  bool flat = false;
};

struct PStarProbe {
  std::vector<GrowthRow> rows;
  std::vector<GrowthFit> fits;
  double p_star_hat = 1.0;  // largest grid p whose row is flat
};

PStarProbe pstar_probe(const DisorderSpec& spec, double beta, int dim, std::span<const double> p_grid,
                       std::span<const long> n_grid, long replicas, std::uint64_t seed);

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double stderr_value = 0.0;
  double lower95 = 0.0;
  double bound = 0.0;  // 1 / (4 K^2 t)
};

/// max_{0 <= k <= n_max} log W_k per replica; replica r uses derive_seed(seed, "sup_martingale_tail", r).
std::vector<double> sup_log_martingale_samples(const DisorderSpec& spec, double beta, int dim, long n_max,
                                               long replicas, std::uint64_t seed, unsigned threads = 1);

/// P(max_{0 <= k <= n_max} W_k >= t) against 1/(4 K^2 t), K = exp(beta M).
std::vector<TailRow> sup_martingale_tail(const DisorderSpec& spec, double beta, int dim,
                                         std::span<const double> t_grid, long n_max, long replicas,
                                         std::uint64_t seed, unsigned threads = 1);

struct BlockFunctionalSpec {
  long length = 1;           // l
  int order = 1;             // k
  double radius_factor = 1;  // R: block radius ceil(R sqrt(l))
  int dimension = 1;

  int radius() const;
};

/// Order-k chaos term of the block partition function averaged over the block's start
/// sites, each start normalised by R_l^{k/2}. Walks are killed on leaving the block.
double block_functional_X(const DisorderField& field, const BlockFunctionalSpec& spec, double beta,
                          long start_time = 0);

}  // namespace polymer
