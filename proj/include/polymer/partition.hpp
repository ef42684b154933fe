#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/lattice.hpp"

namespace polymer {

/// How the disorder at a visited site enters the Gibbs weight.
enum class WeightMode {
  normalized,    // exp(beta omega - lambda(beta)); the partition function W_n
  raw,           // exp(beta omega); the partition function Z_n
  product_form,  // 1 + beta omega
};

/// Maps a disorder value to its site weight for a fixed (spec, beta, mode).
class SiteWeight {
 public:
  SiteWeight(const DisorderSpec& spec, double beta, WeightMode mode);

  double operator()(double omega) const {
    if (discrete_) {
      for (std::size_t i = 0; i < n_support_; ++i) {
        if (omega == support_[i]) return weight_[i];
      }
    }
    return slow(omega);
  }

  double beta() const { return beta_; }
  WeightMode mode() const { return mode_; }

 private:
  double slow(double omega) const;

  double beta_;
  double shift_ = 0.0;
  WeightMode mode_;
  bool discrete_ = false;
  std::size_t n_support_ = 0;
  double support_[3] = {0, 0, 0};
  double weight_[3] = {0, 0, 0};
};

struct RunOptions {
  WeightMode mode = WeightMode::normalized;
  /// Renormalise each slice to unit mass and carry log W_k separately.
  bool log_space = true;
  /// Keep every endpoint slice (needed for endpoint_law at k < horizon).
  bool keep_slices = false;
  /// 0 keeps the exact cone. A positive value c truncates coordinate i at time k to
  /// |x_i| <= ceil(c sqrt(k / d)) + 2, a diffusive window for large-n experiments.
  double window_sds = 0.0;
};

int window_limit(double window_sds, long k, int dim);

/// Result of a forward transfer-matrix sweep from (start_time, start).
class PartitionRun {
 public:
  double beta = 0.0;
  WeightMode mode = WeightMode::normalized;
  int dimension = 1;
  long horizon = 0;
  long start_time = 0;
  Point start;
  std::uint64_t field_seed = 0;
  Box box;  // coordinates relative to `start`

  /// log of sum_x u_k(x), k = 0..horizon.
  std::vector<double> log_mass;
  /// Normalised slices mu_k (only k = horizon unless keep_slices was set).
  std::vector<std::vector<double>> slices;
  bool all_slices = false;

  double W(long k) const;
  double log_W(long k) const { return log_mass.at(static_cast<std::size_t>(k)); }
  /// mu_k as a flat array over `box`.
  std::span<const double> normalized_slice(long k) const;
  /// u_k(x) at a site relative to start.
  double mass_at(long k, std::span<const int> rel) const;

  /// CSV with columns k, value (value = W_k).
  void write_sequence_csv(std::ostream& os) const;
};

PartitionRun forward_partition(const DisorderField& field, double beta, long horizon,
                               long start_time = 0, const Point& start = {},
                               const RunOptions& options = {});

/// W_{(m,n)}(x,y) excludes the weight at time n; W_{(m,n]}(x,y) includes it.
/// Weights at times m+1 .. n-1 are always included.
struct PointToPointSlice {
  double open = 0.0;    // W_{(m,n)}(x, y)
  double closed = 0.0;  // W_{(m,n]}(x, y)
};

PointToPointSlice point_to_point(const DisorderField& field, double beta, long m, long n,
                                 const Point& x, const Point& y,
                                 WeightMode mode = WeightMode::normalized);

/// |W_{n+m} - sum_x W_n(0,x) W_{(n,n+m]}(x)| / W_{n+m}, each right-hand factor from its own sweep.
double check_linearity(const DisorderField& field, double beta, long n, long m);

struct EndpointLaw {
  Box box;
  long time = 0;
  std::vector<double> mass;

  double at(std::span<const int> x) const;
  double total() const;
  void write_csv(std::ostream& os) const;
};

EndpointLaw endpoint_law(const PartitionRun& run, long k);

/// Replica overlap at time n: probability that two polymers of length n-1 in the
/// same environment, each taking one further free step, sit on the same site.
struct OverlapValue {
  double value = 0.0;       // sum_x rho(x)^2, rho = mu_{n-1} * q_1
  double two_replica = 0.0;  // sum_{y,y'} mu(y) mu(y') q_2(y - y')
};

OverlapValue overlap_In(const DisorderField& field, double beta, long n);

/// E^{S'}[exp(lambda_2(beta) #{i <= n : S_i = S'_i})] for a fixed path S given as
/// positions S_1..S_n (S_0 = 0 implied).
double pinning_partition(std::span<const Point> path, const DisorderSpec& spec, double beta);

/// (1/n) log W_n for one realisation, computed in log space.
double free_energy_estimate(const DisorderField& field, double beta, long n,
                            const RunOptions& options = {});

/// W_{(t0, t1]}(x) for every start x with |x|_inf <= radius, by one backward sweep.
/// Returned on a Box of the given radius (absolute coordinates) as values * exp(log_scale).
struct StartField {
  Box box;
  std::vector<double> values;
  double log_scale = 0.0;
  double at(std::span<const int> x) const { return values[box.index(x)] * std::exp(log_scale); }
  double log_at(std::span<const int> x) const { return std::log(values[box.index(x)]) + log_scale; }
};

StartField backward_partition(const DisorderField& field, double beta, long t0, long t1,
                              int radius, WeightMode mode = WeightMode::normalized);

}  // namespace polymer
