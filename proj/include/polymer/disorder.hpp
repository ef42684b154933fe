#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "polymer/errors.hpp"
#include "polymer/lattice.hpp"
#include "polymer/rng.hpp"

namespace polymer {

enum class Family {
  gaussian,   // N(0, 1)
  bernoulli,  // +-1 with probability 1/2
  bounded,    // {-M, 0, +M} with P(+-M) = 1 / (2 M^2); mean 0, variance 1, |omega| <= M
  pareto,     // P(omega > x) = p_+ x^{-alpha}, x >= 1; mirrored left tail of weight c_minus
};

struct DisorderSpec {
  Family family = Family::gaussian;
  double bound = 1.0;    // M for Family::bounded (M >= 1)
  double alpha = 2.0;    // tail index for Family::pareto
  double c_minus = 0.0;  // left-tail weight for Family::pareto

  static DisorderSpec gaussian() { return {}; }
  static DisorderSpec bernoulli() { return {Family::bernoulli}; }
  static DisorderSpec bounded(double m) { return {Family::bounded, m}; }
  static DisorderSpec pareto(double alpha, double c_minus = 0.0) {
    return {Family::pareto, 1.0, alpha, c_minus};
  }

  void validate() const;
  bool has_exponential_moments() const { return family != Family::pareto; }
  /// Finite support values (bernoulli, bounded); empty otherwise.
  std::vector<double> support() const;
  /// Probabilities matching support().
  std::vector<double> support_probabilities() const;
  /// sup |omega| for bounded families; infinity otherwise.
  double sup_abs() const;
  std::string name() const;
};

Family parse_family(const std::string& name);

/// lambda(beta) = log E[exp(beta omega)].
double log_mgf(const DisorderSpec& spec, double beta);

/// sigma^2(beta) = exp(lambda(2 beta) - 2 lambda(beta)) - 1.
double sigma2(const DisorderSpec& spec, double beta);

/// lambda_2(beta) = lambda(2 beta) - 2 lambda(beta) = log(1 + sigma^2(beta)).
double lambda2(const DisorderSpec& spec, double beta);

/// m(t) = inf{x : P(omega > x) <= 1/t}; t^{1/alpha} for the exact Pareto tail.
double quantile_scale(const DisorderSpec& spec, double t);

/// Space-time window a field is meant to be queried on.
struct Window {
  int dimension = 1;
  long t_min = 0;
  long t_max = std::numeric_limits<long>::max();
  int radius = std::numeric_limits<int>::max();  // spatial sup-norm radius

  bool contains(long t, std::span<const int> x) const;
};

/// Standard normal quantile; gaussian site values are gaussian_quantile of the site uniform.
double gaussian_quantile(double u);

/// Key of a space-time site, independent of any field seed.
std::uint64_t site_key(long t, std::span<const int> x);

/// Immutable disorder environment. Values are a pure function of
/// (spec, seed, t, x): query order and the set of queried sites never matter.
/// Sites registered in the tilt set are drawn from the exponentially tilted
/// law exp(beta omega - lambda(beta)) P(d omega) using the same underlying
/// uniforms as the untilted field.
class DisorderField {
 public:
  DisorderField(DisorderSpec spec, std::uint64_t seed, Window window = {});

  const DisorderSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  const Window& window() const { return window_; }
  int dimension() const { return window_.dimension; }
  bool is_tilted() const { return tilt_ && !tilt_->sites.empty(); }

  double operator()(long t, std::span<const int> x) const {
    return value(t, x.data(), static_cast<int>(x.size()));
  }
  double value(long t, const int* x, int dim) const;

  /// Hash of (t, x_0 .. x_{dim-2}); pair with value_in_row() to draw along the last axis.
  std::uint64_t row_key(long t, const int* x, int dim) const;
  /// Same as value(t, x, dim) given row = row_key(t, x, dim).
  double value_in_row(std::uint64_t row, long t, const int* x, int dim) const;

  /// Underlying uniform of the last-axis site x_last in a row; value() is a function of it
  /// at untilted sites.
  double uniform_in_row(std::uint64_t row, int x_last) const {
    return to_unit_open(hash_combine(row, static_cast<std::uint64_t>(static_cast<std::int64_t>(x_last))));
  }
  bool has_modifiers() const { return tilt_ != nullptr; }

  /// Untilted value; identical to value() away from tilted sites.
  double base_value(long t, const int* x, int dim) const;

 private:
  friend DisorderField tilt_along_path(const DisorderField&, double,
                                       std::span<const std::pair<long, Point>>);
  friend DisorderField with_site_values(const DisorderField&,
                                        std::span<const std::pair<std::pair<long, Point>, double>>);
  struct Tilt {
    double beta = 0.0;
    std::unordered_set<std::uint64_t> sites;
    std::unordered_map<std::uint64_t, double> fixed;
  };

  double draw(std::uint64_t h, const Tilt* tilt) const;

  DisorderSpec spec_;
  std::uint64_t seed_;
  std::uint64_t seed_mix_;
  Window window_;
  std::shared_ptr<const Tilt> tilt_;
};

DisorderField sample_field(const DisorderSpec& spec, const Window& window, std::uint64_t seed);

/// Field whose sites on `path` follow the size-biased law at inverse temperature beta;
/// all other sites are unchanged. Heavy-tailed families are unsupported.
DisorderField tilt_along_path(const DisorderField& field, double beta,
                              std::span<const std::pair<long, Point>> path);

/// Path description used by tilt_along_path: (time, site) pairs.
using SpaceTimePath = std::vector<std::pair<long, Point>>;

/// Field with the listed sites pinned to the given values (enumeration and perturbation
/// tests). Pinned values take precedence over a tilt.
DisorderField with_site_values(const DisorderField& field,
                               std::span<const std::pair<std::pair<long, Point>, double>> values);

}  // namespace polymer
