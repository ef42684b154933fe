#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "polymer/lattice.hpp"

namespace polymer {

/// Simple symmetric random walk on Z^d observed up to a finite horizon.
struct WalkSpec {
  int dimension = 1;
  long horizon = 1;

  void validate() const;
};

/// Exact transition probabilities q_i(x) = P(S_i = x) for i = 0..horizon.
/// Slices live on a common box of radius `horizon`; sites with the wrong
/// parity hold an exact zero.
class HeatTable {
 public:
  explicit HeatTable(const WalkSpec& spec);

  const WalkSpec& spec() const { return spec_; }
  const Box& box() const { return box_; }
  std::span<const double> slice(long i) const;
  double at(long i, std::span<const int> x) const;

  /// Sum over x of q_i(x)^2.
  double self_overlap(long i) const;

  /// CSV dump with columns time, x1..xd, probability (nonzero entries only).
  void write_csv(std::ostream& os) const;

 private:
  WalkSpec spec_;
  Box box_;
  std::vector<std::vector<double>> slices_;
};

/// R_k for k = 1..n (stored at index k-1).
struct OverlapSequence {
  std::vector<double> values;

  double at(long k) const { return values.at(static_cast<std::size_t>(k - 1)); }
  long size() const { return static_cast<long>(values.size()); }
};

/// Return probabilities p_{2i}(0) for i = 0..n computed from the step
/// combinatorics (no heat table). Index i holds p_{2i}(0).
std::vector<double> return_probabilities(int dimension, long n);

/// R_k = sum_{i<=k} p_{2i}(0), k = 1..horizon.
OverlapSequence collision_sum(const WalkSpec& spec);

/// Same quantity, summed from a heat table (sum over x of q_i(x)^2).
OverlapSequence collision_sum(const HeatTable& table);

struct EscapeProbability {
  double value = 0.0;
  /// Set for d <= 2, where the walk is recurrent and the value is exactly 0.
  bool recurrent = false;
  long truncation = 0;
  double tail_estimate = 0.0;
};

/// pi_d = P(the walk never returns to 0) = 1 / (1 + sum_{i>=1} p_{2i}(0)).
/// The series is truncated at the smallest doubling N with the tail-corrected
/// value stable to `tol`; the tail uses the local limit 2 (d / 4 pi i)^{d/2}.
EscapeProbability escape_probability(int dimension, double tol);

/// Same, at a caller-chosen truncation order.
EscapeProbability escape_probability_at(int dimension, long truncation);

/// Green's function at the origin, G_d = 1 + sum_{i>=1} p_{2i}(0) = int_0^inf e^{-t} I_0(t/d)^d dt,
/// to near machine precision. Infinite for d <= 2.
double green_at_origin(int dimension);

/// 1 / green_at_origin(d); 0 for d <= 2.
double escape_probability_exact(int dimension);

/// Local-CLT estimate of sum_{i > n} p_{2i}(0).
double return_series_tail(int dimension, long n);

/// Space-time renewal over coincidences of two walks started together at the origin:
/// A_t(x) = q_t(x)^2 + c sum_{0<s<t} sum_y A_s(y) q_{t-s}(x-y)^2, t = 1..horizon (A_0 = 0).
/// c = sigma^2 gives second moments of point-to-point partition functions; c = -1 gives
/// first meeting probabilities.
std::vector<std::vector<double>> collision_renewal(const HeatTable& table, double coupling);

/// Standard heat kernel g_t(x) = (2 pi t)^{-d/2} exp(-|x|^2 / 2t).
double gaussian_density(double t, std::span<const double> x);

}  // namespace polymer
