#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/partition.hpp"

namespace polymer {

/// A complete d = 1 environment on the cone {(t, x) : 1 <= t <= n, |x| <= t, x = t mod 2}.
struct Environment1D {
  long horizon = 0;
  std::vector<double> values;  // layer t starts at t(t+1)/2 - 1, entry (x + t) / 2

  static std::size_t offset(long t) { return static_cast<std::size_t>(t * (t + 1) / 2 - 1); }
  static std::size_t site_count(long n) { return static_cast<std::size_t>(n * (n + 3) / 2); }
  double at(long t, int x) const { return values[offset(t) + static_cast<std::size_t>((x + t) / 2)]; }
  double& at(long t, int x) { return values[offset(t) + static_cast<std::size_t>((x + t) / 2)]; }

  /// The same environment as a DisorderField (sites outside the cone keep `base`'s values).
  DisorderField as_field(const DisorderField& base) const;
};

/// Calls f(env, probability) for every environment of a finite-support family.
/// Refuses more than 2^24 environments.
void for_each_environment(const DisorderSpec& spec, long n,
                          const std::function<void(const Environment1D&, double)>& f);

/// Calls f(W_n, probability) for every environment, by a layer-by-layer depth-first
/// sweep; feasible up to about 2^28 environments.
void for_each_partition_value(const DisorderSpec& spec, double beta, long n, WeightMode mode,
                              const std::function<void(double, double)>& f);

/// W_n for an explicit environment by direct summation over all 2^n paths.
double partition_by_paths(const Environment1D& env, const SiteWeight& weight);

}  // namespace polymer
