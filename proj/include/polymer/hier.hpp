#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polymer/disorder.hpp"

namespace polymer {

using BigInt = boost::multiprecision::cpp_int;

/// N_n = b N_{n-1}^s, N_0 = 1. Throws CapacityError (naming the last generation that fit)
/// once the count needs more than max_bits bits.
BigInt hier_paths_count(int b, int s, int n, std::size_t max_bits = 1u << 20);

enum class Placement {
  edge,  // one variable per edge of D_n
  site,  // one variable per internal vertex of D_n
};

std::string placement_name(Placement p);

/// Directed polymer from A to B on the hierarchical lattice D_n^{b,s}; W_n is the path
/// average of prod exp(beta omega - lambda(beta)). s = 1 is accepted for degenerate checks.
struct HierModel {
  int b = 2;
  int s = 2;
  int generations = 1;
  DisorderSpec spec;
  double beta = 0.0;
  Placement placement = Placement::edge;

  void validate() const;
};

/// Polymer of length `depth` on the d-ary tree: W_n = (1/d) sum_i exp(beta omega_i - lambda) W_{n-1}^(i).
struct TreeModel {
  int d = 2;
  int depth = 1;
  DisorderSpec spec;
  double beta = 0.0;

  void validate() const;
};

/// Law of W_n as (value, probability) pairs with equal values merged; values ascending.
struct DistributionTable {
  std::vector<double> values;
  std::vector<double> probs;

  double mean() const;
  double moment(double gamma) const;
  double total() const;
};

/// Exact law for finite-support disorder; CapacityError when a table grows past max_entries.
DistributionTable hier_exact_distribution(const HierModel& m, std::size_t max_entries = 5'000'000);
DistributionTable tree_exact_distribution(const TreeModel& m, std::size_t max_entries = 5'000'000);

/// Independent exact samples of W_n by direct recursion; cost (b s)^n per sample.
std::vector<double> hier_sample(const HierModel& m, long replicas, std::uint64_t seed, unsigned threads = 1);
std::vector<double> tree_sample(const TreeModel& m, long replicas, std::uint64_t seed, unsigned threads = 1);

struct PopulationOptions {
  long pool = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool renormalize = true;  // rescale the pool to mean one after each generation
  double gamma = 0.5;       // fractional moment tracked per generation
};

struct GenerationSummary {
  int generation = 0;
  double raw_mean = 0.0;  // pool mean before renormalization
  double raw_stderr = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double frac_moment = 0.0;  // E[W^gamma] over the pool
  double frac_moment_stderr = 0.0;
};

struct PopulationResult {
  std::vector<GenerationSummary> generations;  // 0..n
  std::vector<double> pool;                    // final generation
};

/// Population dynamics: every new entry combines entries resampled with replacement from
/// the previous pool with fresh disorder.
PopulationResult hier_population(const HierModel& m, const PopulationOptions& o);
PopulationResult tree_population(const TreeModel& m, const PopulationOptions& o);

enum class Trend { flat, decaying, inconclusive };

std::string trend_name(Trend t);

struct ProbeFamily {
  bool tree = false;
  int b = 2;  // branching, or tree degree
  int s = 2;
  Placement placement = Placement::site;
  DisorderSpec spec;
};

struct ProbeOptions {
  double gamma = 0.5;
  long pool = 100000;  // pool size, or independent samples in sampling mode
  bool population = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ProbeCell {
  double beta = 0.0;
  int n = 0;
  double moment = 0.0;  // E[W_n^gamma]
  double stderr_value = 0.0;
};

struct ProbeRow {
  double beta = 0.0;
  std::vector<ProbeCell> cells;  // in n_grid order
  Trend trend = Trend::inconclusive;
};

/// Decaying: E[W^gamma] drops from the first to the last n by more than 3 standard errors and
/// by at least 10%. Flat: first, middle and last agree within max(3 standard errors, 2%).
Trend classify_trend(const std::vector<ProbeCell>& cells);

std::vector<ProbeRow> weak_strong_probe(const ProbeFamily& family, const std::vector<double>& betas,
                                        const std::vector<int>& n_grid, const ProbeOptions& o);

}  // namespace polymer
