#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/lattice.hpp"

namespace polymer {

/// xi_{t,x} = (exp(beta omega - lambda(beta)) - 1) / sigma(beta): mean 0, variance 1.
class NormalizedNoise {
 public:
  NormalizedNoise(const DisorderField& field, double beta);

  double sigma() const { return sigma_; }
  double operator()(long t, std::span<const int> x) const;
  double value(long t, const int* x, int dim) const;

 private:
  const DisorderField* field_;
  double beta_;
  double lambda_;
  double sigma_;
};

/// Orders of the multilinear expansion W_n = sum_k T_k.
struct ChaosDecomposition {
  double beta = 0.0;
  double sigma = 0.0;
  long horizon = 0;
  int dimension = 1;
  Box box;
  std::vector<double> totals;               // T_k, k = 0..n
  std::vector<std::vector<double>> slices;  // F_k(n, .) over box

  double sum() const;
  /// Columns k, total.
  void write_csv(std::ostream& os) const;
};

ChaosDecomposition chaos_decompose(const DisorderField& field, double beta, long n);

/// Runs F_k(t+1) = step F_k(t) + sigma xi_{t+1} step F_{k-1}(t) on `box` (walks are
/// killed outside it), starting from F_0 = initial at time start_time. Returns F_k at
/// time start_time + n for k = 0..max_order.
std::vector<std::vector<double>> chaos_sweep(const DisorderField& field, double beta, long start_time,
                                             long n, const Box& box, std::span<const double> initial,
                                             int max_order);

/// E[T_k^2] for k >= 1 (0 for k = 0, a constant), from collision-gap sequences.
double order_variance(const DisorderSpec& spec, double beta, long n, long k, int dim);
/// All orders at once, k = 0..n.
std::vector<double> order_variances(const DisorderSpec& spec, double beta, long n, int dim);

/// E[W_m^2], m = 0..n, from the renewal over collision times with weight sigma^2.
std::vector<double> second_moment_sequence(double sigma2_value, int dim, long n);

/// Finitely supported multilinear kernel: index set -> coefficient.
struct SparseKernel {
  std::map<std::vector<int>, double> terms;

  void add(std::vector<int> set, double coeff);
  /// Psi(xi) = sum_I psi(I) prod_{i in I} xi_i, with xi indexed by site label.
  double evaluate(const std::map<int, double>& xi) const;
  std::vector<int> sites() const;
};

/// Inf_i = sum_{I containing i} psi(I)^2.
double influence(const SparseKernel& kernel, int site);

/// E[Var(Psi | xi_j, j != site)] for independent +-1 inputs, by enumeration.
double influence_by_enumeration(const SparseKernel& kernel, int site);

struct SiteInfluence {
  double value = 0.0;
  long t = 0;
  Point x;
};

/// Influence of xi_{t,x} on W_n: sigma^2 A(t, x) B(n - t), with A the second moment of the
/// point-to-point partition function to (t, x) (weight at (t, x) excluded) and B = E[W_{n-t}^2].
double polymer_influence(const DisorderSpec& spec, double beta, long n, int dim, long t,
                         std::span<const int> x);

/// Largest influence over all sites of the cone.
SiteInfluence polymer_max_influence(const DisorderSpec& spec, double beta, long n, int dim);

}  // namespace polymer
