#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/stats.hpp"

namespace polymer {

// ---- phase diagram in (alpha, gamma) ----

enum class Region { R1, R2, R3, R4, R5, R6, R7, boundary };

std::string region_name(Region r);

struct Exponents {
  bool defined = false;
  double xi = std::numeric_limits<double>::quiet_NaN();
  double chi = std::numeric_limits<double>::quiet_NaN();
  bool conjectural = false;
  bool hyperscaling_violated = false;  // chi != 2 xi - 1
};

struct PhasePoint {
  double alpha = 0.0;  // may be +infinity
  double gamma = 0.0;
  Region region = Region::boundary;
  std::vector<Region> adjacent;  // boundary points only: regions met by the predicates nearby
  Exponents exponents;
};

/// Raw predicate of one region (never Region::boundary).
bool in_region(Region r, double alpha, double gamma);

/// Unique region whose predicate holds; boundary when none or several do.
PhasePoint classify_region(double alpha, double gamma);

Exponents exponents(double alpha, double gamma);

/// xi = 2(1 - gamma)/3, chi = (1 - 4 gamma)/3.
Exponents collective_exponents(double gamma);
/// xi = (1 + alpha(1 - gamma))/(2 alpha - 1), chi = (3 - 2 alpha gamma)/(2 alpha - 1).
Exponents elitist_exponents(double alpha, double gamma);

/// alpha on the curve separating the collective and elitist regimes: (5 - 2 gamma)/(1 - gamma).
double regime_boundary_alpha(double gamma);

struct LevelPoint {
  double alpha = 0.0;
  double gamma = 0.0;
  bool collective = false;
};

/// Points (alpha, gamma) sharing the transversal exponent xi in [1/2, 1]: the elitist branch
/// alpha = (1 + xi)/(2 xi - 1 + gamma) where alpha <= regime_boundary_alpha(gamma), and for
/// xi <= 2/3 the collective branch gamma = 1 - 3 xi / 2 with alpha >= regime_boundary_alpha.
std::vector<LevelPoint> level_curve(double xi, int samples);

std::vector<PhasePoint> phase_scan(std::span<const double> alphas, std::span<const double> gammas);

// ---- entropy of polygonal paths ----

enum class EntropyKind { diffusive, ballistic };

struct PolygonalPath {
  std::vector<double> t;  // strictly increasing, t[0] = 0, t.back() <= 1
  std::vector<double> x;
};

/// e(v) = ((1+v)log(1+v) + (1-v)log(1-v))/2 on [-1, 1]; +infinity outside.
double ballistic_rate(double v);

/// Cost of one straight segment over duration dt > 0.
double segment_cost(double dt, double dx, EntropyKind kind);

double entropy(const PolygonalPath& path, EntropyKind kind);

// ---- Poisson atoms and the energy-entropy problem ----

struct Atom {
  double w = 0.0;
  double t = 0.0;
  double x = 0.0;
};

/// Atoms sorted by time.
struct PppSample {
  std::vector<Atom> atoms;
};

struct PppOptions {
  double alpha = 1.0;
  double c_minus = 0.0;
  double w_min = 0.1;         // atoms with |w| < w_min are dropped
  double x_half_width = 1.0;  // spatial window [-x_half_width, x_half_width]
};

/// Poisson process with intensity (alpha/2)|w|^{-1-alpha}(1{w>0} + c_minus 1{w<0}) dw dt dx
/// restricted to |w| >= w_min, t in [0, 1], |x| <= x_half_width.
PppSample sample_ppp(const PppOptions& options, std::uint64_t seed);

/// Expected atom count of sample_ppp.
double ppp_mean_count(const PppOptions& options);

/// Atoms with |w| >= w_min (nested truncation of the same sample).
PppSample truncate(const PppSample& sample, double w_min);

struct VariationalResult {
  double value = 0.0;             // sup over paths from (0, 0) of beta * energy - entropy
  std::vector<std::size_t> path;  // indices of the atoms visited, in time order
};

VariationalResult variational_solver(const PppSample& sample, double beta, EntropyKind kind);

struct VariationalOptions {
  PppOptions ppp;
  double beta = 1.0;
  EntropyKind kind = EntropyKind::diffusive;
  long replicas = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct VariationalReplica {
  std::size_t atoms = 0;
  double value = 0.0;
  double value_coarse = 0.0;  // same sample truncated at 2 w_min
  std::size_t path_length = 0;
};

std::vector<VariationalReplica> variational_experiment(const VariationalOptions& options);

// ---- order statistics of an exact Pareto field ----

struct OrderStatOptions {
  double alpha = 1.5;
  long n = 512;
  double xi = 0.8;
  int k = 1;
  long replicas = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<double> u_grid{0.5, 1.0, 2.0};
};

struct RescaledAtom {
  double w = 0.0;  // n^{-(1+xi)/alpha} omega
  double t = 0.0;  // t / n
  double x = 0.0;  // x / n^xi
};

struct FrechetCheck {
  double u = 0.0;
  Proportion empirical;
  double limit = 0.0;  // exp(-u^{-alpha})
};

struct OrderStatResult {
  long box_size = 0;  // |B|: sites with 1 <= t <= n, |x| < n^xi
  long x_max = 0;
  std::vector<std::vector<RescaledAtom>> top;  // per replica, largest first
  std::vector<double> max_box_scaled;          // max / |B|^{1/alpha}
  double frechet_ks = 0.0;
  std::vector<FrechetCheck> checks;
  double location_ks_t = 0.0;  // argmax t / n against U(0, 1)
  double location_ks_x = 0.0;  // argmax x / n^xi against U(-1, 1)
};

/// Top-k values of the exact Pareto field (c_minus = 0) over the box, per replica.
OrderStatResult order_statistics_experiment(const OrderStatOptions& options);

// ---- zero temperature ----

struct GroundState {
  double energy = 0.0;
  int endpoint = 0;
};

/// max over nearest-neighbour paths from (0, 0) of sum_{t=1..n} omega(t, S_t), d = 1.
GroundState ground_state(const DisorderField& field, long n);

struct ExponentEstimate {
  double xi = 0.0;
  double stderr_value = 0.0;
  std::size_t groups = 0;
};

/// Slope of log mean |displacement| against log n; samples sharing an n are averaged first.
ExponentEstimate transversal_exponent_estimate(std::span<const std::pair<double, double>> samples);

}  // namespace polymer
