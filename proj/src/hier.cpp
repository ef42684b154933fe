#include "polymer/hier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "polymer/errors.hpp"
#include "polymer/parallel.hpp"
#include "polymer/rng.hpp"
#include "polymer/stats.hpp"

namespace polymer {

namespace {

// W_g = (1/branches) sum_i prod_{j<series} W_{g-1}^(i,j) prod_{f<fresh} exp(beta omega - lambda),
// W_0 = exp(beta omega - lambda) if weighted_leaf, else 1
struct Shape {
  int branches = 2;
  int series = 2;
  int fresh = 0;
  bool weighted_leaf = true;
  int depth = 0;
  DisorderSpec spec;
  double beta = 0.0;
};

Shape shape_of(const HierModel& m) {
  m.validate();
  const bool edge = m.placement == Placement::edge;
  return {m.b, m.s, edge ? 0 : m.s - 1, edge, m.generations, m.spec, m.beta};
}

Shape shape_of(const TreeModel& m) {
  m.validate();
  return {m.d, 1, 1, false, m.depth, m.spec, m.beta};
}

void check_spec(const DisorderSpec& spec) {
  spec.validate();
  if (!spec.has_exponential_moments()) {
    throw UnsupportedError("hierarchical and tree polymers need disorder with exponential moments");
  }
}

class WeightSampler {
 public:
  WeightSampler(const DisorderSpec& spec, double beta) : spec_(spec), beta_(beta), lambda_(log_mgf(spec, beta)) {
    vals_ = spec.support();
    const auto p = spec.support_probabilities();
    double c = 0.0;
    for (double q : p) cum_.push_back(c += q);
  }

  double operator()(Stream& rng) const {
    if (beta_ == 0.0) return 1.0;
    const double u = rng.uniform();
    double omega;
    if (vals_.empty()) {
      omega = gaussian_quantile(u);
    } else {
      std::size_t i = 0;
      while (i + 1 < cum_.size() && u >= cum_[i]) ++i;
      omega = vals_[i];
    }
    return std::exp(beta_ * omega - lambda_);
  }

 private:
  DisorderSpec spec_;
  double beta_;
  double lambda_;
  std::vector<double> vals_;
  std::vector<double> cum_;
};

void merge(DistributionTable& t) {
  std::vector<std::size_t> idx(t.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return t.values[a] < t.values[b]; });
  DistributionTable out;
  for (std::size_t i : idx) {
    const double v = t.values[i];
    if (!out.values.empty() && std::abs(v - out.values.back()) <= 1e-12 * std::max(std::abs(v), 1e-300)) {
      out.probs.back() += t.probs[i];
    } else {
      out.values.push_back(v);
      out.probs.push_back(t.probs[i]);
    }
  }
  t = std::move(out);
}

DistributionTable combine(const DistributionTable& a, const DistributionTable& b, bool product, std::size_t cap) {
  if (a.values.size() * b.values.size() > cap) {
    throw CapacityError("exact distribution: table would exceed " + std::to_string(cap) + " entries");
  }
  DistributionTable out;
  out.values.reserve(a.values.size() * b.values.size());
  out.probs.reserve(out.values.capacity());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    for (std::size_t j = 0; j < b.values.size(); ++j) {
      out.values.push_back(product ? a.values[i] * b.values[j] : a.values[i] + b.values[j]);
      out.probs.push_back(a.probs[i] * b.probs[j]);
    }
  }
  merge(out);
  return out;
}

DistributionTable exact_distribution(const Shape& sh, std::size_t cap) {
  const auto vals = sh.spec.support();
  if (vals.empty()) throw UnsupportedError("exact distribution needs finite-support disorder");
  const auto probs = sh.spec.support_probabilities();
  const double lam = log_mgf(sh.spec, sh.beta);
  DistributionTable weight;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    weight.values.push_back(std::exp(sh.beta * vals[i] - lam));
    weight.probs.push_back(probs[i]);
  }
  merge(weight);
  const DistributionTable one{{1.0}, {1.0}};

  DistributionTable w = sh.weighted_leaf ? weight : one;
  for (int g = 0; g < sh.depth; ++g) {
    DistributionTable branch = w;
    for (int j = 1; j < sh.series; ++j) branch = combine(branch, w, true, cap);
    for (int f = 0; f < sh.fresh; ++f) branch = combine(branch, weight, true, cap);
    DistributionTable sum = branch;
    for (int i = 1; i < sh.branches; ++i) sum = combine(sum, branch, false, cap);
    for (double& v : sum.values) v /= sh.branches;
    w = std::move(sum);
  }
  return w;
}

double sample_recursive(const Shape& sh, const WeightSampler& weight, int level, Stream& rng) {
  if (level == 0) return sh.weighted_leaf ? weight(rng) : 1.0;
  double total = 0.0;
  for (int i = 0; i < sh.branches; ++i) {
    double prod = 1.0;
    for (int j = 0; j < sh.series; ++j) prod *= sample_recursive(sh, weight, level - 1, rng);
    for (int f = 0; f < sh.fresh; ++f) prod *= weight(rng);
    total += prod;
  }
  return total / sh.branches;
}

std::vector<double> direct_samples(const Shape& sh, long replicas, std::uint64_t seed, unsigned threads) {
  if (replicas < 1) throw std::invalid_argument("sampling: replicas must be positive");
  const double cost = std::pow(static_cast<double>(sh.branches * sh.series), sh.depth);
  if (cost > 1e7) throw CapacityError("sampling: one sample would touch more than 1e7 leaves; use population mode");
  const WeightSampler weight(sh.spec, sh.beta);
  std::vector<double> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    Stream rng(derive_seed(seed, "hier-sample", r));
    out[r] = sample_recursive(sh, weight, sh.depth, rng);
  });
  return out;
}

GenerationSummary summarize_pool(int g, std::vector<double>& pool, const PopulationOptions& o) {
  GenerationSummary s;
  s.generation = g;
  const Summary raw = summarize(pool);
  s.raw_mean = raw.mean;
  s.raw_stderr = raw.stderr_mean;
  if (o.renormalize && raw.mean > 0.0) {
    for (double& v : pool) v /= raw.mean;
  }
  s.median = quantile(pool, 0.5);
  s.q10 = quantile(pool, 0.1);
  s.q90 = quantile(pool, 0.9);
  std::vector<double> frac(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) frac[i] = std::pow(pool[i], o.gamma);
  const Summary f = summarize(frac);
  s.frac_moment = f.mean;
  s.frac_moment_stderr = f.stderr_mean;
  return s;
}

PopulationResult population(const Shape& sh, const PopulationOptions& o) {
  if (o.pool < 2) throw std::invalid_argument("population: pool must hold at least two entries");
  const WeightSampler weight(sh.spec, sh.beta);
  const std::size_t n = static_cast<std::size_t>(o.pool);
  PopulationResult res;
  std::vector<double> pool(n, 1.0), next(n);
  if (sh.weighted_leaf) {
    const std::uint64_t gs = derive_seed(o.seed, "population", 0);
    parallel_for(n, o.threads, [&](std::size_t m) {
      Stream rng(hash_combine(gs, m));
      pool[m] = weight(rng);
    });
  }
  res.generations.push_back(summarize_pool(0, pool, o));
  for (int g = 1; g <= sh.depth; ++g) {
    const std::uint64_t gs = derive_seed(o.seed, "population", static_cast<std::uint64_t>(g));
    parallel_for(n, o.threads, [&](std::size_t m) {
      Stream rng(hash_combine(gs, m));
      double total = 0.0;
      for (int i = 0; i < sh.branches; ++i) {
        double prod = 1.0;
        for (int j = 0; j < sh.series; ++j) prod *= pool[rng.below(n)];
        for (int f = 0; f < sh.fresh; ++f) prod *= weight(rng);
        total += prod;
      }
      next[m] = total / sh.branches;
    });
    std::swap(pool, next);
    res.generations.push_back(summarize_pool(g, pool, o));
  }
  res.pool = std::move(pool);
  return res;
}

}  // namespace

BigInt hier_paths_count(int b, int s, int n, std::size_t max_bits) {
  if (b < 1 || s < 1 || n < 0) throw std::invalid_argument("hier_paths_count: need b, s >= 1 and n >= 0");
  BigInt count = 1;
  for (int g = 1; g <= n; ++g) {
    BigInt next = b * boost::multiprecision::pow(count, static_cast<unsigned>(s));
    if (boost::multiprecision::msb(next) + 1 > max_bits) {
      throw CapacityError("hier_paths_count: exceeds " + std::to_string(max_bits) + " bits at generation " +
                          std::to_string(g) + "; reached generation " + std::to_string(g - 1));
    }
    count = std::move(next);
  }
  return count;
}

std::string placement_name(Placement p) { return p == Placement::edge ? "edge" : "site"; }

void HierModel::validate() const {
  if (b < 1) throw std::invalid_argument("hierarchical lattice: b must be >= 1");
  if (s < 1) throw std::invalid_argument("hierarchical lattice: s must be >= 1");
  if (generations < 0) throw std::invalid_argument("hierarchical lattice: generations must be >= 0");
  if (!std::isfinite(beta)) throw std::invalid_argument("hierarchical lattice: beta must be finite");
  check_spec(spec);
}

void TreeModel::validate() const {
  if (d < 1) throw std::invalid_argument("tree: degree must be >= 1");
  if (depth < 0) throw std::invalid_argument("tree: depth must be >= 0");
  if (!std::isfinite(beta)) throw std::invalid_argument("tree: beta must be finite");
  check_spec(spec);
}

double DistributionTable::mean() const {
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = values[i] * probs[i];
  return pairwise_sum(t);
}

double DistributionTable::moment(double gamma) const {
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::pow(values[i], gamma) * probs[i];
  return pairwise_sum(t);
}

double DistributionTable::total() const { return pairwise_sum(probs); }

DistributionTable hier_exact_distribution(const HierModel& m, std::size_t max_entries) {
  return exact_distribution(shape_of(m), max_entries);
}

DistributionTable tree_exact_distribution(const TreeModel& m, std::size_t max_entries) {
  return exact_distribution(shape_of(m), max_entries);
}

std::vector<double> hier_sample(const HierModel& m, long replicas, std::uint64_t seed, unsigned threads) {
  return direct_samples(shape_of(m), replicas, seed, threads);
}

std::vector<double> tree_sample(const TreeModel& m, long replicas, std::uint64_t seed, unsigned threads) {
  return direct_samples(shape_of(m), replicas, seed, threads);
}

PopulationResult hier_population(const HierModel& m, const PopulationOptions& o) {
  return population(shape_of(m), o);
}

PopulationResult tree_population(const TreeModel& m, const PopulationOptions& o) {
  return population(shape_of(m), o);
}

std::string trend_name(Trend t) {
  switch (t) {
    case Trend::flat: return "flat";
    case Trend::decaying: return "decaying";
    case Trend::inconclusive: return "inconclusive";
  }
  return "?";
}

Trend classify_trend(const std::vector<ProbeCell>& cells) {
  if (cells.size() < 2) throw std::invalid_argument("classify_trend: need at least two n values");
  const ProbeCell& first = cells.front();
  const ProbeCell& last = cells.back();
  const ProbeCell& mid = cells[cells.size() / 2];
  auto se = [](const ProbeCell& a, const ProbeCell& b) { return std::hypot(a.stderr_value, b.stderr_value); };
  if (first.moment - last.moment > 3.0 * se(first, last) && last.moment < 0.9 * first.moment) return Trend::decaying;
  auto close = [&](const ProbeCell& a, const ProbeCell& b) {
    return std::abs(a.moment - b.moment) <= std::max(3.0 * se(a, b), 0.02 * std::max(a.moment, b.moment));
  };
  if (close(first, last) && close(mid, last)) return Trend::flat;
  return Trend::inconclusive;
}

std::vector<ProbeRow> weak_strong_probe(const ProbeFamily& family, const std::vector<double>& betas,
                                        const std::vector<int>& n_grid, const ProbeOptions& o) {
  if (n_grid.size() < 2) throw std::invalid_argument("weak_strong_probe: need at least two n values");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 0) {
    throw std::invalid_argument("weak_strong_probe: n grid must be ascending and nonnegative");
  }
  std::vector<ProbeRow> rows;
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const double beta = betas[bi];
    const std::uint64_t seed = derive_seed(o.seed, "probe", bi);
    auto shape_at = [&](int n) {
      if (family.tree) return shape_of(TreeModel{family.b, n, family.spec, beta});
      return shape_of(HierModel{family.b, family.s, n, family.spec, beta, family.placement});
    };
    ProbeRow row;
    row.beta = beta;
    if (o.population) {
      PopulationOptions po;
      po.pool = o.pool;
      po.seed = seed;
      po.threads = o.threads;
      po.gamma = o.gamma;
      const PopulationResult pr = population(shape_at(n_grid.back()), po);
      for (int n : n_grid) {
        const auto& g = pr.generations[static_cast<std::size_t>(n)];
        row.cells.push_back({beta, n, g.frac_moment, g.frac_moment_stderr});
      }
    } else {
      for (int n : n_grid) {
        auto w = direct_samples(shape_at(n), o.pool, derive_seed(seed, "n", static_cast<std::uint64_t>(n)), o.threads);
        for (double& v : w) v = std::pow(v, o.gamma);
        const Summary s = summarize(w);
        row.cells.push_back({beta, n, s.mean, s.stderr_mean});
      }
    }
    row.trend = classify_trend(row.cells);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace polymer
