#include "polymer/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "polymer/walk.hpp"

namespace polymer {

NormalizedNoise::NormalizedNoise(const DisorderField& field, double beta)
    : field_(&field), beta_(beta), lambda_(log_mgf(field.spec(), beta)),
      sigma_(std::sqrt(sigma2(field.spec(), beta))) {
  if (sigma_ == 0.0) throw std::domain_error("normalized noise is undefined at beta = 0");
}

double NormalizedNoise::value(long t, const int* x, int dim) const {
  return std::expm1(beta_ * field_->value(t, x, dim) - lambda_) / sigma_;
}

double NormalizedNoise::operator()(long t, std::span<const int> x) const {
  return value(t, x.data(), static_cast<int>(x.size()));
}

double ChaosDecomposition::sum() const {
  double s = 0.0;
  for (double v : totals) s += v;
  return s;
}

void ChaosDecomposition::write_csv(std::ostream& os) const {
  os << "k,total\n";
  os.precision(17);
  for (std::size_t k = 0; k < totals.size(); ++k) os << k << ',' << totals[k] << '\n';
}

std::vector<std::vector<double>> chaos_sweep(const DisorderField& field, double beta, long start_time,
                                             long n, const Box& box, std::span<const double> initial,
                                             int max_order) {
  if (n < 0) throw std::invalid_argument("chaos_sweep: negative length");
  if (initial.size() != box.size()) throw std::invalid_argument("chaos_sweep: initial slice does not fit the box");
  if (max_order < 0) throw std::invalid_argument("chaos_sweep: negative order");
  const auto K = static_cast<std::size_t>(max_order);
  if ((K + 1) * 2 * box.size() > memory_budget_doubles()) {
    throw CapacityError("chaos_sweep: per-order slices exceed the memory budget");
  }
  const int d = box.dim();
  const double lambda = beta == 0.0 ? 0.0 : log_mgf(field.spec(), beta);
  std::vector<std::vector<double>> F(K + 1, std::vector<double>(box.size(), 0.0));
  std::vector<std::vector<double>> S(K + 1, std::vector<double>(box.size(), 0.0));
  F[0].assign(initial.begin(), initial.end());
  std::vector<double> noise(box.size(), 0.0);
  const double inv = 1.0 / (2.0 * d);
  const int r = box.radius();

  for (long step = 1; step <= n; ++step) {
    const long t = start_time + step;
    const std::size_t top = std::min<std::size_t>(K, static_cast<std::size_t>(step));
    for (std::size_t k = 0; k <= top; ++k) {
      const double* in = F[k].data();
      double* out = S[k].data();
      for_each_box_site(box, r, [&](std::size_t i, const auto&) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
          const auto st = static_cast<std::size_t>(box.stride(a));
          s += in[i - st] + in[i + st];
        }
        out[i] = s * inv;
      });
    }
    if (beta != 0.0 && top >= 1) {
      for_each_box_site(box, r, [&](std::size_t i, const auto& x) {
        noise[i] = std::expm1(beta * field.value(t, x.data(), d) - lambda);
      });
    }
    for (std::size_t k = top; k >= 1; --k) {
      double* out = F[k].data();
      const double* same = S[k].data();
      const double* lower = S[k - 1].data();
      if (beta == 0.0) {
        std::copy(same, same + box.size(), out);
      } else {
        for (std::size_t i = 0; i < box.size(); ++i) out[i] = same[i] + noise[i] * lower[i];
      }
    }
    std::copy(S[0].begin(), S[0].end(), F[0].begin());
  }
  return F;
}

ChaosDecomposition chaos_decompose(const DisorderField& field, double beta, long n) {
  if (n < 0) throw std::invalid_argument("chaos_decompose: negative horizon");
  ChaosDecomposition out;
  out.beta = beta;
  out.horizon = n;
  out.dimension = field.dimension();
  out.box = Box(out.dimension, static_cast<int>(std::max(1L, n)));
  if (beta == 0.0) {
    // degenerate expansion: only the constant term survives
    out.totals.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.totals[0] = 1.0;
    return out;
  }
  out.sigma = std::sqrt(sigma2(field.spec(), beta));
  std::vector<double> init(out.box.size(), 0.0);
  init[out.box.origin()] = 1.0;
  out.slices = chaos_sweep(field, beta, 0, n, out.box, init, static_cast<int>(n));
  for (const auto& s : out.slices) {
    double t = 0.0;
    for (double v : s) t += v;
    out.totals.push_back(t);
  }
  return out;
}

std::vector<double> order_variances(const DisorderSpec& spec, double beta, long n, int dim) {
  if (n < 0) throw std::invalid_argument("order_variances: negative horizon");
  const double s2 = sigma2(spec, beta);
  const auto p = return_probabilities(dim, n);
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> out(N + 1, 0.0);
  // c[t] = sum over increasing (t_1 < ... < t_k = t) of prod p_{2 gap}(0)
  std::vector<double> c(N + 1, 0.0), next(N + 1, 0.0);
  c[0] = 1.0;
  double scale = 1.0;
  for (std::size_t k = 1; k <= N; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t t = k; t <= N; ++t) {
      double s = 0.0;
      for (std::size_t u = k - 1; u < t; ++u) s += c[u] * p[t - u];
      next[t] = s;
    }
    std::swap(c, next);
    scale *= s2;
    double tot = 0.0;
    for (std::size_t t = k; t <= N; ++t) tot += c[t];
    out[k] = scale * tot;
  }
  return out;
}

double order_variance(const DisorderSpec& spec, double beta, long n, long k, int dim) {
  if (k < 0 || k > n) throw std::invalid_argument("order_variance: need 0 <= k <= n");
  if (k == 0) return 0.0;
  return order_variances(spec, beta, n, dim)[static_cast<std::size_t>(k)];
}

std::vector<double> second_moment_sequence(double sigma2_value, int dim, long n) {
  if (n < 0) throw std::invalid_argument("second_moment_sequence: negative horizon");
  const auto p = return_probabilities(dim, n);
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> g(N + 1, 0.0), out(N + 1, 0.0);
  g[0] = 1.0;
  out[0] = 1.0;
  for (std::size_t t = 1; t <= N; ++t) {
    double s = 0.0;
    for (std::size_t u = 0; u < t; ++u) s += g[u] * p[t - u];
    g[t] = sigma2_value * s;
    out[t] = out[t - 1] + g[t];
  }
  return out;
}

void SparseKernel::add(std::vector<int> set, double coeff) {
  std::sort(set.begin(), set.end());
  if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
    throw std::invalid_argument("SparseKernel: repeated index in a multilinear term");
  }
  terms[set] += coeff;
}

double SparseKernel::evaluate(const std::map<int, double>& xi) const {
  double s = 0.0;
  for (const auto& [set, c] : terms) {
    double term = c;
    for (int i : set) term *= xi.at(i);
    s += term;
  }
  return s;
}

std::vector<int> SparseKernel::sites() const {
  std::vector<int> out;
  for (const auto& [set, c] : terms) out.insert(out.end(), set.begin(), set.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double influence(const SparseKernel& kernel, int site) {
  double s = 0.0;
  for (const auto& [set, c] : kernel.terms) {
    if (std::binary_search(set.begin(), set.end(), site)) s += c * c;
  }
  return s;
}

double influence_by_enumeration(const SparseKernel& kernel, int site) {
  auto others = kernel.sites();
  others.erase(std::remove(others.begin(), others.end(), site), others.end());
  if (others.size() > 24) throw CapacityError("influence_by_enumeration: too many sites");
  std::map<int, double> xi;
  for (int i : others) xi[i] = -1.0;
  const unsigned long count = 1UL << others.size();
  double acc = 0.0;
  for (unsigned long mask = 0; mask < count; ++mask) {
    for (std::size_t j = 0; j < others.size(); ++j) xi[others[j]] = (mask >> j) & 1UL ? 1.0 : -1.0;
    xi[site] = 1.0;
    const double up = kernel.evaluate(xi);
    xi[site] = -1.0;
    const double down = kernel.evaluate(xi);
    // variance of a two-point law with equal weights
    acc += 0.25 * (up - down) * (up - down);
  }
  return acc / static_cast<double>(count);
}

namespace {

struct InfluenceTables {
  Box box;
  std::vector<std::vector<double>> A;  // A[t] over box, t = 0..n
  std::vector<double> B;               // E[W_m^2], m = 0..n
  double s2 = 0.0;
};

InfluenceTables influence_tables(const DisorderSpec& spec, double beta, long n, int dim) {
  if (n < 1) throw std::invalid_argument("polymer influence: n must be >= 1");
  InfluenceTables tab;
  tab.s2 = sigma2(spec, beta);
  const HeatTable q(WalkSpec{dim, n});
  tab.box = q.box();
  tab.B = second_moment_sequence(tab.s2, dim, n);

  tab.A = collision_renewal(q, tab.s2);
  return tab;
}

}  // namespace

double polymer_influence(const DisorderSpec& spec, double beta, long n, int dim, long t,
                         std::span<const int> x) {
  if (t < 1 || t > n) throw std::invalid_argument("polymer_influence: time outside 1..n");
  const auto tab = influence_tables(spec, beta, n, dim);
  if (!tab.box.contains(x)) return 0.0;
  return tab.s2 * tab.A[static_cast<std::size_t>(t)][tab.box.index(x)] * tab.B[static_cast<std::size_t>(n - t)];
}

SiteInfluence polymer_max_influence(const DisorderSpec& spec, double beta, long n, int dim) {
  if (beta == 0.0) throw std::domain_error("polymer_max_influence: beta must be nonzero");
  const auto tab = influence_tables(spec, beta, n, dim);
  SiteInfluence best;
  for (long t = 1; t <= n; ++t) {
    const auto& At = tab.A[static_cast<std::size_t>(t)];
    const double b = tab.B[static_cast<std::size_t>(n - t)];
    for_each_cone_site(tab.box, t, tab.box.radius(), [&](std::size_t i, const auto& x) {
      const double v = tab.s2 * At[i] * b;
      if (v > best.value) {
        best.value = v;
        best.t = t;
        best.x.assign(x.begin(), x.begin() + dim);
      }
    });
  }
  return best;
}

}  // namespace polymer
