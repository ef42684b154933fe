#include "polymer/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace polymer {

void WalkSpec::validate() const {
  if (dimension < 1 || dimension > kMaxDim) {
    throw std::invalid_argument("WalkSpec: dimension must be in [1, " + std::to_string(kMaxDim) +
                                "]");
  }
  if (horizon < 1) throw std::invalid_argument("WalkSpec: horizon must be >= 1");
}

HeatTable::HeatTable(const WalkSpec& spec) : spec_(spec) {
  spec.validate();
  if (spec.horizon > (1L << 20)) throw CapacityError("HeatTable: horizon too large");
  box_ = Box(spec.dimension, static_cast<int>(spec.horizon));
  const std::size_t slices = static_cast<std::size_t>(spec.horizon) + 1;
  if (box_.size() > memory_budget_doubles() / slices) {
    throw CapacityError("HeatTable: " + std::to_string(slices) + " slices of " +
                        std::to_string(box_.size()) + " cells exceed the memory budget");
  }
  slices_.assign(slices, std::vector<double>(box_.size(), 0.0));
  slices_[0][box_.origin()] = 1.0;
  const int limit = static_cast<int>(spec.horizon);
  for (long i = 1; i <= spec.horizon; ++i) {
    walk_step(box_, slices_[static_cast<std::size_t>(i - 1)], slices_[static_cast<std::size_t>(i)], i,
              limit);
  }
}

std::span<const double> HeatTable::slice(long i) const {
  if (i < 0 || i > spec_.horizon) throw std::out_of_range("HeatTable::slice: time out of range");
  return slices_[static_cast<std::size_t>(i)];
}

double HeatTable::at(long i, std::span<const int> x) const {
  if (!box_.contains(x) || !parity_ok(x, i)) return 0.0;
  return slice(i)[box_.index(x)];
}

double HeatTable::self_overlap(long i) const {
  auto s = slice(i);
  double acc = 0.0;
  for_each_cone_site(box_, i, box_.radius(), [&](std::size_t idx, const auto&) {
    acc += s[idx] * s[idx];
  });
  return acc;
}

void HeatTable::write_csv(std::ostream& os) const {
  os << "time";
  for (int a = 1; a <= spec_.dimension; ++a) os << ",x" << a;
  os << ",probability\n";
  os.precision(17);
  for (long i = 0; i <= spec_.horizon; ++i) {
    auto s = slice(i);
    for_each_cone_site(box_, i, box_.radius(), [&](std::size_t idx, const auto& x) {
      if (s[idx] == 0.0) return;
      os << i;
      for (int a = 0; a < spec_.dimension; ++a) os << ',' << x[static_cast<std::size_t>(a)];
      os << ',' << s[idx] << '\n';
    });
  }
}

namespace {

std::vector<double> one_dim_returns(long n) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  for (long i = 1; i <= n; ++i) {
    p[static_cast<std::size_t>(i)] =
        p[static_cast<std::size_t>(i - 1)] * static_cast<double>(2 * i - 1) / static_cast<double>(2 * i);
  }
  return p;
}

// p^{(a+1)}_{2i} from p^{(a)} and p^{(1)}: the 2i steps split binomially between
// one distinguished axis (probability 1/(a+1) per step) and the other a axes;
// both parts need an even number of steps to return.
std::vector<double> add_axis(const std::vector<double>& rest, const std::vector<double>& single,
                             int a) {
  const long n = static_cast<long>(rest.size()) - 1;
  const double p = 1.0 / (a + 1);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  std::vector<double> out(rest.size(), 0.0);
  out[0] = 1.0;
  for (long i = 1; i <= n; ++i) {
    const double m = 2.0 * static_cast<double>(i);
    const double mean = m * p;
    const double sd = std::sqrt(m * p * (1.0 - p));
    long lo = static_cast<long>(std::floor((mean - 14.0 * sd - 2.0) / 2.0));
    long hi = static_cast<long>(std::ceil((mean + 14.0 * sd + 2.0) / 2.0));
    lo = std::max(lo, 0L);
    hi = std::min(hi, i);
    const double lgm = std::lgamma(m + 1.0);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) {
      const double k = 2.0 * static_cast<double>(j);
      const double lw = lgm - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * lp + (m - k) * lq;
      acc += std::exp(lw) * single[static_cast<std::size_t>(j)] *
             rest[static_cast<std::size_t>(i - j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> return_probabilities(int dimension, long n) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw std::invalid_argument("return_probabilities: unsupported dimension");
  }
  if (n < 0) throw std::invalid_argument("return_probabilities: negative order");
  if (static_cast<std::size_t>(n) > memory_budget_doubles() / 4) {
    throw CapacityError("return_probabilities: order exceeds memory budget");
  }
  auto single = one_dim_returns(n);
  if (dimension == 1) return single;
  // d = 2 factorises exactly under the rotation (x, y) -> (x + y, x - y)
  std::vector<double> acc(single.size());
  for (std::size_t i = 0; i < single.size(); ++i) acc[i] = single[i] * single[i];
  for (int a = 2; a < dimension; ++a) acc = add_axis(acc, single, a);
  return acc;
}

OverlapSequence collision_sum(const WalkSpec& spec) {
  spec.validate();
  auto p = return_probabilities(spec.dimension, spec.horizon);
  OverlapSequence r;
  r.values.resize(static_cast<std::size_t>(spec.horizon));
  double acc = 0.0;
  for (long k = 1; k <= spec.horizon; ++k) {
    acc += p[static_cast<std::size_t>(k)];
    r.values[static_cast<std::size_t>(k - 1)] = acc;
  }
  return r;
}

OverlapSequence collision_sum(const HeatTable& table) {
  OverlapSequence r;
  const long n = table.spec().horizon;
  r.values.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (long k = 1; k <= n; ++k) {
    acc += table.self_overlap(k);
    r.values[static_cast<std::size_t>(k - 1)] = acc;
  }
  return r;
}

double return_series_tail(int dimension, long n) {
  if (dimension <= 2) return std::numeric_limits<double>::infinity();
  const double h = 0.5 * dimension;
  const double c = 2.0 * std::pow(dimension / (4.0 * std::numbers::pi), h);
  // Euler-Maclaurin midpoint rule for sum_{i>n} i^{-h}
  return c * std::pow(static_cast<double>(n) + 0.5, 1.0 - h) / (h - 1.0);
}

EscapeProbability escape_probability_at(int dimension, long truncation) {
  if (dimension < 1) throw std::invalid_argument("escape_probability: dimension must be >= 1");
  EscapeProbability e;
  e.truncation = truncation;
  if (dimension <= 2) {
    e.recurrent = true;
    e.value = 0.0;
    e.tail_estimate = std::numeric_limits<double>::infinity();
    return e;
  }
  auto p = return_probabilities(dimension, truncation);
  double s = 0.0;
  for (long i = truncation; i >= 1; --i) s += p[static_cast<std::size_t>(i)];
  e.tail_estimate = return_series_tail(dimension, truncation);
  e.value = 1.0 / (1.0 + s + e.tail_estimate);
  return e;
}

EscapeProbability escape_probability(int dimension, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("escape_probability: tol must be positive");
  if (dimension <= 2) return escape_probability_at(dimension, 0);
  long n = 1024;
  auto prev = escape_probability_at(dimension, n);
  while (true) {
    auto next = escape_probability_at(dimension, 2 * n);
    if (std::abs(next.value - prev.value) <= 0.5 * tol) return next;
    if (2 * n > (1L << 22)) {
      throw CapacityError("escape_probability: tolerance not reached within truncation budget");
    }
    n *= 2;
    prev = next;
  }
}

namespace {

// e^{-x} I_0(x) (2 pi x)^{1/2} = sum_k a_k x^{-k} for large x
constexpr double kBesselAsym[] = {1.0, 1.0 / 8, 9.0 / 128, 225.0 / 3072, 11025.0 / 98304, 893025.0 / 3932160};

}  // namespace

double green_at_origin(int dimension) {
  if (dimension < 1 || dimension > kMaxDim) throw std::invalid_argument("green_at_origin: unsupported dimension");
  if (dimension <= 2) return std::numeric_limits<double>::infinity();
  const double d = dimension;
  const double xcut = 400.0;
  const double T = xcut * d;
  auto f = [d](double t) {
    const double x = t / d;
    return std::pow(std::exp(-x) * boost::math::cyl_bessel_i(0, x), d);
  };
  double head = 0.0;
  // panels keep the peak near 0 resolved
  double a = 0.0;
  for (double b : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, T}) {
    if (b > T) b = T;
    if (b <= a) continue;
    head += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-15);
    a = b;
  }
  // tail: (2 pi x)^{-d/2} (sum a_k x^{-k})^d integrated term by term
  constexpr int K = sizeof(kBesselAsym) / sizeof(double);
  std::vector<double> c{1.0};
  for (int m = 0; m < dimension; ++m) {
    std::vector<double> next(K, 0.0);
    for (int i = 0; i < K && i < static_cast<int>(c.size()); ++i)
      for (int j = 0; i + j < K; ++j) next[static_cast<std::size_t>(i + j)] += c[static_cast<std::size_t>(i)] * kBesselAsym[j];
    c = next;
  }
  double tail = 0.0;
  for (int k = 0; k < K; ++k) {
    const double e = 0.5 * d + k;
    // int_T^inf (t/d)^{-e} dt = d^e T^{1-e} / (e - 1)
    tail += c[static_cast<std::size_t>(k)] * std::pow(d, e) * std::pow(T, 1.0 - e) / (e - 1.0);
  }
  tail *= std::pow(2.0 * std::numbers::pi, -0.5 * d);
  return head + tail;
}

double escape_probability_exact(int dimension) {
  if (dimension <= 2) return 0.0;
  return 1.0 / green_at_origin(dimension);
}

double gaussian_density(double t, std::span<const double> x) {
  if (!(t > 0.0)) throw std::domain_error("gaussian_density: t must be positive");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double d = static_cast<double>(x.size());
  return std::exp(-r2 / (2.0 * t)) / std::pow(2.0 * std::numbers::pi * t, 0.5 * d);
}

std::vector<std::vector<double>> collision_renewal(const HeatTable& table, double coupling) {
  const Box& box = table.box();
  const long n = table.spec().horizon;
  if (static_cast<std::size_t>(n + 1) * box.size() > memory_budget_doubles()) {
    throw CapacityError("collision_renewal: slices exceed the memory budget");
  }
  const auto o = static_cast<std::ptrdiff_t>(box.origin());
  std::vector<std::vector<std::pair<std::ptrdiff_t, double>>> q2(static_cast<std::size_t>(n) + 1);
  for (long m = 1; m <= n; ++m) {
    auto s = table.slice(m);
    for_each_cone_site(box, m, box.radius(), [&](std::size_t i, const auto&) {
      if (s[i] > 0.0) q2[static_cast<std::size_t>(m)].push_back({static_cast<std::ptrdiff_t>(i) - o, s[i] * s[i]});
    });
  }
  std::vector<std::vector<double>> A(static_cast<std::size_t>(n) + 1, std::vector<double>(box.size(), 0.0));
  for (long t = 1; t <= n; ++t) {
    auto& At = A[static_cast<std::size_t>(t)];
    for (const auto& [off, v] : q2[static_cast<std::size_t>(t)]) At[static_cast<std::size_t>(o + off)] += v;
    for (long s = 1; s < t; ++s) {
      const auto& As = A[static_cast<std::size_t>(s)];
      const auto& ker = q2[static_cast<std::size_t>(t - s)];
      for_each_cone_site(box, s, box.radius(), [&](std::size_t i, const auto&) {
        const double a = As[i];
        if (a == 0.0) return;
        const double c = coupling * a;
        for (const auto& [off, v] : ker) At[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off)] += c * v;
      });
    }
  }
  return A;
}

}  // namespace polymer
