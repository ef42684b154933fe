#include "polymer/enumerate.hpp"

#include <cmath>
#include <stdexcept>

namespace polymer {

DisorderField Environment1D::as_field(const DisorderField& base) const {
  std::vector<std::pair<std::pair<long, Point>, double>> pins;
  pins.reserve(values.size());
  for (long t = 1; t <= horizon; ++t) {
    for (int x = -static_cast<int>(t); x <= t; x += 2) pins.push_back({{t, Point{x}}, at(t, x)});
  }
  return with_site_values(base, pins);
}

namespace {

void check_enumerable(const DisorderSpec& spec, long n, double limit) {
  if (n < 1) throw std::invalid_argument("enumeration needs n >= 1");
  const auto sup = spec.support();
  if (sup.empty()) throw UnsupportedError("enumeration needs a finite-support disorder family");
  const double count = std::pow(static_cast<double>(sup.size()), static_cast<double>(Environment1D::site_count(n)));
  if (count > limit) throw CapacityError("enumeration: too many environments");
}

}  // namespace

void for_each_environment(const DisorderSpec& spec, long n,
                          const std::function<void(const Environment1D&, double)>& f) {
  check_enumerable(spec, n, 16777216.0);
  const auto sup = spec.support();
  const auto prob = spec.support_probabilities();
  const std::size_t m = Environment1D::site_count(n);
  std::vector<std::size_t> digit(m, 0);
  Environment1D env;
  env.horizon = n;
  env.values.assign(m, sup[0]);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      env.values[i] = sup[digit[i]];
      p *= prob[digit[i]];
    }
    if (p > 0.0) f(env, p);
    std::size_t i = 0;
    while (i < m && ++digit[i] == sup.size()) digit[i++] = 0;
    if (i == m) return;
  }
}

namespace {

struct Sweep {
  std::vector<double> weight;
  std::vector<double> prob;
  long n = 0;
  const std::function<void(double, double)>* f = nullptr;
  std::vector<std::vector<double>> layers;
  std::vector<std::vector<double>> inflow;

  void descend(long t, double p) {
    const auto& u = layers[static_cast<std::size_t>(t - 1)];
    auto& a = inflow[static_cast<std::size_t>(t)];
    const auto width = static_cast<std::size_t>(t + 1);
    for (std::size_t j = 0; j < width; ++j) {
      const double l = j > 0 ? u[j - 1] : 0.0;
      const double r = j < width - 1 ? u[j] : 0.0;
      a[j] = 0.5 * (l + r);
    }
    auto& v = layers[static_cast<std::size_t>(t)];
    std::vector<std::size_t> digit(width, 0);
    const std::size_t k = weight.size();
    while (true) {
      double q = p;
      for (std::size_t j = 0; j < width; ++j) {
        v[j] = weight[digit[j]] * a[j];
        q *= prob[digit[j]];
      }
      if (q > 0.0) {
        if (t == n) {
          double w = 0.0;
          for (std::size_t j = 0; j < width; ++j) w += v[j];
          (*f)(w, q);
        } else {
          descend(t + 1, q);
        }
      }
      std::size_t j = 0;
      while (j < width && ++digit[j] == k) digit[j++] = 0;
      if (j == width) return;
    }
  }
};

}  // namespace

void for_each_partition_value(const DisorderSpec& spec, double beta, long n, WeightMode mode,
                              const std::function<void(double, double)>& f) {
  check_enumerable(spec, n, 536870912.0);
  const SiteWeight w(spec, beta, mode);
  Sweep s;
  for (double v : spec.support()) s.weight.push_back(w(v));
  s.prob = spec.support_probabilities();
  s.n = n;
  s.f = &f;
  s.layers.resize(static_cast<std::size_t>(n) + 1);
  s.inflow.resize(static_cast<std::size_t>(n) + 1);
  for (long t = 0; t <= n; ++t) {
    s.layers[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(t + 1), 0.0);
    s.inflow[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(t + 1), 0.0);
  }
  s.layers[0][0] = 1.0;
  s.descend(1, 1.0);
}

double partition_by_paths(const Environment1D& env, const SiteWeight& weight) {
  const long n = env.horizon;
  if (n > 30) throw CapacityError("partition_by_paths: too many paths");
  double total = 0.0;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    int x = 0;
    double w = 1.0;
    for (long t = 1; t <= n; ++t) {
      x += (mask >> (t - 1)) & 1UL ? 1 : -1;
      w *= weight(env.at(t, x));
    }
    total += w;
  }
  return total / std::ldexp(1.0, static_cast<int>(n));
}

}  // namespace polymer
