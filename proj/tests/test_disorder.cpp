#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "polymer/disorder.hpp"
#include "polymer/stats.hpp"

using namespace polymer;

TEST_CASE("log moment generating functions") {
  CHECK(log_mgf(DisorderSpec::gaussian(), 0.7) == doctest::Approx(0.245).epsilon(1e-15));
  CHECK(log_mgf(DisorderSpec::bernoulli(), 1.0) == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-14));
  CHECK(log_mgf(DisorderSpec::bernoulli(), 1.0) == doctest::Approx(0.43378).epsilon(1e-5));
  for (auto s : {DisorderSpec::gaussian(), DisorderSpec::bernoulli(), DisorderSpec::bounded(2.0)}) {
    CHECK(log_mgf(s, 0.0) == 0.0);
    CHECK(sigma2(s, 0.0) == 0.0);
  }
  CHECK(log_mgf(DisorderSpec::pareto(1.5), 0.0) == 0.0);
  CHECK_THROWS_AS(log_mgf(DisorderSpec::pareto(1.5), 0.3), UnsupportedError);
  CHECK_THROWS_AS(sigma2(DisorderSpec::pareto(3.0), 0.3), UnsupportedError);
  // bernoulli at large beta stays finite
  CHECK(std::isfinite(log_mgf(DisorderSpec::bernoulli(), 800.0)));
  CHECK(log_mgf(DisorderSpec::bernoulli(), 800.0) == doctest::Approx(800.0 - std::log(2.0)));
}

TEST_CASE("bounded family matches its three-point law") {
  const auto s = DisorderSpec::bounded(2.0);
  auto v = s.support();
  auto p = s.support_probabilities();
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    m1 += p[i] * v[i];
    m2 += p[i] * v[i] * v[i];
  }
  CHECK(std::abs(m1) < 1e-15);
  CHECK(m2 == doctest::Approx(1.0));
  for (double b : {0.1, 0.7, 1.9}) {
    double z = 0;
    for (std::size_t i = 0; i < v.size(); ++i) z += p[i] * std::exp(b * v[i]);
    CHECK(log_mgf(s, b) == doctest::Approx(std::log(z)).epsilon(1e-13));
  }
  CHECK_THROWS(DisorderSpec::bounded(0.5).validate());
}

TEST_CASE("sigma squared") {
  CHECK(sigma2(DisorderSpec::gaussian(), 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  const double c1 = std::cosh(1.0);
  CHECK(sigma2(DisorderSpec::bernoulli(), 1.0) == doctest::Approx(std::cosh(2.0) / (c1 * c1) - 1.0).epsilon(1e-13));
  // bernoulli sigma^2 = tanh^2 beta
  for (double b : {0.2, 0.9, 3.0}) CHECK(sigma2(DisorderSpec::bernoulli(), b) == doctest::Approx(std::pow(std::tanh(b), 2)).epsilon(1e-12));
  for (auto s : {DisorderSpec::gaussian(), DisorderSpec::bernoulli(), DisorderSpec::bounded(1.5)}) {
    for (double b = -3.0; b <= 3.0; b += 0.25) {
      CHECK(sigma2(s, b) >= 0.0);
      if (b != 0.0) CHECK(sigma2(s, b) > 0.0);
    }
  }
}

TEST_CASE("lambda is convex") {
  const double h = 1e-3;
  for (auto s : {DisorderSpec::gaussian(), DisorderSpec::bernoulli(), DisorderSpec::bounded(3.0)}) {
    for (double b = -4.0; b <= 4.0; b += 0.05) {
      const double second = (log_mgf(s, b + h) - 2 * log_mgf(s, b) + log_mgf(s, b - h)) / (h * h);
      CHECK(second >= -1e-9);
    }
  }
}

TEST_CASE("quantile scale") {
  CHECK(quantile_scale(DisorderSpec::pareto(2.0), 16.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(quantile_scale(DisorderSpec::pareto(1.0), 10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(quantile_scale(DisorderSpec::pareto(1.7), 1.0) == 1.0);
  CHECK_THROWS_AS(quantile_scale(DisorderSpec::pareto(2.0), 0.5), std::domain_error);
  CHECK_THROWS_AS(quantile_scale(DisorderSpec::gaussian(), 4.0), UnsupportedError);
  // two-sided: right tail carries 1/(1 + c_minus) of the mass
  CHECK(quantile_scale(DisorderSpec::pareto(2.0, 1.0), 32.0) == doctest::Approx(4.0));
  // increasing in t
  double prev = 0;
  for (double t = 1; t < 1e6; t *= 3) {
    const double m = quantile_scale(DisorderSpec::pareto(0.8), t);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("field determinism") {
  DisorderField f(DisorderSpec::gaussian(), 42, Window{2});
  std::vector<std::pair<long, std::vector<int>>> sites;
  for (long t = 0; t < 50; ++t)
    for (int x = -3; x <= 3; ++x) sites.push_back({t, {x, 2 * x - static_cast<int>(t % 3)}});
  std::vector<double> a;
  for (auto& [t, x] : sites) a.push_back(f(t, x));
  std::reverse(sites.begin(), sites.end());
  DisorderField g(DisorderSpec::gaussian(), 42, Window{2});
  std::vector<double> b;
  for (auto& [t, x] : sites) b.push_back(g(t, x));
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
  std::vector<int> x{1, 1};
  CHECK(f(3, x) == f(3, x));
  DisorderField h(DisorderSpec::gaussian(), 43, Window{2});
  CHECK(h(3, x) != f(3, x));
}

TEST_CASE("sampled laws") {
  const long N = 1000000;
  std::vector<double> g;
  g.reserve(N);
  DisorderField f(DisorderSpec::gaussian(), 7);
  for (long i = 0; i < N; ++i) {
    int x = static_cast<int>(i % 1000);
    g.push_back(f.value(i / 1000, &x, 1));
  }
  auto s = summarize(g);
  CHECK(std::abs(s.mean) < 0.005);
  CHECK(std::abs(s.mean) < 5 * s.stderr_mean);
  CHECK(std::abs(s.variance - 1.0) < 5 * std::sqrt(2.0 / N));
  CHECK(ks_statistic(g, normal_cdf) < 1.63 / std::sqrt(double(N)));

  DisorderField p(DisorderSpec::pareto(1.5), 8);
  long hits = 0;
  for (long i = 0; i < N; ++i) {
    int x = static_cast<int>(i % 997);
    const double w = p.value(i / 997, &x, 1);
    CHECK_FALSE(w < 1.0);
    if (w > 10.0) ++hits;
  }
  const double target = std::pow(10.0, -1.5);
  const double se = std::sqrt(target * (1 - target) / N);
  CHECK(std::abs(double(hits) / N - target) < 3 * se);

  for (auto spec : {DisorderSpec::bernoulli(), DisorderSpec::bounded(2.0)}) {
    DisorderField b(spec, 9);
    std::vector<double> v;
    for (long i = 0; i < 200000; ++i) {
      int x = static_cast<int>(i);
      v.push_back(b.value(0, &x, 1));
    }
    auto sb = summarize(v);
    CHECK(std::abs(sb.mean) < 5 * sb.stderr_mean);
    CHECK(std::abs(sb.variance - 1.0) < 0.03);
  }

  DisorderField two(DisorderSpec::pareto(2.0, 1.0), 10);
  long neg = 0;
  for (long i = 0; i < 100000; ++i) {
    int x = static_cast<int>(i);
    if (two.value(1, &x, 1) < 0) ++neg;
  }
  CHECK(std::abs(neg / 1e5 - 0.5) < 5 * std::sqrt(0.25 / 1e5));
  CHECK_THROWS(sample_field(DisorderSpec::gaussian(), Window{1, 5, 2, 3}, 1));
}

namespace {

SpaceTimePath straight_path(long n) {
  SpaceTimePath path;
  for (long t = 1; t <= n; ++t) path.push_back({t, Point{0}});
  return path;
}

}  // namespace

TEST_CASE("tilted fields") {
  const long N = 100000;
  const auto path = straight_path(N);
  DisorderField base(DisorderSpec::gaussian(), 11);

  auto zero = tilt_along_path(base, 0.0, path);
  for (long t = 1; t <= 1000; ++t) {
    int x = 0;
    CHECK(zero.value(t, &x, 1) == base.value(t, &x, 1));
  }

  auto tilted = tilt_along_path(base, 0.5, path);
  std::vector<double> on, off, ref;
  for (long t = 1; t <= N; ++t) {
    int x0 = 0, x1 = 1, x2 = 2;
    on.push_back(tilted.value(t, &x0, 1));
    off.push_back(tilted.value(t, &x1, 1));
    ref.push_back(base.value(t + N, &x2, 1));
    CHECK(tilted.value(t, &x1, 1) == base.value(t, &x1, 1));
  }
  auto s = summarize(on);
  CHECK(std::abs(s.mean - 0.5) < 5 * s.stderr_mean);
  CHECK(ks_two_sample(off, ref) <= 0.02);

  DisorderField coin(DisorderSpec::bernoulli(), 12);
  auto tc = tilt_along_path(coin, 1.0, path);
  long plus = 0;
  for (long t = 1; t <= N; ++t) {
    int x = 0;
    if (tc.value(t, &x, 1) > 0) ++plus;
  }
  const double p = std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
  CHECK(p == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(std::abs(double(plus) / N - p) < 5 * std::sqrt(p * (1 - p) / N));

  DisorderField three(DisorderSpec::bounded(2.0), 13);
  auto t3 = tilt_along_path(three, 0.4, path);
  double acc = 0;
  for (long t = 1; t <= N; ++t) {
    int x = 0;
    acc += t3.value(t, &x, 1);
  }
  // tilted mean is lambda'(beta)
  const double h = 1e-5;
  const double lp = (log_mgf(DisorderSpec::bounded(2.0), 0.4 + h) - log_mgf(DisorderSpec::bounded(2.0), 0.4 - h)) / (2 * h);
  CHECK(std::abs(acc / N - lp) < 5 * std::sqrt(1.0 / N));

  DisorderField heavy(DisorderSpec::pareto(1.5), 14);
  CHECK_THROWS_AS(tilt_along_path(heavy, 0.5, path), UnsupportedError);
}
