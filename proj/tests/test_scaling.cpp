#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/moments.hpp"
#include "polymer/partition.hpp"
#include "polymer/rng.hpp"
#include "polymer/scaling.hpp"

using namespace polymer;

namespace {

// R_n in d = 2: p_{2i}(0) = (C(2i, i) / 4^i)^2
double r2_oracle(long n) {
  double a = 1.0, s = 0.0;
  for (long i = 1; i <= n; ++i) {
    a *= (2.0 * i - 1.0) / (2.0 * i);
    s += a * a;
  }
  return s;
}

}  // namespace

TEST_CASE("intermediate scaling") {
  CHECK(interm_beta(1000, 0.0) == 0.0);
  CHECK(interm_beta(10000, 1.0) == doctest::Approx(1.0 / std::sqrt(r2_oracle(10000))).epsilon(1e-12));
  CHECK(overlap_R(10000) == doctest::Approx(r2_oracle(10000)).epsilon(1e-12));
  const double ratio = interm_beta(1000000, 0.7) / interm_beta(1000, 0.7);
  CHECK(std::abs(ratio / (1.0 / std::sqrt(2.0)) - 1.0) < 0.10);
  CHECK_THROWS_AS(interm_beta(100, -0.1), std::domain_error);
  auto s = resolve_interm(4096, 0.3);
  CHECK_FALSE(s.critical);
  CHECK(s.beta_n == interm_beta(4096, 0.3));
}

TEST_CASE("critical window") {
  for (auto spec : {DisorderSpec::gaussian(), DisorderSpec::bernoulli()}) {
    for (long n : {100L, 1000L, 10000L, 100000L}) {
      for (double theta : {-2.0, -1.0, 0.0, 1.0, 3.0}) {
        const double target = (1.0 + theta / std::log(double(n))) / overlap_R(n);
        if (spec.family == Family::bernoulli && target >= 1.0) {
          // sigma^2 = tanh^2 < 1 for this family
          CHECK_THROWS_AS(critical_window_beta(n, theta, spec), std::domain_error);
          continue;
        }
        const double b = critical_window_beta(n, theta, spec);
        const double resid = sigma2(spec, b) * overlap_R(n) - 1.0 - theta / std::log(double(n));
        CHECK(std::abs(resid) <= 1e-9);
      }
    }
  }
  const auto g = DisorderSpec::gaussian();
  CHECK(sigma2(g, critical_window_beta(10000, 0.0)) * overlap_R(10000) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(critical_window_beta(10000, 1.0) > critical_window_beta(10000, 0.0));
  CHECK_THROWS_AS(critical_window_beta(100, -10.0), std::domain_error);
  CHECK_THROWS_AS(critical_window_beta(100, 0.0, DisorderSpec::pareto(2.0)), UnsupportedError);
  CHECK(resolve_critical(1000, 0.5).critical);
}

TEST_CASE("log-normal experiment") {
  const auto b = DisorderSpec::bernoulli();
  LognormalOptions o;
  o.replicas = 20;
  auto zero = lognormal_experiment(b, 0.0, 64, o);
  CHECK(zero.sigma_hat2 == 0.0);
  for (double v : zero.log_w) CHECK(v == 0.0);
  CHECK(zero.ks == 0.0);

  o.replicas = 2;
  CHECK(lognormal_experiment(b, 0.6, 4, o).sigma_hat2 == doctest::Approx(0.44629).epsilon(1e-5));
  CHECK(std::isinf(lognormal_experiment(b, 1.2, 4, o).sigma_hat2));

  // small-n sanity: the mean of log W sits near -sigma_hat^2 / 2
  o.replicas = 200;
  o.seed = 9;
  auto r = lognormal_experiment(b, 0.3, 256, o);
  CHECK(std::abs(r.mean_deviation) < 0.1);
  CHECK(r.summary.variance > 0.0);
  CHECK(r.summary.variance < 2 * r.sigma_hat2);

  // same bytes on any thread count
  o.replicas = 12;
  o.threads = 1;
  auto one = lognormal_experiment(b, 0.5, 64, o);
  o.threads = 4;
  auto many = lognormal_experiment(b, 0.5, 64, o);
  CHECK(one.log_w == many.log_w);
  CHECK(one.summary.mean == many.summary.mean);

  std::vector<long> ns{16, 64};
  auto traj = median_trajectory(b, 1.2, ns, o);
  REQUIRE(traj.size() == 2);
  CHECK(traj[1].beta_n < traj[0].beta_n);
  std::vector<MedianPoint> fake{{1, 0, 1.0, 0}, {2, 0, 0.5, 0}, {3, 0, 0.5, 0}};
  CHECK_FALSE(strictly_decreasing_medians(fake));
  fake.pop_back();
  CHECK(strictly_decreasing_medians(fake));
}

TEST_CASE("averaged field") {
  const auto g = DisorderSpec::gaussian();
  DisorderField f2(g, 11, Window{2});
  TestFunction bump{[](std::span<const double> y) { return std::max(0.0, 1.0 - std::abs(y[0]) - std::abs(y[1])); }, 1.0};
  TestFunction box{[](std::span<const double> y) { return std::abs(y[0]) <= 0.5 && std::abs(y[1]) <= 0.5 ? 1.0 : 0.0; }, 0.5};
  TestFunction zero{[](std::span<const double>) { return 0.0; }, 1.0};

  CHECK(field_average(f2, 0.4, 16, zero, FieldMode::d2_interm).value == 0.0);
  CHECK(field_average(f2, 0.0, 16, bump, FieldMode::d2_interm).value == 0.0);

  // oracle: one forward sweep per start
  const long n = 9;
  const double beta = 0.5;
  double direct = 0.0;
  for (int a = -3; a <= 3; ++a) {
    for (int c = -3; c <= 3; ++c) {
      const double y0 = a / 3.0, y1 = c / 3.0;
      const double ph = std::max(0.0, 1.0 - std::abs(y0) - std::abs(y1));
      if (ph == 0.0) continue;
      direct += ph * (forward_partition(f2, beta, n, 0, Point{a, c}).W(n) - 1.0);
    }
  }
  const auto fa = field_average(f2, beta, n, bump, FieldMode::d2_interm);
  CHECK(fa.unamplified == doctest::Approx(direct / 9.0).epsilon(1e-12));
  CHECK(fa.value == doctest::Approx(std::sqrt(overlap_R(n)) * direct / 9.0).epsilon(1e-12));

  // linearity per realisation
  TestFunction combo{[&](std::span<const double> y) { return 2.0 * bump.phi(y) - 3.0 * box.phi(y); }, 1.0};
  std::vector<TestFunction> three{bump, box, combo};
  auto v = field_average(f2, 0.3, 36, three, FieldMode::d2_interm);
  CHECK(std::abs(v[2].value - (2.0 * v[0].value - 3.0 * v[1].value)) < 1e-12 * (1.0 + std::abs(v[2].value)));

  CHECK_THROWS_AS(field_average(f2, 0.3, 16, bump, FieldMode::d3_subL2), UnsupportedError);
  DisorderField f3(g, 1, Window{3});
  TestFunction ball{[](std::span<const double> y) { return std::max(0.0, 1.0 - std::abs(y[0]) - std::abs(y[1]) - std::abs(y[2])); }, 1.0};
  CHECK_THROWS_AS(field_average(f3, 0.3, 16, ball, FieldMode::d2_interm), UnsupportedError);

  // d = 3 below the L2 threshold: centred
  const double b3 = 0.5 * l2_threshold(g, 3).value;
  std::vector<double> amp, raw;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    DisorderField f(g, derive_seed(21, "field3", r), Window{3});
    const auto x = field_average(f, b3, 32, ball, FieldMode::d3_subL2);
    amp.push_back(x.value);
    raw.push_back(x.unamplified);
  }
  auto sa = summarize(amp);
  auto sr = summarize(raw);
  INFO("amplified mean " << sa.mean << " +- " << sa.stderr_mean);
  CHECK(std::abs(sa.mean) < 3 * sa.stderr_mean);
  CHECK(std::abs(sr.mean) < 5 * sr.stderr_mean);
  CHECK(sa.stderr_mean == doctest::Approx(sr.stderr_mean * std::pow(32.0, 0.25)).epsilon(1e-9));
}

TEST_CASE("G_theta kernel") {
  // theta = euler_gamma, t = 1: the integral of 1 / Gamma
  CHECK(g_theta(euler_gamma, 1.0) == doctest::Approx(2.80777024202851936522).epsilon(1e-10));
  double prev_theta = 0.0;
  for (double t : {0.01, 0.3, 1.0, 5.0, 100.0}) {
    prev_theta = 0.0;
    for (double theta : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
      if (theta == 4.0 && t == 100.0) {
        // the peak sits near s = 3000 with height exp(3000)
        CHECK_THROWS_AS(g_theta(theta, t), std::overflow_error);
        continue;
      }
      const double v = g_theta(theta, t, 1e-8);
      CHECK(v > 0.0);
      CHECK(v > prev_theta);
      prev_theta = v;
      const double fine = g_theta(theta, t, 1e-9);
      CHECK(std::abs(fine - v) <= 10 * 1e-8 * fine);
    }
  }
  // composite Simpson on the raw integrand
  const double theta = 1.3, t = 2.5;
  auto f = [&](double s) {
    return s <= 0 ? 0.0 : std::exp((theta - euler_gamma) * s) * s * std::pow(t, s - 1) / std::tgamma(s + 1);
  };
  const int N = 200000;
  const double L = 60.0, h = L / N;
  double simpson = f(0) + f(L);
  for (int i = 1; i < N; ++i) simpson += (i % 2 ? 4.0 : 2.0) * f(i * h);
  simpson *= h / 3;
  CHECK(g_theta(theta, t) == doctest::Approx(simpson).epsilon(1e-9));
  CHECK_THROWS_AS(g_theta(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(g_theta(0.0, -1.0), std::domain_error);
}
