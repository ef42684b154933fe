// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "polymer/chaos.hpp"
#include "polymer/disorder.hpp"
#include "polymer/enumerate.hpp"
#include "polymer/harness.hpp"
#include "polymer/heavy_tail.hpp"
#include "polymer/moments.hpp"
#include "polymer/partition.hpp"
#include "polymer/rng.hpp"

using namespace polymer;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

unsigned wide() { return std::max(8u, std::thread::hardware_concurrency()); }

Report run(const std::string& name, json params, json checks, long replicas, std::uint64_t seed, unsigned threads) {
  ExperimentConfig c;
  c.experiment = name;
  c.parameters = std::move(params);
  c.checks = std::move(checks);
  c.replicas = replicas;
  c.seed = seed;
  c.threads = threads;
  return run_experiment(c);
}

void report_checks(Verdict& v, const Report& r) {
  for (const auto& c : r.checks) {
    v.detail << r.experiment << "." << c.name << "=" << fmt(c.value) << (c.passed ? " ok; " : " FAILED; ");
    if (!c.passed) v.pass = false;
  }
}

// ---- 1: exact identities ----

void criterion1(Verdict& v) {
  const auto bern = DisorderSpec::bernoulli();
  double mean_err = 0.0;
  for (long n = 1; n <= 4; ++n) {
    for (double beta : {0.3, 1.0, 2.5}) {
      double m = 0.0, p = 0.0;
      for_each_partition_value(bern, beta, n, WeightMode::normalized, [&](double w, double q) {
        m += q * w;
        p += q;
      });
      mean_err = std::max({mean_err, std::abs(m - 1.0), std::abs(p - 1.0)});
    }
  }
  v.require(mean_err <= 1e-13, "E[W_n] = 1");

  Stream rng(derive_seed(1, "acceptance-linearity", 0));
  double lin = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const long n = 2 + static_cast<long>(rng.below(d == 3 ? 5 : 9));
    const long m = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const auto spec = rng.uniform() < 0.5 ? DisorderSpec::gaussian() : DisorderSpec::bernoulli();
    DisorderField f(spec, rng(), Window{d});
    lin = std::max(lin, check_linearity(f, 0.2 + 1.3 * rng.uniform(), n, m));
  }
  v.require(lin <= 1e-10, "linearity");

  double chaos = 0.0, overlap = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (std::uint64_t s = 0; s < 8; ++s) {
      for (auto spec : {DisorderSpec::gaussian(), DisorderSpec::bernoulli()}) {
        DisorderField f(spec, derive_seed(1, "acceptance-chaos", s), Window{d});
        const long n = d == 1 ? 12 : (d == 2 ? 8 : 6);
        for (double beta : {0.4, 1.1}) {
          const double w = forward_partition(f, beta, n).W(n);
          chaos = std::max(chaos, std::abs(chaos_decompose(f, beta, n).sum() - w) / w);
          const auto o = overlap_In(f, beta, d == 3 ? 8 : 14);
          overlap = std::max(overlap, std::abs(o.value - o.two_replica));
        }
      }
    }
  }
  v.require(chaos <= 1e-10, "chaos sum");
  v.require(overlap <= 1e-12, "overlap");

  double pin = 0.0;
  for (long n = 1; n <= 6; ++n) {
    for (double beta : {0.5, 1.2}) {
      double avg = 0.0;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<Point> path;
        int x = 0;
        for (long t = 0; t < n; ++t) {
          x += (mask >> t) & 1u ? 1 : -1;
          path.push_back(Point{x});
        }
        avg += pinning_partition(path, bern, beta);
      }
      avg /= static_cast<double>(1u << n);
      const double m2 = second_moment_exact(bern, beta, n, 1);
      pin = std::max(pin, std::abs(avg - m2) / m2);
    }
  }
  v.require(pin <= 1e-12, "pinning average");
  v.detail << "mean " << fmt(mean_err) << ", linearity " << fmt(lin) << ", chaos " << fmt(chaos) << ", overlap "
           << fmt(overlap) << ", pinning " << fmt(pin);
}

// ---- 2: L2 threshold against the return series ----

double return_series_beta2() {
  // p_2n(0) = C(2n,n) 4^-n 9^-n sum_{j+k+l=n} (n!/(j!k!l!))^2, then a fitted c n^-3/2 (1 - a/n) tail
  const int N = 700;
  std::vector<double> p(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    const double base = std::lgamma(2.0 * n + 1) - 2 * std::lgamma(n + 1.0) - n * std::log(36.0) + 2 * std::lgamma(n + 1.0);
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; j + k <= n; ++k) {
        s += std::exp(base - 2 * (std::lgamma(j + 1.0) + std::lgamma(k + 1.0) + std::lgamma(n - j - k + 1.0)));
      }
    }
    p[n] = s;
  }
  const double c = 2.0 * std::pow(3.0 / (4.0 * M_PI), 1.5);
  const double a = (1.0 - p[N] * std::pow(N, 1.5) / c) * N;
  double G = 1.0;
  for (int n = 1; n <= N; ++n) G += p[n];
  for (long n = N + 1; n <= 20'000'000; ++n) G += c * std::pow(static_cast<double>(n), -1.5) * (1.0 - a / n);
  const double last = 20'000'000.0;
  G += c * 2.0 / std::sqrt(last);  // remainder of the n^-3/2 sum
  const double pi3 = 1.0 / G;
  return std::sqrt(std::log(1.0 + pi3 / (1.0 - pi3)));
}

void criterion2(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run("l2_threshold", {{"d", 3}, {"disorder", "gaussian"}}, json::object(), 1, 0, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double value = rep.statistics["beta2"].get<double>();
  const double oracle = return_series_beta2();
  v.require(std::abs(value - oracle) <= 1e-3, "within 1e-3 of the oracle");
  v.require(std::abs(oracle - 1.038) <= 1e-3, "oracle near 1.038");
  v.require(secs < 60.0, "runtime under a minute");
  v.detail << "beta2 " << fmt(value) << ", oracle " << fmt(oracle) << ", " << fmt(secs) << " s";
}

// ---- 3: fractional moment ----

void criterion3(Verdict& v) {
  const auto rep = run("fractional_moment",
                       {{"d", 1}, {"n", 3}, {"gamma", 0.5}, {"betas", {0.0, 0.5, 1.0, 1.5}}, {"disorder", "bernoulli"}},
                       {{"expect_decreasing", true}}, 1, 0, 1);
  report_checks(v, rep);
  v.detail << "moments " << rep.statistics["moments"].dump();
}

// ---- 4: d = 2 intermediate disorder ----

void criterion4(Verdict& v) {
  const double window = 3.0;
  const auto ln = run("lognormal", {{"beta_hat", 0.3}, {"n", 4096}, {"disorder", "gaussian"}, {"window_sds", window}},
                      {{"variance_rel_tol", 0.35}, {"mean_abs_tol", 0.1}}, 300, 2024, 0);
  report_checks(v, ln);
  const auto& st = ln.statistics;
  v.detail << "sigma_hat2 " << fmt(st["sigma_hat2"].get<double>()) << ", var " << fmt(st["log_w"]["variance"].get<double>())
           << ", mean " << fmt(st["log_w"]["mean"].get<double>()) << ", KS (reported) " << fmt(st["ks"].get<double>()) << "; ";
  const auto med = run("median_trajectory",
                       {{"beta_hat", 1.2}, {"n_grid", {256, 1024, 4096}}, {"disorder", "gaussian"}, {"window_sds", window}},
                       {{"expect_decreasing", true}}, 100, 2024, 0);
  report_checks(v, med);
  v.detail << "medians " << med.statistics["medians"].dump();
}

// ---- 5: very strong disorder in d = 1 ----

void criterion5(Verdict& v) {
  const auto a = run("free_energy", {{"d", 1}, {"beta", 1.0}, {"n", 10000}, {"disorder", "bernoulli"}},
                     {{"expect_negative", true}}, 100, 2024, 0);
  report_checks(v, a);
  v.detail << "f(1) CI " << a.statistics["ci95"].dump() << "; ";
  const auto b = run("free_energy", {{"d", 1}, {"beta", 0.5}, {"n", 100000}, {"disorder", "bernoulli"}},
                     {{"quartic_factor", 3.0}}, 4, 2024, 0);
  report_checks(v, b);
  v.detail << "f(0.5)/0.5^4 " << fmt(b.statistics["f_over_beta4"].get<double>());
}

// ---- 6: maximal inequality ----

void criterion6(Verdict& v) {
  const auto r = run("sup_tail", {{"d", 1}, {"beta", 1.0}, {"n_max", 1000}, {"disorder", "bernoulli"}, {"t_grid", {4.0}}},
                     json::object(), 10000, 2024, 0);
  report_checks(v, r);
  v.detail << "P_hat " << fmt(r.statistics["tail"][0]["empirical"].get<double>()) << ", bound "
           << fmt(r.statistics["tail"][0]["bound"].get<double>());
}

// ---- 7: heavy-tail order statistics ----

void criterion7(Verdict& v) {
  const auto r = run("order_stats", {{"alpha", 1.5}, {"n", 512}, {"xi", 0.8}, {"k", 1}, {"u_grid", {0.5, 1.0, 2.0}}},
                     {{"se_multiple", 3.0}, {"location_ks_max", 0.05}}, 10000, 2024, 0);
  report_checks(v, r);
  v.detail << "|B| " << r.statistics["box_size"].get<long>();
}

// ---- 8: exponent algebra ----

void criterion8(Verdict& v) {
  const auto r = run("phase_scan", json::object(), {{"identity_tol", 1e-12}, {"identity_grid", 1000}}, 1, 0, 1);
  report_checks(v, r);
  v.require(r.statistics["level_points"].get<long>() >= 1000, "level-curve grid of 1e3 points");
  // R1: xi = 1/2, chi = 1/4 - gamma; R7: xi = 1, chi = 2/alpha - gamma; both violate chi = 2 xi - 1
  int r1 = 0, r7 = 0;
  for (int i = 0; i < 40; ++i) {
    const double alpha = 1.0 + 0.5 * i;
    for (int j = 1; j < 40; ++j) {
      const double gamma = 0.05 * j;
      const auto pt = phase_scan(std::vector<double>{alpha}, std::vector<double>{gamma})[0];
      const auto& e = pt.exponents;
      if (pt.region == Region::R1) {
        ++r1;
        v.require(e.xi == 0.5 && std::abs(e.chi - (0.25 - gamma)) < 1e-15 && e.hyperscaling_violated, "R1 statement");
      } else if (pt.region == Region::R7) {
        ++r7;
        v.require(e.xi == 1.0 && std::abs(e.chi - (2.0 / alpha - gamma)) < 1e-15 && e.hyperscaling_violated, "R7 statement");
      }
    }
  }
  v.require(r1 > 100 && r7 > 5, "R1 and R7 sampled");
  v.detail << "R1 points " << r1 << ", R7 points " << r7 << ", level points " << r.statistics["level_points"].get<long>();
}

// ---- 9: variational solver against subset enumeration ----

double brute_force(const std::vector<Atom>& a, double beta, EntropyKind kind) {
  double best = 0.0;
  const std::size_t k = a.size();
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    double t0 = 0.0, x0 = 0.0, val = 0.0;
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) {
      if (!(mask >> j & 1u)) continue;
      const double dt = a[j].t - t0, dx = a[j].x - x0;
      if (!(dt > 0.0)) {
        ok = false;
        break;
      }
      double cost;
      if (kind == EntropyKind::diffusive) {
        cost = dx * dx / dt;
      } else {
        const double s = std::abs(dx) / dt;
        if (s > 1.0) {
          ok = false;
          break;
        }
        cost = 0.5 * dt * ((1 + s) * std::log1p(s) + (s < 1.0 ? (1 - s) * std::log1p(-s) : 0.0));
      }
      val += beta * a[j].w - cost;
      t0 = a[j].t;
      x0 = a[j].x;
    }
    if (ok) best = std::max(best, val);
  }
  return best;
}

void criterion9(Verdict& v) {
  Stream rng(derive_seed(9, "acceptance-variational", 0));
  int samples = 0, draws = 0;
  std::size_t largest = 0;
  double worst = 0.0;
  while (samples < 1000) {
    PppOptions o;
    o.alpha = 0.5 + 1.5 * rng.uniform();
    o.c_minus = rng.uniform() < 0.3 ? 0.7 : 0.0;
    o.w_min = std::pow(8.0 / (1.0 + o.c_minus), -1.0 / o.alpha);
    const auto s = sample_ppp(o, rng());
    ++draws;
    if (s.atoms.size() > 12) continue;
    ++samples;
    largest = std::max(largest, s.atoms.size());
    const double beta = 0.1 + 3.0 * rng.uniform();
    for (auto kind : {EntropyKind::diffusive, EntropyKind::ballistic}) {
      const double dp = variational_solver(s, beta, kind).value;
      worst = std::max(worst, std::abs(dp - brute_force(s.atoms, beta, kind)) / std::max(1.0, std::abs(dp)));
    }
  }
  v.require(worst <= 1e-12, "DP equals enumeration");
  v.detail << samples << " samples (" << draws << " drawn), up to " << largest << " atoms, max gap " << fmt(worst);
}

// ---- 10: hierarchical lattice and tree trends ----

void criterion10(Verdict& v) {
  const json n_grid = {2, 6, 10, 14};
  const auto a = run("hier_probe",
                     {{"b", 2}, {"s", 2}, {"placement", "site"}, {"disorder", "gaussian"}, {"betas", {0.5}}, {"n_grid", n_grid}},
                     {{"expect", {"decaying"}}}, 100000, 2024, 0);
  report_checks(v, a);
  const auto b = run("hier_probe",
                     {{"b", 3}, {"s", 2}, {"placement", "site"}, {"disorder", "gaussian"}, {"betas", {0.2}}, {"n_grid", n_grid}},
                     {{"expect", {"flat"}}}, 100000, 2024, 0);
  report_checks(v, b);
  const double beta_c = std::sqrt(2.0 * std::log(2.0));
  const auto below = run("tree_population", {{"d", 2}, {"depth", 20}, {"beta", 0.8}, {"disorder", "gaussian"}},
                         {{"expect", "stable"}}, 100000, 2024, 0);
  report_checks(v, below);
  const auto above = run("tree_population", {{"d", 2}, {"depth", 20}, {"beta", 1.5}, {"disorder", "gaussian"}},
                         {{"expect", "decay"}, {"decay_factor", 10.0}}, 100000, 2024, 0);
  report_checks(v, above);
  v.detail << "b2s2 " << a.statistics["trends"].dump() << ", b3s2 " << b.statistics["trends"].dump() << ", beta_c "
           << fmt(beta_c) << ", median ratio at beta 0.8 "
           << fmt(below.statistics["median_ratio_last_over_compare_from"].get<double>()) << ", decay at beta 1.5 "
           << fmt(above.statistics["median_decay_from_start"].get<double>());
}

// ---- 11: determinism ----

void criterion11(Verdict& v) {
  const std::map<std::string, json> params = {
      {"lognormal", {{"n", 256}}},
      {"median_trajectory", {{"n_grid", {64, 128, 256}}}},
      {"free_energy", {{"n", 2000}}},
      {"sup_tail", {{"n_max", 300}}},
      {"order_stats", {{"k", 3}}},
      {"ground_state", {{"n_grid", {64, 128}}}},
      {"hier_probe", {{"n_grid", {2, 5, 8}}}},
      {"tree_population", {{"depth", 8}}},
  };
  const std::map<std::string, json> checks = {{"tree_population", {{"compare_from", 4}}}};
  const std::map<std::string, long> replicas = {{"lognormal", 64}, {"median_trajectory", 32}, {"free_energy", 32},
                                                {"sup_tail", 500},  {"order_stats", 500},       {"variational", 200},
                                                {"ground_state", 64}, {"hier_probe", 20000},    {"tree_population", 20000}};
  int compared = 0;
  for (const auto& info : experiments()) {
    const json p = params.count(info.name) ? params.at(info.name) : json::object();
    const json c = checks.count(info.name) ? checks.at(info.name) : json::object();
    const long r = replicas.count(info.name) ? replicas.at(info.name) : info.default_replicas;
    std::string csv[3];
    const unsigned threads[3] = {1, 1, wide()};
    for (int i = 0; i < 3; ++i) {
      std::ostringstream os;
      write_csv(run(info.name, p, c, r, 77, threads[i]), os);
      csv[i] = os.str();
    }
    v.require(csv[0] == csv[1] && csv[0] == csv[2], info.name);
    ++compared;
  }
  v.detail << compared << " experiments, threads 1/1/" << wide();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"exact identities", criterion1},
      {"L2 threshold, d=3", criterion2},
      {"fractional-moment monotonicity", criterion3},
      {"d=2 intermediate disorder", criterion4},
      {"very strong disorder, d=1", criterion5},
      {"maximal-inequality tail", criterion6},
      {"heavy-tail order statistics", criterion7},
      {"exponent algebra", criterion8},
      {"variational solver", criterion9},
      {"hierarchical and tree trends", criterion10},
      {"determinism", criterion11},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first << " -- "
              << v.detail.str() << " (" << fmt(secs) << " s)" << std::endl;
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
