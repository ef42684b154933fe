#include "polymer/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "polymer/disorder.hpp"
#include "polymer/errors.hpp"
#include "polymer/heavy_tail.hpp"
#include "polymer/hier.hpp"
#include "polymer/moments.hpp"
#include "polymer/parallel.hpp"
#include "polymer/partition.hpp"
#include "polymer/rng.hpp"
#include "polymer/scaling.hpp"
#include "polymer/stats.hpp"

namespace polymer {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Context {
  const json& p;  // resolved parameters
  const json& c;  // resolved check settings
  std::uint64_t seed;
  long replicas;
  unsigned threads;
  std::string name;
};

struct Outcome {
  std::vector<std::vector<Cell>> rows;
  json statistics = json::object();
  std::vector<Check> checks;
};

struct Experiment {
  ExperimentInfo info;
  std::function<Outcome(const Context&)> run;
};

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

DisorderSpec spec_from(const json& j) {
  DisorderSpec s;
  try {
    if (j.is_string()) {
      s.family = parse_family(j.get<std::string>());
    } else if (j.is_object()) {
      for (const auto& [k, v] : j.items()) {
        if (k != "family" && k != "bound" && k != "alpha" && k != "c_minus") {
          throw ConfigError("disorder: unknown key '" + k + "'");
        }
      }
      s.family = parse_family(j.at("family").get<std::string>());
      s.bound = j.value("bound", s.bound);
      s.alpha = j.value("alpha", s.alpha);
      s.c_minus = j.value("c_minus", s.c_minus);
    } else {
      throw ConfigError("disorder must be a family name or an object");
    }
    s.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("disorder: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

json spec_json(const DisorderSpec& s) {
  json j{{"family", s.name()}};
  if (s.family == Family::bounded) j["bound"] = s.bound;
  if (s.family == Family::pareto) {
    j["alpha"] = s.alpha;
    j["c_minus"] = s.c_minus;
  }
  return j;
}

Check make_check(std::string name, bool passed, double value, double threshold, std::string detail = {}) {
  return {std::move(name), passed, value, threshold, std::move(detail)};
}

std::vector<std::vector<Cell>> replica_rows(const std::vector<double>& v) {
  std::vector<std::vector<Cell>> rows;
  rows.reserve(v.size());
  for (std::size_t r = 0; r < v.size(); ++r) rows.push_back({static_cast<long long>(r), v[r]});
  return rows;
}

json summary_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"variance", s.variance}, {"stderr", s.stderr_mean}, {"median", s.median}};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// ---- experiments ----

Outcome run_lognormal(const Context& x) {
  LognormalOptions o;
  o.replicas = x.replicas;
  o.seed = x.seed;
  o.window_sds = get<double>(x.p, "window_sds");
  o.threads = x.threads;
  const auto res = lognormal_experiment(spec_from(x.p.at("disorder")), get<double>(x.p, "beta_hat"),
                                        get<long>(x.p, "n"), o);
  Outcome out;
  out.rows = replica_rows(res.log_w);
  out.statistics = {{"beta_n", res.beta_n},
                    {"sigma_hat2", res.sigma_hat2},
                    {"log_w", summary_json(res.summary)},
                    {"mean_deviation", res.mean_deviation},
                    {"variance_deviation", res.variance_deviation},
                    {"ks", res.ks},
                    {"median_w", res.median_w}};
  const double vt = get<double>(x.c, "variance_rel_tol"), mt = get<double>(x.c, "mean_abs_tol");
  out.checks.push_back(make_check("variance_within_tolerance", std::abs(res.variance_deviation) <= vt,
                                  std::abs(res.variance_deviation), vt, "|var/sigma_hat2 - 1|"));
  out.checks.push_back(make_check("mean_within_tolerance", std::abs(res.mean_deviation) <= mt,
                                  std::abs(res.mean_deviation), mt, "|mean + sigma_hat2/2|"));
  return out;
}

Outcome run_median_trajectory(const Context& x) {
  LognormalOptions o;
  o.replicas = x.replicas;
  o.seed = x.seed;
  o.window_sds = get<double>(x.p, "window_sds");
  o.threads = x.threads;
  const auto grid = get<std::vector<long>>(x.p, "n_grid");
  const auto pts = median_trajectory(spec_from(x.p.at("disorder")), get<double>(x.p, "beta_hat"), grid, o);
  Outcome out;
  std::vector<double> med;
  for (const auto& pt : pts) {
    out.rows.push_back({static_cast<long long>(pt.n), pt.beta_n, pt.median_w, pt.median_log_w});
    med.push_back(pt.median_w);
  }
  out.statistics = {{"medians", med}};
  if (get<bool>(x.c, "expect_decreasing")) {
    out.checks.push_back(make_check("medians_strictly_decreasing", strictly_decreasing_medians(pts),
                                    static_cast<double>(pts.size()), 0.0));
  }
  return out;
}

Outcome run_free_energy(const Context& x) {
  const DisorderSpec spec = spec_from(x.p.at("disorder"));
  const int d = get<int>(x.p, "d");
  const double beta = get<double>(x.p, "beta");
  const long n = get<long>(x.p, "n");
  RunOptions ro;
  ro.window_sds = get<double>(x.p, "window_sds");
  std::vector<double> f(static_cast<std::size_t>(x.replicas));
  parallel_for(f.size(), x.threads, [&](std::size_t r) {
    const DisorderField field(spec, derive_seed(x.seed, x.name, r), Window{d});
    f[r] = free_energy_estimate(field, beta, n, ro);
  });
  Outcome out;
  out.rows = replica_rows(f);
  const Summary s = summarize(f);
  const double lo = s.mean - kZ95 * s.stderr_mean, hi = s.mean + kZ95 * s.stderr_mean;
  const double ratio = s.mean / std::pow(beta, 4);
  out.statistics = {{"free_energy", summary_json(s)}, {"ci95", {lo, hi}}, {"f_over_beta4", ratio}};
  if (get<bool>(x.c, "expect_negative")) {
    out.checks.push_back(make_check("free_energy_negative", hi < 0.0, hi, 0.0, "upper end of the 95% CI"));
  }
  const double factor = get<double>(x.c, "quartic_factor");
  if (factor > 0.0) {
    const double rel = ratio / (-1.0 / 6.0);
    out.checks.push_back(make_check("quartic_small_beta", rel >= 1.0 / factor && rel <= factor, rel, factor,
                                    "(f/beta^4)/(-1/6) within [1/factor, factor]"));
  }
  return out;
}

Outcome run_sup_tail(const Context& x) {
  const DisorderSpec spec = spec_from(x.p.at("disorder"));
  const double M = spec.sup_abs();
  if (!std::isfinite(M)) throw ConfigError("sup_tail: needs bounded disorder");
  const double beta = get<double>(x.p, "beta");
  const auto peaks = sup_log_martingale_samples(spec, beta, get<int>(x.p, "d"), get<long>(x.p, "n_max"), x.replicas,
                                                x.seed, x.threads);
  Outcome out;
  out.rows = replica_rows(peaks);
  const double K = std::exp(beta * M);
  json rows = json::array();
  for (double t : get<std::vector<double>>(x.p, "t_grid")) {
    if (!(t > 0.0)) throw ConfigError("sup_tail: t must be positive");
    const long hits = std::count_if(peaks.begin(), peaks.end(), [&](double v) { return v >= std::log(t); });
    const auto pr = proportion(hits, x.replicas);
    const double lower = pr.estimate - 1.6448536269514722 * pr.stderr_value;
    const double bound = 1.0 / (4.0 * K * K * t);
    rows.push_back({{"t", t}, {"empirical", pr.estimate}, {"stderr", pr.stderr_value}, {"lower95", lower}, {"bound", bound}});
    std::ostringstream name;
    name << "tail_bound_t=" << t;
    out.checks.push_back(make_check(name.str(), lower >= bound, lower, bound, "one-sided 95% lower bound >= 1/(4K^2 t)"));
  }
  out.statistics = {{"K", K}, {"tail", rows}};
  return out;
}

Outcome run_fractional_moment(const Context& x) {
  const DisorderSpec spec = spec_from(x.p.at("disorder"));
  const double gamma = get<double>(x.p, "gamma");
  const long n = get<long>(x.p, "n");
  const auto betas = get<std::vector<double>>(x.p, "betas");
  Outcome out;
  std::vector<double> m;
  for (double b : betas) {
    const auto e = fractional_moment(spec, b, gamma, n, MomentMode::exact_enum, get<int>(x.p, "d"));
    m.push_back(e.value);
    out.rows.push_back({b, e.value});
  }
  out.statistics = {{"moments", m}};
  if (get<bool>(x.c, "expect_decreasing")) {
    out.checks.push_back(make_check("strictly_decreasing_in_beta", strictly_decreasing(m), static_cast<double>(m.size()), 0.0));
  }
  return out;
}

Outcome run_l2_threshold(const Context& x) {
  const int d = get<int>(x.p, "d");
  const auto t = l2_threshold(spec_from(x.p.at("disorder")), d);
  Outcome out;
  out.rows.push_back({static_cast<long long>(d), t.value, t.escape});
  out.statistics = {{"beta2", t.value}, {"escape", t.escape}, {"recurrent", t.recurrent}, {"unbounded", t.unbounded}};
  if (!x.c.at("reference").is_null()) {
    const double ref = get<double>(x.c, "reference"), tol = get<double>(x.c, "tol");
    out.checks.push_back(make_check("matches_reference", std::abs(t.value - ref) <= tol, std::abs(t.value - ref), tol));
  }
  return out;
}

Outcome run_critical_window(const Context& x) {
  const DisorderSpec spec = spec_from(x.p.at("disorder"));
  Outcome out;
  double worst = 0.0;
  for (long n : get<std::vector<long>>(x.p, "n_grid")) {
    for (double th : get<std::vector<double>>(x.p, "theta_grid")) {
      const double b = critical_window_beta(n, th, spec);
      const double target = (1.0 + th / std::log(static_cast<double>(n))) / overlap_R(n);
      const double res = std::abs(sigma2(spec, b) / target - 1.0);
      worst = std::max(worst, res);
      out.rows.push_back({static_cast<long long>(n), th, b, res});
    }
  }
  out.statistics = {{"max_relative_residual", worst}};
  const double tol = get<double>(x.c, "residual_tol");
  out.checks.push_back(make_check("window_equation_solved", worst <= tol, worst, tol));
  return out;
}

Outcome run_order_stats(const Context& x) {
  OrderStatOptions o;
  o.alpha = get<double>(x.p, "alpha");
  o.n = get<long>(x.p, "n");
  o.xi = get<double>(x.p, "xi");
  o.k = get<int>(x.p, "k");
  o.u_grid = get<std::vector<double>>(x.p, "u_grid");
  o.replicas = x.replicas;
  o.seed = x.seed;
  o.threads = x.threads;
  const auto res = order_statistics_experiment(o);
  Outcome out;
  for (std::size_t r = 0; r < res.top.size(); ++r) {
    for (std::size_t j = 0; j < res.top[r].size(); ++j) {
      const auto& a = res.top[r][j];
      out.rows.push_back({static_cast<long long>(r), static_cast<long long>(j + 1), a.w, a.t, a.x, res.max_box_scaled[r]});
    }
  }
  const double se_mult = get<double>(x.c, "se_multiple"), ks_max = get<double>(x.c, "location_ks_max");
  json checks = json::array();
  for (const auto& c : res.checks) {
    const double se = std::sqrt(c.limit * (1.0 - c.limit) / static_cast<double>(x.replicas));
    checks.push_back({{"u", c.u}, {"empirical", c.empirical.estimate}, {"limit", c.limit}, {"stderr", se}});
    std::ostringstream name;
    name << "frechet_u=" << c.u;
    const double dev = std::abs(c.empirical.estimate - c.limit);
    out.checks.push_back(make_check(name.str(), dev <= se_mult * se, dev, se_mult * se, "|P_hat - exp(-u^-alpha)|"));
  }
  out.statistics = {{"box_size", res.box_size},
                    {"frechet_ks", res.frechet_ks},
                    {"location_ks_t", res.location_ks_t},
                    {"location_ks_x", res.location_ks_x},
                    {"frechet", checks}};
  out.checks.push_back(make_check("location_t_uniform", res.location_ks_t <= ks_max, res.location_ks_t, ks_max));
  out.checks.push_back(make_check("location_x_uniform", res.location_ks_x <= ks_max, res.location_ks_x, ks_max));
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

Outcome run_phase_scan(const Context& x) {
  auto alphas = linspace(get<double>(x.p, "alpha_min"), get<double>(x.p, "alpha_max"), get<int>(x.p, "alpha_count"));
  if (get<bool>(x.p, "include_infinity")) alphas.push_back(std::numeric_limits<double>::infinity());
  const auto gammas = linspace(get<double>(x.p, "gamma_min"), get<double>(x.p, "gamma_max"), get<int>(x.p, "gamma_count"));
  Outcome out;
  std::map<std::string, long> counts;
  for (const auto& pt : phase_scan(alphas, gammas)) {
    const auto& e = pt.exponents;
    out.rows.push_back({pt.alpha, pt.gamma, region_name(pt.region), e.xi, e.chi, static_cast<long long>(e.defined),
                        static_cast<long long>(e.conjectural), static_cast<long long>(e.hyperscaling_violated)});
    ++counts[region_name(pt.region)];
  }
  const double tol = get<double>(x.c, "identity_tol");
  const int grid = get<int>(x.c, "identity_grid");
  double boundary = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double g = 0.999 * i / grid;
    const auto ec = collective_exponents(g);
    const auto ee = elitist_exponents(regime_boundary_alpha(g), g);
    boundary = std::max({boundary, std::abs(ec.xi - ee.xi), std::abs(ec.chi - ee.chi)});
  }
  double level = 0.0;
  long level_points = 0;
  const int per_curve = std::max(1, grid / 11);
  for (int m = 0; m <= 10; ++m) {
    const double xi = 0.5 + 0.05 * m;
    for (const auto& lp : level_curve(xi, per_curve)) {
      const auto e = exponents(lp.alpha, lp.gamma);
      level = std::max(level, e.defined ? std::abs(e.xi - xi) : 1.0);
      ++level_points;
    }
  }
  // flag set exactly when chi != 2 xi - 1; violations only in R1 (chi below) and R7 (chi above)
  bool flags = true;
  for (const auto& row : out.rows) {
    if (std::get<long long>(row[5]) == 0) continue;
    const auto& reg = std::get<std::string>(row[2]);
    const double gap = std::get<double>(row[4]) - (2.0 * std::get<double>(row[3]) - 1.0);
    const bool violated = std::get<long long>(row[7]) != 0;
    flags = flags && violated == (std::abs(gap) > 1e-12);
    if (violated) flags = flags && ((reg == "R1" && gap < 0.0) || (reg == "R7" && gap > 0.0));
  }
  out.statistics = {{"regions", counts}, {"boundary_max_gap", boundary}, {"level_max_gap", level}, {"level_points", level_points}};
  out.checks.push_back(make_check("boundary_consistency", boundary <= tol, boundary, tol));
  out.checks.push_back(make_check("level_curve_identity", level <= tol, level, tol));
  out.checks.push_back(make_check("hyperscaling_flags", flags, flags ? 1.0 : 0.0, 1.0, "R1: chi < 2xi-1; R7: chi > 2xi-1; else equality"));
  return out;
}

EntropyKind kind_from(const std::string& s) {
  if (s == "diffusive") return EntropyKind::diffusive;
  if (s == "ballistic") return EntropyKind::ballistic;
  throw ConfigError("kind must be 'diffusive' or 'ballistic'");
}

Outcome run_variational(const Context& x) {
  VariationalOptions o;
  o.ppp.alpha = get<double>(x.p, "alpha");
  o.ppp.c_minus = get<double>(x.p, "c_minus");
  o.ppp.w_min = get<double>(x.p, "w_min");
  o.ppp.x_half_width = get<double>(x.p, "x_half_width");
  o.beta = get<double>(x.p, "beta");
  o.kind = kind_from(get<std::string>(x.p, "kind"));
  o.replicas = x.replicas;
  o.seed = x.seed;
  o.threads = x.threads;
  const auto reps = variational_experiment(o);
  Outcome out;
  std::vector<double> v, vc;
  bool monotone = true;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& a = reps[r];
    out.rows.push_back({static_cast<long long>(r), static_cast<long long>(a.atoms), a.value, a.value_coarse,
                        static_cast<long long>(a.path_length)});
    v.push_back(a.value);
    vc.push_back(a.value_coarse);
    monotone = monotone && a.value >= a.value_coarse;
  }
  out.statistics = {{"value", summary_json(summarize(v))},
                    {"value_coarse", summary_json(summarize(vc))},
                    {"expected_atoms", ppp_mean_count(o.ppp)}};
  if (o.ppp.c_minus == 0.0) {
    out.checks.push_back(make_check("finer_truncation_never_lowers_optimum", monotone, monotone ? 1.0 : 0.0, 1.0));
  }
  return out;
}

Outcome run_ground_state(const Context& x) {
  const DisorderSpec spec = spec_from(x.p.at("disorder"));
  const auto grid = get<std::vector<long>>(x.p, "n_grid");
  std::vector<std::vector<GroundState>> gs(static_cast<std::size_t>(x.replicas));
  parallel_for(gs.size(), x.threads, [&](std::size_t r) {
    const DisorderField f(spec, derive_seed(x.seed, x.name, r), Window{1});
    for (long n : grid) gs[r].push_back(ground_state(f, n));
  });
  Outcome out;
  std::vector<std::pair<double, double>> samples;
  for (std::size_t r = 0; r < gs.size(); ++r) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.rows.push_back({static_cast<long long>(r), static_cast<long long>(grid[i]),
                          static_cast<long long>(gs[r][i].endpoint), gs[r][i].energy});
      samples.emplace_back(static_cast<double>(grid[i]), gs[r][i].endpoint);
    }
  }
  const auto e = transversal_exponent_estimate(samples);
  out.statistics = {{"xi_hat", e.xi}, {"xi_stderr", e.stderr_value}};
  if (!x.c.at("xi_min").is_null()) {
    const double lo = get<double>(x.c, "xi_min"), hi = get<double>(x.c, "xi_max");
    out.checks.push_back(make_check("xi_in_range", e.xi >= lo && e.xi <= hi, e.xi, lo, "xi_hat in [xi_min, xi_max]"));
  }
  return out;
}

Placement placement_from(const std::string& s) {
  if (s == "edge") return Placement::edge;
  if (s == "site") return Placement::site;
  throw ConfigError("placement must be 'edge' or 'site'");
}

Outcome run_hier_probe(const Context& x) {
  ProbeFamily f;
  f.tree = get<bool>(x.p, "tree");
  f.b = get<int>(x.p, "b");
  f.s = get<int>(x.p, "s");
  f.placement = placement_from(get<std::string>(x.p, "placement"));
  f.spec = spec_from(x.p.at("disorder"));
  ProbeOptions o;
  o.gamma = get<double>(x.p, "gamma");
  o.pool = x.replicas;
  const std::string mode = get<std::string>(x.p, "mode");
  if (mode != "population" && mode != "sampling") throw ConfigError("mode must be 'population' or 'sampling'");
  o.population = mode == "population";
  o.seed = x.seed;
  o.threads = x.threads;
  const auto betas = get<std::vector<double>>(x.p, "betas");
  const auto rows = weak_strong_probe(f, betas, get<std::vector<int>>(x.p, "n_grid"), o);
  Outcome out;
  json trends = json::array();
  for (const auto& row : rows) {
    for (const auto& c : row.cells) {
      out.rows.push_back({row.beta, static_cast<long long>(c.n), c.moment, c.stderr_value, trend_name(row.trend)});
    }
    trends.push_back({{"beta", row.beta}, {"trend", trend_name(row.trend)}});
  }
  out.statistics = {{"trends", trends}};
  const auto expect = get<std::vector<std::string>>(x.c, "expect");
  if (!expect.empty() && expect.size() != rows.size()) throw ConfigError("checks.expect must list one trend per beta");
  for (std::size_t i = 0; i < expect.size(); ++i) {
    std::ostringstream name;
    name << "trend_beta=" << rows[i].beta;
    out.checks.push_back(make_check(name.str(), trend_name(rows[i].trend) == expect[i], 0.0, 0.0,
                                    "observed " + trend_name(rows[i].trend) + ", expected " + expect[i]));
  }
  return out;
}

Outcome run_tree_population(const Context& x) {
  TreeModel m{get<int>(x.p, "d"), get<int>(x.p, "depth"), spec_from(x.p.at("disorder")), get<double>(x.p, "beta")};
  PopulationOptions o;
  o.pool = x.replicas;
  o.seed = x.seed;
  o.threads = x.threads;
  o.gamma = get<double>(x.p, "gamma");
  const auto pr = tree_population(m, o);
  Outcome out;
  for (const auto& g : pr.generations) {
    out.rows.push_back({static_cast<long long>(g.generation), g.raw_mean, g.raw_stderr, g.median, g.q10, g.q90,
                        g.frac_moment, g.frac_moment_stderr});
  }
  const int from = get<int>(x.c, "compare_from");
  if (from < 0 || from > m.depth) throw ConfigError("checks.compare_from must lie in [0, depth]");
  const double ratio = pr.generations.back().median / pr.generations[static_cast<std::size_t>(from)].median;
  const double decay = pr.generations.front().median / pr.generations.back().median;
  out.statistics = {{"median_ratio_last_over_compare_from", ratio}, {"median_decay_from_start", decay}};
  const std::string expect = get<std::string>(x.c, "expect");
  if (expect == "stable") {
    const double f = get<double>(x.c, "stable_factor");
    out.checks.push_back(make_check("median_stable", std::abs(std::log(ratio)) < std::log(f), ratio, f,
                                    "median(depth)/median(compare_from) within a factor stable_factor"));
  } else if (expect == "decay") {
    const double f = get<double>(x.c, "decay_factor");
    out.checks.push_back(make_check("median_decays", decay >= f, decay, f, "median(0)/median(depth) >= decay_factor"));
  } else if (!expect.empty()) {
    throw ConfigError("checks.expect must be '', 'stable' or 'decay'");
  }
  return out;
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = {
      {{"lognormal", "d=2 intermediate disorder: log W_n at beta_hat / sqrt(R_n)", 300,
        {{"beta_hat", 0.3}, {"n", 4096}, {"disorder", "gaussian"}, {"window_sds", 6.0}},
        {{"variance_rel_tol", 0.35}, {"mean_abs_tol", 0.1}},
        {"replica", "log_w"}},
       run_lognormal},
      {{"median_trajectory", "d=2 median of W_n along an n grid at fixed beta_hat", 100,
        {{"beta_hat", 1.2}, {"n_grid", {256, 1024, 4096}}, {"disorder", "gaussian"}, {"window_sds", 6.0}},
        {{"expect_decreasing", false}},
        {"n", "beta_n", "median_w", "median_log_w"}},
       run_median_trajectory},
      {{"free_energy", "(1/n) log W_n per replica", 100,
        {{"d", 1}, {"beta", 1.0}, {"n", 10000}, {"disorder", "bernoulli"}, {"window_sds", 0.0}},
        {{"expect_negative", false}, {"quartic_factor", 0.0}},
        {"replica", "free_energy"}},
       run_free_energy},
      {{"sup_tail", "max_k log W_k per replica and the tail bound 1/(4 K^2 t)", 10000,
        {{"d", 1}, {"beta", 1.0}, {"n_max", 1000}, {"disorder", "bernoulli"}, {"t_grid", {4.0}}},
        json::object(),
        {"replica", "log_peak"}},
       run_sup_tail},
      {{"fractional_moment", "exact E[W_n^gamma] across beta", 1,
        {{"d", 1}, {"n", 3}, {"gamma", 0.5}, {"betas", {0.0, 0.5, 1.0, 1.5}}, {"disorder", "bernoulli"}},
        {{"expect_decreasing", true}},
        {"beta", "moment"}},
       run_fractional_moment},
      {{"l2_threshold", "L2 critical inverse temperature", 1,
        {{"d", 3}, {"disorder", "gaussian"}},
        {{"reference", nullptr}, {"tol", 1e-3}},
        {"d", "beta2", "escape"}},
       run_l2_threshold},
      {{"critical_window", "critical-window inverse temperatures", 1,
        {{"n_grid", {100, 1000, 10000}}, {"theta_grid", {-1.0, 0.0, 1.0}}, {"disorder", "gaussian"}},
        {{"residual_tol", 1e-9}},
        {"n", "theta", "beta_n", "relative_residual"}},
       run_critical_window},
      {{"order_stats", "top-k values of an exact Pareto field over the box [0,n] x (-n^xi, n^xi)", 10000,
        {{"alpha", 1.5}, {"n", 512}, {"xi", 0.8}, {"k", 1}, {"u_grid", {0.5, 1.0, 2.0}}},
        {{"se_multiple", 3.0}, {"location_ks_max", 0.05}},
        {"replica", "rank", "w", "t", "x", "max_box_scaled"}},
       run_order_stats},
      {{"phase_scan", "(alpha, gamma) region and exponent table", 1,
        {{"alpha_min", 0.25}, {"alpha_max", 12.0}, {"alpha_count", 48}, {"gamma_min", 0.0}, {"gamma_max", 1.5},
         {"gamma_count", 31}, {"include_infinity", true}},
        {{"identity_tol", 1e-12}, {"identity_grid", 1000}},
        {"alpha", "gamma", "region", "xi", "chi", "defined", "conjectural", "hyperscaling_violated"}},
       run_phase_scan},
      {{"variational", "energy-entropy optimum over Poisson atoms", 100,
        {{"alpha", 1.0}, {"c_minus", 0.0}, {"w_min", 0.05}, {"x_half_width", 1.0}, {"beta", 1.0}, {"kind", "diffusive"}},
        json::object(),
        {"replica", "atoms", "value", "value_coarse", "path_length"}},
       run_variational},
      {{"ground_state", "zero-temperature endpoints and transversal exponent, d=1", 200,
        {{"n_grid", {32, 64, 128, 256}}, {"disorder", "gaussian"}},
        {{"xi_min", nullptr}, {"xi_max", nullptr}},
        {"replica", "n", "endpoint", "energy"}},
       run_ground_state},
      {{"hier_probe", "E[W_n^gamma] trends on hierarchical lattices or trees; replicas = pool size", 100000,
        {{"tree", false}, {"b", 2}, {"s", 2}, {"placement", "site"}, {"disorder", "gaussian"},
         {"betas", {0.0, 0.5}}, {"n_grid", {2, 6, 10, 14}}, {"gamma", 0.5}, {"mode", "population"}},
        {{"expect", json::array()}},
        {"beta", "n", "moment", "stderr", "trend"}},
       run_hier_probe},
      {{"tree_population", "population dynamics on the d-ary tree; replicas = pool size", 100000,
        {{"d", 2}, {"depth", 20}, {"beta", 0.8}, {"disorder", "gaussian"}, {"gamma", 0.5}},
        {{"expect", ""}, {"stable_factor", 1.25}, {"decay_factor", 10.0}, {"compare_from", 10}},
        {"generation", "raw_mean", "raw_stderr", "median", "q10", "q90", "frac_moment", "frac_stderr"}},
       run_tree_population},
  };
  return r;
}

json merge_known(const json& defaults, const json& given, const std::string& what) {
  json out = defaults;
  if (given.is_null()) return out;
  if (!given.is_object()) throw ConfigError(what + " must be an object");
  for (const auto& [k, v] : given.items()) {
    if (!defaults.contains(k)) throw ConfigError(what + ": unknown key '" + k + "'");
    out[k] = v;
  }
  return out;
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "experiment") c.experiment = v.get<std::string>();
      else if (k == "seed") {
        if (!v.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
      } else if (k == "replicas") {
        if (!v.is_number_integer() || v.get<long>() < 1) throw ConfigError("replicas must be a positive integer");
        c.replicas = v.get<long>();
      } else if (k == "threads") {
        if (!v.is_number_unsigned()) throw ConfigError("threads must be a non-negative integer");
        c.threads = v.get<unsigned>();
      }
      else if (k == "parameters") c.parameters = v;
      else if (k == "checks") c.checks = v;
      else if (k == "out") c.out_dir = v.get<std::string>();
      else throw ConfigError("config: unknown key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json Report::summary() const {
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  }
  return {{"experiment", experiment},
          {"parameters", parameters},
          {"check_settings", check_settings},
          {"seed", seed},
          {"replicas", replicas},
          {"rows", rows.size()},
          {"statistics", statistics},
          {"checks", cs},
          {"all_passed", all_passed()}};
}

std::vector<ExperimentInfo> experiments() {
  std::vector<ExperimentInfo> out;
  for (const auto& e : registry()) out.push_back(e.info);
  return out;
}

Report run_experiment(const ExperimentConfig& config) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Experiment& e) { return e.info.name == config.experiment; });
  if (it == reg.end()) throw UnknownExperiment("unknown experiment '" + config.experiment + "'");
  const ExperimentInfo& info = it->info;

  Report rep;
  rep.experiment = info.name;
  rep.seed = config.seed;
  rep.replicas = config.replicas < 0 ? info.default_replicas : config.replicas;
  if (rep.replicas < 1) throw ConfigError("replicas must be at least 1");
  rep.parameters = merge_known(info.defaults, config.parameters, "parameters");
  rep.check_settings = merge_known(info.check_defaults, config.checks, "checks");
  if (rep.parameters.contains("disorder")) rep.parameters["disorder"] = spec_json(spec_from(rep.parameters["disorder"]));
  rep.columns = info.columns;

  const Context ctx{rep.parameters, rep.check_settings, config.seed, rep.replicas, config.threads, info.name};
  Outcome out;
  try {
    out = it->run(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const UnsupportedError& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  rep.rows = std::move(out.rows);
  rep.statistics = std::move(out.statistics);
  rep.checks = std::move(out.checks);
  for (const auto& row : rep.rows) {
    if (row.size() != rep.columns.size()) throw std::logic_error(info.name + ": row does not match the declared schema");
  }
  return rep;
}

void write_csv(const Report& r, std::ostream& os) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

void write_report(const Report& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path base = fs::path(dir) / r.experiment;
  std::ofstream csv(base.string() + ".csv", std::ios::binary);
  if (!csv) throw OutputError("cannot write '" + base.string() + ".csv'");
  write_csv(r, csv);
  std::ofstream js(base.string() + ".json", std::ios::binary);
  if (!js) throw OutputError("cannot write '" + base.string() + ".json'");
  js << r.summary().dump(2) << '\n';
  if (!csv || !js) throw OutputError("write failed under '" + dir + "'");
}

}  // namespace polymer
