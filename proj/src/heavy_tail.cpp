#include "polymer/heavy_tail.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "polymer/parallel.hpp"
#include "polymer/rng.hpp"

namespace polymer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Region kRegions[] = {Region::R1, Region::R2, Region::R3, Region::R4,
                               Region::R5, Region::R6, Region::R7};

void check_point(double alpha, double gamma) {
  if (!(alpha > 0.0) || std::isnan(alpha)) throw std::domain_error("phase point needs alpha > 0");
  if (!(gamma >= 0.0) || std::isinf(gamma)) throw std::domain_error("phase point needs finite gamma >= 0");
}

Exponents with_flags(double xi, double chi) {
  Exponents e;
  e.defined = true;
  e.xi = xi;
  e.chi = chi;
  e.hyperscaling_violated = std::abs(chi - (2.0 * xi - 1.0)) > 1e-12;
  return e;
}

Exponents region_formula(Region r, double alpha, double gamma) {
  switch (r) {
    case Region::R1:
      return with_flags(0.5, 0.25 - gamma);
    case Region::R2:
    case Region::R3:
    case Region::R4:
      return collective_exponents(gamma);
    case Region::R5:
    case Region::R6: {
      Exponents e = elitist_exponents(alpha, gamma);
      e.conjectural = r == Region::R5;
      return e;
    }
    case Region::R7:
      return with_flags(1.0, 2.0 / alpha - gamma);
    case Region::boundary:
      break;
  }
  return {};
}

}  // namespace

std::string region_name(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
    case Region::R6: return "R6";
    case Region::R7: return "R7";
    case Region::boundary: return "boundary";
  }
  return "?";
}

double regime_boundary_alpha(double gamma) {
  if (!(gamma < 1.0)) throw std::domain_error("regime_boundary_alpha: gamma must be < 1");
  return (5.0 - 2.0 * gamma) / (1.0 - gamma);
}

bool in_region(Region r, double alpha, double gamma) {
  const double a = alpha, g = gamma;
  switch (r) {
    case Region::R1:
      return g > 0.25 && g >= 1.5 / a;
    case Region::R2:
      return g == 0.25 && a >= 6.0;
    case Region::R3:
      return g > 0.0 && g < 0.25 && a >= (5.0 - 2.0 * g) / (1.0 - g);
    case Region::R4:
      return g == 0.0 && a > 5.0;
    case Region::R5: {
      if (!(a > 0.5)) return false;
      double lo = std::max(0.0, 2.0 / a - 1.0);
      // the (alpha-5)/(alpha-2) term only separates R3 from R5 when alpha > 2
      if (a > 2.0) lo = std::max(lo, std::isinf(a) ? 1.0 : (a - 5.0) / (a - 2.0));
      return lo < g && g < 1.5 / a;
    }
    case Region::R6:
      return a < 2.0 && g == 2.0 / a - 1.0;
    case Region::R7:
      return a < 2.0 && g >= 0.0 && g < 2.0 / a - 1.0;
    case Region::boundary:
      break;
  }
  return false;
}

Exponents collective_exponents(double gamma) {
  return with_flags(2.0 * (1.0 - gamma) / 3.0, (1.0 - 4.0 * gamma) / 3.0);
}

Exponents elitist_exponents(double alpha, double gamma) {
  if (std::isinf(alpha)) return with_flags(0.5 * (1.0 - gamma), -gamma);
  if (!(alpha > 0.5)) throw std::domain_error("elitist_exponents: alpha must exceed 1/2");
  const double den = 2.0 * alpha - 1.0;
  return with_flags((1.0 + alpha * (1.0 - gamma)) / den, (3.0 - 2.0 * alpha * gamma) / den);
}

PhasePoint classify_region(double alpha, double gamma) {
  check_point(alpha, gamma);
  PhasePoint p;
  p.alpha = alpha;
  p.gamma = gamma;
  std::vector<Region> hits;
  for (Region r : kRegions) {
    if (in_region(r, alpha, gamma)) hits.push_back(r);
  }
  if (hits.size() == 1) {
    p.region = hits.front();
    p.exponents = region_formula(p.region, alpha, gamma);
    return p;
  }

  p.region = Region::boundary;
  const double da = std::isinf(alpha) ? 0.0 : 1e-6 * std::max(1.0, alpha);
  const double dg = 1e-6 * std::max(1.0, gamma);
  std::vector<Region> near = hits;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const double a = alpha + i * da, g = gamma + j * dg;
      if (!(a > 0.0) || g < 0.0) continue;
      for (Region r : kRegions) {
        if (in_region(r, a, g)) near.push_back(r);
      }
    }
  }
  std::sort(near.begin(), near.end());
  near.erase(std::unique(near.begin(), near.end()), near.end());
  p.adjacent = near;

  // defined on the boundary only when every neighbouring formula agrees there
  Exponents common;
  bool ok = !near.empty();
  for (Region r : near) {
    Exponents e;
    try {
      e = region_formula(r, alpha, gamma);
    } catch (const std::domain_error&) {
      ok = false;
      break;
    }
    if (!common.defined) {
      common = e;
    } else if (std::abs(e.xi - common.xi) > 1e-10 || std::abs(e.chi - common.chi) > 1e-10) {
      ok = false;
      break;
    }
    common.conjectural = common.conjectural || e.conjectural;
  }
  if (ok) p.exponents = common;
  else p.exponents.conjectural = true;
  return p;
}

Exponents exponents(double alpha, double gamma) { return classify_region(alpha, gamma).exponents; }

std::vector<LevelPoint> level_curve(double xi, int samples) {
  if (!(xi >= 0.5 && xi <= 1.0)) throw std::domain_error("level_curve: xi must lie in [1/2, 1]");
  if (samples < 1) throw std::invalid_argument("level_curve: samples must be positive");
  std::vector<LevelPoint> out;
  const double g_lo = std::max(0.0, 1.0 - 1.5 * xi);
  for (int i = 0; i < samples; ++i) {
    const double g = g_lo + (3.0 - g_lo) * i / samples;
    const double a = (1.0 + xi) / (2.0 * xi - 1.0 + g);
    if (!std::isfinite(a)) continue;
    out.push_back({a, g, false});
  }
  if (xi <= 2.0 / 3.0) {
    const double g = 1.0 - 1.5 * xi;
    const double a0 = regime_boundary_alpha(g);
    for (int i = 0; i < samples; ++i) out.push_back({a0 * (1.0 + 0.25 * i), g, true});
    out.push_back({kInf, g, true});
  }
  return out;
}

std::vector<PhasePoint> phase_scan(std::span<const double> alphas, std::span<const double> gammas) {
  std::vector<PhasePoint> out;
  out.reserve(alphas.size() * gammas.size());
  for (double a : alphas) {
    for (double g : gammas) out.push_back(classify_region(a, g));
  }
  return out;
}

double ballistic_rate(double v) {
  const double a = std::abs(v);
  if (a > 1.0) return kInf;
  if (a == 1.0) return std::numbers::ln2;
  return 0.5 * ((1.0 + a) * std::log1p(a) + (1.0 - a) * std::log1p(-a));
}

double segment_cost(double dt, double dx, EntropyKind kind) {
  if (!(dt > 0.0)) throw std::invalid_argument("segment_cost: duration must be positive");
  if (kind == EntropyKind::diffusive) return dx * dx / dt;
  return dt * ballistic_rate(dx / dt);
}

double entropy(const PolygonalPath& path, EntropyKind kind) {
  if (path.t.empty() || path.t.size() != path.x.size()) {
    throw std::invalid_argument("entropy: path needs matching, nonempty breakpoint lists");
  }
  if (path.t.front() != 0.0) throw std::invalid_argument("entropy: path must start at t = 0");
  if (path.t.back() > 1.0) throw std::invalid_argument("entropy: path runs past t = 1");
  double total = 0.0;
  for (std::size_t i = 1; i < path.t.size(); ++i) {
    if (!(path.t[i] > path.t[i - 1])) throw std::invalid_argument("entropy: times must increase strictly");
    total += segment_cost(path.t[i] - path.t[i - 1], path.x[i] - path.x[i - 1], kind);
  }
  return total;
}

double ppp_mean_count(const PppOptions& o) {
  return (1.0 + o.c_minus) * o.x_half_width * std::pow(o.w_min, -o.alpha);
}

PppSample sample_ppp(const PppOptions& o, std::uint64_t seed) {
  if (!(o.alpha > 0.0)) throw std::invalid_argument("sample_ppp: alpha must be positive");
  if (!(o.c_minus >= 0.0)) throw std::invalid_argument("sample_ppp: c_minus must be >= 0");
  if (!(o.w_min > 0.0)) throw std::invalid_argument("sample_ppp: w_min must be positive");
  if (!(o.x_half_width > 0.0)) throw std::invalid_argument("sample_ppp: x_half_width must be positive");
  if (ppp_mean_count(o) > 1e7) throw CapacityError("sample_ppp: expected atom count above 1e7");
  Stream rng(seed);
  const double unit = o.x_half_width * std::pow(o.w_min, -o.alpha);
  const long n_pos = rng.poisson(unit);
  const long n_neg = o.c_minus > 0.0 ? rng.poisson(o.c_minus * unit) : 0;
  PppSample s;
  s.atoms.reserve(static_cast<std::size_t>(n_pos + n_neg));
  for (long i = 0; i < n_pos + n_neg; ++i) {
    Atom a;
    a.w = o.w_min * std::pow(rng.uniform(), -1.0 / o.alpha);
    if (i >= n_pos) a.w = -a.w;
    a.t = rng.uniform();
    a.x = o.x_half_width * (2.0 * rng.uniform() - 1.0);
    s.atoms.push_back(a);
  }
  std::sort(s.atoms.begin(), s.atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
  return s;
}

PppSample truncate(const PppSample& sample, double w_min) {
  PppSample out;
  for (const Atom& a : sample.atoms) {
    if (std::abs(a.w) >= w_min) out.atoms.push_back(a);
  }
  return out;
}

VariationalResult variational_solver(const PppSample& sample, double beta, EntropyKind kind) {
  const auto& at = sample.atoms;
  const std::size_t k = at.size();
  for (std::size_t j = 1; j < k; ++j) {
    if (at[j].t < at[j - 1].t) throw std::invalid_argument("variational_solver: atoms must be sorted by time");
  }
  auto cost = [kind](double t0, double x0, double t1, double x1) {
    return t1 > t0 ? segment_cost(t1 - t0, x1 - x0, kind) : kInf;
  };
  std::vector<double> score(k, -kInf);
  std::vector<std::ptrdiff_t> prev(k, -1);
  for (std::size_t j = 0; j < k; ++j) {
    double best = -cost(0.0, 0.0, at[j].t, at[j].x);
    std::ptrdiff_t arg = -1;
    for (std::size_t i = 0; i < j; ++i) {
      if (score[i] == -kInf) continue;
      const double c = score[i] - cost(at[i].t, at[i].x, at[j].t, at[j].x);
      if (c > best) {
        best = c;
        arg = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (best > -kInf) {
      score[j] = beta * at[j].w + best;
      prev[j] = arg;
    }
  }
  VariationalResult r;
  std::ptrdiff_t end = -1;
  for (std::size_t j = 0; j < k; ++j) {
    if (score[j] > r.value) {
      r.value = score[j];
      end = static_cast<std::ptrdiff_t>(j);
    }
  }
  for (std::ptrdiff_t j = end; j >= 0; j = prev[static_cast<std::size_t>(j)]) {
    r.path.push_back(static_cast<std::size_t>(j));
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

std::vector<VariationalReplica> variational_experiment(const VariationalOptions& o) {
  if (o.replicas < 1) throw std::invalid_argument("variational_experiment: replicas must be positive");
  std::vector<VariationalReplica> out(static_cast<std::size_t>(o.replicas));
  parallel_for(out.size(), o.threads, [&](std::size_t r) {
    const PppSample s = sample_ppp(o.ppp, derive_seed(o.seed, "variational", r));
    const VariationalResult fine = variational_solver(s, o.beta, o.kind);
    const VariationalResult coarse = variational_solver(truncate(s, 2.0 * o.ppp.w_min), o.beta, o.kind);
    out[r] = {s.atoms.size(), fine.value, coarse.value, fine.path.size()};
  });
  return out;
}

OrderStatResult order_statistics_experiment(const OrderStatOptions& o) {
  if (!(o.alpha > 0.0)) throw std::invalid_argument("order statistics: alpha must be positive");
  if (o.n < 1) throw std::invalid_argument("order statistics: n must be positive");
  if (!(o.xi >= 0.0)) throw std::invalid_argument("order statistics: xi must be >= 0");
  if (o.k < 1) throw std::invalid_argument("order statistics: k must be positive");
  if (o.replicas < 1) throw std::invalid_argument("order statistics: replicas must be positive");

  const double nd = static_cast<double>(o.n);
  const double width = std::pow(nd, o.xi);
  OrderStatResult res;
  res.x_max = static_cast<long>(std::ceil(width)) - 1;
  res.box_size = o.n * (2 * res.x_max + 1);
  if (o.k > res.box_size) throw std::invalid_argument("order statistics: k exceeds the box size");
  const int xm = static_cast<int>(res.x_max);
  const double w_scale = std::pow(nd, -(1.0 + o.xi) / o.alpha);
  const double box_scale = std::pow(static_cast<double>(res.box_size), -1.0 / o.alpha);
  const DisorderSpec spec = DisorderSpec::pareto(o.alpha);
  const std::size_t k = static_cast<std::size_t>(o.k);

  res.top.resize(static_cast<std::size_t>(o.replicas));
  res.max_box_scaled.resize(res.top.size());
  parallel_for(res.top.size(), o.threads, [&](std::size_t r) {
    const DisorderField field(spec, derive_seed(o.seed, "orderstat", r), Window{1, 1, o.n, xm});
    // the exact Pareto value decreases in the site uniform: the k smallest uniforms win
    std::vector<double> u(k, 2.0);
    std::vector<long> ts(k, 0);
    std::vector<int> xs(k, 0);
    for (long t = 1; t <= o.n; ++t) {
      const std::uint64_t row = field.row_key(t, nullptr, 1);
      for (int x = -xm; x <= xm; ++x) {
        const double v = field.uniform_in_row(row, x);
        if (v >= u[k - 1]) continue;
        std::size_t pos = k - 1;
        while (pos > 0 && u[pos - 1] > v) {
          u[pos] = u[pos - 1];
          ts[pos] = ts[pos - 1];
          xs[pos] = xs[pos - 1];
          --pos;
        }
        u[pos] = v;
        ts[pos] = t;
        xs[pos] = x;
      }
    }
    std::vector<RescaledAtom>& top = res.top[r];
    top.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double omega = field.value(ts[j], &xs[j], 1);
      top.push_back({omega * w_scale, static_cast<double>(ts[j]) / nd, xs[j] / width});
      if (j == 0) res.max_box_scaled[r] = omega * box_scale;
    }
  });

  const double a = o.alpha;
  auto frechet = [a](double u) { return u > 0.0 ? std::exp(-std::pow(u, -a)) : 0.0; };
  res.frechet_ks = ks_statistic(res.max_box_scaled, frechet);
  for (double u : o.u_grid) {
    const long hits = std::count_if(res.max_box_scaled.begin(), res.max_box_scaled.end(),
                                    [u](double m) { return m <= u; });
    res.checks.push_back({u, proportion(hits, o.replicas), frechet(u)});
  }
  std::vector<double> lt, lx;
  for (const auto& top : res.top) {
    lt.push_back(top.front().t);
    lx.push_back(top.front().x);
  }
  res.location_ks_t = ks_statistic(lt, [](double s) { return std::clamp(s, 0.0, 1.0); });
  res.location_ks_x = ks_statistic(lx, [](double s) { return std::clamp(0.5 * (s + 1.0), 0.0, 1.0); });
  return res;
}

GroundState ground_state(const DisorderField& field, long n) {
  if (n < 0) throw std::invalid_argument("ground_state: n must be >= 0");
  if (field.dimension() != 1) throw UnsupportedError("ground_state: d = 1 only");
  GroundState gs;
  if (n == 0) return gs;
  const std::size_t width = static_cast<std::size_t>(2 * n + 3);
  const long off = n + 1;
  std::vector<double> cur(width, -kInf), next(width, -kInf);
  cur[static_cast<std::size_t>(off)] = 0.0;
  for (long t = 1; t <= n; ++t) {
    std::fill(next.begin(), next.end(), -kInf);
    const std::uint64_t row = field.row_key(t, nullptr, 1);
    for (long x = -t; x <= t; x += 2) {
      const std::size_t i = static_cast<std::size_t>(x + off);
      const int xi = static_cast<int>(x);
      next[i] = field.value_in_row(row, t, &xi, 1) + std::max(cur[i - 1], cur[i + 1]);
    }
    std::swap(cur, next);
  }
  gs.energy = -kInf;
  for (long x = -n; x <= n; x += 2) {
    const double e = cur[static_cast<std::size_t>(x + off)];
    if (e > gs.energy) {
      gs.energy = e;
      gs.endpoint = static_cast<int>(x);
    }
  }
  return gs;
}

ExponentEstimate transversal_exponent_estimate(std::span<const std::pair<double, double>> samples) {
  std::map<double, std::pair<double, long>> groups;
  for (const auto& [n, d] : samples) {
    if (!(n > 0.0)) throw std::domain_error("transversal_exponent_estimate: n must be positive");
    auto& g = groups[n];
    g.first += std::abs(d);
    ++g.second;
  }
  if (groups.size() < 2) {
    throw std::invalid_argument("transversal_exponent_estimate: degenerate design (fewer than two distinct n)");
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, g] : groups) pts.emplace_back(n, g.first / static_cast<double>(g.second));
  const LineFit f = fit_exponent(pts);
  return {f.slope, f.slope_stderr, groups.size()};
}

}  // namespace polymer
