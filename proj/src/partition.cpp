#include "polymer/partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace polymer {

SiteWeight::SiteWeight(const DisorderSpec& spec, double beta, WeightMode mode)
    : beta_(beta), mode_(mode) {
  if (mode == WeightMode::normalized) {
    if (!spec.has_exponential_moments() && beta != 0.0) {
      throw UnsupportedError("normalised partition function needs exponential moments");
    }
    shift_ = spec.has_exponential_moments() ? log_mgf(spec, beta) : 0.0;
  }
  auto sup = spec.support();
  if (!sup.empty()) {
    discrete_ = true;
    n_support_ = sup.size();
    for (std::size_t i = 0; i < sup.size(); ++i) {
      support_[i] = sup[i];
      weight_[i] = slow(sup[i]);
    }
  }
}

double SiteWeight::slow(double omega) const {
  switch (mode_) {
    case WeightMode::normalized:
      return std::exp(beta_ * omega - shift_);
    case WeightMode::raw:
      return std::exp(beta_ * omega);
    case WeightMode::product_form:
      return 1.0 + beta_ * omega;
  }
  return 0.0;
}

int window_limit(double window_sds, long k, int dim) {
  if (window_sds <= 0.0) return static_cast<int>(k);
  const double r = std::ceil(window_sds * std::sqrt(static_cast<double>(k) / dim)) + 2.0;
  return static_cast<int>(std::min<double>(r, static_cast<double>(k)));
}

double PartitionRun::W(long k) const { return std::exp(log_W(k)); }

std::span<const double> PartitionRun::normalized_slice(long k) const {
  if (k < 0 || k > horizon) throw std::out_of_range("PartitionRun: time out of range");
  if (all_slices) return slices.at(static_cast<std::size_t>(k));
  if (k != horizon) {
    throw std::logic_error("PartitionRun: slice " + std::to_string(k) +
                           " was not kept (set RunOptions::keep_slices)");
  }
  return slices.back();
}

double PartitionRun::mass_at(long k, std::span<const int> rel) const {
  if (!box.contains(rel) || !parity_ok(rel, k)) return 0.0;
  return W(k) * normalized_slice(k)[box.index(rel)];
}

void PartitionRun::write_sequence_csv(std::ostream& os) const {
  os << "k,value\n";
  os.precision(17);
  for (long k = 0; k <= horizon; ++k) os << k << ',' << W(k) << '\n';
}

namespace {

// Site weight along a row, bypassing the general lookup for untilted discrete and
// gaussian fields; values agree bit for bit with weight(field.value(...)).
class RowWeight {
 public:
  RowWeight(const DisorderField& field, const SiteWeight& weight) : field_(&field), weight_(&weight) {
    if (field.has_modifiers()) return;
    switch (field.spec().family) {
      case Family::bernoulli:
        kind_ = Kind::discrete;
        w1_ = weight(1.0);
        w2_ = w3_ = weight(-1.0);
        break;
      case Family::bounded: {
        kind_ = Kind::discrete;
        const double m = field.spec().bound;
        cut1_ = 0.5 / (m * m);
        cut2_ = 2.0 * cut1_;
        w1_ = weight(m);
        w2_ = weight(-m);
        w3_ = weight(0.0);
        break;
      }
      case Family::gaussian:
        kind_ = Kind::gaussian;
        break;
      default:
        break;
    }
  }

  /// Calls body(w) with a callable w(row, t, x, x_last) specialised to this field, so the
  /// family dispatch happens once per sweep instead of once per site.
  template <class Body>
  void dispatch(Body&& body) const {
    switch (kind_) {
      case Kind::discrete:
        // constants by value: stores into the slices cannot alias them
        body([f = field_, c1 = cut1_, c2 = cut2_, w1 = w1_, w2 = w2_, w3 = w3_](std::uint64_t row, long, const int*,
                                                                              int xl) {
          const double r = f->uniform_in_row(row, xl);
          return r < c1 ? w1 : (r < c2 ? w2 : w3);
        });
        return;
      case Kind::gaussian:
        body([this](std::uint64_t row, long, const int*, int xl) { return gaussian(row, xl); });
        return;
      case Kind::general:
        body([this, d = field_->dimension()](std::uint64_t row, long t, const int* x, int) {
          return general(row, t, x, d);
        });
        return;
    }
  }

 private:
  double discrete(std::uint64_t row, int xl) const {
    const double r = field_->uniform_in_row(row, xl);
    return r < cut1_ ? w1_ : (r < cut2_ ? w2_ : w3_);
  }
  double gaussian(std::uint64_t row, int xl) const {
    return (*weight_)(gaussian_quantile(field_->uniform_in_row(row, xl)));
  }
  double general(std::uint64_t row, long t, const int* x, int d) const {
    return (*weight_)(field_->value_in_row(row, t, x, d));
  }

 private:
  enum class Kind { general, discrete, gaussian };
  const DisorderField* field_;
  const SiteWeight* weight_;
  Kind kind_ = Kind::general;
  double cut1_ = 0.5, cut2_ = 1.0, w1_ = 0.0, w2_ = 0.0, w3_ = 0.0;
};

Point resolve_start(const DisorderField& field, const Point& start) {
  const int d = field.dimension();
  if (start.empty()) return Point(static_cast<std::size_t>(d), 0);
  if (static_cast<int>(start.size()) != d) {
    throw std::invalid_argument("start point dimension does not match the field");
  }
  return start;
}

double lookup(const Box& box, std::span<const double> v, std::span<const int> x) {
  return box.contains(x) ? v[box.index(x)] : 0.0;
}

}  // namespace

PartitionRun forward_partition(const DisorderField& field, double beta, long horizon,
                               long start_time, const Point& start, const RunOptions& options) {
  if (horizon < 0) throw std::invalid_argument("forward_partition: negative horizon");
  const int d = field.dimension();
  const Point x0 = resolve_start(field, start);
  const SiteWeight weight(field.spec(), beta, options.mode);
  const RowWeight site(field, weight);

  PartitionRun run;
  run.beta = beta;
  run.mode = options.mode;
  run.dimension = d;
  run.horizon = horizon;
  run.start_time = start_time;
  run.start = x0;
  run.field_seed = field.seed();
  const int radius = std::max(1, window_limit(options.window_sds, horizon, d));
  run.box = Box(d, radius);
  const Box& box = run.box;
  if (options.keep_slices &&
      box.size() > memory_budget_doubles() / static_cast<std::size_t>(horizon + 1)) {
    throw CapacityError("forward_partition: keeping all slices exceeds the memory budget");
  }

  std::vector<double> cur(box.size(), 0.0);
  std::vector<double> nxt(box.size(), 0.0);
  cur[box.origin()] = 1.0;
  run.log_mass.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  run.all_slices = options.keep_slices;
  if (options.keep_slices) run.slices.push_back(cur);

  bool origin_start = true;
  for (int v : x0) origin_start = origin_start && v == 0;
  std::array<int, kMaxDim> abs{};
  const double inv = 1.0 / (2.0 * d);
  double raw_log = 0.0;  // log of the running normalisation in linear mode

  for (long k = 1; k <= horizon; ++k) {
    const long t = start_time + k;
    const int lim = window_limit(options.window_sds, k, d);
    double total = 0.0;
    const double* src = cur.data();
    double* dst = nxt.data();
    site.dispatch([&](auto&& site) {
      if (d == 1) {
        const std::uint64_t row = field.row_key(t, nullptr, 1);
        for_each_cone_site(box, k, lim, [&](std::size_t i, const auto& x) {
          const int a = origin_start ? x[0] : x[0] + x0[0];
          const double u = site(row, t, &a, a) * 0.5 * (src[i - 1] + src[i + 1]);
          dst[i] = u;
          total += u;
        });
      } else {
        const auto last = static_cast<std::size_t>(d - 1);
        const std::ptrdiff_t st_last = box.stride(d - 1);
        std::array<std::size_t, kMaxDim> st{};
        for (int a = 0; a < d; ++a) st[static_cast<std::size_t>(a)] = static_cast<std::size_t>(box.stride(a));
        for_each_cone_row(box, k, lim, [&](std::ptrdiff_t base, const auto& x, int lo, int hi) {
          for (std::size_t a = 0; a < last; ++a) abs[a] = x[a] + x0[a];
          const std::uint64_t row = field.row_key(t, abs.data(), d);
          if (d == 2) {
            const std::size_t s0 = st[0], s1 = st[1];
            const int off = x0[1];
            double acc = 0.0;
            for (int v = lo; v <= hi; v += 2) {
              const auto i = static_cast<std::size_t>(base + v * st_last);
              const double s = (src[i - s0] + src[i + s0]) + (src[i - s1] + src[i + s1]);
              abs[1] = v + off;
              const double u = site(row, t, abs.data(), abs[1]) * s * inv;
              dst[i] = u;
              acc += u;
            }
            total += acc;
            return;
          }
          for (int v = lo; v <= hi; v += 2) {
            const auto i = static_cast<std::size_t>(base + v * st_last);
            double s = 0.0;
            for (std::size_t a = 0; a <= last; ++a) s += src[i - st[a]] + src[i + st[a]];
            abs[last] = v + x0[last];
            const double u = site(row, t, abs.data(), abs[last]) * s * inv;
            dst[i] = u;
            total += u;
          }
        });
      }
    });
    if (options.log_space) {
      if (!(total > 0.0) || !std::isfinite(total)) {
        // degenerate weights (product form at omega = -1/beta, or overflow)
        run.log_mass[static_cast<std::size_t>(k)] = total > 0.0 ? INFINITY : -INFINITY;
        for (long j = k + 1; j <= horizon; ++j) run.log_mass[static_cast<std::size_t>(j)] = run.log_mass[static_cast<std::size_t>(k)];
        std::swap(cur, nxt);
        if (options.keep_slices) {
          for (long j = k; j <= horizon; ++j) run.slices.push_back(cur);
        }
        break;
      }
      const double scale = 1.0 / total;
      for_each_cone_site(box, k, lim, [&](std::size_t i, const auto&) { dst[i] *= scale; });
      // at beta = 0 every weight is 1 and W_k = 1 exactly
      const double inc = beta == 0.0 ? 0.0 : std::log(total);
      run.log_mass[static_cast<std::size_t>(k)] = run.log_mass[static_cast<std::size_t>(k - 1)] + inc;
    } else {
      raw_log = std::log(total);
      run.log_mass[static_cast<std::size_t>(k)] = raw_log;
    }
    std::swap(cur, nxt);
    if (options.keep_slices) {
      if (options.log_space) {
        run.slices.push_back(cur);
      } else {
        std::vector<double> s(cur);
        for (double& v : s) v /= total;
        run.slices.push_back(std::move(s));
      }
    }
  }
  if (!options.keep_slices) {
    if (!options.log_space && horizon > 0) {
      const double total = std::exp(raw_log);
      for (double& v : cur) v /= total;
    }
    run.slices.push_back(std::move(cur));
  }
  return run;
}

PointToPointSlice point_to_point(const DisorderField& field, double beta, long m, long n,
                                 const Point& x, const Point& y, WeightMode mode) {
  if (!(m < n)) throw std::invalid_argument("point_to_point: need m < n");
  const int d = field.dimension();
  const Point xs = resolve_start(field, x);
  const Point ys = resolve_start(field, y);
  Point rel(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) rel[static_cast<std::size_t>(a)] = ys[static_cast<std::size_t>(a)] - xs[static_cast<std::size_t>(a)];
  PointToPointSlice out;
  if (!parity_ok(rel, n - m)) return out;

  RunOptions opt;
  opt.mode = mode;
  const auto run = forward_partition(field, beta, n - m - 1, m, xs, opt);
  const auto mu = run.normalized_slice(n - m - 1);
  double s = 0.0;
  Point nb = rel;
  for (int a = 0; a < d; ++a) {
    for (int sign : {-1, 1}) {
      nb[static_cast<std::size_t>(a)] = rel[static_cast<std::size_t>(a)] + sign;
      s += lookup(run.box, mu, nb);
    }
    nb[static_cast<std::size_t>(a)] = rel[static_cast<std::size_t>(a)];
  }
  s *= run.W(n - m - 1) / (2.0 * d);
  const SiteWeight weight(field.spec(), beta, mode);
  out.open = s;
  out.closed = s * weight(field(n, ys));
  return out;
}

double check_linearity(const DisorderField& field, double beta, long n, long m) {
  if (n < 1 || m < 1) throw std::invalid_argument("check_linearity: need n, m >= 1");
  const double total = forward_partition(field, beta, n + m).W(n + m);
  const auto head = forward_partition(field, beta, n);
  const auto mu = head.normalized_slice(n);
  const double wn = head.W(n);
  double acc = 0.0;
  for_each_cone_site(head.box, n, head.box.radius(), [&](std::size_t i, const auto& x) {
    if (mu[i] == 0.0) return;
    Point start(x.begin(), x.begin() + head.dimension);
    const double tail = forward_partition(field, beta, m, n, start).W(m);
    acc += wn * mu[i] * tail;
  });
  return std::abs(total - acc) / total;
}

double EndpointLaw::at(std::span<const int> x) const {
  if (!box.contains(x) || !parity_ok(x, time)) return 0.0;
  return mass[box.index(x)];
}

double EndpointLaw::total() const {
  double s = 0.0;
  for (double v : mass) s += v;
  return s;
}

void EndpointLaw::write_csv(std::ostream& os) const {
  for (int a = 1; a <= box.dim(); ++a) os << 'x' << a << ',';
  os << "mass\n";
  os.precision(17);
  for_each_cone_site(box, time, box.radius(), [&](std::size_t i, const auto& x) {
    if (mass[i] == 0.0) return;
    for (int a = 0; a < box.dim(); ++a) os << x[static_cast<std::size_t>(a)] << ',';
    os << mass[i] << '\n';
  });
}

EndpointLaw endpoint_law(const PartitionRun& run, long k) {
  if (k < 0 || k > run.horizon) throw std::out_of_range("endpoint_law: k exceeds horizon");
  const double lw = run.log_W(k);
  if (!std::isfinite(lw)) throw std::domain_error("endpoint_law: W_k is zero or not finite");
  EndpointLaw law;
  law.box = run.box;
  law.time = k;
  auto s = run.normalized_slice(k);
  law.mass.assign(s.begin(), s.end());
  return law;
}

OverlapValue overlap_In(const DisorderField& field, double beta, long n) {
  if (n < 1) throw std::invalid_argument("overlap_In: n must be >= 1");
  const int d = field.dimension();
  const auto run = forward_partition(field, beta, n - 1);
  const auto mu = run.normalized_slice(n - 1);
  const Box big(d, static_cast<int>(n + 1));
  std::vector<double> m0(big.size(), 0.0);
  for_each_cone_site(run.box, n - 1, run.box.radius(), [&](std::size_t i, const auto& x) {
    m0[big.index(std::span<const int>(x.data(), static_cast<std::size_t>(d)))] = mu[i];
  });
  std::vector<double> rho(big.size(), 0.0);
  std::vector<double> two(big.size(), 0.0);
  walk_step(big, m0, rho, n, big.radius());
  walk_step(big, rho, two, n + 1, big.radius());

  OverlapValue out;
  for_each_cone_site(big, n, big.radius(), [&](std::size_t i, const auto&) {
    out.value += rho[i] * rho[i];
  });
  for_each_cone_site(big, n - 1, big.radius(), [&](std::size_t i, const auto&) {
    out.two_replica += m0[i] * two[i];
  });
  return out;
}

double pinning_partition(std::span<const Point> path, const DisorderSpec& spec, double beta) {
  const long n = static_cast<long>(path.size());
  if (n == 0) return 1.0;
  const int d = static_cast<int>(path.front().size());
  Point prev(static_cast<std::size_t>(d), 0);
  for (const auto& p : path) {
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("pinning_partition: ragged path");
    int dist = 0;
    for (int a = 0; a < d; ++a) dist += std::abs(p[static_cast<std::size_t>(a)] - prev[static_cast<std::size_t>(a)]);
    if (dist != 1) throw std::invalid_argument("pinning_partition: path is not a nearest-neighbour walk");
    prev = p;
  }
  const double boost = std::exp(lambda2(spec, beta));
  const Box box(d, static_cast<int>(n));
  std::vector<double> cur(box.size(), 0.0);
  std::vector<double> nxt(box.size(), 0.0);
  cur[box.origin()] = 1.0;
  for (long i = 1; i <= n; ++i) {
    walk_step(box, cur, nxt, i, box.radius());
    nxt[box.index(path[static_cast<std::size_t>(i - 1)])] *= boost;
    std::swap(cur, nxt);
  }
  double s = 0.0;
  for_each_cone_site(box, n, box.radius(), [&](std::size_t i, const auto&) { s += cur[i]; });
  return s;
}

double free_energy_estimate(const DisorderField& field, double beta, long n,
                            const RunOptions& options) {
  if (n < 1) throw std::invalid_argument("free_energy_estimate: n must be >= 1");
  RunOptions opt = options;
  opt.log_space = true;
  opt.keep_slices = false;
  return forward_partition(field, beta, n, 0, {}, opt).log_W(n) / static_cast<double>(n);
}

StartField backward_partition(const DisorderField& field, double beta, long t0, long t1,
                              int radius, WeightMode mode) {
  if (t1 < t0) throw std::invalid_argument("backward_partition: t1 < t0");
  if (radius < 0) throw std::invalid_argument("backward_partition: negative radius");
  const int d = field.dimension();
  const long n = t1 - t0;
  const SiteWeight weight(field.spec(), beta, mode);
  const RowWeight site(field, weight);
  const Box box(d, radius + static_cast<int>(n));
  std::vector<double> v(box.size(), 0.0);
  std::vector<double> a(box.size(), 0.0);
  for_each_box_site(box, box.radius(), [&](std::size_t i, const auto&) { v[i] = 1.0; });
  double log_offset = 0.0;
  const double inv = 1.0 / (2.0 * d);
  const auto last = static_cast<std::size_t>(d - 1);
  const std::ptrdiff_t st_last = box.stride(d - 1);
  std::array<std::size_t, kMaxDim> st{};
  for (int ax = 0; ax < d; ++ax) st[static_cast<std::size_t>(ax)] = static_cast<std::size_t>(box.stride(ax));
  std::array<int, kMaxDim> y{};
  // only sites within l1 distance (k - t0) of the start cube can reach it
  for (long k = t1 - 1; k >= t0; --k) {
    const int j = static_cast<int>(k + 1 - t0);
    site.dispatch([&](auto&& site) {
      for_each_dilated_row(box, radius, j, [&](std::ptrdiff_t base, const auto& x, int lo, int hi) {
        for (std::size_t ax = 0; ax < last; ++ax) y[ax] = x[ax];
        const std::uint64_t row = field.row_key(k + 1, y.data(), d);
        for (int u = lo; u <= hi; ++u) {
          const auto i = static_cast<std::size_t>(base + u * st_last);
          y[last] = u;
          a[i] = site(row, k + 1, y.data(), u) * v[i];
        }
      });
    });
    double peak = 0.0;
    for_each_dilated_row(box, radius, j - 1, [&](std::ptrdiff_t base, const auto&, int lo, int hi) {
      for (int u = lo; u <= hi; ++u) {
        const auto i = static_cast<std::size_t>(base + u * st_last);
        double s = 0.0;
        for (std::size_t ax = 0; ax <= last; ++ax) s += a[i - st[ax]] + a[i + st[ax]];
        v[i] = s * inv;
        peak = std::max(peak, v[i]);
      }
    });
    // sites further out are stale from here on; they are never read again
    if (peak > 0.0 && (peak > 1e100 || peak < 1e-100)) {
      for_each_dilated_row(box, radius, j - 1, [&](std::ptrdiff_t base, const auto&, int lo, int hi) {
        for (int u = lo; u <= hi; ++u) v[static_cast<std::size_t>(base + u * st_last)] /= peak;
      });
      log_offset += std::log(peak);
    }
  }
  StartField out;
  out.box = Box(d, radius);
  out.values.assign(out.box.size(), 0.0);
  out.log_scale = log_offset;
  for_each_box_site(out.box, radius, [&](std::size_t i, const auto& x) {
    out.values[i] = v[box.index(std::span<const int>(x.data(), static_cast<std::size_t>(d)))];
  });
  return out;
}

}  // namespace polymer
