#include "polymer/disorder.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polymer {

namespace {

// Wichura's AS241 (PPND16), relative accuracy about 1e-16
double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
             1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
             0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
             0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
             7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -z : z;
}

}  // namespace

double gaussian_quantile(double u) { return normal_quantile(u); }

void DisorderSpec::validate() const {
  switch (family) {
    case Family::gaussian:
    case Family::bernoulli:
      return;
    case Family::bounded:
      if (!(bound >= 1.0)) throw std::invalid_argument("bounded disorder needs M >= 1 for unit variance");
      return;
    case Family::pareto:
      if (!(alpha > 0.0)) throw std::invalid_argument("pareto disorder needs alpha > 0");
      if (!(c_minus >= 0.0)) throw std::invalid_argument("pareto disorder needs c_minus >= 0");
      return;
  }
}

std::vector<double> DisorderSpec::support() const {
  switch (family) {
    case Family::bernoulli:
      return {-1.0, 1.0};
    case Family::bounded:
      return {-bound, 0.0, bound};
    default:
      return {};
  }
}

std::vector<double> DisorderSpec::support_probabilities() const {
  switch (family) {
    case Family::bernoulli:
      return {0.5, 0.5};
    case Family::bounded: {
      const double p = 0.5 / (bound * bound);
      return {p, 1.0 - 2.0 * p, p};
    }
    default:
      return {};
  }
}

double DisorderSpec::sup_abs() const {
  switch (family) {
    case Family::bernoulli:
      return 1.0;
    case Family::bounded:
      return bound;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

std::string DisorderSpec::name() const {
  switch (family) {
    case Family::gaussian:
      return "gaussian";
    case Family::bernoulli:
      return "bernoulli";
    case Family::bounded:
      return "bounded";
    case Family::pareto:
      return "pareto";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "bounded") return Family::bounded;
  if (name == "pareto") return Family::pareto;
  throw std::invalid_argument("unknown disorder family '" + name + "'");
}

double log_mgf(const DisorderSpec& spec, double beta) {
  spec.validate();
  switch (spec.family) {
    case Family::gaussian:
      return 0.5 * beta * beta;
    case Family::bernoulli: {
      const double a = std::abs(beta);
      return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
    case Family::bounded: {
      const double m2 = spec.bound * spec.bound;
      return std::log1p((std::cosh(beta * spec.bound) - 1.0) / m2);
    }
    case Family::pareto:
      break;
  }
  if (beta == 0.0) return 0.0;
  throw UnsupportedError("log_mgf: heavy-tailed disorder has no exponential moments");
}

double lambda2(const DisorderSpec& spec, double beta) {
  return log_mgf(spec, 2.0 * beta) - 2.0 * log_mgf(spec, beta);
}

double sigma2(const DisorderSpec& spec, double beta) {
  return std::expm1(lambda2(spec, beta));
}

double quantile_scale(const DisorderSpec& spec, double t) {
  if (spec.family != Family::pareto) {
    throw UnsupportedError("quantile_scale: defined for the heavy-tailed family only");
  }
  spec.validate();
  if (!(t >= 1.0)) throw std::domain_error("quantile_scale: t must be >= 1");
  const double p_plus = 1.0 / (1.0 + spec.c_minus);
  // P(omega > x) = p_plus x^{-alpha} for x >= 1, and the right tail puts no mass below 1
  const double x = std::pow(p_plus * t, 1.0 / spec.alpha);
  return x < 1.0 ? 1.0 : x;
}

bool Window::contains(long t, std::span<const int> x) const {
  if (t < t_min || t > t_max) return false;
  for (int v : x) {
    if (v < -radius || v > radius) return false;
  }
  return true;
}

std::uint64_t site_key(long t, std::span<const int> x) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(t) ^ 0x5bd1e9955bd1e995ULL);
  for (int v : x) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
  return h;
}

DisorderField::DisorderField(DisorderSpec spec, std::uint64_t seed, Window window)
    : spec_(spec), seed_(seed), seed_mix_(mix64(seed)), window_(window) {
  spec_.validate();
  if (window_.dimension < 1 || window_.dimension > kMaxDim) {
    throw std::invalid_argument("DisorderField: unsupported dimension");
  }
}

double DisorderField::draw(std::uint64_t h, const Tilt* tilt) const {
  const double u = to_unit_open(h);
  switch (spec_.family) {
    case Family::gaussian: {
      const double z = normal_quantile(u);
      return tilt ? z + tilt->beta : z;
    }
    case Family::bernoulli: {
      double p_plus = 0.5;
      if (tilt) p_plus = 1.0 / (1.0 + std::exp(-2.0 * tilt->beta));
      return u < p_plus ? 1.0 : -1.0;
    }
    case Family::bounded: {
      const double m = spec_.bound;
      double p_plus = 0.5 / (m * m);
      double p_minus = p_plus;
      if (tilt) {
        const double z = std::exp(log_mgf(spec_, tilt->beta));
        p_plus *= std::exp(tilt->beta * m) / z;
        p_minus *= std::exp(-tilt->beta * m) / z;
      }
      if (u < p_plus) return m;
      if (u < p_plus + p_minus) return -m;
      return 0.0;
    }
    case Family::pareto: {
      const double mag = std::pow(u, -1.0 / spec_.alpha);
      if (spec_.c_minus == 0.0) return mag;
      const double u2 = to_unit_open(mix64(h ^ 0xd6e8feb86659fd93ULL));
      return u2 * (1.0 + spec_.c_minus) < 1.0 ? mag : -mag;
    }
  }
  return 0.0;
}

double DisorderField::base_value(long t, const int* x, int dim) const {
  std::uint64_t h = hash_combine(seed_mix_, static_cast<std::uint64_t>(t));
  for (int a = 0; a < dim; ++a) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(x[a])));
  return draw(h, nullptr);
}

double DisorderField::value(long t, const int* x, int dim) const {
  std::uint64_t h = hash_combine(seed_mix_, static_cast<std::uint64_t>(t));
  for (int a = 0; a < dim; ++a) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(x[a])));
  if (tilt_) {
    const auto key = site_key(t, std::span<const int>(x, static_cast<std::size_t>(dim)));
    if (auto it = tilt_->fixed.find(key); it != tilt_->fixed.end()) return it->second;
    if (tilt_->sites.contains(key)) return draw(h, tilt_.get());
  }
  return draw(h, nullptr);
}

std::uint64_t DisorderField::row_key(long t, const int* x, int dim) const {
  std::uint64_t h = hash_combine(seed_mix_, static_cast<std::uint64_t>(t));
  for (int a = 0; a + 1 < dim; ++a) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(x[a])));
  return h;
}

double DisorderField::value_in_row(std::uint64_t row, long t, const int* x, int dim) const {
  if (tilt_) return value(t, x, dim);
  return draw(hash_combine(row, static_cast<std::uint64_t>(static_cast<std::int64_t>(x[dim - 1]))), nullptr);
}

DisorderField sample_field(const DisorderSpec& spec, const Window& window, std::uint64_t seed) {
  if (window.t_max < window.t_min || window.radius < 0 || window.dimension < 1 ||
      window.dimension > kMaxDim) {
    throw std::invalid_argument("sample_field: empty window");
  }
  return DisorderField(spec, seed, window);
}

DisorderField tilt_along_path(const DisorderField& field, double beta,
                              std::span<const std::pair<long, Point>> path) {
  if (!field.spec().has_exponential_moments()) {
    throw UnsupportedError("tilt_along_path: heavy-tailed disorder cannot be exponentially tilted");
  }
  auto tilt = field.tilt_ ? std::make_shared<DisorderField::Tilt>(*field.tilt_)
                         : std::make_shared<DisorderField::Tilt>();
  tilt->beta = beta;
  tilt->sites.clear();
  for (const auto& [t, x] : path) tilt->sites.insert(site_key(t, x));
  DisorderField out = field;
  out.tilt_ = std::move(tilt);
  return out;
}

DisorderField with_site_values(const DisorderField& field,
                               std::span<const std::pair<std::pair<long, Point>, double>> values) {
  auto mod = field.tilt_ ? std::make_shared<DisorderField::Tilt>(*field.tilt_)
                        : std::make_shared<DisorderField::Tilt>();
  for (const auto& [site, v] : values) {
    if (static_cast<int>(site.second.size()) != field.dimension()) {
      throw std::invalid_argument("with_site_values: site dimension does not match the field");
    }
    mod->fixed[site_key(site.first, site.second)] = v;
  }
  DisorderField out = field;
  out.tilt_ = std::move(mod);
  return out;
}

}  // namespace polymer
