#include "polymer/rng.hpp"

#include <cmath>
#include <numbers>

namespace polymer {

std::uint64_t hash_string(std::string_view s) {
  // FNV-1a, then finalised
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment, std::uint64_t replica) {
  return hash_combine(hash_combine(mix64(master), hash_string(experiment)), replica);
}

double Stream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t t = (0 - n) % n;
    while (lo < t) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

long Stream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    // inversion by sequential search
    const double l = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }
  // split into independent pieces small enough for inversion
  const long pieces = static_cast<long>(std::ceil(mean / 20.0));
  const double part = mean / static_cast<double>(pieces);
  long total = 0;
  for (long i = 0; i < pieces; ++i) total += poisson(part);
  return total;
}

}  // namespace polymer
