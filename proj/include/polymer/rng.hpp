#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace polymer {

// SplitMix64 finaliser; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2)));
}

/// Uniform double in the open interval (0, 1) from the top 53 bits.
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

std::uint64_t hash_string(std::string_view s);

/// Seed of replica r for an experiment: a pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment, std::uint64_t replica);

/// Sequential SplitMix64 stream; satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return to_unit_open((*this)()); }
  double normal();
  /// Index uniform in [0, n).
  std::uint64_t below(std::uint64_t n);
  long poisson(double mean);

 private:
  std::uint64_t state_;
};

}  // namespace polymer
