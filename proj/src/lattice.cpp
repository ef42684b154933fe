#include "polymer/lattice.hpp"

#include <atomic>
#include <string>

namespace polymer {

namespace {
std::atomic<std::size_t> g_budget{std::size_t{1} << 28};  // 2 GiB of doubles
}

std::size_t memory_budget_doubles() { return g_budget.load(); }
void set_memory_budget_doubles(std::size_t n) { g_budget.store(n); }

Box::Box(int dim, int radius) : dim_(dim), radius_(radius) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("Box: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (radius < 0) throw std::invalid_argument("Box: negative radius");
  const std::size_t side = static_cast<std::size_t>(2 * radius + 3);
  std::size_t total = 1;
  for (int a = dim - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = static_cast<std::ptrdiff_t>(total);
    if (total > memory_budget_doubles() / side) {
      throw CapacityError("Box: grid of side " + std::to_string(side) + " in dimension " +
                          std::to_string(dim) + " exceeds the memory budget");
    }
    total *= side;
  }
  size_ = total;
  std::size_t o = 0;
  for (int a = 0; a < dim; ++a) o += static_cast<std::size_t>(radius + 1) * static_cast<std::size_t>(stride_[static_cast<std::size_t>(a)]);
  origin_ = o;
}

bool Box::contains(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  for (int v : x) {
    if (v < -radius_ || v > radius_) return false;
  }
  return true;
}

std::size_t Box::index(std::span<const int> x) const {
  if (!contains(x)) throw std::out_of_range("Box::index: point outside box");
  std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(origin_);
  for (int a = 0; a < dim_; ++a) idx += x[static_cast<std::size_t>(a)] * stride_[static_cast<std::size_t>(a)];
  return static_cast<std::size_t>(idx);
}

Point Box::point(std::size_t idx) const {
  Point x(static_cast<std::size_t>(dim_));
  std::ptrdiff_t rem = static_cast<std::ptrdiff_t>(idx);
  for (int a = 0; a < dim_; ++a) {
    const std::ptrdiff_t st = stride_[static_cast<std::size_t>(a)];
    x[static_cast<std::size_t>(a)] = static_cast<int>(rem / st) - (radius_ + 1);
    rem %= st;
  }
  return x;
}

int l1_norm(std::span<const int> x) {
  int s = 0;
  for (int v : x) s += std::abs(v);
  return s;
}

bool parity_ok(std::span<const int> x, long k) {
  const long n = l1_norm(x);
  return n <= k && (k - n) % 2 == 0;
}

void walk_step(const Box& box, std::span<const double> in, std::span<double> out, long k,
               int limit) {
  const int d = box.dim();
  const double inv = 1.0 / (2.0 * d);
  const double* src = in.data();
  double* dst = out.data();
  if (d == 1) {
    for_each_cone_site(box, k, limit, [&](std::size_t i, const auto&) {
      dst[i] = 0.5 * (src[i - 1] + src[i + 1]);
    });
    return;
  }
  for_each_cone_site(box, k, limit, [&](std::size_t i, const auto&) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      const std::ptrdiff_t st = box.stride(a);
      s += src[i - static_cast<std::size_t>(st)] + src[i + static_cast<std::size_t>(st)];
    }
    dst[i] = s * inv;
  });
}

}  // namespace polymer
