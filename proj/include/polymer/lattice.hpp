#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "polymer/errors.hpp"

namespace polymer {

inline constexpr int kMaxDim = 6;

using Point = std::vector<int>;


/// Dense storage for the cube [-radius, radius]^d, padded by one zero cell on
/// every side so nearest-neighbour reads at the rim stay inside the buffer.
class Box {
 public:
  Box() = default;
  Box(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  std::size_t size() const { return size_; }
  std::ptrdiff_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
  std::size_t origin() const { return origin_; }

  bool contains(std::span<const int> x) const;
  std::size_t index(std::span<const int> x) const;
  Point point(std::size_t idx) const;

 private:
  int dim_ = 0;
  int radius_ = 0;
  std::size_t size_ = 0;
  std::size_t origin_ = 0;
  std::array<std::ptrdiff_t, kMaxDim> stride_{};
};

/// Memory budget (number of doubles) that tables and grids refuse to exceed.
std::size_t memory_budget_doubles();
void set_memory_budget_doubles(std::size_t n);

int l1_norm(std::span<const int> x);

/// True when x is reachable by the simple walk at time k.
bool parity_ok(std::span<const int> x, long k);

namespace detail {

template <class F>
void cone_recurse(const Box& box, int axis, int budget, int limit, std::ptrdiff_t base,
                  std::array<int, kMaxDim>& x, F& f) {
  const int last = box.dim() - 1;
  const std::ptrdiff_t st = box.stride(axis);
  if (axis == last) {
    int m = budget < limit ? budget : limit;
    // x_last must share the parity of the remaining budget
    int start = ((m - budget) % 2 == 0) ? -m : -(m - 1);
    for (int v = start; v <= m; v += 2) {
      x[static_cast<std::size_t>(axis)] = v;
      f(static_cast<std::size_t>(base + v * st), x);
    }
    return;
  }
  int m = budget < limit ? budget : limit;
  for (int v = -m; v <= m; ++v) {
    x[static_cast<std::size_t>(axis)] = v;
    cone_recurse(box, axis + 1, budget - std::abs(v), limit, base + v * st, x, f);
  }
}

template <class F>
void cone_rows(const Box& box, int axis, int budget, int limit, std::ptrdiff_t base,
               std::array<int, kMaxDim>& x, F& f) {
  const int last = box.dim() - 1;
  if (axis == last) {
    int m = budget < limit ? budget : limit;
    int start = ((m - budget) % 2 == 0) ? -m : -(m - 1);
    if (start <= m) f(base, x, start, m);
    return;
  }
  const std::ptrdiff_t st = box.stride(axis);
  int m = budget < limit ? budget : limit;
  for (int v = -m; v <= m; ++v) {
    x[static_cast<std::size_t>(axis)] = v;
    cone_rows(box, axis + 1, budget - std::abs(v), limit, base + v * st, x, f);
  }
}

template <class F>
void dilated_rows(const Box& box, int axis, int r, int budget, std::ptrdiff_t base,
                  std::array<int, kMaxDim>& x, F& f) {
  const int m = std::min(r + budget, box.radius());
  if (axis == box.dim() - 1) {
    f(base, x, -m, m);
    return;
  }
  const std::ptrdiff_t st = box.stride(axis);
  for (int v = -m; v <= m; ++v) {
    x[static_cast<std::size_t>(axis)] = v;
    const int over = std::abs(v) > r ? std::abs(v) - r : 0;
    dilated_rows(box, axis + 1, r, budget - over, base + v * st, x, f);
  }
}

}  // namespace detail

/// Visits every site x with |x|_1 <= k, |x|_1 = k (mod 2) and max_i |x_i| <= limit,
/// calling f(flat_index, coords).
template <class F>
void for_each_cone_site(const Box& box, long k, int limit, F&& f) {
  std::array<int, kMaxDim> x{};
  int budget = static_cast<int>(k < box.radius() * box.dim() ? k : box.radius() * box.dim());
  // keep the parity of k even when the budget is clipped by the box
  if ((k - budget) % 2 != 0) --budget;
  if (limit > box.radius()) limit = box.radius();
  detail::cone_recurse(box, 0, budget, limit, static_cast<std::ptrdiff_t>(box.origin()), x, f);
}

/// Same sites as for_each_cone_site, one row of the last axis at a time:
/// f(row_base, coords, lo, hi) covers last coordinate lo, lo + 2, ..., hi at flat index
/// row_base + v * stride(dim - 1); coords holds the leading coordinates.
template <class F>
void for_each_cone_row(const Box& box, long k, int limit, F&& f) {
  std::array<int, kMaxDim> x{};
  int budget = static_cast<int>(k < box.radius() * box.dim() ? k : box.radius() * box.dim());
  if ((k - budget) % 2 != 0) --budget;
  if (limit > box.radius()) limit = box.radius();
  detail::cone_rows(box, 0, budget, limit, static_cast<std::ptrdiff_t>(box.origin()), x, f);
}

/// Rows of the sites within l1 distance j of the cube [-r, r]^d (clipped to the box):
/// f(row_base, coords, lo, hi) covers last coordinate lo..hi with step 1.
template <class F>
void for_each_dilated_row(const Box& box, int r, int j, F&& f) {
  std::array<int, kMaxDim> x{};
  detail::dilated_rows(box, 0, r, j, static_cast<std::ptrdiff_t>(box.origin()), x, f);
}

/// Visits every site with max_i |x_i| <= r (clipped to the box), calling f(flat_index, coords).
template <class F>
void for_each_box_site(const Box& box, int r, F&& f) {
  if (r > box.radius()) r = box.radius();
  const int d = box.dim();
  std::array<int, kMaxDim> x{};
  for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = -r;
  const std::ptrdiff_t st_last = box.stride(d - 1);
  while (true) {
    std::ptrdiff_t base = static_cast<std::ptrdiff_t>(box.origin());
    for (int a = 0; a < d - 1; ++a) base += x[static_cast<std::size_t>(a)] * box.stride(a);
    for (int v = -r; v <= r; ++v) {
      x[static_cast<std::size_t>(d - 1)] = v;
      f(static_cast<std::size_t>(base + v * st_last), x);
    }
    int a = d - 2;
    while (a >= 0) {
      if (++x[static_cast<std::size_t>(a)] <= r) break;
      x[static_cast<std::size_t>(a)] = -r;
      --a;
    }
    if (a < 0) return;
  }
}

/// One step of the simple random walk restricted to the sites visited by
/// for_each_cone_site(box, k, limit): out(y) = (1/2d) sum_e in(y - e).
void walk_step(const Box& box, std::span<const double> in, std::span<double> out, long k,
               int limit);

}  // namespace polymer
