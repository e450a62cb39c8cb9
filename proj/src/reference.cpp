#include "bmolab/reference.hpp"

#include <algorithm>
#include <cmath>

namespace bmo::reference {

namespace {

struct Accum {
  double sum = 0, abs_sum = 0;
  int64_t count = 0;
};

// own bounding-index arithmetic, independent of GridFunction::range_in_cube;
// the per-cell membership test stays explicit
struct Bounds {
  int64_t i0, i1, j0, j1;
};

Bounds bounds_of(const GridFunction& f, const Cube2& q) {
  Bounds b;
  b.i0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor((q.corner[0] - f.origin[0]) / f.h)) - 1);
  b.j0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor((q.corner[1] - f.origin[1]) / f.h)) - 1);
  b.i1 = std::min<int64_t>(f.nx - 1,
                           static_cast<int64_t>(std::ceil((q.corner[0] + q.side - f.origin[0]) / f.h)) + 1);
  b.j1 = std::min<int64_t>(f.ny - 1,
                           static_cast<int64_t>(std::ceil((q.corner[1] + q.side - f.origin[1]) / f.h)) + 1);
  return b;
}

Accum scan(const GridFunction& f, const Cube2& q) {
  Accum a;
  Bounds b = bounds_of(f, q);
  for (int64_t j = b.j0; j <= b.j1; ++j)
    for (int64_t i = b.i0; i <= b.i1; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k]) continue;
      Vec2 p = f.cell_center(i, j);
      if (!q.contains(p)) continue;
      a.sum += f.values[k];
      a.abs_sum += std::abs(f.values[k]);
      a.count += 1;
    }
  return a;
}

}  // namespace

double cube_mean(const GridFunction& f, const Cube2& q) {
  Accum a = scan(f, q);
  return a.count ? a.sum / static_cast<double>(a.count) : 0.0;
}

double cube_mean_abs(const GridFunction& f, const Cube2& q) {
  Accum a = scan(f, q);
  return a.count ? a.abs_sum / static_cast<double>(a.count) : 0.0;
}

double mean_oscillation(const GridFunction& f, const Cube2& q) {
  Accum a = scan(f, q);
  if (!a.count) return 0.0;
  double mean = a.sum / static_cast<double>(a.count);
  double dev = 0;
  Bounds b = bounds_of(f, q);
  for (int64_t j = b.j0; j <= b.j1; ++j)
    for (int64_t i = b.i0; i <= b.i1; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k]) continue;
      if (!q.contains(f.cell_center(i, j))) continue;
      dev += std::abs(f.values[k] - mean);
    }
  return dev / static_cast<double>(a.count);
}

double family_sup_oscillation(const GridFunction& f, const std::vector<Cube2>& cubes) {
  double best = 0;
  for (const Cube2& q : cubes) best = std::max(best, reference::mean_oscillation(f, q));
  return best;
}

double family_sup_abs_average(const GridFunction& f, const std::vector<Cube2>& cubes) {
  double best = 0;
  for (const Cube2& q : cubes) best = std::max(best, reference::cube_mean_abs(f, q));
  return best;
}

double ball_average(const GridFunction& phi, const Vec2& x, double radius) {
  double sum = 0;
  int64_t count = 0;
  Bounds b = bounds_of(phi, Cube2{vec2(x[0] - radius, x[1] - radius), 2 * radius});
  for (int64_t j = b.j0; j <= b.j1; ++j)
    for (int64_t i = b.i0; i <= b.i1; ++i) {
      size_t k = static_cast<size_t>(phi.idx(i, j));
      if (!phi.mask[k]) continue;
      Vec2 p = phi.cell_center(i, j);
      if ((p - x).norm() > radius) continue;
      sum += phi.values[k];
      count += 1;
    }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace bmo::reference
