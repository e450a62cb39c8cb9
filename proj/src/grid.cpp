#include "bmolab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "bmolab/errors.hpp"
#include "bmolab/parallel.hpp"
#include "bmolab/rng.hpp"

namespace bmo {

void GridFunction::finalize() {
  if (cells() > kSumTableLimit) {
    sums_.reset();
    return;
  }
  auto t = std::make_shared<CellSums>();
  t->nx = nx;
  t->ny = ny;
  size_t stride = static_cast<size_t>(nx + 1);
  t->value.assign(stride * static_cast<size_t>(ny + 1), 0.0);
  t->abs.assign(stride * static_cast<size_t>(ny + 1), 0.0);
  t->count.assign(stride * static_cast<size_t>(ny + 1), 0);
  for (int64_t j = 0; j < ny; ++j) {
    double rowv = 0, rowa = 0;
    int64_t rowc = 0;
    for (int64_t i = 0; i < nx; ++i) {
      size_t k = static_cast<size_t>(idx(i, j));
      if (mask[k]) {
        rowv += values[k];
        rowa += std::abs(values[k]);
        rowc += 1;
      }
      size_t dst = static_cast<size_t>(j + 1) * stride + static_cast<size_t>(i + 1);
      size_t up = static_cast<size_t>(j) * stride + static_cast<size_t>(i + 1);
      t->value[dst] = t->value[up] + rowv;
      t->abs[dst] = t->abs[up] + rowa;
      t->count[dst] = t->count[up] + rowc;
    }
  }
  sums_ = std::move(t);
}

GridFunction::Range GridFunction::range_in_cube(const Cube2& q) const {
  // center = origin + (i + 1/2) h lies in [lo, hi] (closed)
  auto lo_idx = [&](double lo, double o) {
    return static_cast<int64_t>(std::ceil((lo - o) / h - 0.5));
  };
  auto hi_idx = [&](double hi, double o) {
    return static_cast<int64_t>(std::floor((hi - o) / h - 0.5));
  };
  Range r;
  r.i0 = std::max<int64_t>(0, lo_idx(q.corner[0], origin[0]));
  r.j0 = std::max<int64_t>(0, lo_idx(q.corner[1], origin[1]));
  r.i1 = std::min<int64_t>(nx - 1, hi_idx(q.corner[0] + q.side, origin[0]));
  r.j1 = std::min<int64_t>(ny - 1, hi_idx(q.corner[1] + q.side, origin[1]));
  return r;
}

int64_t GridFunction::masked_count(const Range& r) const {
  if (r.empty()) return 0;
  if (sums_) {
    size_t stride = static_cast<size_t>(nx + 1);
    auto at = [&](int64_t i, int64_t j) { return sums_->count[static_cast<size_t>(j) * stride + static_cast<size_t>(i)]; };
    return at(r.i1 + 1, r.j1 + 1) - at(r.i0, r.j1 + 1) - at(r.i1 + 1, r.j0) + at(r.i0, r.j0);
  }
  int64_t c = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) c += mask[static_cast<size_t>(idx(i, j))] ? 1 : 0;
  return c;
}

double GridFunction::masked_sum(const Range& r) const {
  if (r.empty()) return 0;
  if (sums_) {
    size_t stride = static_cast<size_t>(nx + 1);
    auto at = [&](int64_t i, int64_t j) { return sums_->value[static_cast<size_t>(j) * stride + static_cast<size_t>(i)]; };
    return at(r.i1 + 1, r.j1 + 1) - at(r.i0, r.j1 + 1) - at(r.i1 + 1, r.j0) + at(r.i0, r.j0);
  }
  double s = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) {
      size_t k = static_cast<size_t>(idx(i, j));
      if (mask[k]) s += values[k];
    }
  return s;
}

double GridFunction::masked_abs_sum(const Range& r) const {
  if (r.empty()) return 0;
  if (sums_) {
    size_t stride = static_cast<size_t>(nx + 1);
    auto at = [&](int64_t i, int64_t j) { return sums_->abs[static_cast<size_t>(j) * stride + static_cast<size_t>(i)]; };
    return at(r.i1 + 1, r.j1 + 1) - at(r.i0, r.j1 + 1) - at(r.i1 + 1, r.j0) + at(r.i0, r.j0);
  }
  double s = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) {
      size_t k = static_cast<size_t>(idx(i, j));
      if (mask[k]) s += std::abs(values[k]);
    }
  return s;
}

namespace {

int64_t cells_across(const Cube2& window, double h) {
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("h", "spacing must be positive");
  int64_t n = std::llround(window.side / h);
  if (std::abs(static_cast<double>(n) * h - window.side) > 1e-9 * window.side)
    throw ValidationError("h", "spacing must divide the window side");
  if (n < kMinCellsAcross)
    throw ResolutionError("spacing too coarse: fewer than 8 cells across the window", window.side / kMinCellsAcross);
  return n;
}

}  // namespace

GridFunction make_grid(const DomainModel& dom, double h) {
  GridFunction g;
  g.h = h;
  g.origin = dom.window.corner;
  g.nx = g.ny = cells_across(dom.window, h);
  g.values.assign(static_cast<size_t>(g.cells()), 0.0);
  g.mask.assign(static_cast<size_t>(g.cells()), 0);
#pragma omp parallel for schedule(static)
  for (int64_t j = 0; j < g.ny; ++j)
    for (int64_t i = 0; i < g.nx; ++i)
      g.mask[static_cast<size_t>(g.idx(i, j))] = dom.inside(g.cell_center(i, j)) ? 1 : 0;
  return g;
}

GridFunction make_full_grid(const Cube2& window, double h) {
  GridFunction g;
  g.h = h;
  g.origin = window.corner;
  g.nx = g.ny = cells_across(window, h);
  g.values.assign(static_cast<size_t>(g.cells()), 0.0);
  g.mask.assign(static_cast<size_t>(g.cells()), 1);
  return g;
}

double cube_mean(const GridFunction& f, const Cube2& q) {
  GridFunction::Range r = f.range_in_cube(q);
  int64_t c = f.masked_count(r);
  if (c < kMinCubeCells)
    throw ResolutionError("cube holds fewer than 4^n masked cells", q.side / 4.0);
  return f.masked_sum(r) / static_cast<double>(c);
}

double cube_mean_abs(const GridFunction& f, const Cube2& q) {
  GridFunction::Range r = f.range_in_cube(q);
  int64_t c = f.masked_count(r);
  if (c < kMinCubeCells)
    throw ResolutionError("cube holds fewer than 4^n masked cells", q.side / 4.0);
  return f.masked_abs_sum(r) / static_cast<double>(c);
}

double cube_mean_relaxed(const GridFunction& f, const Cube2& q, bool* fallback) {
  if (fallback) *fallback = false;
  GridFunction::Range r = f.range_in_cube(q);
  int64_t c = f.masked_count(r);
  if (c > 0) return f.masked_sum(r) / static_cast<double>(c);
  if (fallback) *fallback = true;
  // nearest masked cell to the cube center, expanding square rings
  Vec2 ctr = q.center();
  int64_t ci = std::clamp<int64_t>(static_cast<int64_t>(std::floor((ctr[0] - f.origin[0]) / f.h)), 0, f.nx - 1);
  int64_t cj = std::clamp<int64_t>(static_cast<int64_t>(std::floor((ctr[1] - f.origin[1]) / f.h)), 0, f.ny - 1);
  for (int64_t ring = 0; ring < std::max(f.nx, f.ny); ++ring) {
    double best = 0;
    double best_d2 = -1;
    for (int64_t j = cj - ring; j <= cj + ring; ++j) {
      if (j < 0 || j >= f.ny) continue;
      for (int64_t i = ci - ring; i <= ci + ring; ++i) {
        if (i < 0 || i >= f.nx) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        size_t k = static_cast<size_t>(f.idx(i, j));
        if (!f.mask[k]) continue;
        Vec2 p = f.cell_center(i, j);
        double d2 = (p - ctr).norm2();
        if (best_d2 < 0 || d2 < best_d2) {
          best_d2 = d2;
          best = f.values[k];
        }
      }
    }
    if (best_d2 >= 0) return best;
  }
  throw NotEvaluableError("no masked cells in the grid");
}

namespace {

void require_same_geometry(const GridFunction& a, const GridFunction& b) {
  if (a.h != b.h || !(a.origin == b.origin) || a.nx != b.nx || a.ny != b.ny)
    throw ValidationError("grid", "grid functions live on different grids");
}

}  // namespace

GridFunction gf_linear(double sa, const GridFunction& a, double sb, const GridFunction& b) {
  require_same_geometry(a, b);
  GridFunction out = a;
  for (size_t k = 0; k < out.values.size(); ++k) {
    out.mask[k] = a.mask[k] && b.mask[k];
    out.values[k] = out.mask[k] ? sa * a.values[k] + sb * b.values[k] : 0.0;
  }
  out.finalize();
  return out;
}

GridFunction gf_add(const GridFunction& a, const GridFunction& b) { return gf_linear(1, a, 1, b); }
GridFunction gf_sub(const GridFunction& a, const GridFunction& b) { return gf_linear(1, a, -1, b); }

GridFunction gf_scale(double s, const GridFunction& a) {
  GridFunction out = a;
  for (size_t k = 0; k < out.values.size(); ++k)
    if (out.mask[k]) out.values[k] = s * a.values[k];
  out.finalize();
  return out;
}

GridFunction gf_clamp(const GridFunction& a, double bound) {
  GridFunction out = a;
  for (size_t k = 0; k < out.values.size(); ++k)
    if (out.mask[k]) out.values[k] = std::clamp(a.values[k], -bound, bound);
  out.finalize();
  return out;
}

double sup_norm(const GridFunction& f) {
  double m = 0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (int64_t j = 0; j < f.ny; ++j)
    for (int64_t i = 0; i < f.nx; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (f.mask[k]) m = std::max(m, std::abs(f.values[k]));
    }
  return m;
}

double measured_lipschitz(const GridFunction& f, uint64_t seed, int64_t long_range_pairs) {
  double best = 0;
  // grid-local quotients: right, up, and both diagonals
  const int64_t dis[4] = {1, 0, 1, 1};
  const int64_t djs[4] = {0, 1, 1, -1};
#pragma omp parallel for reduction(max : best) schedule(static)
  for (int64_t j = 0; j < f.ny; ++j)
    for (int64_t i = 0; i < f.nx; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k]) continue;
      for (int e = 0; e < 4; ++e) {
        int64_t i2 = i + dis[e], j2 = j + djs[e];
        if (i2 < 0 || i2 >= f.nx || j2 < 0 || j2 >= f.ny) continue;
        size_t k2 = static_cast<size_t>(f.idx(i2, j2));
        if (!f.mask[k2]) continue;
        double num = std::abs(f.values[k] - f.values[k2]);
        double den = (e < 2) ? f.h : f.h * std::sqrt(2.0);
        best = std::max(best, num / den);
      }
    }
  // long-range sampled pairs catch seams between distant constant patches
  SplitMix64 rng(seed);
  for (int64_t p = 0; p < long_range_pairs; ++p) {
    int64_t i1 = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(f.nx));
    int64_t j1 = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(f.ny));
    int64_t i2 = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(f.nx));
    int64_t j2 = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(f.ny));
    if (i1 == i2 && j1 == j2) continue;
    size_t k1 = static_cast<size_t>(f.idx(i1, j1)), k2 = static_cast<size_t>(f.idx(i2, j2));
    if (!f.mask[k1] || !f.mask[k2]) continue;
    Vec2 a = f.cell_center(i1, j1), b = f.cell_center(i2, j2);
    best = std::max(best, std::abs(f.values[k1] - f.values[k2]) / (a - b).norm());
  }
  return best;
}

}  // namespace bmo
