#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bmolab/cube.hpp"
#include "bmolab/domain.hpp"

namespace bmo {

/// Summed-area tables over the cell array; built once after sampling so every
/// cube query is O(1) for means of f and |f| and for the masked-cell count.
/// Skipped above kSumTableLimit cells, in which case queries fall back to
/// direct loops.
struct CellSums {
  int64_t nx = 0, ny = 0;
  std::vector<double> value;  // (nx+1)*(ny+1), masked cells only
  std::vector<double> abs;
  std::vector<int64_t> count;
};

inline constexpr int64_t kSumTableLimit = int64_t(1) << 24;

/// A function sampled at cell centers of a uniform grid over the window,
/// restricted to the domain mask. Immutable once built.
struct GridFunction {
  double h = 0;
  Vec2 origin;  // lower window corner
  int64_t nx = 0, ny = 0;
  std::vector<double> values;  // row-major, index j*nx + i; 0 outside the mask
  std::vector<uint8_t> mask;   // cell center inside the domain

  int64_t cells() const { return nx * ny; }
  int64_t idx(int64_t i, int64_t j) const { return j * nx + i; }
  Vec2 cell_center(int64_t i, int64_t j) const {
    return vec2(origin[0] + (static_cast<double>(i) + 0.5) * h, origin[1] + (static_cast<double>(j) + 0.5) * h);
  }
  Cube2 window() const { return Cube2{origin, static_cast<double>(nx) * h}; }

  /// Builds the sum tables (when the grid is small enough). Call after any
  /// direct mutation of values/mask; all factory functions do this.
  void finalize();
  const CellSums* sums() const { return sums_.get(); }

  /// Inclusive cell index range of centers lying in the closed cube.
  struct Range {
    int64_t i0, i1, j0, j1;
    bool empty() const { return i1 < i0 || j1 < j0; }
  };
  Range range_in_cube(const Cube2& q) const;

  int64_t masked_count(const Range& r) const;
  double masked_sum(const Range& r) const;
  double masked_abs_sum(const Range& r) const;

 private:
  std::shared_ptr<const CellSums> sums_;
};

/// Allocates an empty grid over the window (h must tile the window side).
GridFunction make_grid(const DomainModel& dom, double h);

/// Grid over the window with every cell masked (used for functions extended
/// past the domain).
GridFunction make_full_grid(const Cube2& window, double h);

/// Minimum number of cells across the window for sampling to be meaningful.
inline constexpr int64_t kMinCellsAcross = 8;

/// Mean of f over the masked cells with centers in Q (midpoint quadrature).
/// Requires at least 4^n masked cells; throws ResolutionError otherwise,
/// carrying the spacing that would satisfy the requirement.
double cube_mean(const GridFunction& f, const Cube2& q);
/// Mean of |f| over the masked cells with centers in Q.
double cube_mean_abs(const GridFunction& f, const Cube2& q);

/// Mean without the statistical cell minimum: used by operators that
/// transport averages (falls back to the value at the nearest masked cell
/// when the cube captures none; *fallback is set in that case).
double cube_mean_relaxed(const GridFunction& f, const Cube2& q, bool* fallback = nullptr);

inline constexpr int64_t kMinCubeCells = 16;  // 4^n with n = 2

/// Pointwise lifts. Grids must share geometry; masks intersect.
GridFunction gf_add(const GridFunction& a, const GridFunction& b);
GridFunction gf_sub(const GridFunction& a, const GridFunction& b);
GridFunction gf_scale(double s, const GridFunction& a);
GridFunction gf_linear(double sa, const GridFunction& a, double sb, const GridFunction& b);
GridFunction gf_clamp(const GridFunction& a, double bound);

double sup_norm(const GridFunction& f);  // max |f| over masked cells

/// Max |f(x)-f(y)|/|x-y| over grid edges (including diagonals) plus a seeded
/// set of long-range pairs; both points masked.
double measured_lipschitz(const GridFunction& f, uint64_t seed = 7, int64_t long_range_pairs = 20000);

}  // namespace bmo
