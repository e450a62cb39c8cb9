#pragma once

#include <cstdint>
#include <vector>

#include "bmolab/grid.hpp"
#include "bmolab/whitney.hpp"

namespace bmo {

/// Default averaging constant: small enough that the ball B(x, c d(x)) stays
/// within the Whitney cube containing x and its adjacent cubes under the
/// diam <= dist <= 4 diam proportionality; runtime verification backstops it.
inline double default_averaging_constant(int dim) { return 1.0 / (16.0 * std::sqrt(static_cast<double>(dim))); }

struct ExtensionResult {
  GridFunction extended;  // full window; mask excludes flagged boundary cells
  WhitneyDecomposition whitney_domain;       // E
  WhitneyDecomposition whitney_complement;   // E'
  CubeMatching matching;
  double lambda = 0;
  double c_n = 0;           // averaging constant actually used (after halvings)
  int halvings = 0;
  std::vector<int32_t> zero_cubes;  // E' ids carrying the value 0 (large or unmatched)
  int64_t boundary_cells = 0;       // cells assigned by nearest-value fill, excluded from norms
  int64_t fallback_means = 0;       // matched cubes whose mean needed the nearest-cell fallback
  int64_t unaveraged_cells = 0;     // smoothing: cells with R(x) < 2h kept unaveraged
  bool scale_warning = false;       // lambda exceeds the domain's natural scale (when known)
  // diagnostics: complement-cube census around the operator's scale
  int64_t cubes_below_lambda_over_40sqrtn = 0;
  int64_t cubes_above_lambda_over_4 = 0;
};

struct ExtensionParams {
  double lambda = 0.25;
  int min_level = 10;         // whitney depth
  double radius_factor = 64;  // matching search radius
  double c_n = 0;             // 0 = default_averaging_constant(2)
  int max_halvings = 6;
  int64_t verify_samples = 4096;  // cells checked for the neighborhood property
};

/// The step extension: f on the domain, the matched-cube average f_{Q*} on
/// small complement Whitney cubes, 0 on large ones; boundary cells inherit
/// the nearest assigned value and are flagged out of the mask.
ExtensionResult extend_step(const GridFunction& f, const DomainModel& dom, const ExtensionParams& params);

/// Mean of phi over grid cells with center in B(x, c_n d(x)). Cells outside
/// phi's mask are ignored. When the ball captures no cell (R < 2h or empty),
/// returns phi at x's cell and sets *unaveraged.
double average_at(const GridFunction& phi, const Vec2& x, const DomainModel& dom, double c_n,
                  bool* unaveraged = nullptr);

/// The smoothed extension: f on the domain, the ball average of the step
/// extension on the complement. Verifies on sampled cells that each
/// averaging ball meets only the Whitney cube containing the cell and its
/// adjacent cubes; on violation c_n is halved and the averaging rerun.
ExtensionResult extend_smooth(const GridFunction& f, const DomainModel& dom, const ExtensionParams& params);

/// Radius of the smallest origin-centered ball containing all nonzero cells
/// (one cell diagonal added); 0 for an identically zero function.
double support_radius(const GridFunction& f);

}  // namespace bmo
