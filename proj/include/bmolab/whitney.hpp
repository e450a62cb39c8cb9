#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bmolab/cube.hpp"
#include "bmolab/domain.hpp"

namespace bmo {

/// Which open set a decomposition covers: the domain itself or the
/// complement of its closure.
enum class Owner { domain, complement };

struct WhitneyCube {
  DyadicCube2 dc;   // window-normalized coordinates
  Cube2 box;        // world coordinates
  double dist = 0;  // exact set distance to the complement of the open set
};

/// Whitney decomposition over a window: dyadic cubes with
/// diam(Q) <= dist(Q, complement) <= 4*diam(Q), pairwise disjoint interiors,
/// covering the open set up to a boundary residue at the deepest level.
struct WhitneyDecomposition {
  Owner owner = Owner::domain;
  Cube2 window;
  int min_level = 0;  // deepest subdivision level; smallest cube side = window.side * 2^-min_level

  std::vector<WhitneyCube> cubes;                 // sorted by (level, ix, iy)
  std::vector<std::vector<int32_t>> adjacency;    // ids of cubes whose closures touch
  double residue_volume = 0;                      // total volume of discarded min-level cubes
  int64_t residue_count = 0;
  double accepted_volume = 0;

  Cube2 world_cube(const DyadicCube2& dc) const {
    Cube2 unit = dc.to_cube();
    return Cube2{window.corner + window.side * unit.corner, window.side * unit.side};
  }

  std::optional<int32_t> find(const DyadicCube2& dc) const;

  /// id of the cube whose half-open box [corner, corner+side) contains p.
  std::optional<int32_t> locate(const Vec2& p) const;

 private:
  friend WhitneyDecomposition whitney_decompose(const DomainModel&, Owner, const Cube2&, int);
  std::unordered_map<uint64_t, int32_t> index_;
  std::vector<std::vector<int32_t>> by_level_;  // cube ids per level
  int32_t level_lo_ = 0;

 public:
  const std::vector<int32_t>& ids_at_level(int32_t level) const;
  int32_t level_lo() const { return level_lo_; }
  int32_t level_hi() const { return level_lo_ + static_cast<int32_t>(by_level_.size()) - 1; }
};

/// Top-down dyadic subdivision of the window. A cube contained in the open
/// set is accepted when dist(Q, complement) >= diam(Q) (the upper bound
/// dist <= 4*diam then holds automatically and is asserted); otherwise it is
/// subdivided, and cubes at min_level that cannot be accepted are recorded as
/// boundary residue. Throws ResolutionError when the residue exceeds 1% of
/// the covered volume.
WhitneyDecomposition whitney_decompose(const DomainModel& dom, Owner owner, const Cube2& window,
                                       int min_level);

/// The map Q -> Q* from small complement cubes into domain cubes:
/// side(Q*) in [side(Q), 4 side(Q)], center distance minimized, ties broken
/// lexicographically by (level, index). Cubes with no candidate within
/// radius_factor * side(Q) (set distance) are reported unmatched.
struct CubeMatching {
  double lambda = 0;
  double radius_factor = 64;
  std::vector<int32_t> match;        // per E' cube id: E cube id, -1 unmatched, -2 exempt (side > lambda)
  std::vector<int32_t> unmatched;    // E' ids with side <= lambda but no candidate
  double distance_constant = 0;      // realized sup dist(Q,Q*)/side(Q)
  int64_t matched_count = 0;
};

CubeMatching match_cubes(const WhitneyDecomposition& eprime, const WhitneyDecomposition& e,
                         double lambda, double radius_factor = 64.0);

}  // namespace bmo
