#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bmolab/cube.hpp"

namespace bmo {

enum class DomainKind {
  square,
  disk,
  half_plane,
  rect_union,
  strips_example_1,
  strips_example_2,
};

const char* to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

/// Axis-aligned rectangle, open in the plane.
struct Rect {
  double x0 = 0, y0 = 0, width = 0, height = 0;
};

/// One horizontal strip attached to the left half-plane at x = 0.
struct Strip {
  double base = 0;    // lower y ordinate
  double width = 0;   // vertical extent
  double length = 0;  // horizontal extent, strip spans x in [0, length)
  int group = 0;      // example-2 group n (equals index n for example 1)
  int member = 0;     // example-2 member j within the group (1 for example 1)
};

/// Validated builder parameters. Which fields are meaningful depends on kind.
struct DomainSpec {
  DomainKind kind = DomainKind::square;

  // square
  Vec2 sq_corner = vec2(0, 0);
  double sq_side = 1;
  // disk
  Vec2 disk_center = vec2(0, 0);
  double disk_radius = 1;
  // rect-union
  std::vector<Rect> rects;
  // strips examples: count = N (example 1) or group count (example 2)
  int strip_count = 0;
  std::vector<double> strip_lengths;  // example 1: L_1..L_N
  std::vector<double> slopes;         // example 2: c_1..c_N (consumed by the test functions)

  void validate() const;
};

/// Axis-parallel segment, possibly a ray (endpoints clamped to +-kRayExtent).
/// axis is the varying coordinate; fixed is the value of the other one.
struct BoundarySegment {
  int axis = 0;
  double fixed = 0;
  double t0 = 0, t1 = 0;

  double dist_to_point(const Vec2& p) const;
  double dist_to_box(const Cube2& b) const;
  double dist2_to_point(const Vec2& p) const;
  double dist2_to_box(const Cube2& b) const;
};

inline constexpr double kRayExtent = 1e18;

namespace detail {

class Geometry {
 public:
  virtual ~Geometry() = default;
  /// Exact signed distance to the boundary: positive inside the domain,
  /// negative outside its closure, zero on the boundary.
  virtual double signed_distance(const Vec2& p) const = 0;
  virtual bool inside(const Vec2& p) const = 0;
  /// Exact Euclidean set distance from the box to the domain boundary.
  virtual double box_boundary_dist(const Cube2& b) const = 0;
};

}  // namespace detail

/// A planar domain: membership, exact distance to the boundary, and the
/// finite window all computation is restricted to. Immutable and safe to
/// share across threads.
struct DomainModel {
  std::string name;
  DomainKind kind = DomainKind::square;
  Cube2 window;
  DomainSpec spec;
  std::vector<Strip> strips;  // populated for the strips kinds
  std::shared_ptr<const detail::Geometry> geometry;
  // Nominal (eps,delta) parameters when the builder knows them; used only to
  // warn when an extension scale exceeds the natural one.
  std::optional<double> nominal_eps;
  std::optional<double> nominal_delta;

  bool inside(const Vec2& p) const { return geometry->inside(p); }
  double signed_distance(const Vec2& p) const { return geometry->signed_distance(p); }
  /// dist(x, boundary) for x in the domain, 0 outside.
  double distance(const Vec2& p) const {
    double s = geometry->signed_distance(p);
    return s > 0 ? s : 0.0;
  }
  /// dist(x, boundary) regardless of side.
  double boundary_distance(const Vec2& p) const { return std::abs(geometry->signed_distance(p)); }
  double box_boundary_dist(const Cube2& b) const { return geometry->box_boundary_dist(b); }
};

/// Deterministic strip stacking: bases start at 0 and advance by
/// width + unit gap, rounded up to the next multiple of 1/256 so that strip
/// bases land on the dyadic position lattices used by the cube families.
/// b_1 = 0, b_{i+1} = ceil(256*(b_i + w_i + 1))/256.
std::vector<double> stack_strip_bases(const std::vector<double>& widths);

DomainModel build_domain(const DomainSpec& spec, const Cube2& window);

/// Conservative containment certificate: true only if Q is contained in the
/// domain. Checks the 1-Lipschitz distance on the global lattice of the given
/// pitch covering Q; accepts when every lattice cell has clearance > pitch
/// margin. Never accepts a cube that is not contained; may reject cubes whose
/// boundary margin is below ~pitch. Monotone under inclusion at fixed pitch.
bool cube_inside(const Cube2& q, const DomainModel& dom, double cert_pitch);

/// Grid connectivity check: flood fill over cell centers at the given pitch;
/// returns true when all inside cells in the window form one 8-connected
/// component.
bool connected_at_resolution(const DomainModel& dom, double pitch);

}  // namespace bmo
