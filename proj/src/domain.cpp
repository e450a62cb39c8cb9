#include "bmolab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>

namespace bmo {

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::square: return "square";
    case DomainKind::disk: return "disk";
    case DomainKind::half_plane: return "half-plane";
    case DomainKind::rect_union: return "rect-union";
    case DomainKind::strips_example_1: return "strips-example-1";
    case DomainKind::strips_example_2: return "strips-example-2";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "square") return DomainKind::square;
  if (s == "disk") return DomainKind::disk;
  if (s == "half-plane") return DomainKind::half_plane;
  if (s == "rect-union") return DomainKind::rect_union;
  if (s == "strips-example-1") return DomainKind::strips_example_1;
  if (s == "strips-example-2") return DomainKind::strips_example_2;
  throw ValidationError("kind", "unknown domain kind: " + s);
}

void DomainSpec::validate() const {
  switch (kind) {
    case DomainKind::square:
      if (!(sq_side > 0) || !std::isfinite(sq_side))
        throw ValidationError("side", "square: side must be positive");
      break;
    case DomainKind::disk:
      if (!(disk_radius > 0) || !std::isfinite(disk_radius))
        throw ValidationError("radius", "disk: radius must be positive");
      break;
    case DomainKind::half_plane:
      break;
    case DomainKind::rect_union:
      if (rects.empty()) throw ValidationError("rects", "rect-union: need at least one rectangle");
      for (const Rect& r : rects)
        if (!(r.width > 0) || !(r.height > 0))
          throw ValidationError("rects", "rect-union: rectangle sides must be positive");
      break;
    case DomainKind::strips_example_1:
      if (strip_count < 1) throw ValidationError("count", "strips-example-1: count must be >= 1");
      if (static_cast<int>(strip_lengths.size()) != strip_count)
        throw ValidationError("lengths", "strips-example-1: need exactly count lengths");
      for (double l : strip_lengths)
        if (!(l > 0) || !std::isfinite(l))
          throw ValidationError("lengths", "strips-example-1: lengths must be positive");
      break;
    case DomainKind::strips_example_2:
      if (strip_count < 1) throw ValidationError("count", "strips-example-2: count must be >= 1");
      if (!slopes.empty() && static_cast<int>(slopes.size()) != strip_count)
        throw ValidationError("slopes", "strips-example-2: need count slopes when given");
      break;
  }
}

double BoundarySegment::dist2_to_point(const Vec2& p) const {
  double along = p[axis];
  double t = std::clamp(along, t0, t1);
  double da = along - t;
  double df = p[1 - axis] - fixed;
  return da * da + df * df;
}

double BoundarySegment::dist_to_point(const Vec2& p) const { return std::sqrt(dist2_to_point(p)); }

double BoundarySegment::dist2_to_box(const Cube2& b) const {
  double blo = b.corner[axis], bhi = b.corner[axis] + b.side;
  double da = 0;
  if (t0 > bhi) da = t0 - bhi;
  else if (blo > t1) da = blo - t1;
  double flo = b.corner[1 - axis], fhi = b.corner[1 - axis] + b.side;
  double df = 0;
  if (fixed > fhi) df = fixed - fhi;
  else if (fixed < flo) df = flo - fixed;
  return da * da + df * df;
}

double BoundarySegment::dist_to_box(const Cube2& b) const { return std::sqrt(dist2_to_box(b)); }

namespace detail {
namespace {

// Union of open rectangles, optionally joined to the open left half-plane
// {x < 0}. The boundary is precomputed as axis-parallel segments, so both
// signed distance and box-to-boundary distance are exact.
class PiecewiseGeometry : public Geometry {
 public:
  PiecewiseGeometry(std::vector<Rect> rects, bool half_plane, std::vector<BoundarySegment> segs)
      : rects_(std::move(rects)), half_plane_(half_plane), segments_(std::move(segs)) {}

  bool inside(const Vec2& p) const override {
    if (half_plane_ && p[0] < 0) return true;
    for (const Rect& r : rects_) {
      if (p[0] > r.x0 && p[0] < r.x0 + r.width && p[1] > r.y0 && p[1] < r.y0 + r.height) return true;
      // the attach edge x == x0 == 0 is interior when joined to the half-plane
      if (half_plane_ && r.x0 == 0 && p[0] == 0 && p[1] > r.y0 && p[1] < r.y0 + r.height) return true;
    }
    return false;
  }

  double signed_distance(const Vec2& p) const override {
    double d2 = kRayExtent;
    for (const BoundarySegment& s : segments_) d2 = std::min(d2, s.dist2_to_point(p));
    double d = std::sqrt(d2);
    return inside(p) ? d : -d;
  }

  double box_boundary_dist(const Cube2& b) const override {
    double d2 = kRayExtent;
    for (const BoundarySegment& s : segments_) d2 = std::min(d2, s.dist2_to_box(b));
    return std::sqrt(d2);
  }

 private:
  std::vector<Rect> rects_;
  bool half_plane_;
  std::vector<BoundarySegment> segments_;
};

class DiskGeometry : public Geometry {
 public:
  DiskGeometry(Vec2 center, double radius) : c_(center), r_(radius) {}

  bool inside(const Vec2& p) const override { return (p - c_).norm() < r_; }
  double signed_distance(const Vec2& p) const override { return r_ - (p - c_).norm(); }

  double box_boundary_dist(const Cube2& b) const override {
    double dmin = b.dist_to_point(c_);
    double dmax = 0;
    Vec2 lo = b.corner, hi = b.max();
    for (int i = 0; i < 4; ++i) {
      Vec2 corner = vec2(i & 1 ? hi[0] : lo[0], i & 2 ? hi[1] : lo[1]);
      dmax = std::max(dmax, (corner - c_).norm());
    }
    if (dmin > r_) return dmin - r_;  // box outside the circle
    if (dmax < r_) return r_ - dmax;  // box inside the circle
    return 0;                         // box straddles the circle
  }

 private:
  Vec2 c_;
  double r_;
};

struct Interval {
  double a, b;
};

// Subtract open intervals from [t0,t1]; returns the remaining closed pieces.
std::vector<Interval> subtract_open(double t0, double t1, std::vector<Interval> holes) {
  std::sort(holes.begin(), holes.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  std::vector<Interval> out;
  double cur = t0;
  for (const Interval& h : holes) {
    if (h.b <= cur) continue;
    if (h.a >= t1) break;
    if (h.a > cur) out.push_back({cur, std::min(h.a, t1)});
    cur = std::max(cur, h.b);
    if (cur >= t1) break;
  }
  if (cur < t1) out.push_back({cur, t1});
  return out;
}

// Boundary of a union of open rectangles (plus optional left half-plane):
// the parts of each rectangle edge not interior to the union, and the y-axis
// minus the openings of rectangles attached at x = 0.
std::vector<BoundarySegment> union_boundary(const std::vector<Rect>& rects, bool half_plane) {
  std::vector<BoundarySegment> segs;

  auto covered_on_line = [&](int axis, double fixed, double t0, double t1) {
    // Open intervals of the line {coord[1-axis]==fixed, coord[axis] in (t0,t1)}
    // that are interior to the union.
    std::vector<Interval> holes;
    if (half_plane && axis == 1 && fixed < 0) holes.push_back({t0, t1});
    if (half_plane && axis == 0) {
      // horizontal line: half-plane covers x < 0
      holes.push_back({-kRayExtent, 0});
    }
    for (const Rect& r : rects) {
      double flo = axis == 0 ? r.y0 : r.x0;
      double fhi = axis == 0 ? r.y0 + r.height : r.x0 + r.width;
      bool strictly_within = fixed > flo && fixed < fhi;
      if (!strictly_within) continue;
      double alo = axis == 0 ? r.x0 : r.y0;
      double ahi = axis == 0 ? r.x0 + r.width : r.y0 + r.height;
      // interior of the rect covers the open span; with a half-plane attach at
      // x0 == 0 the closed end x == 0 is interior to the union as well
      if (half_plane && axis == 0 && r.x0 == 0) holes.push_back({-kRayExtent, ahi});
      else holes.push_back({alo, ahi});
    }
    return holes;
  };

  auto emit = [&](int axis, double fixed, double t0, double t1) {
    for (const Interval& iv : subtract_open(t0, t1, covered_on_line(axis, fixed, t0, t1)))
      if (iv.b >= iv.a) segs.push_back({axis, fixed, iv.a, iv.b});
  };

  if (half_plane) {
    // y-axis pieces between/around the attached openings
    std::vector<Interval> openings;
    for (const Rect& r : rects)
      if (r.x0 == 0) openings.push_back({r.y0, r.y0 + r.height});
    for (const Interval& iv : subtract_open(-kRayExtent, kRayExtent, openings))
      segs.push_back({1, 0.0, iv.a, iv.b});
  }
  for (const Rect& r : rects) {
    emit(0, r.y0, r.x0, r.x0 + r.width);             // bottom
    emit(0, r.y0 + r.height, r.x0, r.x0 + r.width);  // top
    // an edge attached to the half-plane at x == 0 is an opening, already
    // accounted for by the y-axis pieces above
    if (!(half_plane && r.x0 == 0)) emit(1, r.x0, r.y0, r.y0 + r.height);
    emit(1, r.x0 + r.width, r.y0, r.y0 + r.height);  // right
  }
  return segs;
}

}  // namespace
}  // namespace detail

std::vector<double> stack_strip_bases(const std::vector<double>& widths) {
  std::vector<double> bases(widths.size());
  double b = 0;
  for (size_t i = 0; i < widths.size(); ++i) {
    bases[i] = b;
    b = std::ceil((b + widths[i] + 1.0) * 256.0) / 256.0;
  }
  return bases;
}

DomainModel build_domain(const DomainSpec& spec, const Cube2& window) {
  spec.validate();
  window.validate("window");

  DomainModel dom;
  dom.kind = spec.kind;
  dom.window = window;
  dom.spec = spec;
  dom.name = to_string(spec.kind);

  switch (spec.kind) {
    case DomainKind::square: {
      std::vector<Rect> rects{{spec.sq_corner[0], spec.sq_corner[1], spec.sq_side, spec.sq_side}};
      dom.geometry = std::make_shared<detail::PiecewiseGeometry>(
          rects, false, detail::union_boundary(rects, false));
      dom.nominal_eps = 0.5;
      dom.nominal_delta = spec.sq_side;
      break;
    }
    case DomainKind::disk: {
      dom.geometry = std::make_shared<detail::DiskGeometry>(spec.disk_center, spec.disk_radius);
      dom.nominal_eps = 0.5;
      dom.nominal_delta = 2 * spec.disk_radius;
      break;
    }
    case DomainKind::half_plane: {
      std::vector<Rect> rects;
      dom.geometry = std::make_shared<detail::PiecewiseGeometry>(
          rects, true, detail::union_boundary(rects, true));
      dom.nominal_eps = 1.0;
      dom.nominal_delta = window.diam();
      break;
    }
    case DomainKind::rect_union: {
      dom.geometry = std::make_shared<detail::PiecewiseGeometry>(
          spec.rects, false, detail::union_boundary(spec.rects, false));
      break;
    }
    case DomainKind::strips_example_1: {
      std::vector<double> widths(spec.strip_count);
      for (int n = 1; n <= spec.strip_count; ++n) widths[n - 1] = 1.0 / n;
      std::vector<double> bases = stack_strip_bases(widths);
      std::vector<Rect> rects;
      for (int n = 1; n <= spec.strip_count; ++n) {
        dom.strips.push_back({bases[n - 1], widths[n - 1], spec.strip_lengths[n - 1], n, 1});
        rects.push_back({0.0, bases[n - 1], spec.strip_lengths[n - 1], widths[n - 1]});
      }
      dom.geometry = std::make_shared<detail::PiecewiseGeometry>(
          rects, true, detail::union_boundary(rects, true));
      break;
    }
    case DomainKind::strips_example_2: {
      // group n contributes n strips of width 1/j and length n, j = 1..n
      std::vector<double> widths;
      std::vector<std::pair<int, int>> tags;
      for (int n = 1; n <= spec.strip_count; ++n)
        for (int j = 1; j <= n; ++j) {
          widths.push_back(1.0 / j);
          tags.emplace_back(n, j);
        }
      std::vector<double> bases = stack_strip_bases(widths);
      std::vector<Rect> rects;
      for (size_t i = 0; i < widths.size(); ++i) {
        double length = static_cast<double>(tags[i].first);
        dom.strips.push_back({bases[i], widths[i], length, tags[i].first, tags[i].second});
        rects.push_back({0.0, bases[i], length, widths[i]});
      }
      dom.geometry = std::make_shared<detail::PiecewiseGeometry>(
          rects, true, detail::union_boundary(rects, true));
      break;
    }
  }
  return dom;
}

namespace {

constexpr double kHalfDiag = 0.7071067811865476;  // sqrt(2)/2

// All lattice points p (pitch s, anchored at the origin) whose cell
// [p-s/2,p+s/2]^2 meets the box must satisfy d(p) > kHalfDiag*s. Recursion
// prunes regions whose center clearance already certifies every such point.
bool cert_recurse(const DomainModel& dom, const Vec2& lo, const Vec2& hi, double s) {
  Vec2 c = vec2((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2);
  double half = std::max(hi[0] - lo[0], hi[1] - lo[1]) / 2;
  double sd = dom.signed_distance(c);
  if (sd > std::sqrt(2.0) * (half + s)) return true;  // every relevant lattice point clears
  if (half > s / 2) {
    Vec2 m = c;
    return cert_recurse(dom, lo, m, s) && cert_recurse(dom, vec2(m[0], lo[1]), vec2(hi[0], m[1]), s) &&
           cert_recurse(dom, vec2(lo[0], m[1]), vec2(m[0], hi[1]), s) && cert_recurse(dom, m, hi, s);
  }
  // leaf: test the lattice points whose cells meet this region
  int64_t i0 = static_cast<int64_t>(std::floor(lo[0] / s - 0.5));
  int64_t i1 = static_cast<int64_t>(std::ceil(hi[0] / s + 0.5));
  int64_t j0 = static_cast<int64_t>(std::floor(lo[1] / s - 0.5));
  int64_t j1 = static_cast<int64_t>(std::ceil(hi[1] / s + 0.5));
  for (int64_t i = i0; i <= i1; ++i) {
    double px = static_cast<double>(i) * s;
    if (px + s / 2 < lo[0] || px - s / 2 > hi[0]) continue;
    for (int64_t j = j0; j <= j1; ++j) {
      double py = static_cast<double>(j) * s;
      if (py + s / 2 < lo[1] || py - s / 2 > hi[1]) continue;
      if (!(dom.signed_distance(vec2(px, py)) > kHalfDiag * s)) return false;
    }
  }
  return true;
}

}  // namespace

bool cube_inside(const Cube2& q, const DomainModel& dom, double cert_pitch) {
  if (!(cert_pitch > 0)) throw ValidationError("cert_pitch", "cube_inside: pitch must be positive");
  if (!q.valid()) return false;
  // The recursion's top-level prune doubles as the deep-interior fast path;
  // the result equals the full lattice test, which is monotone under
  // inclusion at fixed pitch.
  return cert_recurse(dom, q.corner, q.max(), cert_pitch);
}

bool connected_at_resolution(const DomainModel& dom, double pitch) {
  const Cube2& w = dom.window;
  int64_t n = std::max<int64_t>(1, static_cast<int64_t>(std::llround(w.side / pitch)));
  std::vector<uint8_t> in(static_cast<size_t>(n * n), 0);
  auto at = [&](int64_t i, int64_t j) -> uint8_t& { return in[static_cast<size_t>(j * n + i)]; };
  int64_t first = -1;
  int64_t total = 0;
  for (int64_t j = 0; j < n; ++j)
    for (int64_t i = 0; i < n; ++i) {
      Vec2 p = vec2(w.corner[0] + (i + 0.5) * pitch, w.corner[1] + (j + 0.5) * pitch);
      if (dom.inside(p)) {
        at(i, j) = 1;
        ++total;
        if (first < 0) first = j * n + i;
      }
    }
  if (total == 0) return false;
  std::vector<int64_t> stack{first};
  in[static_cast<size_t>(first)] = 2;
  int64_t seen = 1;
  while (!stack.empty()) {
    int64_t cur = stack.back();
    stack.pop_back();
    int64_t ci = cur % n, cj = cur / n;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        int64_t i = ci + di, j = cj + dj;
        if (i < 0 || j < 0 || i >= n || j >= n) continue;
        if (at(i, j) == 1) {
          at(i, j) = 2;
          ++seen;
          stack.push_back(j * n + i);
        }
      }
  }
  return seen == total;
}

}  // namespace bmo
