#include <doctest.h>

#include <cmath>

#include "bmolab/domain.hpp"
#include "bmolab/rng.hpp"

using namespace bmo;

namespace {

DomainModel unit_square() {
  DomainSpec spec;
  spec.kind = DomainKind::square;
  spec.sq_corner = vec2(0, 0);
  spec.sq_side = 1;
  return build_domain(spec, cube2(-0.25, -0.25, 1.5));
}

DomainModel half_plane(double window_side = 8) {
  DomainSpec spec;
  spec.kind = DomainKind::half_plane;
  return build_domain(spec, cube2(-window_side / 2, -window_side / 2, window_side));
}

DomainModel strips1(int count, double length) {
  DomainSpec spec;
  spec.kind = DomainKind::strips_example_1;
  spec.strip_count = count;
  spec.strip_lengths.assign(static_cast<size_t>(count), length);
  double side = 8 + 2 * count;
  return build_domain(spec, cube2(-4, -1, side));
}

}  // namespace

TEST_CASE("square: center distance and membership") {
  DomainModel d = unit_square();
  CHECK(d.distance(vec2(0.5, 0.5)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.inside(vec2(0.5, 0.5)));
  CHECK(!d.inside(vec2(1.1, 0.5)));
  CHECK(d.signed_distance(vec2(1.25, 0.5)) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(d.signed_distance(vec2(1.25, 1.25)) == doctest::Approx(-0.25 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("half-plane: distance to the dividing line") {
  DomainModel d = half_plane(20);
  CHECK(d.distance(vec2(-2, 7)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.inside(vec2(-0.001, -3)));
  CHECK(!d.inside(vec2(0.001, 3)));
}

TEST_CASE("disk geometry") {
  DomainSpec spec;
  spec.kind = DomainKind::disk;
  spec.disk_center = vec2(0, 0);
  spec.disk_radius = 1;
  DomainModel d = build_domain(spec, cube2(-1.25, -1.25, 2.5));
  CHECK(d.distance(vec2(0, 0)) == doctest::Approx(1.0));
  CHECK(d.distance(vec2(0.5, 0)) == doctest::Approx(0.5));
  CHECK(d.signed_distance(vec2(2, 0)) == doctest::Approx(-1.0));
  // box distances: inside, straddling, outside
  CHECK(d.box_boundary_dist(cube2(-0.1, -0.1, 0.2)) == doctest::Approx(1.0 - 0.1 * std::sqrt(2.0)));
  CHECK(d.box_boundary_dist(cube2(0.9, -0.05, 0.2)) == 0.0);
  CHECK(d.box_boundary_dist(cube2(1.5, 0, 0.2)) == doctest::Approx(0.5));
}

TEST_CASE("strip placement: bases follow the published recurrence") {
  DomainModel d = strips1(3, 1.0);
  REQUIRE(d.strips.size() == 3);
  CHECK(d.strips[0].base == 0.0);
  // b_{n+1} = ceil(256 (b_n + 1/n + 1))/256
  double b2 = std::ceil((0.0 + 1.0 + 1.0) * 256.0) / 256.0;
  double b3 = std::ceil((b2 + 0.5 + 1.0) * 256.0) / 256.0;
  CHECK(d.strips[1].base == b2);
  CHECK(d.strips[2].base == b3);
  CHECK(d.strips[1].width == doctest::Approx(0.5));

  // a point inside strip 2
  double y2 = d.strips[1].base;
  CHECK(d.inside(vec2(0.5, y2 + 0.25 / 2)));
  // gaps at least 1
  for (size_t i = 0; i + 1 < d.strips.size(); ++i)
    CHECK(d.strips[i + 1].base - (d.strips[i].base + d.strips[i].width) >= 1.0);
}

TEST_CASE("strips: attach openings are interior, distances exact") {
  DomainModel d = strips1(3, 1.0);
  double y2 = d.strips[1].base;
  // the opening segment x == 0 inside strip 2 is interior
  CHECK(d.inside(vec2(0.0, y2 + 0.2)));
  // distance from a point deep in the left half-plane to the y-axis wall
  // between strips
  double gap_y = (d.strips[0].base + d.strips[0].width + d.strips[1].base) / 2;
  CHECK(d.distance(vec2(-3, gap_y)) == doctest::Approx(3.0).epsilon(1e-12));
  // inside a strip: distance to the nearest strip wall
  Vec2 p = vec2(0.5, y2 + 0.1);
  double expect = std::min({0.1, d.strips[1].width - 0.1, 1.0 - 0.5});
  CHECK(d.distance(p) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("signed distance is 1-Lipschitz on random pairs (all builders)") {
  std::vector<DomainModel> doms;
  doms.push_back(unit_square());
  doms.push_back(half_plane());
  {
    DomainSpec spec;
    spec.kind = DomainKind::disk;
    spec.disk_radius = 1.0;
    doms.push_back(build_domain(spec, cube2(-1.25, -1.25, 2.5)));
  }
  doms.push_back(strips1(4, 1.0));
  {
    DomainSpec spec;
    spec.kind = DomainKind::strips_example_2;
    spec.strip_count = 3;
    doms.push_back(build_domain(spec, cube2(-4, -1, 16)));
  }
  {
    DomainSpec spec;
    spec.kind = DomainKind::rect_union;
    spec.rects = {{0, 0, 2, 1}, {1.5, 0.5, 1, 2}};
    doms.push_back(build_domain(spec, cube2(-1, -1, 4)));
  }

  SplitMix64 rng(123);
  for (const DomainModel& d : doms) {
    for (int trial = 0; trial < 10000; ++trial) {
      Vec2 a = vec2(rng.uniform(d.window.corner[0], d.window.corner[0] + d.window.side),
                    rng.uniform(d.window.corner[1], d.window.corner[1] + d.window.side));
      Vec2 b = vec2(rng.uniform(d.window.corner[0], d.window.corner[0] + d.window.side),
                    rng.uniform(d.window.corner[1], d.window.corner[1] + d.window.side));
      double lhs = std::abs(d.signed_distance(a) - d.signed_distance(b));
      CHECK(lhs <= (a - b).norm() + 1e-9);
      // inside <=> positive signed distance (analytic builders)
      CHECK(d.inside(a) == (d.signed_distance(a) > 0));
    }
  }
}

TEST_CASE("box_boundary_dist lower-bounds pointwise distances") {
  DomainModel d = strips1(3, 1.0);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    Cube2 q = cube2(rng.uniform(-3, 3), rng.uniform(-1, 7), rng.uniform(0.05, 1.0));
    double bd = d.box_boundary_dist(q);
    for (int s = 0; s < 8; ++s) {
      Vec2 p = vec2(rng.uniform(q.corner[0], q.corner[0] + q.side),
                    rng.uniform(q.corner[1], q.corner[1] + q.side));
      CHECK(bd <= d.boundary_distance(p) + 1e-12);
    }
  }
}

TEST_CASE("cube_inside certificate") {
  DomainModel sq = unit_square();
  double pitch = 1.0 / 128;
  CHECK(cube_inside(cube2(0.2, 0.2, 0.2), sq, pitch));       // [0.2,0.4]^2
  CHECK(!cube_inside(cube2(-0.5, -0.5, 1.0), sq, pitch));    // exits the domain
  CHECK(!cube_inside(cube2(0, 0, 1.0), sq, pitch));          // touches the boundary

  // width bound in a strip: side 0.6 cannot sit inside a width-0.5 strip
  DomainModel st = strips1(2, 2.0);
  double y2 = st.strips[1].base;
  CHECK(!cube_inside(cube2(0.5, y2, 0.6), st, pitch));
  CHECK(cube_inside(cube2(0.5, y2 + 0.1, 0.25), st, pitch));
}

TEST_CASE("cube_inside is conservative and monotone") {
  DomainModel st = strips1(3, 1.0);
  double pitch = 1.0 / 64;
  SplitMix64 rng(99);
  int accepted = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    Cube2 q = cube2(rng.uniform(-2, 2), rng.uniform(-1, 6), rng.uniform(0.02, 0.8));
    bool in = cube_inside(q, st, pitch);
    if (!in) continue;
    ++accepted;
    // soundness: random interior points are inside the domain
    for (int s = 0; s < 16; ++s) {
      Vec2 p = vec2(rng.uniform(q.corner[0], q.corner[0] + q.side),
                    rng.uniform(q.corner[1], q.corner[1] + q.side));
      CHECK(st.inside(p));
    }
    // monotone: random subcubes are accepted at the same pitch
    for (int s = 0; s < 4; ++s) {
      double side = q.side * rng.uniform(0.2, 0.9);
      Cube2 sub = cube2(q.corner[0] + rng.uniform(0, q.side - side),
                        q.corner[1] + rng.uniform(0, q.side - side), side);
      CHECK(cube_inside(sub, st, pitch));
    }
  }
  CHECK(accepted > 50);
}

TEST_CASE("strips-example-1: a cube inside strip S_n has side at most 1/n") {
  DomainModel st = strips1(4, 2.0);
  SplitMix64 rng(11);
  for (int trial = 0; trial < 4000; ++trial) {
    Cube2 q = cube2(rng.uniform(0.0, 1.5), rng.uniform(-0.5, 8.0), rng.uniform(0.05, 1.2));
    if (!cube_inside(q, st, 1.0 / 64)) continue;
    if (q.corner[0] <= 0) continue;  // touches the half-plane side
    for (const Strip& s : st.strips)
      if (q.center()[1] > s.base && q.center()[1] < s.base + s.width)
        CHECK(q.side <= 1.0 / s.group + 1e-12);
  }
}

TEST_CASE("connectivity check at grid resolution") {
  CHECK(connected_at_resolution(unit_square(), 1.0 / 64));
  CHECK(connected_at_resolution(strips1(3, 1.0), 1.0 / 64));
  // two separated rectangles are not connected
  DomainSpec spec;
  spec.kind = DomainKind::rect_union;
  spec.rects = {{0, 0, 1, 1}, {2, 0, 1, 1}};
  DomainModel d = build_domain(spec, cube2(-0.5, -0.5, 4));
  CHECK(!connected_at_resolution(d, 1.0 / 64));
}

TEST_CASE("builder validation errors name the field") {
  DomainSpec spec;
  spec.kind = DomainKind::strips_example_1;
  spec.strip_count = 2;
  spec.strip_lengths = {1.0};  // wrong length
  try {
    build_domain(spec, cube2(0, 0, 4));
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.field() == "lengths");
  }
  DomainSpec disk;
  disk.kind = DomainKind::disk;
  disk.disk_radius = -1;
  CHECK_THROWS_AS(build_domain(disk, cube2(0, 0, 4)), ValidationError);
}
