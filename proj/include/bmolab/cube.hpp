#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>

#include "bmolab/errors.hpp"

namespace bmo {

/// Small fixed-dimension point/vector. The library's experiments run in the
/// plane; the basic geometric types stay dimension-generic.
template <int N>
struct Vec {
  std::array<double, N> c{};

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  friend Vec operator+(Vec a, const Vec& b) {
    for (int i = 0; i < N; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    for (int i = 0; i < N; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend Vec operator*(double s, Vec a) {
    for (int i = 0; i < N; ++i) a.c[i] *= s;
    return a;
  }
  friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < N; ++i) s += c[i] * c[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  bool finite() const {
    for (int i = 0; i < N; ++i)
      if (!std::isfinite(c[i])) return false;
    return true;
  }

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << "(";
    for (int i = 0; i < N; ++i) os << (i ? "," : "") << v.c[i];
    return os << ")";
  }
};

using Vec1 = Vec<1>;
using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

inline Vec2 vec2(double x, double y) { return Vec2{{x, y}}; }

/// Axis-parallel cube: lower corner plus sidelength.
template <int N>
struct Cube {
  Vec<N> corner{};
  double side = 0;

  bool valid() const { return corner.finite() && std::isfinite(side) && side > 0; }

  void validate(const char* what = "cube") const {
    if (!valid()) throw ValidationError(what, std::string(what) + ": side must be positive and finite");
  }

  Vec<N> center() const {
    Vec<N> c = corner;
    for (int i = 0; i < N; ++i) c[i] += side / 2;
    return c;
  }
  Vec<N> max() const {
    Vec<N> c = corner;
    for (int i = 0; i < N; ++i) c[i] += side;
    return c;
  }
  double volume() const {
    double v = 1;
    for (int i = 0; i < N; ++i) v *= side;
    return v;
  }
  double diam() const { return side * std::sqrt(static_cast<double>(N)); }

  bool contains(const Vec<N>& p) const {
    for (int i = 0; i < N; ++i)
      if (p[i] < corner[i] || p[i] > corner[i] + side) return false;
    return true;
  }
  bool contains(const Cube& q) const {
    for (int i = 0; i < N; ++i)
      if (q.corner[i] < corner[i] || q.corner[i] + q.side > corner[i] + side) return false;
    return true;
  }

  /// Cube scaled about its center (2Q in the usual notation has factor 2).
  Cube scaled(double factor) const {
    Cube r;
    r.side = side * factor;
    for (int i = 0; i < N; ++i) r.corner[i] = corner[i] + side / 2 - r.side / 2;
    return r;
  }

  /// Euclidean distance from this cube (as a set) to a point.
  double dist_to_point(const Vec<N>& p) const {
    double s = 0;
    for (int i = 0; i < N; ++i) {
      double g = 0;
      if (p[i] < corner[i]) g = corner[i] - p[i];
      else if (p[i] > corner[i] + side) g = p[i] - (corner[i] + side);
      s += g * g;
    }
    return std::sqrt(s);
  }

  /// Euclidean set distance between two cubes (0 when they touch or overlap).
  double dist_to_cube(const Cube& q) const {
    double s = 0;
    for (int i = 0; i < N; ++i) {
      double lo = corner[i], hi = corner[i] + side;
      double qlo = q.corner[i], qhi = q.corner[i] + q.side;
      double g = 0;
      if (qlo > hi) g = qlo - hi;
      else if (lo > qhi) g = lo - qhi;
      s += g * g;
    }
    return std::sqrt(s);
  }

  friend bool operator==(const Cube& a, const Cube& b) { return a.corner == b.corner && a.side == b.side; }
};

using Cube1 = Cube<1>;
using Cube2 = Cube<2>;
using Cube3 = Cube<3>;

inline Cube2 cube2(double x, double y, double side) { return Cube2{vec2(x, y), side}; }

/// Dyadic cube on the reference coordinate system: level k, integer index,
/// occupying index*2^-k + [0,2^-k]^N. Whitney decompositions place these in
/// window-normalized coordinates (the window maps to [0,1]^N).
template <int N>
struct DyadicCube {
  int32_t level = 0;
  std::array<int64_t, N> index{};

  double side() const { return std::ldexp(1.0, -level); }

  Cube<N> to_cube() const {
    Cube<N> c;
    c.side = side();
    for (int i = 0; i < N; ++i) c.corner[i] = static_cast<double>(index[i]) * c.side;
    return c;
  }

  DyadicCube parent() const {
    DyadicCube p;
    p.level = level - 1;
    for (int i = 0; i < N; ++i) p.index[i] = index[i] >> 1;  // floor for nonnegative indices
    return p;
  }

  DyadicCube child(int which) const {
    DyadicCube c;
    c.level = level + 1;
    for (int i = 0; i < N; ++i) c.index[i] = 2 * index[i] + ((which >> i) & 1);
    return c;
  }

  /// Exact containment test in integer arithmetic (this contains q).
  bool contains(const DyadicCube& q) const {
    if (q.level < level) return false;
    int shift = q.level - level;
    for (int i = 0; i < N; ++i)
      if ((q.index[i] >> shift) != index[i]) return false;
    return true;
  }

  /// Closed cubes share at least a boundary point (integer-exact).
  bool touches(const DyadicCube& q) const {
    const DyadicCube& fine = (level >= q.level) ? *this : q;
    const DyadicCube& coarse = (level >= q.level) ? q : *this;
    int shift = fine.level - coarse.level;
    for (int i = 0; i < N; ++i) {
      // coarse covers [ci<<shift, (ci+1)<<shift] at the fine level
      int64_t lo = coarse.index[i] << shift, hi = (coarse.index[i] + 1) << shift;
      if (fine.index[i] + 1 < lo || fine.index[i] > hi) return false;
    }
    return true;
  }

  friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return a.level == b.level && a.index == b.index;
  }
  friend bool operator<(const DyadicCube& a, const DyadicCube& b) {
    if (a.level != b.level) return a.level < b.level;
    return a.index < b.index;
  }
};

using DyadicCube2 = DyadicCube<2>;

}  // namespace bmo
