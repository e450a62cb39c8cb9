#include "bmolab/whitney.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "bmolab/errors.hpp"

namespace bmo {

namespace {

uint64_t key_of(const DyadicCube2& dc) {
  // level < 2^6, indices < 2^29 each
  return (static_cast<uint64_t>(dc.level) << 58) ^
         (static_cast<uint64_t>(dc.index[0] & ((int64_t(1) << 29) - 1)) << 29) ^
         static_cast<uint64_t>(dc.index[1] & ((int64_t(1) << 29) - 1));
}

struct Builder {
  const DomainModel& dom;
  Owner owner;
  const Cube2& window;
  int min_level;
  std::vector<WhitneyCube> accepted;
  double residue_volume = 0;
  int64_t residue_count = 0;

  bool in_open_set(const Vec2& p) const {
    double sd = dom.signed_distance(p);
    return owner == Owner::domain ? sd > 0 : sd < 0;
  }

  Cube2 world(const DyadicCube2& dc) const {
    Cube2 unit = dc.to_cube();
    return Cube2{window.corner + window.side * unit.corner, window.side * unit.side};
  }

  void recurse(const DyadicCube2& dc) {
    Cube2 q = world(dc);
    double bd = dom.box_boundary_dist(q);
    bool interior = bd > 0 && in_open_set(q.center());
    if (interior) {
      double diam = q.diam();
      if (bd >= diam) {
        assert(bd <= 4 * diam * (1 + 1e-12));
        accepted.push_back({dc, q, bd});
        return;
      }
      if (dc.level >= min_level) {
        residue_volume += q.volume();
        residue_count += 1;
        return;
      }
      for (int c = 0; c < 4; ++c) recurse(dc.child(c));
      return;
    }
    bool exterior = bd > 0 && !in_open_set(q.center());
    if (exterior) return;  // entirely on the other side
    // the cube meets the boundary
    if (dc.level >= min_level) {
      residue_volume += q.volume();
      residue_count += 1;
      return;
    }
    for (int c = 0; c < 4; ++c) recurse(dc.child(c));
  }
};

}  // namespace

std::optional<int32_t> WhitneyDecomposition::find(const DyadicCube2& dc) const {
  auto it = index_.find(key_of(dc));
  if (it == index_.end()) return std::nullopt;
  // guard against rare key collisions
  if (!(cubes[static_cast<size_t>(it->second)].dc == dc)) return std::nullopt;
  return it->second;
}

const std::vector<int32_t>& WhitneyDecomposition::ids_at_level(int32_t level) const {
  static const std::vector<int32_t> empty;
  int32_t off = level - level_lo_;
  if (off < 0 || off >= static_cast<int32_t>(by_level_.size())) return empty;
  return by_level_[static_cast<size_t>(off)];
}

std::optional<int32_t> WhitneyDecomposition::locate(const Vec2& p) const {
  // unit coordinates of p; walk levels from coarse to fine
  double ux = (p[0] - window.corner[0]) / window.side;
  double uy = (p[1] - window.corner[1]) / window.side;
  if (ux < 0 || ux >= 1 || uy < 0 || uy >= 1) return std::nullopt;
  for (int32_t lvl = level_lo_; lvl <= level_hi(); ++lvl) {
    if (ids_at_level(lvl).empty()) continue;
    double scale = std::ldexp(1.0, lvl);
    DyadicCube2 dc;
    dc.level = lvl;
    dc.index[0] = static_cast<int64_t>(std::floor(ux * scale));
    dc.index[1] = static_cast<int64_t>(std::floor(uy * scale));
    if (auto id = find(dc)) return id;
  }
  return std::nullopt;
}

WhitneyDecomposition whitney_decompose(const DomainModel& dom, Owner owner, const Cube2& window,
                                       int min_level) {
  window.validate("window");
  if (min_level < 1 || min_level > 28)
    throw ValidationError("min_level", "whitney: min_level must be in [1,28]");

  Builder b{dom, owner, window, min_level, {}, 0, 0};
  {
    // reject a window with no boundary in reach: the decomposition would need
    // cubes larger than the window
    Cube2 q = window;
    double bd = dom.box_boundary_dist(q);
    if (bd > 0 && b.in_open_set(q.center()) && bd > 4 * q.diam())
      throw ValidationError("window", "whitney: window lies deep inside the open set; enlarge it");
  }
  b.recurse(DyadicCube2{});

  WhitneyDecomposition out;
  out.owner = owner;
  out.window = window;
  out.min_level = min_level;
  out.cubes = std::move(b.accepted);
  out.residue_volume = b.residue_volume;
  out.residue_count = b.residue_count;
  std::sort(out.cubes.begin(), out.cubes.end(),
            [](const WhitneyCube& a, const WhitneyCube& c) { return a.dc < c.dc; });

  double accepted_volume = 0;
  for (const WhitneyCube& wc : out.cubes) accepted_volume += wc.box.volume();
  out.accepted_volume = accepted_volume;
  double covered = accepted_volume + out.residue_volume;
  if (covered > 0 && out.residue_volume > 0.01 * covered)
    throw ResolutionError("whitney: boundary residue exceeds 1% of the covered volume; increase min_level",
                          0);

  // index and per-level buckets
  out.index_.reserve(out.cubes.size() * 2);
  int32_t lo = 1 << 30, hi = -(1 << 30);
  for (const WhitneyCube& wc : out.cubes) {
    lo = std::min(lo, wc.dc.level);
    hi = std::max(hi, wc.dc.level);
  }
  if (out.cubes.empty()) lo = hi = 0;
  out.level_lo_ = lo;
  out.by_level_.assign(static_cast<size_t>(hi - lo + 1), {});
  for (int32_t id = 0; id < static_cast<int32_t>(out.cubes.size()); ++id) {
    out.index_[key_of(out.cubes[static_cast<size_t>(id)].dc)] = id;
    out.by_level_[static_cast<size_t>(out.cubes[static_cast<size_t>(id)].dc.level - lo)].push_back(id);
  }

  // Adjacency: each cube looks up touching cubes at its own and coarser
  // levels (at most 3 candidate indices per axis there); finer neighbors are
  // added by symmetry when the finer cube runs its own query.
  out.adjacency.assign(out.cubes.size(), {});
  for (int32_t id = 0; id < static_cast<int32_t>(out.cubes.size()); ++id) {
    const DyadicCube2& a = out.cubes[static_cast<size_t>(id)].dc;
    for (int32_t lvl = lo; lvl <= a.level; ++lvl) {
      if (out.ids_at_level(lvl).empty()) continue;
      int shift = a.level - lvl;
      int64_t max_idx = (int64_t(1) << lvl) - 1;
      int64_t jx0 = std::max<int64_t>(0, (a.index[0] - 1) >> shift);
      int64_t jx1 = std::min<int64_t>(max_idx, (a.index[0] + 1) >> shift);
      int64_t jy0 = std::max<int64_t>(0, (a.index[1] - 1) >> shift);
      int64_t jy1 = std::min<int64_t>(max_idx, (a.index[1] + 1) >> shift);
      for (int64_t jx = jx0; jx <= jx1; ++jx)
        for (int64_t jy = jy0; jy <= jy1; ++jy) {
          DyadicCube2 cand{lvl, {jx, jy}};
          if (cand == a) continue;
          auto oid = out.find(cand);
          if (!oid) continue;
          if (!cand.touches(a)) continue;
          if (lvl == a.level && !(cand < a)) continue;  // count same-level pairs once
          out.adjacency[static_cast<size_t>(id)].push_back(*oid);
          out.adjacency[static_cast<size_t>(*oid)].push_back(id);
        }
    }
  }
  for (auto& v : out.adjacency) std::sort(v.begin(), v.end());
  return out;
}

CubeMatching match_cubes(const WhitneyDecomposition& eprime, const WhitneyDecomposition& e,
                         double lambda, double radius_factor) {
  if (!(lambda > 0)) throw ValidationError("lambda", "match_cubes: lambda must be positive");
  if (!(eprime.window == e.window))
    throw ValidationError("window", "match_cubes: decompositions must share the window");

  CubeMatching m;
  m.lambda = lambda;
  m.radius_factor = radius_factor;
  m.match.assign(eprime.cubes.size(), -2);

  for (int32_t qid = 0; qid < static_cast<int32_t>(eprime.cubes.size()); ++qid) {
    const WhitneyCube& q = eprime.cubes[static_cast<size_t>(qid)];
    double side = q.box.side;
    if (side > lambda) continue;  // exempt

    double max_set_dist = radius_factor * side;
    int32_t best = -1;
    double best_center = 0;
    // candidate sides side, 2*side, 4*side: levels q.level, q.level-1, q.level-2
    for (int dl = 0; dl <= 2; ++dl) {
      int32_t lvl = q.dc.level - dl;
      const auto& ids = e.ids_at_level(lvl);
      if (ids.empty()) continue;
      double cand_side = eprime.window.side * std::ldexp(1.0, -lvl);
      double cell = cand_side;
      Vec2 qc = q.box.center();
      // ring search around q's center in the candidate level's index grid
      int64_t ci = static_cast<int64_t>(std::floor((qc[0] - e.window.corner[0]) / cell));
      int64_t cj = static_cast<int64_t>(std::floor((qc[1] - e.window.corner[1]) / cell));
      int64_t max_ring = static_cast<int64_t>(std::ceil(max_set_dist / cell)) + 2;
      for (int64_t ring = 0; ring <= max_ring; ++ring) {
        if (best >= 0 && (static_cast<double>(ring) - 1.5) * cell > best_center) break;
        for (int64_t jx = ci - ring; jx <= ci + ring; ++jx)
          for (int64_t jy = cj - ring; jy <= cj + ring; ++jy) {
            if (std::max(std::abs(jx - ci), std::abs(jy - cj)) != ring) continue;
            if (jx < 0 || jy < 0 || jx >= (int64_t(1) << lvl) || jy >= (int64_t(1) << lvl)) continue;
            DyadicCube2 cand{lvl, {jx, jy}};
            auto oid = e.find(cand);
            if (!oid) continue;
            const WhitneyCube& star = e.cubes[static_cast<size_t>(*oid)];
            if (q.box.dist_to_cube(star.box) > max_set_dist) continue;
            double cd = (star.box.center() - qc).norm();
            bool better;
            if (best < 0) better = true;
            else if (cd != best_center) better = cd < best_center;
            else {
              const WhitneyCube& cur = e.cubes[static_cast<size_t>(best)];
              better = cand < cur.dc;  // lexicographic (level, index) tie break
            }
            if (better) {
              best = *oid;
              best_center = cd;
            }
          }
      }
    }
    m.match[static_cast<size_t>(qid)] = best;
    if (best >= 0) {
      m.matched_count += 1;
      double sd = q.box.dist_to_cube(e.cubes[static_cast<size_t>(best)].box);
      m.distance_constant = std::max(m.distance_constant, sd / side);
    } else {
      m.unmatched.push_back(qid);
    }
  }
  return m;
}

}  // namespace bmo
