#include "bmolab/epsdelta.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "bmolab/errors.hpp"
#include "bmolab/parallel.hpp"
#include "bmolab/rng.hpp"

namespace bmo {

void CigarQuery::validate(const DomainModel& dom) const {
  if (!(eps > 0) || eps > 1) throw ValidationError("eps", "cigar query: eps must be in (0,1]");
  if (!(delta > 0)) throw ValidationError("delta", "cigar query: delta must be positive");
  if (!dom.inside(x) || !dom.inside(y))
    throw ValidationError("points", "cigar query: both points must lie inside the domain");
  if (!((x - y).norm() < delta)) throw ValidationError("points", "cigar query: need |x-y| < delta");
}

namespace {

struct Lattice {
  Vec2 origin;
  double h = 0;
  int64_t n = 0;

  Vec2 center(int64_t i, int64_t j) const {
    return vec2(origin[0] + (static_cast<double>(i) + 0.5) * h, origin[1] + (static_cast<double>(j) + 0.5) * h);
  }
  int64_t cell_of(double c, double o) const {
    return static_cast<int64_t>(std::floor((c - o) / h));
  }
};

double cigar_bound(const Vec2& z, const Vec2& x, const Vec2& y, double eps) {
  double sep = (x - y).norm();
  return eps * (z - x).norm() * (z - y).norm() / sep;
}

}  // namespace

CigarCertificate check_pair(const CigarQuery& q, const DomainModel& dom, double h) {
  q.validate(dom);
  const Cube2& w = dom.window;
  Lattice lat{w.corner, h, std::llround(w.side / h)};
  if (lat.n < 8) throw ResolutionError("check_pair: grid too coarse", w.side / 8);

  auto idx = [&](int64_t i, int64_t j) { return static_cast<size_t>(j * lat.n + i); };
  int64_t si = lat.cell_of(q.x[0], w.corner[0]), sj = lat.cell_of(q.x[1], w.corner[1]);
  int64_t ti = lat.cell_of(q.y[0], w.corner[0]), tj = lat.cell_of(q.y[1], w.corner[1]);
  auto in_range = [&](int64_t i, int64_t j) { return i >= 0 && j >= 0 && i < lat.n && j < lat.n; };
  if (!in_range(si, sj) || !in_range(ti, tj))
    throw ValidationError("points", "check_pair: endpoints outside the window");
  if (!dom.inside(lat.center(si, sj)) || !dom.inside(lat.center(ti, tj)))
    throw ResolutionError("check_pair: endpoint cell center falls outside the domain", h / 2);

  size_t total = static_cast<size_t>(lat.n * lat.n);
  // 0 unknown, 1 inside, 2 outside (lazily classified)
  std::vector<uint8_t> inside_cache(total, 0);
  auto is_inside = [&](int64_t i, int64_t j) {
    size_t k = idx(i, j);
    if (!inside_cache[k]) inside_cache[k] = dom.inside(lat.center(i, j)) ? 1 : 2;
    return inside_cache[k] == 1;
  };

  // component check: BFS inside the domain, clearance ignored
  {
    std::vector<uint8_t> seen(total, 0);
    std::vector<size_t> stack{idx(si, sj)};
    seen[idx(si, sj)] = 1;
    bool reached = false;
    while (!stack.empty() && !reached) {
      size_t cur = stack.back();
      stack.pop_back();
      int64_t ci = static_cast<int64_t>(cur) % lat.n, cj = static_cast<int64_t>(cur) / lat.n;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (!di && !dj) continue;
          int64_t i = ci + di, j = cj + dj;
          if (!in_range(i, j) || seen[idx(i, j)]) continue;
          if (!is_inside(i, j)) continue;
          seen[idx(i, j)] = 1;
          if (i == ti && j == tj) reached = true;
          stack.push_back(idx(i, j));
        }
    }
    if (!reached && !(si == ti && sj == tj))
      throw ComponentError("check_pair: endpoints lie in different grid components of the domain");
  }

  // Dijkstra over admissible nodes
  auto admissible = [&](int64_t i, int64_t j) {
    if (!is_inside(i, j)) return false;
    Vec2 z = lat.center(i, j);
    return dom.distance(z) >= cigar_bound(z, q.x, q.y, q.eps) - 2 * h;
  };

  CigarCertificate cert;
  cert.length_bound = (q.x - q.y).norm() / q.eps + 4 * h;

  if (!admissible(si, sj) || !admissible(ti, tj)) {
    cert.failure = "no-admissible-path";
    return cert;
  }

  std::vector<double> dist(total, -1.0);
  std::vector<int32_t> parent(total, -1);
  using Node = std::pair<double, size_t>;
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> pq;
  dist[idx(si, sj)] = 0;
  pq.push({0.0, idx(si, sj)});
  size_t goal = idx(ti, tj);
  const double diag = h * std::sqrt(2.0);
  bool found = false;
  while (!pq.empty()) {
    auto [d, cur] = pq.top();
    pq.pop();
    if (d > dist[cur] && dist[cur] >= 0) continue;
    if (cur == goal) {
      found = true;
      break;
    }
    int64_t ci = static_cast<int64_t>(cur) % lat.n, cj = static_cast<int64_t>(cur) / lat.n;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (!di && !dj) continue;
        int64_t i = ci + di, j = cj + dj;
        if (!in_range(i, j)) continue;
        size_t nk = idx(i, j);
        double nd = d + ((di && dj) ? diag : h);
        if (dist[nk] >= 0 && dist[nk] <= nd) continue;
        if (!admissible(i, j)) continue;
        dist[nk] = nd;
        parent[nk] = static_cast<int32_t>(cur);
        pq.push({nd, nk});
      }
  }
  if (!found) {
    cert.failure = "no-admissible-path";
    return cert;
  }

  std::vector<Vec2> rev;
  for (int64_t cur = static_cast<int64_t>(goal);;) {
    int64_t ci = cur % lat.n, cj = cur / lat.n;
    rev.push_back(lat.center(ci, cj));
    int32_t p = parent[static_cast<size_t>(cur)];
    if (p < 0) break;
    cur = p;
  }
  cert.path.assign(rev.rbegin(), rev.rend());

  // recompute from the polyline so the certificate re-verifies bitwise
  double len = 0;
  for (size_t s = 1; s < cert.path.size(); ++s) len += (cert.path[s] - cert.path[s - 1]).norm();
  cert.arclength = len;
  double margin = kRayExtent;
  for (const Vec2& z : cert.path)
    margin = std::min(margin, dom.distance(z) - cigar_bound(z, q.x, q.y, q.eps));
  cert.clearance_margin = margin;

  if (len <= cert.length_bound) cert.success = true;
  else cert.failure = "path-too-long";
  return cert;
}

ScanResult scan_domain(const DomainModel& dom, double eps, double delta, int64_t samples,
                       uint64_t seed, double h, int64_t max_witnesses) {
  if (samples < 1) throw ValidationError("samples", "scan_domain: samples must be >= 1");
  const Cube2& w = dom.window;
  int64_t n = std::llround(w.side / h);

  // deterministic pair list first, parallel evaluation after
  SplitMix64 rng(seed);
  std::vector<std::pair<Vec2, Vec2>> pairs;
  int64_t guard = samples * 10000;
  while (static_cast<int64_t>(pairs.size()) < samples && guard-- > 0) {
    auto pick = [&]() {
      int64_t i = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(n));
      int64_t j = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(n));
      return vec2(w.corner[0] + (static_cast<double>(i) + 0.5) * h, w.corner[1] + (static_cast<double>(j) + 0.5) * h);
    };
    Vec2 x = pick(), y = pick();
    if (!dom.inside(x) || !dom.inside(y)) continue;
    double sep = (x - y).norm();
    if (!(sep > 0) || !(sep < delta)) continue;
    pairs.emplace_back(x, y);
  }

  ScanResult out;
  out.pairs = static_cast<int64_t>(pairs.size());
  std::vector<ScanWitness> wit(pairs.size());
  std::vector<uint8_t> limited(pairs.size(), 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t p = 0; p < static_cast<int64_t>(pairs.size()); ++p) {
    CigarQuery q{pairs[static_cast<size_t>(p)].first, pairs[static_cast<size_t>(p)].second, eps, delta};
    ScanWitness& sw = wit[static_cast<size_t>(p)];
    sw.x = q.x;
    sw.y = q.y;
    try {
      CigarCertificate cert = check_pair(q, dom, h);
      sw.success = cert.success;
      sw.failure = cert.failure;
      sw.arclength = cert.arclength;
      sw.length_bound = cert.length_bound;
      sw.clearance_margin = cert.clearance_margin;
    } catch (const ComponentError&) {
      limited[static_cast<size_t>(p)] = 1;
      sw.success = false;
      sw.failure = "resolution-limited";
    } catch (const ResolutionError&) {
      limited[static_cast<size_t>(p)] = 1;
      sw.success = false;
      sw.failure = "resolution-limited";
    }
  }

  for (size_t p = 0; p < wit.size(); ++p) {
    if (limited[p]) {
      out.resolution_limited += 1;
      continue;
    }
    if (!wit[p].success) out.failures += 1;
  }
  int64_t counted = out.pairs - out.resolution_limited;
  out.failure_rate = counted > 0 ? static_cast<double>(out.failures) / static_cast<double>(counted) : 0.0;

  // witnesses: all failures, then the worst successful margins
  std::vector<size_t> order(wit.size());
  for (size_t p = 0; p < wit.size(); ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (wit[a].success != wit[b].success) return !wit[a].success;
    return wit[a].clearance_margin < wit[b].clearance_margin;
  });
  for (size_t s = 0; s < order.size() && static_cast<int64_t>(out.witnesses.size()) < max_witnesses; ++s)
    out.witnesses.push_back(wit[order[s]]);
  return out;
}

}  // namespace bmo
