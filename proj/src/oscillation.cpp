#include "bmolab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "bmolab/errors.hpp"
#include "bmolab/parallel.hpp"

namespace bmo {

std::vector<double> family_scales(double t_min, double t_max, int pitch_divisor) {
  if (!(t_min > 0) || !(t_max > t_min))
    throw ValidationError("scales", "family_scales: need 0 < t_min < t_max");
  std::vector<double> scales;
  double top = t_max * (1.0 - 1.0 / pitch_divisor);
  int k_hi = static_cast<int>(std::floor(-std::log2(t_min)));        // largest k with 2^-k >= t_min
  int k_lo = static_cast<int>(std::ceil(-std::log2(t_max) + 1e-12)); // smallest k with 2^-k < t_max-ish
  for (int k = k_hi; k >= k_lo; --k) {
    double s = std::ldexp(1.0, -k);
    if (s >= t_min && s < t_max && s < top) scales.push_back(s);
  }
  if (top >= t_min) scales.push_back(top);
  if (scales.empty()) scales.push_back(t_min);
  return scales;
}

CubeFamily enumerate_cubes(const DomainModel& dom, const std::vector<double>& scales_in,
                           int pitch_divisor, double cert_pitch, double grid_pitch,
                           const GridFunction* mask_hint) {
  if (pitch_divisor != 2 && pitch_divisor != 4 && pitch_divisor != 8)
    throw ValidationError("pitch_divisor", "enumerate_cubes: pitch divisor must be 2, 4 or 8");
  if (!(cert_pitch > 0)) throw ValidationError("cert_pitch", "enumerate_cubes: cert pitch must be positive");

  std::vector<double> scales = scales_in;
  if (grid_pitch > 0) {
    // snap sides onto the cell lattice so members stay grid-aligned
    std::vector<double> snapped;
    for (double s : scales) {
      double m = std::floor(s / grid_pitch + 1e-9);
      if (m < 4) continue;
      double v = m * grid_pitch;
      bool dup = false;
      for (double t : snapped) dup = dup || t == v;
      if (!dup) snapped.push_back(v);
    }
    scales = snapped;
  }

  const Cube2& w = dom.window;
  CubeFamily fam;
  fam.scale_min = kRayExtent;
  std::ostringstream gen;
  gen << "lattice pitch side/" << pitch_divisor << ", scales";

  for (double side : scales) {
    if (!(side > 0) || side > w.side) continue;
    gen << " " << side;
    double pitch = side / pitch_divisor;
    if (grid_pitch > 0) pitch = grid_pitch * std::max(1.0, std::floor(pitch / grid_pitch + 1e-9));
    int64_t steps = static_cast<int64_t>(std::floor((w.side - side) / pitch + 1e-9)) + 1;
    std::vector<std::vector<Cube2>> rows(static_cast<size_t>(steps));
    // Reject-only prefilter. A probe point strictly interior to the cube
    // whose CELL CENTER also lies in the cube gives a sound rejection: an
    // unmasked cell center inside the cube is a point of the cube outside
    // the domain. Center and quarter points qualify once side >= 2h.
    bool use_hint = mask_hint && side >= 2 * mask_hint->h;
    auto masked_cell_center_in_cube = [&](const Cube2& q, double x, double y) {
      int64_t i = static_cast<int64_t>(std::floor((x - mask_hint->origin[0]) / mask_hint->h));
      int64_t j = static_cast<int64_t>(std::floor((y - mask_hint->origin[1]) / mask_hint->h));
      if (i < 0 || j < 0 || i >= mask_hint->nx || j >= mask_hint->ny) return true;
      Vec2 cc = mask_hint->cell_center(i, j);
      if (!q.contains(cc)) return true;  // proxy point left the cube: no verdict
      return mask_hint->mask[static_cast<size_t>(mask_hint->idx(i, j))] != 0;
    };
#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t jy = 0; jy < steps; ++jy) {
      for (int64_t jx = 0; jx < steps; ++jx) {
        Cube2 q{vec2(w.corner[0] + static_cast<double>(jx) * pitch, w.corner[1] + static_cast<double>(jy) * pitch), side};
        if (use_hint) {
          Vec2 c = q.center();
          double quarter = side / 4;
          if (!masked_cell_center_in_cube(q, c[0], c[1]) ||
              !masked_cell_center_in_cube(q, c[0] - quarter, c[1] - quarter) ||
              !masked_cell_center_in_cube(q, c[0] + quarter, c[1] - quarter) ||
              !masked_cell_center_in_cube(q, c[0] - quarter, c[1] + quarter) ||
              !masked_cell_center_in_cube(q, c[0] + quarter, c[1] + quarter))
            continue;
        }
        if (cube_inside(q, dom, cert_pitch)) rows[static_cast<size_t>(jy)].push_back(q);
      }
    }
    for (auto& r : rows)
      for (const Cube2& q : r) {
        fam.cubes.push_back(q);
        fam.scale_min = std::min(fam.scale_min, side);
        fam.scale_max = std::max(fam.scale_max, side);
      }
  }
  fam.generator = gen.str();
  if (fam.cubes.empty())
    throw NotEvaluableError("enumerate_cubes: no cube of the requested scales fits inside the domain");
  return fam;
}

CubeFamily enumerate_cubes(const DomainModel& dom, double t_min, double t_max, int pitch_divisor,
                           double cert_pitch, double grid_pitch, const GridFunction* mask_hint) {
  return enumerate_cubes(dom, family_scales(t_min, t_max, pitch_divisor), pitch_divisor, cert_pitch,
                         grid_pitch, mask_hint);
}

double mean_oscillation(const GridFunction& f, const Cube2& q) {
  GridFunction::Range r = f.range_in_cube(q);
  int64_t c = f.masked_count(r);
  if (c < kMinCubeCells)
    throw ResolutionError("cube holds fewer than 4^n masked cells", q.side / 4.0);
  double mean = f.masked_sum(r) / static_cast<double>(c);
  double dev = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (f.mask[k]) dev += std::abs(f.values[k] - mean);
    }
  return dev / static_cast<double>(c);
}

namespace {

// Order-independent argmax: strictly larger value wins; ties go to the
// lexicographically smaller cube so any reduction order yields one winner.
bool better(double value, const Cube2& q, const ArgMax& cur) {
  if (!cur.valid) return true;
  if (value != cur.value) return value > cur.value;
  if (q.side != cur.cube.side) return q.side < cur.cube.side;
  if (q.corner[0] != cur.cube.corner[0]) return q.corner[0] < cur.cube.corner[0];
  return q.corner[1] < cur.cube.corner[1];
}

template <class Eval>
ArgMax family_max(const CubeFamily& family, Eval&& eval) {
  int nt = worker_count();
  std::vector<ArgMax> part(static_cast<size_t>(nt));
#pragma omp parallel for schedule(dynamic, 64)
  for (int64_t idx = 0; idx < static_cast<int64_t>(family.cubes.size()); ++idx) {
#ifdef _OPENMP
    ArgMax& mine = part[static_cast<size_t>(omp_get_thread_num())];
#else
    ArgMax& mine = part[0];
#endif
    const Cube2& q = family.cubes[static_cast<size_t>(idx)];
    double v = eval(q);
    if (v == -kRayExtent) continue;  // below the cell minimum: skipped
    if (better(v, q, mine)) mine = {v, q, true};
  }
  ArgMax best;
  for (const ArgMax& p : part)
    if (p.valid && better(p.value, p.cube, best)) best = p;
  return best;
}

}  // namespace

// Family members whose masked-cell count falls below the statistical minimum
// (possible when the function's mask excludes flagged cells) are skipped:
// the sup is then over a subfamily and never inflated.
ArgMax sup_oscillation(const GridFunction& f, const CubeFamily& family) {
  return family_max(family, [&](const Cube2& q) -> double {
    GridFunction::Range r = f.range_in_cube(q);
    int64_t c = f.masked_count(r);
    if (c < kMinCubeCells) return -kRayExtent;
    double mean = f.masked_sum(r) / static_cast<double>(c);
    double dev = 0;
    for (int64_t j = r.j0; j <= r.j1; ++j)
      for (int64_t i = r.i0; i <= r.i1; ++i) {
        size_t k = static_cast<size_t>(f.idx(i, j));
        if (f.mask[k]) dev += std::abs(f.values[k] - mean);
      }
    return dev / static_cast<double>(c);
  });
}

ArgMax sup_abs_average(const GridFunction& f, const CubeFamily& family) {
  return family_max(family, [&](const Cube2& q) -> double {
    GridFunction::Range r = f.range_in_cube(q);
    int64_t c = f.masked_count(r);
    if (c < kMinCubeCells) return -kRayExtent;
    return f.masked_abs_sum(r) / static_cast<double>(c);
  });
}

double omega(const GridFunction& f, const DomainModel& dom, double t, const CubeFamily& family) {
  (void)dom;
  if (family.cubes.empty()) throw NotEvaluableError("omega: empty cube family");
  if (!(family.scale_max < t) || !(family.scale_min > 0))
    throw ValidationError("family", "omega: family scales must lie in (0, t)");
  ArgMax m = sup_oscillation(f, family);
  return m.value;
}

namespace {

FamilyStats stats_of(const CubeFamily& fam) {
  return {static_cast<int64_t>(fam.cubes.size()), fam.scale_min, fam.scale_max};
}

NormReport norm_over_families(const GridFunction& f, const CubeFamily& small, const CubeFamily& large,
                              AverageVariant variant) {
  NormReport rep;
  rep.variant = variant;
  rep.argmax_osc = sup_oscillation(f, small);
  rep.oscillation_part = rep.argmax_osc.valid ? rep.argmax_osc.value : 0.0;
  rep.argmax_avg = sup_abs_average(f, large);
  rep.average_part = rep.argmax_avg.valid ? rep.argmax_avg.value : 0.0;
  rep.total = rep.oscillation_part + rep.average_part;
  rep.small_family = stats_of(small);
  rep.large_family = stats_of(large);
  return rep;
}

void check_norm_params(const GridFunction& f, const NormParams& p) {
  double side = static_cast<double>(f.nx) * f.h;
  if (!(p.lambda > 4 * f.h) || !(p.lambda < side))
    throw ValidationError("lambda", "bmo_norm: lambda must lie in (4h, window side)");
}

double effective_cert_pitch(const GridFunction& f, const NormParams& p) {
  return p.cert_pitch > 0 ? p.cert_pitch : f.h / 8.0;
}

std::vector<double> large_scales(double lambda, double window_side, int pitch_divisor,
                                 AverageVariant variant) {
  if (variant == AverageVariant::exactly_lambda) return {lambda};
  std::vector<double> scales = family_scales(lambda, window_side, pitch_divisor);
  bool has_lambda = false;
  for (double s : scales) has_lambda = has_lambda || s == lambda;
  if (!has_lambda) scales.insert(scales.begin(), lambda);
  return scales;
}

}  // namespace

NormReport bmo_norm(const GridFunction& f, const DomainModel& dom, const NormParams& params) {
  check_norm_params(f, params);
  double cert = effective_cert_pitch(f, params);
  double side = static_cast<double>(f.nx) * f.h;
  CubeFamily small = enumerate_cubes(dom, 4 * f.h, params.lambda, params.pitch_divisor, cert, 0, &f);
  CubeFamily large = enumerate_cubes(dom, large_scales(params.lambda, side, params.pitch_divisor, params.variant),
                                     params.pitch_divisor, cert, 0, &f);
  return norm_over_families(f, small, large, params.variant);
}

namespace {

// max of d over cell centers in q (grid-precision stand-in for sup_Q d)
double grid_max_boundary_dist(const GridFunction& f, const DomainModel& dom, const Cube2& q) {
  GridFunction::Range r = f.range_in_cube(q);
  double m = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) m = std::max(m, dom.distance(f.cell_center(i, j)));
  return m;
}

CubeFamily filter_family(const CubeFamily& in, const std::function<bool(const Cube2&)>& keep) {
  CubeFamily out;
  out.generator = in.generator + " (restricted)";
  out.scale_min = kRayExtent;
  for (const Cube2& q : in.cubes)
    if (keep(q)) {
      out.cubes.push_back(q);
      out.scale_min = std::min(out.scale_min, q.side);
      out.scale_max = std::max(out.scale_max, q.side);
    }
  return out;
}

std::optional<NormReport> restricted_norm(const GridFunction& f, const DomainModel& dom,
                                          const NormParams& params,
                                          const std::function<bool(const Cube2&)>& keep) {
  check_norm_params(f, params);
  double cert = effective_cert_pitch(f, params);
  double side = static_cast<double>(f.nx) * f.h;
  CubeFamily small, large;
  try {
    small = filter_family(enumerate_cubes(dom, 4 * f.h, params.lambda, params.pitch_divisor, cert, 0, &f), keep);
    large = filter_family(
        enumerate_cubes(dom, large_scales(params.lambda, side, params.pitch_divisor, params.variant),
                        params.pitch_divisor, cert, 0, &f),
        keep);
  } catch (const NotEvaluableError&) {
    return std::nullopt;
  }
  if (small.cubes.empty() && large.cubes.empty()) return std::nullopt;
  return norm_over_families(f, small, large, params.variant);
}

}  // namespace

std::optional<NormReport> vanishing_at_boundary_norm(const GridFunction& f, const DomainModel& dom,
                                                     double t, const NormParams& params) {
  if (!(t > 0)) throw ValidationError("t", "vanishing_at_boundary_norm: t must be positive");
  return restricted_norm(f, dom, params,
                         [&](const Cube2& q) { return grid_max_boundary_dist(f, dom, q) < t; });
}

std::optional<NormReport> vanishing_at_infinity_norm(const GridFunction& f, const DomainModel& dom,
                                                     double radius, const NormParams& params) {
  if (!(radius > 0)) throw ValidationError("R", "vanishing_at_infinity_norm: R must be positive");
  Vec2 zero = vec2(0, 0);
  return restricted_norm(f, dom, params,
                         [&](const Cube2& q) { return q.dist_to_point(zero) > radius; });
}

std::optional<double> gamma_functional(const GridFunction& f, const DomainModel& dom, double beta,
                                       const NormParams& params) {
  if (!(beta >= 0)) throw ValidationError("beta", "gamma: beta must be nonnegative");
  check_norm_params(f, params);
  double cert = effective_cert_pitch(f, params);
  Vec2 zero = vec2(0, 0);
  auto far = [&](const Cube2& q) { return q.dist_to_point(zero) > beta; };

  CubeFamily small, lam;
  try {
    small = filter_family(enumerate_cubes(dom, 4 * f.h, params.lambda, params.pitch_divisor, cert, 0, &f), far);
    lam = filter_family(enumerate_cubes(dom, std::vector<double>{params.lambda}, params.pitch_divisor, cert, 0, &f), far);
  } catch (const NotEvaluableError&) {
    return std::nullopt;
  }
  // an empty part is a window-truncation artifact; reporting 0 for it would
  // fake a vanishing functional
  if (small.cubes.empty() || lam.cubes.empty()) return std::nullopt;
  double osc = sup_oscillation(f, small).value;
  double avg = sup_abs_average(f, lam).value;
  return osc + avg;
}

std::vector<ProbePoint> log_average_probe(const GridFunction& f, const DomainModel& dom,
                                          const NormParams& params) {
  NormReport rep = bmo_norm(f, dom, params);
  if (!(rep.total > 0)) throw ValidationError("f", "log_average_probe: total norm must be positive");
  double cert = effective_cert_pitch(f, params);
  std::vector<ProbePoint> curve;
  for (double side : family_scales(4 * f.h, params.lambda, params.pitch_divisor)) {
    CubeFamily fam;
    try {
      fam = enumerate_cubes(dom, std::vector<double>{side}, params.pitch_divisor, cert, 0, &f);
    } catch (const NotEvaluableError&) {
      continue;
    }
    ArgMax m = sup_abs_average(f, fam);
    double denom = (1.0 + std::log(params.lambda / side)) * rep.total;
    curve.push_back({side, m.value, m.value / denom});
  }
  return curve;
}

double natural_bmo_scale(double eps, double delta, int dim) {
  if (!(eps > 0) || eps > 1) throw ValidationError("eps", "natural_bmo_scale: eps must be in (0,1]");
  if (!(delta > 0)) throw ValidationError("delta", "natural_bmo_scale: delta must be positive");
  if (dim < 1) throw ValidationError("n", "natural_bmo_scale: dimension must be >= 1");
  double n = static_cast<double>(dim);
  return eps * eps * delta / (320.0 * n * (1.0 + std::sqrt(n) * eps));
}

}  // namespace bmo
