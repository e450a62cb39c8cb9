#include "bmolab/approximation.hpp"

#include <algorithm>
#include <cmath>

#include "bmolab/errors.hpp"
#include "bmolab/parallel.hpp"

namespace bmo {

GridFunction sample_psi_k(int k, const DomainModel& dom, double h) {
  if (k < 1) throw ValidationError("k", "psi_k: k must be >= 1");
  PsiK psi{k};
  GridFunction g = make_grid(dom, h);
#pragma omp parallel for schedule(static)
  for (int64_t j = 0; j < g.ny; ++j)
    for (int64_t i = 0; i < g.nx; ++i) {
      size_t kk = static_cast<size_t>(g.idx(i, j));
      if (g.mask[kk]) g.values[kk] = psi(g.cell_center(i, j));
    }
  g.finalize();
  return g;
}

double phi_lambda(double t, double lambda) {
  if (!(t > 0)) throw ValidationError("t", "phi_lambda: t must be positive");
  return 1.0 + std::max(0.0, std::log(lambda / (4.0 * t)));
}

namespace {

// phi_lambda written in u = log t, safe for u far below the underflow range
double phi_of_log(double u, double lambda) {
  return 1.0 + std::max(0.0, std::log(lambda / 4.0) - u);
}

// adaptive midpoint in u = log t: integrand 1/phi(e^u), smooth and monotone
double adaptive_panel(double a, double b, double lambda, double tol, int depth) {
  double mid = 0.5 * (a + b);
  auto g = [&](double u) { return 1.0 / phi_of_log(u, lambda); };
  double whole = (b - a) * g(mid);
  double left = (mid - a) * g(0.5 * (a + mid));
  double right = (b - mid) * g(0.5 * (mid + b));
  if (depth > 48 || std::abs(left + right - whole) <= tol * std::max(1e-300, std::abs(left + right)))
    return left + right;
  return adaptive_panel(a, mid, lambda, tol, depth + 1) + adaptive_panel(mid, b, lambda, tol, depth + 1);
}

double capital_phi_log(double log_d, double lambda, double rel_tol) {
  double uhi = std::log(lambda / 4.0);
  if (log_d >= uhi) return 0.0;
  // split geometrically from the upper end so the near-boundary panels stay small
  double total = 0;
  double hi = uhi;
  double span = uhi - log_d;
  double step = std::min(1.0, span);
  while (hi > log_d) {
    double lo = std::max(log_d, hi - step);
    total += adaptive_panel(lo, hi, lambda, rel_tol, 0);
    hi = lo;
    step *= 2;
  }
  return total;
}

}  // namespace

double capital_phi(double d, double lambda, double rel_tol) {
  if (!(d > 0)) throw ValidationError("d", "capital_phi: d must be positive");
  if (!(lambda > 0)) throw ValidationError("lambda", "capital_phi: lambda must be positive");
  return capital_phi_log(std::log(d), lambda, rel_tol);
}

CutoffThreshold h_support_threshold(int j, double lambda, double rel_tol) {
  if (j < 1) throw ValidationError("j", "h_support_threshold: j must be >= 1");
  if (!(lambda > 0)) throw ValidationError("lambda", "h_support_threshold: lambda must be positive");
  double uhi = std::log(lambda / 4.0);
  // bracket: Phi(e^u) is decreasing in u, 0 at uhi; expand left until Phi > j
  double target = static_cast<double>(j);
  double lo = uhi - 2.0;
  while (capital_phi_log(lo, lambda, rel_tol) <= target) {
    lo = uhi - 2.0 * (uhi - lo);
    if (uhi - lo > 1e12) throw ResolutionError("h_support_threshold: quadrature did not bracket the root", 0);
  }
  double hi = uhi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (capital_phi_log(mid, lambda, rel_tol) > target) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
  }
  CutoffThreshold out;
  out.j = j;
  out.lambda = lambda;
  out.log_alpha = 0.5 * (lo + hi);
  out.alpha = std::exp(out.log_alpha);  // may underflow to 0 for large j
  return out;
}

double h_j_value(double d, int j, double lambda, double rel_tol) {
  if (j < 1) throw ValidationError("j", "h_j: j must be >= 1");
  if (d >= lambda / 4.0) return 1.0;
  double phi = capital_phi(d, lambda, rel_tol);
  return std::max(0.0, 1.0 - phi / static_cast<double>(j));
}

GridFunction sample_h_j(const DomainModel& dom, double h, int j, double lambda) {
  GridFunction g = make_grid(dom, h);
#pragma omp parallel for schedule(dynamic, 8)
  for (int64_t jj = 0; jj < g.ny; ++jj)
    for (int64_t i = 0; i < g.nx; ++i) {
      size_t k = static_cast<size_t>(g.idx(i, jj));
      if (g.mask[k]) g.values[k] = h_j_value(dom.distance(g.cell_center(i, jj)), j, lambda);
    }
  g.finalize();
  return g;
}

GridFunction truncate(const GridFunction& f, double t) {
  if (!(t > 0)) throw ValidationError("t", "truncate: t must be positive");
  return gf_clamp(f, t);
}

GridFunction sarason_smooth(const GridFunction& f, const DomainModel& dom, double grid,
                            double mollify_radius, bool restricted, double* lip_out) {
  if (!(grid >= 4 * f.h)) throw ValidationError("grid", "sarason_smooth: grid must be at least 4h");
  if (!(mollify_radius > 0)) throw ValidationError("radius", "sarason_smooth: radius must be positive");
  int64_t gm = std::llround(grid / f.h);
  if (std::abs(static_cast<double>(gm) * f.h - grid) > 1e-9 * grid)
    throw ValidationError("grid", "sarason_smooth: grid must be a multiple of the spacing");

  if (restricted) {
    double margin = kRayExtent;
    bool any = false;
    for (int64_t j = 0; j < f.ny; ++j)
      for (int64_t i = 0; i < f.nx; ++i) {
        size_t k = static_cast<size_t>(f.idx(i, j));
        if (f.mask[k] && f.values[k] != 0.0) {
          any = true;
          margin = std::min(margin, dom.distance(f.cell_center(i, j)));
        }
      }
    if (any && !(margin > grid * std::sqrt(2.0)))
      throw ValidationError("grid", "sarason_smooth: support margin below grid*sqrt(n)");
  }

  // stage 1: averages on g-cells (masked cells only; empty g-cells carry 0)
  int64_t gnx = (f.nx + gm - 1) / gm, gny = (f.ny + gm - 1) / gm;
  std::vector<double> step(static_cast<size_t>(gnx * gny), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t gj = 0; gj < gny; ++gj)
    for (int64_t gi = 0; gi < gnx; ++gi) {
      double sum = 0;
      int64_t cnt = 0;
      for (int64_t j = gj * gm; j < std::min(f.ny, (gj + 1) * gm); ++j)
        for (int64_t i = gi * gm; i < std::min(f.nx, (gi + 1) * gm); ++i) {
          size_t k = static_cast<size_t>(f.idx(i, j));
          if (f.mask[k]) {
            sum += f.values[k];
            ++cnt;
          }
        }
      if (cnt > 0) step[static_cast<size_t>(gj * gnx + gi)] = sum / static_cast<double>(cnt);
    }

  // stage 2: convolution with the normalized ball indicator at cell centers
  GridFunction out = f;
  int64_t reach = static_cast<int64_t>(std::ceil(mollify_radius / f.h)) + 1;
#pragma omp parallel for schedule(dynamic, 8)
  for (int64_t j = 0; j < f.ny; ++j)
    for (int64_t i = 0; i < f.nx; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k]) continue;
      Vec2 x = f.cell_center(i, j);
      double sum = 0;
      int64_t cnt = 0;
      for (int64_t j2 = std::max<int64_t>(0, j - reach); j2 <= std::min(f.ny - 1, j + reach); ++j2) {
        double dy = (static_cast<double>(j2) - static_cast<double>(j)) * f.h;
        double w2 = mollify_radius * mollify_radius - dy * dy;
        if (w2 < 0) continue;
        double w = std::sqrt(w2);
        int64_t lo = std::max<int64_t>(0, static_cast<int64_t>(std::ceil((x[0] - w - f.origin[0]) / f.h - 0.5)));
        int64_t hi = std::min<int64_t>(f.nx - 1, static_cast<int64_t>(std::floor((x[0] + w - f.origin[0]) / f.h - 0.5)));
        for (int64_t i2 = lo; i2 <= hi; ++i2) {
          sum += step[static_cast<size_t>((j2 / gm) * gnx + (i2 / gm))];
          ++cnt;
        }
      }
      out.values[k] = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    }
  out.finalize();

  if (restricted) {
    double margin = kRayExtent;
    bool any = false;
    for (int64_t j = 0; j < out.ny; ++j)
      for (int64_t i = 0; i < out.nx; ++i) {
        size_t k = static_cast<size_t>(out.idx(i, j));
        if (out.mask[k] && out.values[k] != 0.0) {
          any = true;
          margin = std::min(margin, dom.distance(out.cell_center(i, j)));
        }
      }
    if (any && !(margin > 0))
      throw ValidationError("radius", "sarason_smooth: output support touches the boundary");
  }
  if (lip_out) *lip_out = measured_lipschitz(out);
  return out;
}

BoundedApproximant bounded_approximant(const GridFunction& f, const DomainModel& dom, double ell,
                                       const NormParams& params) {
  double sqrt_n = std::sqrt(2.0);
  if (!(ell > 0) || !(ell < params.lambda / (8.0 * sqrt_n)))
    throw ValidationError("ell", "bounded_approximant: need 0 < ell < lambda/(8 sqrt n)");
  double cert = params.cert_pitch > 0 ? params.cert_pitch : f.h / 8.0;
  double window_side = static_cast<double>(f.nx) * f.h;

  // C_ell: sup |f|_Q over cubes with 2Q inside the domain, side >= ell
  std::vector<double> scales = family_scales(ell, window_side, params.pitch_divisor);
  bool has_ell = false;
  for (double s : scales) has_ell = has_ell || s == ell;
  if (!has_ell) scales.insert(scales.begin(), ell);

  const Cube2& w = dom.window;
  double c_ell = 0;
  bool any = false;
  for (double side : scales) {
    if (!(side > 0) || side > w.side) continue;
    double pitch = side / params.pitch_divisor;
    int64_t steps = static_cast<int64_t>(std::floor((w.side - side) / pitch + 1e-9)) + 1;
    double local = 0;
    int64_t found = 0;
#pragma omp parallel for reduction(max : local) reduction(+ : found) schedule(dynamic, 4)
    for (int64_t jy = 0; jy < steps; ++jy)
      for (int64_t jx = 0; jx < steps; ++jx) {
        Cube2 q{vec2(w.corner[0] + static_cast<double>(jx) * pitch, w.corner[1] + static_cast<double>(jy) * pitch), side};
        if (!cube_inside(q.scaled(2.0), dom, cert)) continue;
        ++found;
        local = std::max(local, cube_mean_abs(f, q));
      }
    if (found > 0) {
      any = true;
      c_ell = std::max(c_ell, local);
    }
  }
  if (!any) throw NotEvaluableError("bounded_approximant: no cube with 2Q inside the domain at side >= ell");

  BoundedApproximant out;
  out.c_ell = c_ell;
  out.g = f;
  int64_t fallbacks = 0;
#pragma omp parallel for reduction(+ : fallbacks) schedule(dynamic, 8)
  for (int64_t j = 0; j < f.ny; ++j)
    for (int64_t i = 0; i < f.nx; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k]) continue;
      Vec2 x = f.cell_center(i, j);
      double lx = std::min(dom.distance(x) / (2.0 * sqrt_n), ell);
      Cube2 qx{vec2(x[0] - lx / 2, x[1] - lx / 2), lx};
      double ftilde;
      GridFunction::Range r = f.range_in_cube(qx);
      int64_t cnt = f.masked_count(r);
      if (cnt > 0) {
        ftilde = f.masked_sum(r) / static_cast<double>(cnt);
      } else {
        ftilde = f.values[k];
        ++fallbacks;
      }
      out.g.values[k] = std::clamp(ftilde, -c_ell, c_ell);
    }
  out.fallback_cells = fallbacks;
  out.g.finalize();
  return out;
}

LeibnizCheck leibniz_bound_check(const GridFunction& f, const GridFunction& cutoff, const Cube2& q) {
  GridFunction::Range r = f.range_in_cube(q);
  int64_t cnt = f.masked_count(r);
  if (cnt < kMinCubeCells) throw ResolutionError("leibniz_bound_check: too few cells", q.side / 4.0);

  double f_mean = f.masked_sum(r) / static_cast<double>(cnt);
  double g_mean = cutoff.masked_sum(r) / static_cast<double>(cnt);
  double c_q = f_mean * g_mean;
  double lhs = 0, f_osc = 0, g_osc = 0, g_sup = 0;
  for (int64_t j = r.j0; j <= r.j1; ++j)
    for (int64_t i = r.i0; i <= r.i1; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (!f.mask[k] || !cutoff.mask[k]) continue;
      lhs += std::abs(f.values[k] * cutoff.values[k] - c_q);
      f_osc += std::abs(f.values[k] - f_mean);
      g_osc += std::abs(cutoff.values[k] - g_mean);
      g_sup = std::max(g_sup, std::abs(cutoff.values[k]));
    }
  double n = static_cast<double>(cnt);
  return {lhs / n, g_sup * (f_osc / n) + 2.0 * std::abs(f_mean) * (g_osc / n)};
}

const char* to_string(ApproxScheme s) {
  switch (s) {
    case ApproxScheme::boundary: return "boundary";
    case ApproxScheme::infinity: return "infinity";
    case ApproxScheme::bounded: return "bounded";
    case ApproxScheme::lipschitz: return "lipschitz";
    case ApproxScheme::compact: return "compact";
  }
  return "?";
}

ApproxScheme approx_scheme_from_string(const std::string& s) {
  if (s == "boundary") return ApproxScheme::boundary;
  if (s == "infinity") return ApproxScheme::infinity;
  if (s == "bounded") return ApproxScheme::bounded;
  if (s == "lipschitz") return ApproxScheme::lipschitz;
  if (s == "compact") return ApproxScheme::compact;
  throw ValidationError("scheme", "unknown approximation scheme: " + s);
}

namespace {

GridFunction gf_mul(const GridFunction& a, const GridFunction& b) {
  GridFunction out = a;
  for (size_t k = 0; k < out.values.size(); ++k) {
    out.mask[k] = a.mask[k] && b.mask[k];
    out.values[k] = out.mask[k] ? a.values[k] * b.values[k] : 0.0;
  }
  out.finalize();
  return out;
}

}  // namespace

ApproxCurve approximation_driver(const GridFunction& f, const DomainModel& dom,
                                 const NormParams& norm_params, ApproxScheme scheme,
                                 const std::vector<double>& indices) {
  if (indices.empty()) throw ValidationError("indices", "approximation_driver: need at least one index");
  ApproxCurve curve;
  curve.scheme = scheme;
  for (double p : indices) {
    GridFunction approx = f;
    switch (scheme) {
      case ApproxScheme::boundary:
        approx = gf_mul(f, sample_h_j(dom, f.h, static_cast<int>(p), norm_params.lambda));
        break;
      case ApproxScheme::infinity:
        approx = gf_mul(f, sample_psi_k(static_cast<int>(p), dom, f.h));
        break;
      case ApproxScheme::bounded:
        approx = bounded_approximant(f, dom, p, norm_params).g;
        break;
      case ApproxScheme::lipschitz:
        approx = sarason_smooth(f, dom, p, p, false, nullptr);
        break;
      case ApproxScheme::compact: {
        int j = static_cast<int>(p);
        int k = 1 << std::min(j, 30);
        approx = gf_mul(gf_mul(f, sample_h_j(dom, f.h, j, norm_params.lambda)),
                        sample_psi_k(k, dom, f.h));
        break;
      }
    }
    NormReport err = bmo_norm(gf_sub(f, approx), dom, norm_params);
    curve.params.push_back(p);
    curve.errors.push_back(err.total);
    curve.sup_norms.push_back(sup_norm(approx));
    curve.lip_consts.push_back(measured_lipschitz(approx));
  }
  return curve;
}

}  // namespace bmo
