#include "bmolab/extension.hpp"

#include <algorithm>
#include <cmath>

#include "bmolab/errors.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/parallel.hpp"

namespace bmo {

namespace {

// Step-extension state shared by extend_step and extend_smooth.
struct StepState {
  ExtensionResult result;
  std::vector<double> cube_value;   // per E' cube
  std::vector<int32_t> cell_cube;   // per cell: E' cube id, -1 domain, -2 boundary
};

StepState build_step(const GridFunction& f, const DomainModel& dom, const ExtensionParams& params) {
  if (!(params.lambda > 0)) throw ValidationError("lambda", "extend_step: lambda must be positive");
  Cube2 window = f.window();
  if (!(window == dom.window))
    throw ValidationError("window", "extend_step: grid and domain windows differ");

  StepState st;
  ExtensionResult& res = st.result;
  res.lambda = params.lambda;
  res.whitney_complement = whitney_decompose(dom, Owner::complement, window, params.min_level);
  res.whitney_domain = whitney_decompose(dom, Owner::domain, window, params.min_level);
  res.matching = match_cubes(res.whitney_complement, res.whitney_domain, params.lambda, params.radius_factor);

  if (dom.nominal_eps && dom.nominal_delta) {
    double natural = natural_bmo_scale(*dom.nominal_eps, *dom.nominal_delta, 2);
    res.scale_warning = params.lambda > natural;
  } else {
    res.scale_warning = true;  // nothing known to compare against
  }

  const WhitneyDecomposition& ep = res.whitney_complement;
  st.cube_value.assign(ep.cubes.size(), 0.0);
  int64_t fallbacks = 0;
  for (int32_t id = 0; id < static_cast<int32_t>(ep.cubes.size()); ++id) {
    int32_t star = res.matching.match[static_cast<size_t>(id)];
    if (star >= 0) {
      bool fb = false;
      st.cube_value[static_cast<size_t>(id)] =
          cube_mean_relaxed(f, res.whitney_domain.cubes[static_cast<size_t>(star)].box, &fb);
      if (fb) ++fallbacks;
    } else {
      st.cube_value[static_cast<size_t>(id)] = 0.0;
      res.zero_cubes.push_back(id);
    }
  }
  res.fallback_means = fallbacks;

  double fine = params.lambda / (40.0 * std::sqrt(2.0));
  for (const WhitneyCube& wc : ep.cubes) {
    if (wc.box.side < fine) res.cubes_below_lambda_over_40sqrtn += 1;
    if (wc.box.side > params.lambda / 4.0) res.cubes_above_lambda_over_4 += 1;
  }

  GridFunction out = make_full_grid(window, f.h);
  st.cell_cube.assign(static_cast<size_t>(out.cells()), -2);

#pragma omp parallel for schedule(static)
  for (int64_t j = 0; j < out.ny; ++j)
    for (int64_t i = 0; i < out.nx; ++i) {
      size_t k = static_cast<size_t>(out.idx(i, j));
      if (f.mask[k]) {
        out.values[k] = f.values[k];  // restriction identity, bitwise
        st.cell_cube[k] = -1;
        continue;
      }
      auto id = res.whitney_complement.locate(out.cell_center(i, j));
      if (id) {
        out.values[k] = st.cube_value[static_cast<size_t>(*id)];
        st.cell_cube[k] = *id;
      }
    }

  // boundary residue cells inherit the nearest assigned value (grid-nearest,
  // deterministic sweep order) and leave the mask
  int64_t boundary = 0;
  for (int64_t j = 0; j < out.ny; ++j)
    for (int64_t i = 0; i < out.nx; ++i)
      if (st.cell_cube[static_cast<size_t>(out.idx(i, j))] == -2) ++boundary;
  res.boundary_cells = boundary;

  std::vector<uint8_t> assigned(static_cast<size_t>(out.cells()));
  for (size_t k = 0; k < assigned.size(); ++k) assigned[k] = st.cell_cube[k] != -2;
  bool progress = boundary > 0;
  while (progress) {
    progress = false;
    std::vector<uint8_t> next = assigned;
    for (int64_t j = 0; j < out.ny; ++j)
      for (int64_t i = 0; i < out.nx; ++i) {
        size_t k = static_cast<size_t>(out.idx(i, j));
        if (assigned[k]) continue;
        for (int dj = -1; dj <= 1 && !next[k]; ++dj)
          for (int di = -1; di <= 1; ++di) {
            int64_t i2 = i + di, j2 = j + dj;
            if (i2 < 0 || j2 < 0 || i2 >= out.nx || j2 >= out.ny) continue;
            size_t k2 = static_cast<size_t>(out.idx(i2, j2));
            if (assigned[k2]) {
              out.values[k] = out.values[k2];
              next[k] = 1;
              progress = true;
              break;
            }
          }
      }
    assigned.swap(next);
  }
  for (int64_t j = 0; j < out.ny; ++j)
    for (int64_t i = 0; i < out.nx; ++i) {
      size_t k = static_cast<size_t>(out.idx(i, j));
      if (st.cell_cube[k] == -2) out.mask[k] = 0;
    }

  out.finalize();
  res.extended = std::move(out);
  return st;
}

}  // namespace

ExtensionResult extend_step(const GridFunction& f, const DomainModel& dom, const ExtensionParams& params) {
  return build_step(f, dom, params).result;
}

double average_at(const GridFunction& phi, const Vec2& x, const DomainModel& dom, double c_n,
                  bool* unaveraged) {
  if (unaveraged) *unaveraged = false;
  double radius = c_n * dom.boundary_distance(x);
  int64_t ci = std::clamp<int64_t>(static_cast<int64_t>(std::floor((x[0] - phi.origin[0]) / phi.h)), 0, phi.nx - 1);
  int64_t cj = std::clamp<int64_t>(static_cast<int64_t>(std::floor((x[1] - phi.origin[1]) / phi.h)), 0, phi.ny - 1);
  if (radius < 2 * phi.h) {
    if (unaveraged) *unaveraged = true;
    return phi.values[static_cast<size_t>(phi.idx(ci, cj))];
  }
  double sum = 0;
  int64_t count = 0;
  int64_t j0 = std::max<int64_t>(0, static_cast<int64_t>(std::ceil((x[1] - radius - phi.origin[1]) / phi.h - 0.5)));
  int64_t j1 = std::min<int64_t>(phi.ny - 1, static_cast<int64_t>(std::floor((x[1] + radius - phi.origin[1]) / phi.h - 0.5)));
  for (int64_t j = j0; j <= j1; ++j) {
    double dy = phi.origin[1] + (static_cast<double>(j) + 0.5) * phi.h - x[1];
    double w2 = radius * radius - dy * dy;
    if (w2 < 0) continue;
    double w = std::sqrt(w2);
    int64_t i0 = std::max<int64_t>(0, static_cast<int64_t>(std::ceil((x[0] - w - phi.origin[0]) / phi.h - 0.5)));
    int64_t i1 = std::min<int64_t>(phi.nx - 1, static_cast<int64_t>(std::floor((x[0] + w - phi.origin[0]) / phi.h - 0.5)));
    for (int64_t i = i0; i <= i1; ++i) {
      size_t k = static_cast<size_t>(phi.idx(i, j));
      if (!phi.mask[k]) continue;
      sum += phi.values[k];
      ++count;
    }
  }
  if (count == 0) {
    if (unaveraged) *unaveraged = true;
    return phi.values[static_cast<size_t>(phi.idx(ci, cj))];
  }
  return sum / static_cast<double>(count);
}

namespace {

// ball coverage check: every sampled point of B(x,R) must live in the cube
// containing x or one adjacent to it (verified at sample resolution)
bool ball_within_neighborhood(const WhitneyDecomposition& ep, int32_t own, const Vec2& x, double radius) {
  const auto& adj = ep.adjacency[static_cast<size_t>(own)];
  auto ok = [&](const Vec2& p) {
    auto id = ep.locate(p);
    if (!id) return true;  // residue cells carry no cube; ignore
    if (*id == own) return true;
    return std::binary_search(adj.begin(), adj.end(), *id);
  };
  constexpr int kBoundary = 64;
  for (int a = 0; a < kBoundary; ++a) {
    double ang = 2.0 * 3.14159265358979323846 * a / kBoundary;
    for (double frac : {1.0, 0.6}) {
      Vec2 p = vec2(x[0] + frac * radius * std::cos(ang), x[1] + frac * radius * std::sin(ang));
      if (!ok(p)) return false;
    }
  }
  return true;
}

}  // namespace

ExtensionResult extend_smooth(const GridFunction& f, const DomainModel& dom, const ExtensionParams& params) {
  StepState st = build_step(f, dom, params);
  ExtensionResult& res = st.result;
  const GridFunction step = res.extended;  // copy: smoothing reads the step values

  double c_n = params.c_n > 0 ? params.c_n : default_averaging_constant(2);
  const WhitneyDecomposition& ep = res.whitney_complement;

  // complement cells to average: strictly outside the closure and not flagged
  std::vector<int64_t> outside;
  outside.reserve(static_cast<size_t>(step.cells()) / 4);
  for (int64_t j = 0; j < step.ny; ++j)
    for (int64_t i = 0; i < step.nx; ++i) {
      size_t k = static_cast<size_t>(step.idx(i, j));
      if (st.cell_cube[k] >= 0) outside.push_back(step.idx(i, j));
    }

  for (int attempt = 0;; ++attempt) {
    // neighborhood property on a deterministic sample of complement cells
    bool violated = false;
    int64_t stride = std::max<int64_t>(1, static_cast<int64_t>(outside.size()) / std::max<int64_t>(1, params.verify_samples));
    for (size_t s = 0; s < outside.size() && !violated; s += static_cast<size_t>(stride)) {
      int64_t cell = outside[s];
      int64_t i = cell % step.nx, j = cell / step.nx;
      Vec2 x = step.cell_center(i, j);
      double radius = c_n * dom.boundary_distance(x);
      if (radius < 2 * step.h) continue;
      int32_t own = st.cell_cube[static_cast<size_t>(cell)];
      if (!ball_within_neighborhood(ep, own, x, radius)) violated = true;
    }
    if (!violated) break;
    if (attempt >= params.max_halvings)
      throw ResolutionError("extend_smooth: averaging radius could not satisfy the neighborhood property", 0);
    c_n /= 2;
    res.halvings += 1;
  }
  res.c_n = c_n;

  // R(x) < 2h cells stay unaveraged; count how common that is
  int64_t unaveraged = 0;
  GridFunction smooth = step;

  // per-row prefix sums of the step values (all cells carry a value)
  size_t stride_len = static_cast<size_t>(step.nx + 1);
  std::vector<double> prefix(stride_len * static_cast<size_t>(step.ny), 0.0);
  for (int64_t j = 0; j < step.ny; ++j) {
    double run = 0;
    for (int64_t i = 0; i < step.nx; ++i) {
      run += step.values[static_cast<size_t>(step.idx(i, j))];
      prefix[static_cast<size_t>(j) * stride_len + static_cast<size_t>(i + 1)] = run;
    }
  }

#pragma omp parallel for reduction(+ : unaveraged) schedule(dynamic, 512)
  for (int64_t s = 0; s < static_cast<int64_t>(outside.size()); ++s) {
    int64_t cell = outside[static_cast<size_t>(s)];
    int64_t i = cell % step.nx, j = cell / step.nx;
    Vec2 x = step.cell_center(i, j);
    double radius = c_n * dom.boundary_distance(x);
    if (radius < 2 * step.h) {
      ++unaveraged;
      continue;  // keeps the step value
    }
    double sum = 0;
    int64_t count = 0;
    int64_t j0 = std::max<int64_t>(0, static_cast<int64_t>(std::ceil((x[1] - radius - step.origin[1]) / step.h - 0.5)));
    int64_t j1 = std::min<int64_t>(step.ny - 1, static_cast<int64_t>(std::floor((x[1] + radius - step.origin[1]) / step.h - 0.5)));
    for (int64_t jj = j0; jj <= j1; ++jj) {
      double dy = step.origin[1] + (static_cast<double>(jj) + 0.5) * step.h - x[1];
      double w2 = radius * radius - dy * dy;
      if (w2 < 0) continue;
      double w = std::sqrt(w2);
      int64_t i0 = std::max<int64_t>(0, static_cast<int64_t>(std::ceil((x[0] - w - step.origin[0]) / step.h - 0.5)));
      int64_t i1 = std::min<int64_t>(step.nx - 1, static_cast<int64_t>(std::floor((x[0] + w - step.origin[0]) / step.h - 0.5)));
      if (i1 < i0) continue;
      sum += prefix[static_cast<size_t>(jj) * stride_len + static_cast<size_t>(i1 + 1)] -
             prefix[static_cast<size_t>(jj) * stride_len + static_cast<size_t>(i0)];
      count += i1 - i0 + 1;
    }
    if (count > 0) smooth.values[static_cast<size_t>(cell)] = sum / static_cast<double>(count);
    else ++unaveraged;
  }
  res.unaveraged_cells = unaveraged;
  smooth.finalize();
  res.extended = std::move(smooth);
  return res;
}

double support_radius(const GridFunction& f) {
  double r2 = -1;
#pragma omp parallel for reduction(max : r2) schedule(static)
  for (int64_t j = 0; j < f.ny; ++j)
    for (int64_t i = 0; i < f.nx; ++i) {
      size_t k = static_cast<size_t>(f.idx(i, j));
      if (f.values[k] != 0.0) r2 = std::max(r2, f.cell_center(i, j).norm2());
    }
  if (r2 < 0) return 0.0;
  return std::sqrt(r2) + f.h * std::sqrt(2.0);
}

}  // namespace bmo
