#include "bmolab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "bmolab/errors.hpp"
#include "bmolab/parallel.hpp"

namespace bmo {

const char* to_string(OracleFunctional f) {
  switch (f) {
    case OracleFunctional::omega_at: return "omega";
    case OracleFunctional::bmo_total: return "bmo-total";
    case OracleFunctional::bmo_oscillation_part: return "bmo-oscillation";
    case OracleFunctional::bmo_average_part: return "bmo-average";
  }
  return "?";
}

namespace {

struct SideRange {
  int64_t m_lo = 4, m_hi = 0;  // side = m*h, m in [m_lo, m_hi]
};

// Exhaustive max over grid-aligned cubes; evaluates osc and/or abs-average
// depending on the functional's needs.
struct OracleMax {
  double osc = 0;
  double avg = 0;
  int64_t cubes = 0;
};

OracleMax run(const GridFunction& f, const DomainModel& dom, const SideRange& osc_range,
              const SideRange& avg_range, double cert_pitch, int64_t max_cubes) {
  int64_t n = f.nx;
  int64_t m_hi = std::max(osc_range.m_hi, avg_range.m_hi);
  int64_t m_lo = std::min(osc_range.m_lo, avg_range.m_lo);

  int64_t total = 0;
  for (int64_t m = m_lo; m <= m_hi; ++m) {
    int64_t per_axis = n - m + 1;
    if (per_axis > 0) total += per_axis * per_axis;
  }
  if (total > max_cubes) {
    double needed = f.h * std::cbrt(3.0 * static_cast<double>(total) / static_cast<double>(max_cubes));
    throw ResolutionError("oracle: grid-aligned cube count exceeds the budget; coarsen the grid", needed);
  }

  double osc_max = 0, avg_max = 0;
  int64_t count = 0;
  for (int64_t m = m_lo; m <= m_hi; ++m) {
    bool want_osc = m >= osc_range.m_lo && m <= osc_range.m_hi;
    bool want_avg = m >= avg_range.m_lo && m <= avg_range.m_hi;
    if (!want_osc && !want_avg) continue;
    double side = static_cast<double>(m) * f.h;
    int64_t per_axis = n - m + 1;
#pragma omp parallel for reduction(max : osc_max, avg_max) reduction(+ : count) schedule(dynamic, 2)
    for (int64_t j = 0; j < per_axis; ++j) {
      for (int64_t i = 0; i < per_axis; ++i) {
        GridFunction::Range r{i, i + m - 1, j, j + m - 1};
        int64_t cells = m * m;
        if (f.masked_count(r) != cells) continue;  // some cell center outside
        Cube2 q{vec2(f.origin[0] + static_cast<double>(i) * f.h, f.origin[1] + static_cast<double>(j) * f.h), side};
        if (!cube_inside(q, dom, cert_pitch)) continue;
        ++count;
        if (want_avg) avg_max = std::max(avg_max, f.masked_abs_sum(r) / static_cast<double>(cells));
        if (want_osc) {
          double mean = f.masked_sum(r) / static_cast<double>(cells);
          double dev = 0;
          for (int64_t jj = r.j0; jj <= r.j1; ++jj)
            for (int64_t ii = r.i0; ii <= r.i1; ++ii) {
              size_t k = static_cast<size_t>(f.idx(ii, jj));
              dev += std::abs(f.values[k] - mean);
            }
          osc_max = std::max(osc_max, dev / static_cast<double>(cells));
        }
      }
    }
  }
  return {osc_max, avg_max, count};
}

}  // namespace

OracleReport exhaustive_sup(const GridFunction& f, const DomainModel& dom, OracleFunctional fn,
                            const NormParams& params, int64_t max_cubes) {
  double cert = params.cert_pitch > 0 ? params.cert_pitch : f.h / 8.0;
  int64_t n = f.nx;
  // sides m*h with strictly side < lambda for the oscillation part,
  // side >= lambda for the average part
  auto m_below = [&](double bound) { return static_cast<int64_t>(std::ceil(bound / f.h - 1e-9)) - 1; };
  auto m_at_least = [&](double bound) { return static_cast<int64_t>(std::ceil(bound / f.h - 1e-9)); };

  SideRange none{4, 0};
  SideRange osc_range{4, std::min(n, m_below(params.lambda))};
  SideRange avg_range{std::max<int64_t>(4, m_at_least(params.lambda)), n};

  OracleReport rep;
  rep.functional = to_string(fn);

  OracleMax got;

  // the sampled side of the comparison uses grid-snapped families, so every
  // sampled cube is literally a member of the exhaustive universe
  switch (fn) {
    case OracleFunctional::omega_at: {
      rep.parameter = params.lambda;  // t
      got = run(f, dom, osc_range, none, cert, max_cubes);
      rep.oracle_value = got.osc;
      CubeFamily fam = enumerate_cubes(dom, 4 * f.h, params.lambda, params.pitch_divisor, cert, f.h);
      rep.sampled_value = omega(f, dom, params.lambda, fam);
      rep.sampled_cubes = static_cast<int64_t>(fam.cubes.size());
      break;
    }
    case OracleFunctional::bmo_total:
    case OracleFunctional::bmo_oscillation_part:
    case OracleFunctional::bmo_average_part: {
      rep.parameter = params.lambda;
      bool want_osc = fn != OracleFunctional::bmo_average_part;
      bool want_avg = fn != OracleFunctional::bmo_oscillation_part;
      got = run(f, dom, want_osc ? osc_range : none, want_avg ? avg_range : none, cert, max_cubes);
      double window_side = static_cast<double>(f.nx) * f.h;
      double osc_s = 0, avg_s = 0;
      int64_t cube_count = 0;
      if (want_osc) {
        CubeFamily small = enumerate_cubes(dom, 4 * f.h, params.lambda, params.pitch_divisor, cert, f.h);
        osc_s = sup_oscillation(f, small).value;
        cube_count += static_cast<int64_t>(small.cubes.size());
      }
      if (want_avg) {
        std::vector<double> scales = family_scales(params.lambda, window_side, params.pitch_divisor);
        scales.insert(scales.begin(), params.lambda);
        CubeFamily large = enumerate_cubes(dom, scales, params.pitch_divisor, cert, f.h);
        avg_s = sup_abs_average(f, large).value;
        cube_count += static_cast<int64_t>(large.cubes.size());
      }
      if (fn == OracleFunctional::bmo_total) {
        rep.oracle_value = got.osc + got.avg;
        rep.sampled_value = osc_s + avg_s;
      } else if (fn == OracleFunctional::bmo_oscillation_part) {
        rep.oracle_value = got.osc;
        rep.sampled_value = osc_s;
      } else {
        rep.oracle_value = got.avg;
        rep.sampled_value = avg_s;
      }
      rep.sampled_cubes = cube_count;
      break;
    }
  }
  rep.oracle_cubes = got.cubes;
  rep.ratio = rep.sampled_value != 0 ? rep.oracle_value / rep.sampled_value : 0.0;
  return rep;
}

double exhaustive_value(const GridFunction& f, const DomainModel& dom, OracleFunctional fn,
                        const NormParams& params, int64_t max_cubes) {
  double cert = params.cert_pitch > 0 ? params.cert_pitch : f.h / 8.0;
  int64_t n = f.nx;
  auto m_below = [&](double bound) { return static_cast<int64_t>(std::ceil(bound / f.h - 1e-9)) - 1; };
  auto m_at_least = [&](double bound) { return static_cast<int64_t>(std::ceil(bound / f.h - 1e-9)); };
  SideRange none{4, 0};
  SideRange osc_range{4, std::min(n, m_below(params.lambda))};
  SideRange avg_range{std::max<int64_t>(4, m_at_least(params.lambda)), n};
  switch (fn) {
    case OracleFunctional::omega_at:
      return run(f, dom, osc_range, none, cert, max_cubes).osc;
    case OracleFunctional::bmo_total: {
      OracleMax got = run(f, dom, osc_range, avg_range, cert, max_cubes);
      return got.osc + got.avg;
    }
    case OracleFunctional::bmo_oscillation_part:
      return run(f, dom, osc_range, none, cert, max_cubes).osc;
    case OracleFunctional::bmo_average_part:
      return run(f, dom, none, avg_range, cert, max_cubes).avg;
  }
  return 0;
}

}  // namespace bmo
