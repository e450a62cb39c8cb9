#include "bmolab/testfunc.hpp"

#include <cmath>

#include "bmolab/errors.hpp"
#include "bmolab/rng.hpp"
#include "bmolab/whitney.hpp"

namespace bmo {

const char* to_string(TestFunctionKind k) {
  switch (k) {
    case TestFunctionKind::constant: return "constant";
    case TestFunctionKind::coordinate: return "coordinate";
    case TestFunctionKind::log_distance: return "log-distance";
    case TestFunctionKind::example_1: return "example-1";
    case TestFunctionKind::example_2: return "example-2";
    case TestFunctionKind::random_whitney_step: return "random-whitney-step";
    case TestFunctionKind::indicator_half: return "indicator-half";
  }
  return "?";
}

TestFunctionKind test_function_kind_from_string(const std::string& s) {
  if (s == "constant") return TestFunctionKind::constant;
  if (s == "coordinate") return TestFunctionKind::coordinate;
  if (s == "log-distance") return TestFunctionKind::log_distance;
  if (s == "example-1") return TestFunctionKind::example_1;
  if (s == "example-2") return TestFunctionKind::example_2;
  if (s == "random-whitney-step") return TestFunctionKind::random_whitney_step;
  if (s == "indicator-half") return TestFunctionKind::indicator_half;
  throw ValidationError("kind", "unknown test function kind: " + s);
}

void TestFunctionSpec::validate() const {
  if (kind == TestFunctionKind::coordinate && (axis < 0 || axis > 1))
    throw ValidationError("axis", "coordinate: axis must be 0 or 1");
  if (kind == TestFunctionKind::random_whitney_step) {
    if (!(amplitude > 0)) throw ValidationError("amplitude", "random-whitney-step: amplitude must be positive");
    if (whitney_min_level < 1 || whitney_min_level > 28)
      throw ValidationError("whitney_min_level", "random-whitney-step: level out of range");
  }
  if (kind == TestFunctionKind::example_2 && zero_scale < 0)
    throw ValidationError("zero_scale", "example-2: zero_scale must be nonnegative");
}

namespace {

const Strip* strip_at(const DomainModel& dom, const Vec2& p) {
  if (p[0] < 0) return nullptr;
  for (const Strip& s : dom.strips)
    if (p[0] < s.length && p[1] > s.base && p[1] < s.base + s.width) return &s;
  return nullptr;
}

double example2_slope(const TestFunctionSpec& spec, int j) {
  if (!spec.slopes.empty() && j >= 1 && j <= static_cast<int>(spec.slopes.size()))
    return spec.slopes[static_cast<size_t>(j - 1)];
  return std::sqrt(static_cast<double>(j));
}

}  // namespace

double evaluate(const TestFunctionSpec& spec, const DomainModel& dom, const Vec2& p) {
  switch (spec.kind) {
    case TestFunctionKind::constant:
      return spec.value;
    case TestFunctionKind::coordinate:
      return p[spec.axis];
    case TestFunctionKind::log_distance: {
      double d = dom.distance(p);
      if (!(d > 0)) throw ValidationError("point", "log-distance: point must be inside the domain");
      return std::log(1.0 / d);
    }
    case TestFunctionKind::example_1: {
      if (dom.kind != DomainKind::strips_example_1)
        throw ValidationError("domain", "example-1 function needs a strips-example-1 domain");
      const Strip* s = strip_at(dom, p);
      return s ? static_cast<double>(s->group) * p[0] : 0.0;
    }
    case TestFunctionKind::example_2: {
      if (dom.kind != DomainKind::strips_example_2)
        throw ValidationError("domain", "example-2 function needs a strips-example-2 domain");
      const Strip* s = strip_at(dom, p);
      if (!s) return 0.0;
      if (spec.zero_scale > 0 && s->width >= spec.zero_scale) return 0.0;
      return example2_slope(spec, s->member) * p[0];
    }
    case TestFunctionKind::indicator_half:
      return p[0] < dom.window.corner[0] + dom.window.side / 2 ? 1.0 : 0.0;
    case TestFunctionKind::random_whitney_step:
      throw ValidationError("kind", "random-whitney-step has no pointwise form; use sample()");
  }
  return 0;
}

GridFunction sample(const TestFunctionSpec& spec, const DomainModel& dom, double h) {
  spec.validate();
  GridFunction g = make_grid(dom, h);

  if (spec.kind == TestFunctionKind::random_whitney_step) {
    WhitneyDecomposition wd = whitney_decompose(dom, Owner::domain, dom.window, spec.whitney_min_level);
#pragma omp parallel for schedule(static)
    for (int64_t j = 0; j < g.ny; ++j)
      for (int64_t i = 0; i < g.nx; ++i) {
        size_t k = static_cast<size_t>(g.idx(i, j));
        if (!g.mask[k]) continue;
        auto id = wd.locate(g.cell_center(i, j));
        if (!id) {
          g.values[k] = 0;  // boundary residue cell
          continue;
        }
        const DyadicCube2& dc = wd.cubes[static_cast<size_t>(*id)].dc;
        uint64_t hsh = hash_cube_id(spec.seed, dc.level, dc.index[0], dc.index[1]);
        double u = static_cast<double>(hsh >> 11) * 0x1.0p-53;
        g.values[k] = spec.amplitude * (2.0 * u - 1.0);
      }
  } else {
#pragma omp parallel for schedule(static)
    for (int64_t j = 0; j < g.ny; ++j)
      for (int64_t i = 0; i < g.nx; ++i) {
        size_t k = static_cast<size_t>(g.idx(i, j));
        if (g.mask[k]) g.values[k] = evaluate(spec, dom, g.cell_center(i, j));
      }
  }
  g.finalize();
  return g;
}

}  // namespace bmo
