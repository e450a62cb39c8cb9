#include <doctest.h>

#include <cmath>

#include "bmolab/oscillation.hpp"
#include "bmolab/rng.hpp"
#include "bmolab/testfunc.hpp"

using namespace bmo;

namespace {

DomainModel square_side2() {
  DomainSpec spec;
  spec.kind = DomainKind::square;
  spec.sq_corner = vec2(-0.5, -0.5);
  spec.sq_side = 2;
  return build_domain(spec, cube2(-0.5, -0.5, 2));
}

DomainModel unit_square_padded() {
  DomainSpec spec;
  spec.kind = DomainKind::square;
  spec.sq_corner = vec2(0, 0);
  spec.sq_side = 1;
  return build_domain(spec, cube2(0, 0, 1));
}

GridFunction sample_kind(TestFunctionKind kind, const DomainModel& d, double h, double value = 1) {
  TestFunctionSpec s;
  s.kind = kind;
  s.value = value;
  return sample(s, d, h);
}

}  // namespace

TEST_CASE("mean oscillation: constant, linear, half indicator") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  GridFunction c = sample_kind(TestFunctionKind::constant, d, h, 3);
  CHECK(mean_oscillation(c, cube2(0, 0, 1)) == 0.0);

  GridFunction x = sample_kind(TestFunctionKind::coordinate, d, h);
  // analytic oracle: integral of |x - 1/2| over [0,1]^2 equals 1/4
  CHECK(mean_oscillation(x, cube2(0, 0, 1)) == doctest::Approx(0.25).epsilon(1e-12));

  GridFunction ind = sample_kind(TestFunctionKind::indicator_half, d, h);
  // window midline x = 0.5 splits [0,1]^2 in half
  CHECK(mean_oscillation(ind, cube2(0, 0, 1)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("enumerate_cubes: nonempty on the unit square, all inside") {
  DomainModel d = unit_square_padded();
  CubeFamily fam = enumerate_cubes(d, 0.25, 0.5, 4, 1.0 / 256);
  CHECK(!fam.cubes.empty());
  for (const Cube2& q : fam.cubes) {
    CHECK(cube_inside(q, d, 1.0 / 256));
    CHECK(q.side >= 0.25);
    CHECK(q.side < 0.5);
  }
  CHECK_THROWS_AS(enumerate_cubes(d, 2.0, 4.0, 4, 1.0 / 256), NotEvaluableError);
}

TEST_CASE("omega: constant zero, linear quarter, monotone in t") {
  DomainModel d = unit_square_padded();
  double h = 1.0 / 128;
  GridFunction c = sample_kind(TestFunctionKind::constant, d, h, 5);
  GridFunction x = sample_kind(TestFunctionKind::coordinate, d, h);

  CubeFamily fam = enumerate_cubes(d, 4 * h, 1.0, 8, h / 8);
  CHECK(omega(c, d, 1.0, fam) == 0.0);

  // sup over side-l cubes of the oscillation of x is l/4, approaching 1/4 as
  // l -> 1; the family tops out at 1 - 1/8
  double om = omega(x, d, 1.0, fam);
  CHECK(om == doctest::Approx(0.25).epsilon(0.15));
  CHECK(om <= 0.25 + 1e-12);

  // monotone under nested families
  CubeFamily small = enumerate_cubes(d, 4 * h, 0.5, 8, h / 8);
  CubeFamily merged = small;
  for (const Cube2& q : fam.cubes) merged.cubes.push_back(q);
  merged.scale_max = std::max(small.scale_max, fam.scale_max);
  double om_small = sup_oscillation(x, small).value;
  double om_merged = sup_oscillation(x, merged).value;
  CHECK(om_small <= om_merged);
  CHECK(om_merged == om);  // the added larger cubes dominate here
}

TEST_CASE("subset monotonicity of sup functionals is exact") {
  DomainModel d = square_side2();
  GridFunction f = sample_kind(TestFunctionKind::log_distance, d, 1.0 / 64);
  CubeFamily big = enumerate_cubes(d, 1.0 / 8, 1.0, 4, 1.0 / 512);
  CubeFamily small = big;
  small.cubes.resize(big.cubes.size() / 2);
  CHECK(sup_oscillation(f, small).value <= sup_oscillation(f, big).value);
  CHECK(sup_abs_average(f, small).value <= sup_abs_average(f, big).value);
}

TEST_CASE("bmo norm: constant totals |c| exactly") {
  DomainModel d = square_side2();
  GridFunction c = sample_kind(TestFunctionKind::constant, d, 1.0 / 64, 3);
  NormParams p;
  p.lambda = 0.25;
  NormReport rep = bmo_norm(c, d, p);
  CHECK(rep.oscillation_part == 0.0);
  CHECK(std::abs(rep.average_part - 3.0) <= 1e-12);
  CHECK(std::abs(rep.total - 3.0) <= 1e-12);
  CHECK(rep.total == rep.oscillation_part + rep.average_part);
  CHECK(rep.argmax_avg.valid);
  CHECK(rep.argmax_avg.cube.side >= p.lambda);
}

TEST_CASE("bmo norm parts bounded by the sup norm, total by twice") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  NormParams p;
  p.lambda = 0.5;
  for (TestFunctionKind kind : {TestFunctionKind::coordinate, TestFunctionKind::indicator_half,
                                TestFunctionKind::random_whitney_step}) {
    TestFunctionSpec s;
    s.kind = kind;
    s.seed = 5;
    GridFunction f = sample(s, d, h);
    double m = sup_norm(f);
    NormReport rep = bmo_norm(f, d, p);
    CHECK(rep.oscillation_part <= m + 1e-12);
    CHECK(rep.average_part <= m + 1e-12);
    CHECK(rep.total <= 2 * m + 1e-12);
  }
}

TEST_CASE("triangle inequality on shared families") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  GridFunction f = sample_kind(TestFunctionKind::coordinate, d, h);
  TestFunctionSpec s;
  s.kind = TestFunctionKind::random_whitney_step;
  s.seed = 17;
  GridFunction g = sample(s, d, h);
  GridFunction sum = gf_add(f, g);

  CubeFamily small = enumerate_cubes(d, 4 * h, 0.5, 4, h / 8);
  CubeFamily large = enumerate_cubes(d, std::vector<double>{0.5, 1.0}, 4, h / 8);
  auto norm_over = [&](const GridFunction& u) {
    return sup_oscillation(u, small).value + sup_abs_average(u, large).value;
  };
  CHECK(norm_over(sum) <= norm_over(f) + norm_over(g) + 1e-12);
}

TEST_CASE("scale comparison on shared cube families") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  GridFunction f = sample_kind(TestFunctionKind::log_distance, d, h);
  double l1 = 0.25, l2 = 0.5;
  CubeFamily pool = enumerate_cubes(d, 4 * h, 2.0, 4, h / 8);

  auto split = [&](double lambda) {
    CubeFamily small, large;
    for (const Cube2& q : pool.cubes) (q.side < lambda ? small : large).cubes.push_back(q);
    return std::make_pair(small, large);
  };
  auto [s1, g1] = split(l1);
  auto [s2, g2] = split(l2);
  double w1 = sup_oscillation(f, s1).value, a1 = sup_abs_average(f, g1).value;
  double w2 = sup_oscillation(f, s2).value, a2 = sup_abs_average(f, g2).value;
  CHECK(w1 <= w2);  // sup over a subset
  CHECK(a2 <= a1);  // sup over a subset
  CHECK(w2 + a2 <= 3 * (w1 + a1) + 1e-12);  // osc <= 2 avg on mid-scale cubes
  // the sharper factor 2 is reported, not asserted
  MESSAGE("norm ratio at lambda2 vs lambda1: ", (w2 + a2) / (w1 + a1));
}

TEST_CASE("gamma functional: constants, far emptiness, not-evaluable") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  NormParams p;
  p.lambda = 0.5;
  GridFunction c = sample_kind(TestFunctionKind::constant, d, h, 2);
  auto g0 = gamma_functional(c, d, 0.25, p);
  REQUIRE(g0.has_value());
  CHECK(*g0 == doctest::Approx(2.0).epsilon(1e-12));

  // beta beyond the window: nothing qualifies -> not evaluable, never 0
  auto gfar = gamma_functional(c, d, 10.0, p);
  CHECK(!gfar.has_value());

  // compactly supported f with beta past the support: zero
  GridFunction bump = make_grid(d, h);
  for (int64_t j = 0; j < bump.ny; ++j)
    for (int64_t i = 0; i < bump.nx; ++i) {
      size_t k = static_cast<size_t>(bump.idx(i, j));
      if (bump.mask[k] && bump.cell_center(i, j).norm() < 0.3) bump.values[k] = 1.0;
    }
  bump.finalize();
  auto gb = gamma_functional(bump, d, 0.7, p);
  REQUIRE(gb.has_value());
  CHECK(*gb == 0.0);
}

TEST_CASE("vanishing norms: constants, supported-away functions, not-evaluable") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  NormParams p;
  p.lambda = 0.25;
  GridFunction c = sample_kind(TestFunctionKind::constant, d, h, 2);

  auto bn = vanishing_at_boundary_norm(c, d, 0.6, p);
  REQUIRE(bn.has_value());
  CHECK(bn->total == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(!vanishing_at_boundary_norm(c, d, 1e-4, p).has_value());

  GridFunction bump = make_grid(d, h);
  for (int64_t j = 0; j < bump.ny; ++j)
    for (int64_t i = 0; i < bump.nx; ++i) {
      size_t k = static_cast<size_t>(bump.idx(i, j));
      if (bump.mask[k] && bump.cell_center(i, j).norm() < 0.2) bump.values[k] = 1.0;
    }
  bump.finalize();
  auto bn2 = vanishing_at_boundary_norm(bump, d, 0.2, p);
  REQUIRE(bn2.has_value());
  CHECK(bn2->total == 0.0);

  auto infn = vanishing_at_infinity_norm(bump, d, 0.5, p);
  REQUIRE(infn.has_value());
  CHECK(infn->total == 0.0);
  CHECK(!vanishing_at_infinity_norm(bump, d, 5.0, p).has_value());
}

TEST_CASE("log probe: constant gives the pure log curve") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  NormParams p;
  p.lambda = 0.5;
  GridFunction c = sample_kind(TestFunctionKind::constant, d, h, 3);
  auto curve = log_average_probe(c, d, p);
  REQUIRE(!curve.empty());
  for (const ProbePoint& pt : curve) {
    CHECK(pt.sup_average == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(pt.ratio == doctest::Approx(1.0 / (1.0 + std::log(p.lambda / pt.side))).epsilon(1e-12));
    CHECK(pt.ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("natural bmo scale formula") {
  // substitution making the denominator equal the numerator
  double delta = 640.0 * (1.0 + std::sqrt(2.0));
  CHECK(natural_bmo_scale(1.0, delta, 2) == doctest::Approx(1.0).epsilon(1e-14));
  // plain substitution
  double expect = 0.25 / (640.0 * (1.0 + std::sqrt(2.0) * 0.5));
  CHECK(natural_bmo_scale(0.5, 1.0, 2) == doctest::Approx(expect).epsilon(1e-14));
  // linear in delta
  CHECK(natural_bmo_scale(0.3, 6.0, 2) ==
        doctest::Approx(6.0 * natural_bmo_scale(0.3, 1.0, 2)).epsilon(1e-12));
  CHECK_THROWS_AS(natural_bmo_scale(1.5, 1.0, 2), ValidationError);
  CHECK_THROWS_AS(natural_bmo_scale(0.5, -1.0, 2), ValidationError);
}

TEST_CASE("example-1 oscillation part stays small") {
  DomainSpec spec;
  spec.kind = DomainKind::strips_example_1;
  spec.strip_count = 3;
  spec.strip_lengths = {1, 1, 1};
  DomainModel d = build_domain(spec, cube2(-4, -1, 12));
  TestFunctionSpec s;
  s.kind = TestFunctionKind::example_1;
  double h = 12.0 / 1024;
  GridFunction f = sample(s, d, h);
  NormParams p;
  p.lambda = 2.0;
  NormReport rep = bmo_norm(f, d, p);
  // all cubes inside strip S_n have side <= 1/n, so osc(n x) <= n side/4 <= 1/4;
  // the bound 1 quoted for the construction holds with room
  CHECK(rep.oscillation_part <= 1.0);
  CHECK(rep.oscillation_part > 0.05);
}

TEST_CASE("bmo_norm validates lambda against the grid") {
  DomainModel d = square_side2();
  GridFunction c = sample_kind(TestFunctionKind::constant, d, 1.0 / 16, 1);
  NormParams p;
  p.lambda = 0.1;  // below 4h = 0.25
  CHECK_THROWS_AS(bmo_norm(c, d, p), ValidationError);
  p.lambda = 3.0;  // above the window side
  CHECK_THROWS_AS(bmo_norm(c, d, p), ValidationError);
}

TEST_CASE("average-part variants: difference measured, not assumed equal") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  GridFunction f = sample_kind(TestFunctionKind::log_distance, d, h);
  NormParams p;
  p.lambda = 0.5;
  p.variant = AverageVariant::at_least_lambda;
  NormReport at_least = bmo_norm(f, d, p);
  p.variant = AverageVariant::exactly_lambda;
  NormReport exactly = bmo_norm(f, d, p);
  CHECK(at_least.variant == AverageVariant::at_least_lambda);
  CHECK(exactly.variant == AverageVariant::exactly_lambda);
  // the exactly-lambda family is a subfamily, so its sup cannot exceed
  CHECK(exactly.average_part <= at_least.average_part + 1e-15);
  MESSAGE("average-part gap between variants: ", at_least.average_part - exactly.average_part);
}

TEST_CASE("boundary-collar norm is monotone in the collar width") {
  DomainModel d = square_side2();
  double h = 1.0 / 64;
  GridFunction f = sample_kind(TestFunctionKind::log_distance, d, h);
  NormParams p;
  p.lambda = 0.25;
  // the restricted families nest as t grows, so totals are nondecreasing
  double prev = -1;
  for (double t : {0.15, 0.3, 0.6, 1.2}) {
    auto rep = vanishing_at_boundary_norm(f, d, t, p);
    REQUIRE(rep.has_value());
    CHECK(rep->total >= prev);
    prev = rep->total;
  }
  // and the infinity version is monotone nonincreasing in the radius
  prev = 1e300;
  for (double radius : {0.2, 0.5, 0.8}) {
    auto rep = vanishing_at_infinity_norm(f, d, radius, p);
    REQUIRE(rep.has_value());
    CHECK(rep->total <= prev);
    prev = rep->total;
  }
}

TEST_CASE("truncation reduces mean oscillation: brute-force value sets") {
  // direct check of the clamp-contracts-oscillation fact on random tuples,
  // independent of any grid machinery
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 20000; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 7);
    std::vector<double> v(static_cast<size_t>(n));
    for (double& x : v) x = rng.uniform(-5, 5);
    double bound = rng.uniform(0.1, 4.0);
    auto osc = [&](const std::vector<double>& w) {
      double mean = 0;
      for (double x : w) mean += x;
      mean /= static_cast<double>(w.size());
      double dev = 0;
      for (double x : w) dev += std::abs(x - mean);
      return dev / static_cast<double>(w.size());
    };
    std::vector<double> clamped = v;
    for (double& x : clamped) x = std::clamp(x, -bound, bound);
    CHECK(osc(clamped) <= osc(v) + 1e-14);
  }
}
