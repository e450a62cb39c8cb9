// Acceptance suite: one pass/fail line per criterion, exit nonzero on any
// failure. Each criterion pins its tolerances in code and reports elapsed
// time against its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmolab/approximation.hpp"
#include "bmolab/epsdelta.hpp"
#include "bmolab/extension.hpp"
#include "bmolab/io.hpp"
#include "bmolab/oracle.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/testfunc.hpp"

using namespace bmo;
using nlohmann::json;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(std::vector<std::string>&)> run;  // push failure strings
};

std::string g_fixtures = "tests/fixtures";
bool g_update_fixtures = false;

#define REQUIRE_C(cond, ...)                                    \
  do {                                                          \
    if (!(cond)) {                                              \
      char buf_[512];                                           \
      std::snprintf(buf_, sizeof(buf_), __VA_ARGS__);           \
      failures.push_back(buf_);                                 \
    }                                                           \
  } while (0)

DomainModel make_square(double corner, double side, double wcorner, double wside) {
  DomainSpec spec;
  spec.kind = DomainKind::square;
  spec.sq_corner = vec2(corner, corner);
  spec.sq_side = side;
  return build_domain(spec, cube2(wcorner, wcorner, wside));
}

DomainModel make_disk(double radius, double wcorner, double wside) {
  DomainSpec spec;
  spec.kind = DomainKind::disk;
  spec.disk_radius = radius;
  return build_domain(spec, cube2(wcorner, wcorner, wside));
}

DomainModel make_half_plane(double wside) {
  DomainSpec spec;
  spec.kind = DomainKind::half_plane;
  return build_domain(spec, cube2(-wside / 2, -wside / 2, wside));
}

DomainModel make_strips1(int count, std::vector<double> lengths, const Cube2& window) {
  DomainSpec spec;
  spec.kind = DomainKind::strips_example_1;
  spec.strip_count = count;
  spec.strip_lengths = std::move(lengths);
  return build_domain(spec, window);
}

DomainModel make_strips2(int count, const Cube2& window) {
  DomainSpec spec;
  spec.kind = DomainKind::strips_example_2;
  spec.strip_count = count;
  return build_domain(spec, window);
}

GridFunction sample_kind(TestFunctionKind kind, const DomainModel& d, double h, double value = 1,
                         uint64_t seed = 5) {
  TestFunctionSpec s;
  s.kind = kind;
  s.value = value;
  s.seed = seed;
  return sample(s, d, h);
}

// ---------------------------------------------------------------------------
// 1. Norm exactness
// ---------------------------------------------------------------------------
void criterion1(std::vector<std::string>& failures) {
  double h = 1.0 / 128;
  std::vector<std::pair<std::string, DomainModel>> builders;
  builders.emplace_back("square", make_square(-0.5, 1.5, -1, 2));
  builders.emplace_back("disk", make_disk(0.9, -1, 2));
  builders.emplace_back("half-plane", make_half_plane(2));
  {
    DomainSpec spec;
    spec.kind = DomainKind::rect_union;
    spec.rects = {{-0.75, -0.75, 1.0, 1.5}, {-0.25, -0.25, 1.0, 0.75}};
    builders.emplace_back("rect-union", build_domain(spec, cube2(-1, -1, 2)));
  }
  builders.emplace_back("strips-example-1",
                        make_strips1(2, {1.0, 1.0}, cube2(-2, -1, 4)));
  builders.emplace_back("strips-example-2", make_strips2(2, cube2(-2, -1, 8)));

  NormParams p;
  p.lambda = 0.25;
  for (auto& [name, dom] : builders) {
    for (double c : {3.0, -2.0}) {
      GridFunction f = sample_kind(TestFunctionKind::constant, dom, h, c);
      NormReport rep = bmo_norm(f, dom, p);
      REQUIRE_C(std::abs(rep.total - std::abs(c)) <= 1e-12,
                "|const %g| on %s: total %.17g != %.17g", c, name.c_str(), rep.total, std::abs(c));
      REQUIRE_C(rep.oscillation_part == 0.0, "const osc nonzero on %s", name.c_str());
    }
  }

  // each norm part bounded by the sup norm exactly (total by twice)
  DomainModel sq = make_square(-0.5, 1.5, -1, 2);
  DomainModel dk = make_disk(0.9, -1, 2);
  for (const DomainModel* dom : {&sq, &dk}) {
    for (TestFunctionKind kind : {TestFunctionKind::coordinate, TestFunctionKind::indicator_half,
                                  TestFunctionKind::random_whitney_step}) {
      GridFunction f = sample_kind(kind, *dom, h);
      double m = sup_norm(f);
      NormReport rep = bmo_norm(f, *dom, p);
      REQUIRE_C(rep.oscillation_part <= m + 1e-12, "osc part exceeds sup norm (%s on %s)",
                to_string(kind), to_string(dom->kind));
      REQUIRE_C(rep.average_part <= m + 1e-12, "avg part exceeds sup norm (%s on %s)",
                to_string(kind), to_string(dom->kind));
      REQUIRE_C(rep.total <= 2 * m + 1e-12, "total exceeds twice the sup norm (%s on %s)",
                to_string(kind), to_string(dom->kind));
    }
  }

  // triangle inequality on shared families
  GridFunction f1 = sample_kind(TestFunctionKind::coordinate, sq, h);
  GridFunction f2 = sample_kind(TestFunctionKind::random_whitney_step, sq, h, 1, 17);
  CubeFamily small = enumerate_cubes(sq, 4 * h, p.lambda, 4, h / 8, 0, &f1);
  CubeFamily large = enumerate_cubes(sq, family_scales(p.lambda, 2.0, 4), 4, h / 8, 0, &f1);
  auto norm_over = [&](const GridFunction& u) {
    return sup_oscillation(u, small).value + sup_abs_average(u, large).value;
  };
  REQUIRE_C(norm_over(gf_add(f1, f2)) <= norm_over(f1) + norm_over(f2) + 1e-12,
            "triangle inequality violated");
}

// ---------------------------------------------------------------------------
// 2. Oracle subset inequality + ratio regression
// ---------------------------------------------------------------------------
void criterion2(std::vector<std::string>& failures) {
  double h = 1.0 / 64;
  DomainModel sq = make_square(0, 1, 0, 1);
  DomainModel dk = make_disk(1.0, -1.25, 2.5);
  DomainModel hp = make_half_plane(2);
  DomainModel st = make_strips1(3, {1, 1, 1}, cube2(-1.5, -0.5, 4));

  struct Case {
    std::string name;
    const DomainModel* dom;
    TestFunctionSpec fn;
    OracleFunctional functional;
    double lambda;
  };
  auto fn = [](TestFunctionKind k, double v = 1, int axis = 0) {
    TestFunctionSpec s;
    s.kind = k;
    s.value = v;
    s.axis = axis;
    return s;
  };
  std::vector<Case> cases = {
      {"square-const-bmo", &sq, fn(TestFunctionKind::constant, 3), OracleFunctional::bmo_total, 0.25},
      {"square-coord-bmo", &sq, fn(TestFunctionKind::coordinate), OracleFunctional::bmo_total, 0.5},
      {"square-ind-bmo", &sq, fn(TestFunctionKind::indicator_half), OracleFunctional::bmo_total, 0.25},
      {"square-log-bmo", &sq, fn(TestFunctionKind::log_distance), OracleFunctional::bmo_total, 0.25},
      {"square-coord-omega", &sq, fn(TestFunctionKind::coordinate), OracleFunctional::omega_at, 0.5},
      {"square-log-avg", &sq, fn(TestFunctionKind::log_distance), OracleFunctional::bmo_average_part, 0.25},
      {"disk-const-bmo", &dk, fn(TestFunctionKind::constant, 2), OracleFunctional::bmo_total, 0.25},
      {"disk-coord-bmo", &dk, fn(TestFunctionKind::coordinate), OracleFunctional::bmo_total, 0.25},
      {"halfplane-coordy-bmo", &hp, fn(TestFunctionKind::coordinate, 1, 1), OracleFunctional::bmo_total, 0.25},
      {"halfplane-ind-omega", &hp, fn(TestFunctionKind::indicator_half), OracleFunctional::omega_at, 0.25},
      {"strips1-ex1-bmo", &st, fn(TestFunctionKind::example_1), OracleFunctional::bmo_total, 0.5},
      {"strips1-ex1-omega", &st, fn(TestFunctionKind::example_1), OracleFunctional::omega_at, 0.5},
  };

  json ratios;
  for (const Case& c : cases) {
    GridFunction f = sample(c.fn, *c.dom, h);
    NormParams p;
    p.lambda = c.lambda;
    OracleReport rep = exhaustive_sup(f, *c.dom, c.functional, p);
    REQUIRE_C(rep.sampled_value <= rep.oracle_value + 1e-15 * std::max(1.0, rep.oracle_value),
              "%s: sampled %.12g exceeds oracle %.12g", c.name.c_str(), rep.sampled_value,
              rep.oracle_value);
    double ratio = rep.sampled_value > 0 ? rep.oracle_value / rep.sampled_value : 1.0;
    REQUIRE_C(ratio <= 1.5, "%s: oracle/sampled ratio %.4f exceeds 1.5", c.name.c_str(), ratio);
    ratios[c.name] = ratio;
  }

  std::string path = g_fixtures + "/oracle_baseline.json";
  if (g_update_fixtures) {
    std::ofstream out(path);
    out << ratios.dump(2) << "\n";
    std::printf("  (oracle baseline written to %s)\n", path.c_str());
    return;
  }
  std::ifstream in(path);
  if (!in) {
    failures.push_back("missing oracle baseline fixture " + path + " (run with --update-fixtures)");
    return;
  }
  json baseline;
  in >> baseline;
  for (auto it = ratios.begin(); it != ratios.end(); ++it) {
    if (!baseline.contains(it.key())) {
      failures.push_back("baseline missing case " + it.key());
      continue;
    }
    double got = it.value().get<double>(), want = baseline[it.key()].get<double>();
    REQUIRE_C(std::abs(got - want) <= 0.05, "%s: ratio %.4f drifted from baseline %.4f",
              it.key().c_str(), got, want);
  }
}

// ---------------------------------------------------------------------------
// 3. Whitney invariants
// ---------------------------------------------------------------------------
void criterion3(std::vector<std::string>& failures) {
  double pitch = 1.0 / 256;
  struct Case {
    std::string name;
    DomainModel dom;
    int min_level;
  };
  std::vector<Case> cases;
  cases.push_back({"square", make_square(-0.5, 1.0, -1, 2), 12});
  cases.push_back({"disk", make_disk(1.0, -1.25, 2.5), 12});
  cases.push_back({"half-plane", make_half_plane(8), 12});
  cases.push_back({"strips-example-1", make_strips1(4, {1, 1, 1, 1}, cube2(-4, -1, 16)), 13});

  for (Case& c : cases) {
    for (Owner owner : {Owner::domain, Owner::complement}) {
      WhitneyDecomposition wd = whitney_decompose(c.dom, owner, c.dom.window, c.min_level);
      for (const WhitneyCube& cube : wd.cubes) {
        double diam = cube.box.diam();
        double dist = c.dom.box_boundary_dist(cube.box);
        REQUIRE_C(diam <= dist + 1e-12, "%s: diam > dist", c.name.c_str());
        REQUIRE_C(dist <= 4 * diam * (1 + 1e-12), "%s: dist > 4 diam", c.name.c_str());
      }
      for (size_t a = 0; a < wd.cubes.size(); ++a)
        for (int32_t nb : wd.adjacency[a]) {
          int diff = std::abs(wd.cubes[a].dc.level - wd.cubes[static_cast<size_t>(nb)].dc.level);
          REQUIRE_C(diff <= 2, "%s: adjacent level gap %d", c.name.c_str(), diff);
        }
      // disjointness: within each level indices are unique by construction;
      // across levels no accepted cube may contain another accepted cube
      // (checked through the locate structure: a coarser cube containing a
      // finer one would shadow it in locate())
      int64_t n = std::llround(c.dom.window.side / pitch);
      int64_t inside = 0, covered = 0;
      for (int64_t j = 0; j < n; ++j)
        for (int64_t i = 0; i < n; ++i) {
          Vec2 pt = vec2(c.dom.window.corner[0] + (i + 0.5) * pitch,
                         c.dom.window.corner[1] + (j + 0.5) * pitch);
          double sd = c.dom.signed_distance(pt);
          bool in = owner == Owner::domain ? sd > 0 : sd < 0;
          if (!in) continue;
          ++inside;
          if (wd.locate(pt)) ++covered;
        }
      REQUIRE_C(covered >= static_cast<int64_t>(0.99 * static_cast<double>(inside)),
                "%s/%s: coverage %.4f below 0.99", c.name.c_str(),
                owner == Owner::domain ? "domain" : "complement",
                static_cast<double>(covered) / static_cast<double>(inside));
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Extension contract
// ---------------------------------------------------------------------------
void criterion4(std::vector<std::string>& failures) {
  std::vector<std::pair<std::string, DomainModel>> builders;
  builders.emplace_back("square", make_square(-0.5, 1.0, -1, 2));
  builders.emplace_back("disk", make_disk(0.75, -1, 2));
  DomainModel window_domain = make_square(-1, 2.0, -1, 2);  // the full window as a domain

  std::vector<std::pair<std::string, TestFunctionSpec>> corpus;
  auto add = [&](const char* n, TestFunctionKind k, double v = 1) {
    TestFunctionSpec s;
    s.kind = k;
    s.value = v;
    s.seed = 5;
    corpus.emplace_back(n, s);
  };
  add("const3", TestFunctionKind::constant, 3);
  add("coord", TestFunctionKind::coordinate);
  add("indicator", TestFunctionKind::indicator_half);
  add("logdist", TestFunctionKind::log_distance);
  add("whitneystep", TestFunctionKind::random_whitney_step);
  // sixth corpus member: the radial cutoff, built through its own factory

  ExtensionParams ep;
  ep.lambda = 0.25;
  ep.min_level = 12;
  NormParams np;
  np.lambda = 0.25;

  for (auto& [dname, dom] : builders) {
    std::map<std::string, std::vector<double>> ratios;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
      std::vector<std::pair<std::string, GridFunction>> funcs;
      for (auto& [fname, spec] : corpus) funcs.emplace_back(fname, sample(spec, dom, h));
      funcs.emplace_back("psi1", sample_psi_k(1, dom, h));

      for (auto& [fname, f] : funcs) {
        ExtensionResult res = extend_smooth(f, dom, ep);
        // restriction identity, bitwise
        bool restriction_ok = true;
        for (size_t k = 0; k < f.values.size(); ++k)
          if (f.mask[k] && res.extended.values[k] != f.values[k]) restriction_ok = false;
        REQUIRE_C(restriction_ok, "%s/%s h=%g: restriction not bitwise", dname.c_str(),
                  fname.c_str(), h);
        // sup bound (relative FP guard: ball averages accumulate ~1e-12
        // relative error through the row prefix sums)
        double mf = sup_norm(f);
        REQUIRE_C(sup_norm(res.extended) <= mf + 1e-11 * std::max(1.0, mf),
                  "%s/%s h=%g: sup norm grew", dname.c_str(), fname.c_str(), h);
        // bmo ratio across the window
        double denom = bmo_norm(f, dom, np).total;
        double numer = bmo_norm(res.extended, window_domain, np).total;
        REQUIRE_C(std::isfinite(numer / denom), "%s/%s h=%g: ratio not finite", dname.c_str(),
                  fname.c_str(), h);
        ratios[fname].push_back(numer / denom);
      }
    }
    for (auto& [fname, rs] : ratios) {
      double lo = rs[0], hi = rs[0];
      for (double r : rs) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      REQUIRE_C(hi <= 1.25 * lo, "%s/%s: bmo ratio unstable across h: [%.4f, %.4f]", dname.c_str(),
                fname.c_str(), lo, hi);
    }
  }

  // step-extension linearity, bitwise on an integer-valued corpus at a
  // power-of-two grid; smoothed linearity within 1e-11
  {
    DomainModel dom = make_square(-0.5, 1.0, -1, 2);
    double h = 1.0 / 128;
    GridFunction a = sample_kind(TestFunctionKind::indicator_half, dom, h);
    GridFunction b = sample_kind(TestFunctionKind::constant, dom, h, 3);
    GridFunction combo = gf_linear(2, a, 1, b);
    ExtensionResult sa = extend_step(a, dom, ep);
    ExtensionResult sb = extend_step(b, dom, ep);
    ExtensionResult sc = extend_step(combo, dom, ep);
    bool exact = true;
    for (size_t k = 0; k < sc.extended.values.size(); ++k)
      if (sc.extended.values[k] != 2 * sa.extended.values[k] + sb.extended.values[k]) exact = false;
    REQUIRE_C(exact, "step extension linearity not bitwise");

    ExtensionResult ma = extend_smooth(a, dom, ep);
    ExtensionResult mb = extend_smooth(b, dom, ep);
    ExtensionResult mc = extend_smooth(gf_linear(1, a, -2, b), dom, ep);
    double worst = 0;
    for (size_t k = 0; k < mc.extended.values.size(); ++k)
      worst = std::max(worst, std::abs(mc.extended.values[k] -
                                       (ma.extended.values[k] - 2 * mb.extended.values[k])));
    REQUIRE_C(worst <= 1e-11, "smooth extension linearity error %.3e > 1e-11", worst);
  }

  // compact support preservation with recorded radius
  {
    DomainModel dom = make_square(-0.5, 1.0, -1, 2);
    double h = 1.0 / 128;
    GridFunction f = make_grid(dom, h);
    // bump reaching near the boundary so the extension transports nonzero
    // values across it
    for (int64_t j = 0; j < f.ny; ++j)
      for (int64_t i = 0; i < f.nx; ++i) {
        size_t k = static_cast<size_t>(f.idx(i, j));
        if (f.mask[k] && (f.cell_center(i, j) - vec2(0.35, 0)).norm() < 0.12) f.values[k] = 1.0;
      }
    f.finalize();
    ExtensionParams small = ep;
    small.lambda = 0.0625;
    ExtensionResult res = extend_smooth(f, dom, small);
    double r_in = support_radius(f);
    double r_out = support_radius(res.extended);
    REQUIRE_C(r_out >= r_in && r_out < 1.0, "support radius %.4f -> %.4f not compactly preserved",
              r_in, r_out);
    std::printf("  [info] compact support radius: %.4f -> %.4f\n", r_in, r_out);
  }
}

// ---------------------------------------------------------------------------
// 5. Lipschitz extension
// ---------------------------------------------------------------------------
void criterion5(std::vector<std::string>& failures) {
  // the square sits away from the origin so the radial cutoff varies on it
  DomainModel dom = make_square(0.25, 1.0, -0.25, 2);
  ExtensionParams ep;
  ep.lambda = 0.25;
  ep.min_level = 12;

  std::vector<std::pair<std::string, std::function<GridFunction(double)>>> funcs;
  funcs.emplace_back("coord-x", [&](double h) { return sample_kind(TestFunctionKind::coordinate, dom, h); });
  funcs.emplace_back("coord-y", [&](double h) {
    TestFunctionSpec s;
    s.kind = TestFunctionKind::coordinate;
    s.axis = 1;
    return sample(s, dom, h);
  });
  funcs.emplace_back("psi1", [&](double h) { return sample_psi_k(1, dom, h); });
  funcs.emplace_back("affine-xy", [&](double h) {
    TestFunctionSpec sy;
    sy.kind = TestFunctionKind::coordinate;
    sy.axis = 1;
    return gf_add(sample_kind(TestFunctionKind::coordinate, dom, h), sample(sy, dom, h));
  });

  // the fringe where the extension decays to zero needs the averaging radius
  // resolved, hence the finer grid set
  for (auto& [name, make] : funcs) {
    std::vector<double> ratios;
    for (double h : {1.0 / 128, 1.0 / 256, 1.0 / 512}) {
      GridFunction f = make(h);
      double lip_b = sup_norm(f) + measured_lipschitz(f);
      ExtensionResult res = extend_smooth(f, dom, ep);
      double lip_t = measured_lipschitz(res.extended);
      REQUIRE_C(lip_b > 0, "%s: zero lipschitz denominator", name.c_str());
      ratios.push_back(lip_t / lip_b);
    }
    double lo = ratios[0], hi = ratios[0];
    for (double r : ratios) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    REQUIRE_C(std::isfinite(hi), "%s: ratio not finite", name.c_str());
    REQUIRE_C(hi <= 1.25 * lo, "%s: lipschitz ratio unstable: [%.4f, %.4f]", name.c_str(), lo, hi);
    std::printf("  [info] lip(Tf)/lip_b(f) for %s: %.4f .. %.4f\n", name.c_str(), lo, hi);
  }
}

// ---------------------------------------------------------------------------
// 6. Sarason approximation
// ---------------------------------------------------------------------------
void criterion6(std::vector<std::string>& failures) {
  DomainModel dom = make_square(0, 1.0, 0, 1);
  double h = 1.0 / 256;
  GridFunction f = sample_kind(TestFunctionKind::log_distance, dom, h);
  NormParams np;
  np.lambda = 0.125;
  ApproxCurve curve = approximation_driver(f, dom, np, ApproxScheme::lipschitz,
                                           {0.25, 0.125, 0.0625, 0.03125, 0.015625});
  REQUIRE_C(curve.errors.size() == 5, "curve incomplete");
  REQUIRE_C(curve.errors.back() <= 0.5 * curve.errors.front(),
            "final error %.4f not half of initial %.4f", curve.errors.back(), curve.errors.front());

  // truncation oscillation dominance, exact on every family cube
  GridFunction cut = truncate(f, 1.0);
  CubeFamily fam = enumerate_cubes(dom, 4 * h, np.lambda, 4, h / 8, 0, &f);
  double worst = 0;
  for (const Cube2& q : fam.cubes)
    worst = std::max(worst, mean_oscillation(cut, q) - mean_oscillation(f, q));
  REQUIRE_C(worst <= 1e-12, "truncation increased oscillation by %.3e", worst);
  std::printf("  [info] lipschitz-scheme errors: %.4f -> %.4f over 5 levels\n",
              curve.errors.front(), curve.errors.back());
}

// ---------------------------------------------------------------------------
// 7. Cutoff exactness
// ---------------------------------------------------------------------------
void criterion7(std::vector<std::string>& failures) {
  for (int k : {1, 2, 7}) {
    PsiK psi{k};
    REQUIRE_C(psi(vec2(0, 0)) == 1.0, "psi_%d(0) != 1", k);
    REQUIRE_C(psi(vec2(static_cast<double>(k), 0)) == 1.0, "psi_%d(k) != 1", k);
    REQUIRE_C(psi(vec2(1.5 * k, 0)) == 0.5, "psi_%d(1.5k) != 1/2", k);
    REQUIRE_C(psi(vec2(2.0 * k, 0)) == 0.0, "psi_%d(2k) != 0", k);
  }

  DomainModel dom = make_square(-0.5, 1.0, -1, 2);
  double lambda = 0.5;
  GridFunction hj = sample_h_j(dom, 1.0 / 64, 3, lambda);
  bool interior_ok = true;
  for (int64_t j = 0; j < hj.ny; ++j)
    for (int64_t i = 0; i < hj.nx; ++i) {
      size_t k = static_cast<size_t>(hj.idx(i, j));
      if (!hj.mask[k]) continue;
      if (dom.distance(hj.cell_center(i, j)) >= lambda / 4 && hj.values[k] != 1.0)
        interior_ok = false;
    }
  REQUIRE_C(interior_ok, "h_j != 1 somewhere on the deep interior");

  double prev = 1e300;
  for (int j = 1; j <= 20; ++j) {
    CutoffThreshold ct = h_support_threshold(j, lambda);
    REQUIRE_C(ct.log_alpha < prev, "alpha_%d not strictly below alpha_%d", j, j - 1);
    prev = ct.log_alpha;
  }

  double prev_tphi = 0;
  for (int s = -60; s <= 0; ++s) {
    double t = (lambda / 2) * std::pow(2.0, static_cast<double>(s) / 4.0);
    double v = t * phi_lambda(t, lambda);
    REQUIRE_C(v > prev_tphi, "t phi(t) not increasing at t=%.3e", t);
    prev_tphi = v;
  }
}

// ---------------------------------------------------------------------------
// 8. Example 1 dichotomy
// ---------------------------------------------------------------------------
void criterion8(std::vector<std::string>& failures) {
  const int count = 32;
  const Cube2 window = cube2(-5, -1.5, 40);
  const double h = 40.0 / 5120;  // 1/128
  NormParams np;
  np.lambda = 4.0;
  np.pitch_divisor = 8;

  auto probe_growth = [&](const DomainModel& dom, double* g) {
    TestFunctionSpec s;
    s.kind = TestFunctionKind::example_1;
    GridFunction f = sample(s, dom, h);
    auto curve = log_average_probe(f, dom, np);
    double r8 = 0, r32 = 0;
    for (const ProbePoint& pt : curve) {
      if (pt.side == 0.125) r8 = pt.ratio;
      if (pt.side == 0.03125) r32 = pt.ratio;
    }
    if (r8 <= 0 || r32 <= 0) return false;
    *g = r32 / r8;
    return true;
  };

  // constant lengths: ratio at scale 1/(2n) grows by >= 3x from n=4 to n=16
  DomainModel flat = make_strips1(count, std::vector<double>(count, 1.0), window);
  double g_flat = 0;
  REQUIRE_C(probe_growth(flat, &g_flat), "constant-length probe scales missing");
  REQUIRE_C(g_flat >= 3.0, "constant lengths: probe growth %.3f below 3", g_flat);

  // decaying lengths log n / n: within a factor 2 over the same range
  std::vector<double> decay(count);
  for (int n = 1; n <= count; ++n) decay[n - 1] = std::log(n + 1.0) / (n + 1.0);
  DomainModel dec = make_strips1(count, decay, window);
  double g_dec = 0;
  REQUIRE_C(probe_growth(dec, &g_dec), "decaying-length probe scales missing");
  REQUIRE_C(g_dec <= 2.0, "decaying lengths: probe growth %.3f above 2", g_dec);
  std::printf("  [info] probe growth: constant %.3f, log-decay %.3f\n", g_flat, g_dec);

  // unmatched whitney cubes appear for constant lengths, none for decay
  WhitneyDecomposition e_flat = whitney_decompose(flat, Owner::domain, window, 14);
  WhitneyDecomposition ep_flat = whitney_decompose(flat, Owner::complement, window, 14);
  CubeMatching m_flat = match_cubes(ep_flat, e_flat, 0.5);
  REQUIRE_C(!m_flat.unmatched.empty(), "constant lengths produced no unmatched cubes");

  WhitneyDecomposition e_dec = whitney_decompose(dec, Owner::domain, window, 14);
  WhitneyDecomposition ep_dec = whitney_decompose(dec, Owner::complement, window, 14);
  CubeMatching m_dec = match_cubes(ep_dec, e_dec, 0.5);
  REQUIRE_C(m_dec.unmatched.empty(), "decaying lengths produced %zu unmatched cubes",
            m_dec.unmatched.size());
  std::printf("  [info] unmatched cubes: constant %zu, log-decay %zu\n", m_flat.unmatched.size(),
              m_dec.unmatched.size());
}

// ---------------------------------------------------------------------------
// 9. Example 2 scale dependence
// ---------------------------------------------------------------------------
void criterion9(std::vector<std::string>& failures) {
  const int groups = 10;
  const double lambda = 2.0, lambda_prime = 0.5;
  TestFunctionSpec fn;
  fn.kind = TestFunctionKind::example_2;  // c_j = sqrt(j), no zeroed strips at this lambda

  std::vector<double> sides = {30, 60, 90};
  std::vector<double> totals_lambda, totals_prime, reach;
  for (double side : sides) {
    DomainModel dom = make_strips2(groups, cube2(-4, -1, side));
    double h = side / std::pow(2.0, std::round(std::log2(side * 32)));
    GridFunction f = sample(fn, dom, h);
    NormParams p;
    p.lambda = lambda;
    NormReport at_lambda = bmo_norm(f, dom, p);
    REQUIRE_C(at_lambda.average_part == 0.0,
              "window %g: averages at sides >= lambda not zero (%.3e)", side,
              at_lambda.average_part);
    totals_lambda.push_back(at_lambda.total);
    p.lambda = lambda_prime;
    totals_prime.push_back(bmo_norm(f, dom, p).total);
    // deepest group whose longest strip is fully visible
    double top_visible = 0;
    for (const Strip& s : dom.strips)
      if (s.base + s.width < dom.window.corner[1] + dom.window.side - 1)
        top_visible = std::max(top_visible, static_cast<double>(s.group));
    reach.push_back(top_visible);
  }
  // bounded at scale lambda while the window grows
  double lo = totals_lambda[0], hi = totals_lambda[0];
  for (double t : totals_lambda) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  REQUIRE_C(hi <= 1.25 * lo, "lambda-norm not stable across windows: [%.4f, %.4f]", lo, hi);
  // grows with the reach at scale lambda'
  REQUIRE_C(totals_prime.back() > totals_prime.front() * 1.3,
            "lambda'-norm did not grow: %.4f -> %.4f", totals_prime.front(), totals_prime.back());
  double reach_ratio = reach.back() / std::max(1.0, reach.front());
  double growth = totals_prime.back() / totals_prime.front();
  REQUIRE_C(growth >= 0.6 * reach_ratio, "growth %.3f far below reach ratio %.3f", growth,
            reach_ratio);
  std::printf("  [info] lambda-total %.4f..%.4f, lambda'-total %.4f -> %.4f (reach %g -> %g)\n", lo,
              hi, totals_prime.front(), totals_prime.back(), reach.front(), reach.back());

  // gamma plateaus above zero out to large beta
  {
    DomainModel dom = make_strips2(groups, cube2(-4, -1, 90));
    double h = 90.0 / 2880;
    GridFunction f = sample(fn, dom, h);
    double cert = h / 8;
    CubeFamily small = enumerate_cubes(dom, 4 * h, lambda, 4, cert, 0, &f);
    CubeFamily lam = enumerate_cubes(dom, std::vector<double>{lambda}, 4, cert, 0, &f);
    Vec2 zero = vec2(0, 0);
    std::vector<double> gammas;
    for (double beta : {5.0, 20.0, 40.0, 60.0}) {
      CubeFamily fs, fl;
      for (const Cube2& q : small.cubes)
        if (q.dist_to_point(zero) > beta) fs.cubes.push_back(q);
      for (const Cube2& q : lam.cubes)
        if (q.dist_to_point(zero) > beta) fl.cubes.push_back(q);
      double osc = fs.cubes.empty() ? 0 : sup_oscillation(f, fs).value;
      double avg = fl.cubes.empty() ? 0 : sup_abs_average(f, fl).value;
      gammas.push_back(osc + avg);
    }
    // largest strip-fitting dyadic scale is 1/2, so the plateau sits at
    // c_1 * (1/2)/4 = 0.125
    REQUIRE_C(gammas.back() > 0.1, "gamma plateau %.4f too low", gammas.back());
    REQUIRE_C(gammas.back() >= 0.5 * gammas.front(), "gamma decays: %.4f -> %.4f", gammas.front(),
              gammas.back());
    std::printf("  [info] gamma at beta 5..60: %.4f -> %.4f\n", gammas.front(), gammas.back());
  }
}

// ---------------------------------------------------------------------------
// 10. (eps,delta) verifier soundness
// ---------------------------------------------------------------------------
void criterion10(std::vector<std::string>& failures) {
  double h = 1.0 / 256;

  // disk and square pass at eps = 0.1, delta = diam with zero failures
  {
    DomainModel dk = make_disk(1.0, -1.25, 2.5);
    ScanResult rs = scan_domain(dk, 0.1, 2.0, 48, 7, h);
    REQUIRE_C(rs.failures == 0 && rs.resolution_limited == 0,
              "disk scan: %lld failures, %lld limited", static_cast<long long>(rs.failures),
              static_cast<long long>(rs.resolution_limited));
  }
  {
    DomainModel sq = make_square(0, 1.0, 0, 1);
    ScanResult rs = scan_domain(sq, 0.1, std::sqrt(2.0), 48, 7, h);
    REQUIRE_C(rs.failures == 0 && rs.resolution_limited == 0,
              "square scan: %lld failures, %lld limited", static_cast<long long>(rs.failures),
              static_cast<long long>(rs.resolution_limited));
  }

  // certificates re-verify exactly; monotone in eps
  {
    DomainModel sq = make_square(0, 1.0, 0, 1);
    CigarQuery q{vec2(3 * h, 3 * h), vec2(1 - 3 * h, 2 * h), 0.1, 2.0};
    CigarCertificate cert = check_pair(q, sq, h);
    REQUIRE_C(cert.success, "square near-boundary pair failed");
    double len = 0;
    for (size_t s = 1; s < cert.path.size(); ++s) len += (cert.path[s] - cert.path[s - 1]).norm();
    REQUIRE_C(len == cert.arclength, "arclength does not re-verify bitwise");
    double margin = 1e300;
    double sep = (q.x - q.y).norm();
    for (const Vec2& z : cert.path)
      margin = std::min(margin, sq.distance(z) - q.eps * (z - q.x).norm() * (z - q.y).norm() / sep);
    REQUIRE_C(margin == cert.clearance_margin, "clearance margin does not re-verify bitwise");
    for (double eps : {0.05, 0.02}) {
      CigarQuery q2 = q;
      q2.eps = eps;
      REQUIRE_C(check_pair(q2, sq, h).success, "monotonicity: failed at eps=%.3f", eps);
    }
  }

  // constant-length strips fail at the tips for large n
  {
    DomainSpec spec;
    spec.kind = DomainKind::strips_example_1;
    spec.strip_count = 32;
    spec.strip_lengths.assign(32, 1.0);
    DomainModel full = build_domain(spec, cube2(-5, -1.5, 40));
    auto tip_check = [&](int n) {
      const Strip& s = full.strips[static_cast<size_t>(n - 1)];
      DomainModel local = build_domain(spec, cube2(-1.5, s.base + s.width / 2 - 2, 4));
      CigarQuery q{vec2(1.0 - 1.0 / 128, s.base + s.width / 2), vec2(-0.5, s.base + s.width / 2),
                   0.1, 4.0};
      return check_pair(q, local, h);
    };
    REQUIRE_C(tip_check(2).success, "wide strip S_2 unexpectedly fails");
    for (int n : {24, 32}) {
      CigarCertificate cert = tip_check(n);
      REQUIRE_C(!cert.success, "thin strip S_%d unexpectedly certifies", n);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    if (!std::strcmp(argv[a], "--fixtures") && a + 1 < argc) g_fixtures = argv[++a];
    else if (!std::strcmp(argv[a], "--update-fixtures")) g_update_fixtures = true;
    else if (!std::strcmp(argv[a], "--only") && a + 1 < argc) only = std::atoi(argv[++a]);
  }

  std::vector<Criterion> criteria = {
      {1, "norm exactness", 10, criterion1},
      {2, "oracle subset inequality and ratio regression", 300, criterion2},
      {3, "whitney invariants", 60, criterion3},
      {4, "extension contract", 600, criterion4},
      {5, "lipschitz extension", 300, criterion5},
      {6, "sarason approximation", 300, criterion6},
      {7, "cutoff exactness", 30, criterion7},
      {8, "example 1 dichotomy", 600, criterion8},
      {9, "example 2 scale dependence", 600, criterion9},
      {10, "eps-delta verifier soundness", 600, criterion10},
  };

  int failed = 0;
  for (Criterion& c : criteria) {
    if (only && c.id != only) continue;
    std::vector<std::string> failures;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(failures);
    } catch (const std::exception& e) {
      failures.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds)
      failures.push_back("runtime " + std::to_string(secs) + "s exceeds budget " +
                         std::to_string(c.budget_seconds) + "s");
    if (failures.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", c.id, c.name.c_str(), secs);
    } else {
      ++failed;
      std::printf("[FAIL] criterion %2d: %s (%.1fs)\n", c.id, c.name.c_str(), secs);
      for (const std::string& f : failures) std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
