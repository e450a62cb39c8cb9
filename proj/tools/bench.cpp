// Benchmark: OpenMP kernels against the serial reference implementations on
// a standard workload. Prints one table row per kernel.

#include <chrono>
#include <cstdio>

#include "bmolab/extension.hpp"
#include "bmolab/oracle.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/parallel.hpp"
#include "bmolab/reference.hpp"
#include "bmolab/testfunc.hpp"

using namespace bmo;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& fn) {
  double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

void row(const char* name, double serial_ms, double parallel_ms, double diff) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx   max|diff| %.3e\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  double h = argc > 1 ? 1.0 / std::atof(argv[1]) : 1.0 / 256;

  DomainSpec spec;
  spec.kind = DomainKind::disk;
  spec.disk_radius = 0.9;
  DomainModel dom = build_domain(spec, cube2(-1, -1, 2));

  TestFunctionSpec fs;
  fs.kind = TestFunctionKind::log_distance;
  GridFunction f = sample(fs, dom, h);
  std::printf("grid %lld x %lld, %d workers\n", static_cast<long long>(f.nx),
              static_cast<long long>(f.ny), worker_count());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    CubeFamily fam = enumerate_cubes(dom, 4 * h, 0.5, 4, h / 8);
    double slow_v = 0, fast_v = 0;
    double slow = time_ms([&] { slow_v = reference::family_sup_oscillation(f, fam.cubes); });
    double fast = time_ms([&] { fast_v = sup_oscillation(f, fam).value; });
    row("family sup oscillation", slow, fast, std::abs(slow_v - fast_v));
  }
  {
    CubeFamily fam = enumerate_cubes(dom, 4 * h, 0.5, 4, h / 8);
    double slow_v = 0, fast_v = 0;
    double slow = time_ms([&] { slow_v = reference::family_sup_abs_average(f, fam.cubes); });
    double fast = time_ms([&] { fast_v = sup_abs_average(f, fam).value; });
    row("family sup |average|", slow, fast, std::abs(slow_v - fast_v));
  }
  {
    ExtensionParams p;
    p.lambda = 0.25;
    p.min_level = 12;
    ExtensionResult step = extend_step(f, dom, p);
    double c_n = default_averaging_constant(2);
    std::vector<std::pair<Vec2, double>> sites;
    for (int64_t j = 0; j < f.ny && sites.size() < 2000; j += 3)
      for (int64_t i = 0; i < f.nx && sites.size() < 2000; i += 3) {
        Vec2 x = f.cell_center(i, j);
        if (dom.signed_distance(x) >= 0) continue;
        double r = c_n * dom.boundary_distance(x);
        if (r >= 2 * h) sites.emplace_back(x, r);
      }
    double slow_acc = 0, fast_acc = 0;
    double slow = time_ms([&] {
      for (auto& [x, r] : sites) slow_acc += reference::ball_average(step.extended, x, r);
    });
    double fast = time_ms([&] {
      for (auto& [x, r] : sites) fast_acc += average_at(step.extended, x, dom, c_n);
    });
    row("ball averages (2000 sites)", slow, fast, std::abs(slow_acc - fast_acc) / sites.size());
  }
  {
    // oracle at a coarse grid against a naive single-thread rerun
    GridFunction fc = sample(fs, dom, 1.0 / 64);
    NormParams p;
    p.lambda = 0.25;
    double fast_v = 0, slow_v = 0;
    int before = worker_count();
    set_workers(1);
    double slow = time_ms([&] { slow_v = exhaustive_value(fc, dom, OracleFunctional::bmo_total, p); });
    set_workers(before);
    double fast = time_ms([&] { fast_v = exhaustive_value(fc, dom, OracleFunctional::bmo_total, p); });
    row("exhaustive oracle (h=1/64)", slow, fast, std::abs(slow_v - fast_v));
  }
  return 0;
}
