#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmolab/domain.hpp"
#include "bmolab/grid.hpp"

namespace bmo {

enum class TestFunctionKind {
  constant,
  coordinate,
  log_distance,        // log(1/d(x)), the canonical unbounded bmo-type function
  example_1,           // 0 on the half-plane, n*x on strip S_n
  example_2,           // c_j*x on S_{n,j}; zero on strips wide enough to hold
                       // cubes of side zero_scale (and on the half-plane)
  random_whitney_step, // per-Whitney-cube constant, seeded
  indicator_half,      // 1 on the left half of the window
};

const char* to_string(TestFunctionKind k);
TestFunctionKind test_function_kind_from_string(const std::string& s);

struct TestFunctionSpec {
  TestFunctionKind kind = TestFunctionKind::constant;
  double value = 1;                 // constant
  int axis = 0;                     // coordinate
  std::vector<double> slopes;       // example-2 c_j; empty -> c_j = sqrt(j)
  double zero_scale = 0;            // example-2: zero out strips of width >= zero_scale (0 = never)
  uint64_t seed = 1;                // random-whitney-step
  double amplitude = 1;             // random-whitney-step
  int whitney_min_level = 12;        // random-whitney-step: fixed so the function is h-independent

  void validate() const;
};

/// Samples the spec at cell centers, masked to the domain.
GridFunction sample(const TestFunctionSpec& spec, const DomainModel& dom, double h);

/// Pointwise evaluation (used by the samplers and by exactness tests; the
/// random-whitney-step kind is only available through sample()).
double evaluate(const TestFunctionSpec& spec, const DomainModel& dom, const Vec2& p);

}  // namespace bmo
