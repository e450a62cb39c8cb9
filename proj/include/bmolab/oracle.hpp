#pragma once

#include <cstdint>
#include <string>

#include "bmolab/oscillation.hpp"

namespace bmo {

/// Which sup-functional the oracle evaluates.
enum class OracleFunctional { omega_at, bmo_total, bmo_oscillation_part, bmo_average_part };

const char* to_string(OracleFunctional f);

struct OracleReport {
  std::string functional;
  double parameter = 0;  // t for omega_at, lambda otherwise
  double oracle_value = 0;
  double sampled_value = 0;
  double ratio = 0;  // oracle / sampled (0 when sampled is 0)
  int64_t oracle_cubes = 0;
  int64_t sampled_cubes = 0;
};

inline constexpr int64_t kOracleBudget = 10'000'000;

/// Brute-force value over every grid-aligned cube (corners on the cell
/// lattice, side a multiple of h, at least 4 cells per axis) that passes the
/// same containment certificate the sampled families use. The sampled value
/// of the same functional is evaluated alongside; the sampled family is a
/// subset of the exhaustive one on power-of-two grids, so
/// sampled <= oracle exactly.
OracleReport exhaustive_sup(const GridFunction& f, const DomainModel& dom, OracleFunctional fn,
                            const NormParams& params, int64_t max_cubes = kOracleBudget);

/// Oracle value only (no sampled comparison), for tests.
double exhaustive_value(const GridFunction& f, const DomainModel& dom, OracleFunctional fn,
                        const NormParams& params, int64_t max_cubes = kOracleBudget);

}  // namespace bmo
