#pragma once

#include <vector>

#include "bmolab/grid.hpp"

namespace bmo::reference {

/// Straightforward single-thread implementations of the hot reductions, kept
/// as the comparison baseline for the parallel kernels (tests assert
/// agreement, the bench target reports speedup). No sum tables, no OpenMP.

double cube_mean(const GridFunction& f, const Cube2& q);
double cube_mean_abs(const GridFunction& f, const Cube2& q);
double mean_oscillation(const GridFunction& f, const Cube2& q);

double family_sup_oscillation(const GridFunction& f, const std::vector<Cube2>& cubes);
double family_sup_abs_average(const GridFunction& f, const std::vector<Cube2>& cubes);

/// Direct two-loop ball average of phi over cells with center in B(x,radius).
double ball_average(const GridFunction& phi, const Vec2& x, double radius);

}  // namespace bmo::reference
