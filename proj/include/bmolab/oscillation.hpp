#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmolab/cube.hpp"
#include "bmolab/domain.hpp"
#include "bmolab/grid.hpp"

namespace bmo {

/// A finite family of cubes standing in for "all cubes Q inside the domain"
/// at a range of scales: dyadic sidelengths on a translation lattice of pitch
/// side/pitch_divisor, each member certified inside the domain.
struct CubeFamily {
  std::vector<Cube2> cubes;
  std::string generator;
  double scale_min = 0, scale_max = 0;  // realized side bounds
};

/// Sidelengths used by the default family generator: dyadic values 2^-k in
/// [t_min, t_max), topped by t_max*(1 - 1/pitch_divisor) so the family can
/// approach the open upper scale bound.
std::vector<double> family_scales(double t_min, double t_max, int pitch_divisor);

/// Enumerates cubes of the given sidelengths with corners on the per-scale
/// lattice window.corner + (side/pitch_divisor) Z^2, keeping those certified
/// inside the domain. Throws NotEvaluableError when empty. A positive
/// grid_pitch snaps sides and positions onto that cell lattice, making every
/// member representable in the oracle's grid-aligned universe.
CubeFamily enumerate_cubes(const DomainModel& dom, const std::vector<double>& scales,
                           int pitch_divisor, double cert_pitch, double grid_pitch = 0,
                           const GridFunction* mask_hint = nullptr);

/// Convenience: scales from family_scales(t_min, t_max, pitch_divisor).
CubeFamily enumerate_cubes(const DomainModel& dom, double t_min, double t_max, int pitch_divisor,
                           double cert_pitch, double grid_pitch = 0,
                           const GridFunction* mask_hint = nullptr);

/// Mean oscillation of f over Q: mean of |f - f_Q| over cells of Q.
double mean_oscillation(const GridFunction& f, const Cube2& q);

struct ArgMax {
  double value = 0;
  Cube2 cube;
  bool valid = false;
};

/// Max of mean_oscillation over the family (order-independent reduction).
ArgMax sup_oscillation(const GridFunction& f, const CubeFamily& family);
/// Max of cube_mean_abs over the family.
ArgMax sup_abs_average(const GridFunction& f, const CubeFamily& family);

/// omega_Omega(f, t): sup of mean oscillation over family cubes; the family's
/// scale bounds must sit inside (0, t).
double omega(const GridFunction& f, const DomainModel& dom, double t, const CubeFamily& family);

enum class AverageVariant { at_least_lambda, exactly_lambda };

struct NormParams {
  double lambda = 0.25;
  int pitch_divisor = 4;
  double cert_pitch = 0;  // default h/8
  AverageVariant variant = AverageVariant::at_least_lambda;
};

struct FamilyStats {
  int64_t count = 0;
  double scale_min = 0, scale_max = 0;
};

struct NormReport {
  double oscillation_part = 0;  // omega_Omega(f, lambda), discretized
  double average_part = 0;      // sup |f|_Q over large cubes
  double total = 0;
  ArgMax argmax_osc;
  ArgMax argmax_avg;
  AverageVariant variant = AverageVariant::at_least_lambda;
  FamilyStats small_family;
  FamilyStats large_family;
};

/// Nonhomogeneous norm at scale lambda: oscillation over sides in [4h,lambda)
/// plus sup of |f|_Q over sides >= lambda (or == lambda for the
/// exactly_lambda variant).
NormReport bmo_norm(const GridFunction& f, const DomainModel& dom, const NormParams& params);

/// Norm over the subfamily of cubes lying in the boundary collar
/// {x : d(x) < t}, i.e. cubes whose max distance to the boundary (measured on
/// the grid) stays below t. Empty collar family -> nullopt (not evaluable).
std::optional<NormReport> vanishing_at_boundary_norm(const GridFunction& f, const DomainModel& dom,
                                                     double t, const NormParams& params);

/// Norm over cubes outside the closed ball B(0,R) (exact set distance).
std::optional<NormReport> vanishing_at_infinity_norm(const GridFunction& f, const DomainModel& dom,
                                                     double radius, const NormParams& params);

/// gamma(f, beta): sup of mean oscillation over cubes at set distance > beta
/// from the origin with side < lambda, plus sup of |f|_Q over such cubes with
/// side == lambda. nullopt when no cube qualifies.
std::optional<double> gamma_functional(const GridFunction& f, const DomainModel& dom, double beta,
                                       const NormParams& params);

struct ProbePoint {
  double side = 0;
  double sup_average = 0;
  double ratio = 0;  // sup_average / ((1 + log(lambda/side)) * total)
};

/// Per-scale normalized averages: bounded curves are consistent with the
/// logarithmic average estimate, growing curves witness its failure.
std::vector<ProbePoint> log_average_probe(const GridFunction& f, const DomainModel& dom,
                                          const NormParams& params);

/// The natural scale eps^2 delta / (320 n (1 + sqrt(n) eps)).
double natural_bmo_scale(double eps, double delta, int dim);

}  // namespace bmo
