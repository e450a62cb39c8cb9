#pragma once

#include <string>
#include <vector>

#include "bmolab/grid.hpp"
#include "bmolab/oscillation.hpp"

namespace bmo {

/// Radial cutoff: 1 on B(0,k), 0 outside B(0,2k), linear in |x| between.
/// Lipschitz constant exactly 1/k.
struct PsiK {
  int k = 1;
  double operator()(const Vec2& p) const {
    double t = 2.0 - p.norm() / static_cast<double>(k);
    return std::clamp(t, 0.0, 1.0);
  }
  double lipschitz() const { return 1.0 / static_cast<double>(k); }
};

GridFunction sample_psi_k(int k, const DomainModel& dom, double h);

/// phi_lambda(t) = 1 + log_+(lambda / 4t).
double phi_lambda(double t, double lambda);

/// Phi_lambda(d) = integral over (d, lambda/4) of dt/(t phi_lambda(t)),
/// by adaptive midpoint quadrature on log-spaced panels (relative tolerance
/// rel_tol); 0 for d >= lambda/4. Closed form for the canonical phi:
/// log(1 + log(lambda/4d)) — used as the test oracle.
double capital_phi(double d, double lambda, double rel_tol = 1e-8);

/// Support threshold of h_j: d <= alpha_j iff h_j = 0, solved from
/// Phi(alpha_j) = j by bisection in log d. alpha underflows to 0 for
/// moderate j; log_alpha stays exact.
struct CutoffThreshold {
  int j = 1;
  double lambda = 0;
  double alpha = 0;
  double log_alpha = 0;
};
CutoffThreshold h_support_threshold(int j, double lambda, double rel_tol = 1e-8);

/// h_j(x) = (1 - Phi_lambda(d(x))/j)_+ evaluated pointwise.
double h_j_value(double d, int j, double lambda, double rel_tol = 1e-8);
GridFunction sample_h_j(const DomainModel& dom, double h, int j, double lambda);

/// Pointwise clamp to [-t, t].
GridFunction truncate(const GridFunction& f, double t);

/// Grid averages on g-cells followed by convolution with the normalized ball
/// indicator of the given radius. In restricted mode the input support must
/// keep distance > grid*sqrt(n) from the boundary and the output support
/// margin is checked. *lip_out receives the measured Lipschitz constant.
GridFunction sarason_smooth(const GridFunction& f, const DomainModel& dom, double grid,
                            double mollify_radius, bool restricted = false, double* lip_out = nullptr);

/// The bounded approximant: local averages at scale
/// ell(x) = min(d(x)/2 sqrt n, ell) clamped to +-C_ell, where C_ell is the
/// sup of |f|_Q over cubes with 2Q inside the domain and side >= ell.
struct BoundedApproximant {
  GridFunction g;
  double c_ell = 0;
  int64_t fallback_cells = 0;
};
BoundedApproximant bounded_approximant(const GridFunction& f, const DomainModel& dom, double ell,
                                       const NormParams& params);

/// Both sides of the product estimate on one cube:
/// lhs = mean |f g - f_Q g_Q|, rhs = sup_Q|g| * osc(f) + 2|f_Q| * osc(g).
struct LeibnizCheck {
  double lhs = 0;
  double rhs = 0;
};
LeibnizCheck leibniz_bound_check(const GridFunction& f, const GridFunction& cutoff, const Cube2& q);

enum class ApproxScheme { boundary, infinity, bounded, lipschitz, compact };

const char* to_string(ApproxScheme s);
ApproxScheme approx_scheme_from_string(const std::string& s);

struct ApproxCurve {
  ApproxScheme scheme = ApproxScheme::lipschitz;
  std::vector<double> params;      // j, k, ell or grid size per scheme
  std::vector<double> errors;      // ||f - approximant|| in the bmo norm
  std::vector<double> sup_norms;   // sup |approximant|
  std::vector<double> lip_consts;  // measured Lipschitz constant of approximant
};

/// Runs a scheme's approximating sequence and reports the error curve.
/// indices: boundary/compact -> j (k = 2^j for compact), infinity -> k,
/// bounded -> ell, lipschitz -> grid size (mollify radius equal).
ApproxCurve approximation_driver(const GridFunction& f, const DomainModel& dom,
                                 const NormParams& norm_params, ApproxScheme scheme,
                                 const std::vector<double>& indices);

}  // namespace bmo
