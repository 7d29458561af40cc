#pragma once

#include "band/types.hpp"

#include <limits>

namespace band::statics {

/**
 * Twisting and bending moments conjugate to W and K: the partial
 * derivatives of the energy density, 4AW(K^2+W^2)/K^2 and 2A(K^4-W^4)/K^3
 * when eps = 0, with K^2 -> K^2+eps^2 regularized consistently otherwise.
 */
struct Moments {
  double twisting = 0.0;  // about the tangent
  double bending = 0.0;   // about the binormal
};
Moments constitutive_moments(double K, double W, const MaterialParams& p);

/**
 * Centered second-order periodic derivative of nodal values. seam_sign is
 * the factor samples pick up when indexing wraps past the seam: +1 for
 * periodic fields, -1 for fields that are anti-periodic on a half-twisted
 * band (K and everything linear in it: N, B, Mn, Mb).
 */
Eigen::ArrayXd dds(const Eigen::ArrayXd& f, double h, double seam_sign = 1.0);

/**
 * All force and moment fields on the grid. The tangent force T = AC - U
 * uses the integration constant C fitted by fit_C unless a finite value is
 * supplied. Divisions by K are regularized (1/K -> K/(K^2+eps^2),
 * 1/K^3 -> 1/(K (K^2+eps^2))), so values straddling a curvature zero are
 * meaningful only outside a mask around it.
 */
StaticFields evaluate_fields(
    const CurvatureTwistProfile& profile, const MaterialParams& p,
    double C = std::numeric_limits<double>::quiet_NaN(),
    const std::vector<std::uint8_t>& fit_mask = {});

/**
 * Least-squares integration constant minimizing the normal-direction force
 * balance sum_i (K_i T_i + N'_i - W_i B_i)^2 over unmasked nodes, using
 * T = AC - U. Throws when curvature is identically ~0 (constant shift
 * unobservable).
 */
double fit_C(const CurvatureTwistProfile& profile, const MaterialParams& p,
             const std::vector<std::uint8_t>& mask = {});

/**
 * Residual fields of the six equilibrium balance laws
 *   T' - K N,   K T + N' - W B,   W N + B',
 *   Mt' - K Mn, K Mt + Mn' - W Mb - B, W Mn + Mb' + N,
 * with max/rms norms taken over unmasked nodes only. The second and third
 * are the reduced equilibrium conditions reported separately.
 */
EquilibriumResiduals residuals(const CurvatureTwistProfile& profile,
                               const StaticFields& fields,
                               const std::vector<std::uint8_t>& mask = {});

/**
 * Nodes within +-window (arclength) of s_center on the periodic grid.
 * window < 0 selects the default 2% of the length.
 */
std::vector<std::uint8_t> arc_mask(const CurvatureTwistProfile& profile,
                                   double s_center, double window = -1.0);

}  // namespace band::statics
