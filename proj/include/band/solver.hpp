#pragma once

#include "band/types.hpp"

namespace band::solver {

/**
 * Closure residual of the reconstruction of a profile (gauge-pinned).
 * Transport honors the profile's own seam monodromy flag; the moebius
 * argument only selects the closure target (half turn about the tangent).
 */
ClosureResidual closure_of(const CurvatureTwistProfile& profile, bool moebius);

/**
 * Jacobian of the six stacked closure residuals (position gap, frame gap)
 * with respect to [K_0..K_{n-1}, W_0..W_{n-1}], computed by pulling each
 * residual component back through the transport recursion (reverse
 * accumulation; one forward pass, six backward sweeps).
 */
Eigen::MatrixXd constraint_jacobian(const CurvatureTwistProfile& profile,
                                    bool moebius);

/** Same Jacobian by central finite differences; the agreement oracle. */
Eigen::MatrixXd constraint_jacobian_fd(const CurvatureTwistProfile& profile,
                                       bool moebius, double step = 1e-7);

/** Starting profile for the configured init mode and seed. */
CurvatureTwistProfile initialize(const SolverConfig& config);

/**
 * Resize a profile by linear interpolation, periodic in W and respecting
 * the seam monodromy of K (anti-periodic tail interval when moebius).
 */
CurvatureTwistProfile resample_profile(const CurvatureTwistProfile& profile,
                                       int n_new);

struct SolveOutput {
  CurvatureTwistProfile profile;
  FramedCurve curve;  // reconstruction of the final profile
  SolverReport report;
};

/**
 * Minimize the regularized bending energy subject to the closure
 * constraints by an augmented Lagrangian: multiplier/penalty outer
 * iterations around limited-memory quasi-Newton inner minimizations, with
 * the curvature regularization annealed over the configured schedule.
 * Node 0 is pinned to the origin with the identity frame (gauge fixing).
 */
SolveOutput solve(const SolverConfig& config);

/** solve() from an explicit starting profile (warm start / refinement). */
SolveOutput solve_from(const SolverConfig& config,
                       const CurvatureTwistProfile& start);

namespace detail {

/**
 * Building block of the solve objective, exposed for verification: integral
 * of the regularized density along the straight segment from (k0, w0) to
 * (k1, w1), as h * int_0^1 dens(K(t), W(t)) dt, with the quadrature panels
 * refined toward any interior zero of K so the O(eps)-wide spike there is
 * resolved. g4, if non-null, receives d/d(k0, k1, w0, w1).
 */
double segment_energy(double k0, double k1, double w0, double w1, double h,
                      const MaterialParams& mat, double g4[4]);

}  // namespace detail

}  // namespace band::solver
