#pragma once

#include "band/types.hpp"

namespace band::geometry {

/**
 * Advance an orthonormal frame (columns t, n, b) through one arclength step h
 * under constant curvature K and torsion W: the frame rotates about the
 * Darboux vector W t + K b by angle h sqrt(K^2 + W^2). The result is exactly
 * re-orthonormalized so invariants survive millions of composed steps.
 * Throws std::invalid_argument when the input frame is not orthonormal
 * within 1e-8 or not right-handed.
 */
Eigen::Matrix3d darboux_step(const Eigen::Matrix3d& frame, double K, double W,
                             double h);

/**
 * Integrate positions and frames from nodal (K, W). Frames advance by
 * darboux_step with midpoint-sampled fields; positions accumulate
 * h * t_mid using the frame advanced half a step. Node 0 carries the
 * initial state exactly; the state one step past the last node is stored
 * as the wrap state for closure tests. Second-order accurate.
 */
FramedCurve reconstruct(
    const CurvatureTwistProfile& profile,
    const Eigen::Vector3d& initial_position = Eigen::Vector3d::Zero(),
    const Eigen::Matrix3d& initial_frame = Eigen::Matrix3d::Identity());

/**
 * Position and frame mismatch after one circuit. The frame gap is the
 * rotation vector of R_target^T R_wrap where R_target is the initial frame,
 * composed with a half-turn about its tangent when moebius is true
 * (n -> -n, b -> -b). Norm of the frame gap is at most pi.
 */
ClosureResidual closure(const FramedCurve& curve, bool moebius);

/**
 * Recover nodal (K, W) from a framed curve by centered differences:
 * K_i is the turning rate of the tangent signed by the normal, W_i the
 * turning rate of the binormal. Nodes where |K| < k_floor get W filled by
 * periodic linear interpolation from unflagged neighbors and are flagged;
 * a straight curve flags every node. k_floor < 0 selects the scale-aware
 * default 1e-8 / h.
 */
ExtractedProfile extract_profile(const FramedCurve& curve,
                                 double k_floor = -1.0);

struct GeneratorField {
  std::vector<Eigen::Vector3d> g;       // unit ruling direction per node
  std::vector<std::uint8_t> flat;       // 1 where K^2+W^2 < floor^2
};

/**
 * Unit ruling directions (W t + K b)/sqrt(K^2+W^2) of the rectifying
 * developable. Flat points (curvature and torsion both below floor) fall
 * back to the binormal and are flagged. floor < 0 selects 1e-8 / h.
 */
GeneratorField generator_field(const CurvatureTwistProfile& profile,
                               const FramedCurve& curve, double floor = -1.0);

/**
 * Resample a closed polyline to n nodes uniformly spaced in polyline
 * arclength. Consecutive duplicate points are dropped; fewer than three
 * distinct points is an error.
 */
std::vector<Eigen::Vector3d> resample_closed(
    const std::vector<Eigen::Vector3d>& points, int n);

/**
 * Build frames over uniformly resampled closed positions: tangents from
 * centered differences, normals from the discrete curvature direction with
 * signs chained for continuity (parallel transport fills flat spots), and
 * the wrap frame from carrying that chain past the seam, which preserves a
 * possible half-twist monodromy. The result is intended for
 * extract_profile; step norms match chord lengths, not arclength exactly.
 */
FramedCurve frames_from_positions(const std::vector<Eigen::Vector3d>& points);

}  // namespace band::geometry
