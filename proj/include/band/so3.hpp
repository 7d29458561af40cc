#pragma once

#include <Eigen/Dense>

namespace band::so3 {

/** Skew matrix of v, so that hat(v) * x == v.cross(x). */
Eigen::Matrix3d hat(const Eigen::Vector3d& v);

/** Inverse of hat: extracts v from a skew matrix. */
Eigen::Vector3d vee(const Eigen::Matrix3d& m);

/** Rotation matrix exp(hat(p)); Rodrigues with small-angle series. */
Eigen::Matrix3d exp_rotvec(const Eigen::Vector3d& p);

/**
 * Rotation vector of R with norm in [0, pi].
 * Stable at both ends of the range; at exactly pi the axis sign is
 * chosen deterministically (first nonzero component positive).
 */
Eigen::Vector3d log_rotmat(const Eigen::Matrix3d& R);

/**
 * Right Jacobian J_r(p): exp(hat(p + dp)) ~= exp(hat(p)) exp(hat(J_r(p) dp)).
 */
Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& p);

/**
 * Inverse right Jacobian: log(exp(hat(p)) exp(hat(dp))) ~= p + J_r^{-1}(p) dp.
 * Requires |p| < pi.
 */
Eigen::Matrix3d right_jacobian_inv(const Eigen::Vector3d& p);

/** Nearest rotation matrix via modified Gram-Schmidt on the columns. */
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& R);

/** max |R^T R - I|, a cheap orthonormality defect measure. */
double orthonormality_defect(const Eigen::Matrix3d& R);

}  // namespace band::so3
