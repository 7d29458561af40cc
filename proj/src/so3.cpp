#include "band/so3.hpp"

#include <cmath>

namespace band::so3 {

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& m) {
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Eigen::Matrix3d exp_rotvec(const Eigen::Vector3d& p) {
  const double t2 = p.squaredNorm();
  const double t = std::sqrt(t2);
  double a, b;  // sin(t)/t, (1-cos(t))/t^2
  if (t < 1e-4) {
    a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0);
    b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Eigen::Matrix3d K = hat(p);
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

Eigen::Vector3d log_rotmat(const Eigen::Matrix3d& R) {
  const double tr = R.trace();
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  const Eigen::Vector3d w = vee(R - R.transpose()) / 2.0;  // sin(angle) * axis
  // atan2 keeps the angle well conditioned at both ends, where acos is not.
  const double s = std::min(w.norm(), 1.0);
  const double angle = std::atan2(s, c);

  if (angle < 1e-6) {
    return w;  // axis*sin ~ axis*angle to O(angle^3)
  }
  if (angle < M_PI - 1e-4) {
    return w * (angle / s);
  }
  // Near pi: axis from the symmetric part, which stays well conditioned.
  const Eigen::Matrix3d S =
      (R + R.transpose()) / 2.0 - c * Eigen::Matrix3d::Identity();
  // S = (1 - cos a) axis axis^T; any nonzero column is parallel to the axis.
  int k = 0;
  S.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = S.col(k).normalized();
  // Pick the branch consistent with the skew part; deterministic at exactly pi.
  const double proj = axis.dot(w);
  if (proj < 0.0) {
    axis = -axis;
  } else if (proj == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (axis[i] != 0.0) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return axis * angle;
}

Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& p) {
  const double t2 = p.squaredNorm();
  const double t = std::sqrt(t2);
  double b, c;  // (1-cos t)/t^2, (t - sin t)/t^3
  if (t < 1e-4) {
    b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
    c = (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0)) / 6.0;
  } else {
    b = (1.0 - std::cos(t)) / t2;
    c = (t - std::sin(t)) / (t2 * t);
  }
  const Eigen::Matrix3d K = hat(p);
  return Eigen::Matrix3d::Identity() - b * K + c * K * K;
}

Eigen::Matrix3d right_jacobian_inv(const Eigen::Vector3d& p) {
  const double t2 = p.squaredNorm();
  const double t = std::sqrt(t2);
  double c;  // 1/t^2 - (1 + cos t)/(2 t sin t), half-angle form near pi
  if (t < 1e-4) {
    c = (1.0 + t2 / 60.0 * (1.0 + t2 / 42.0)) / 12.0;
  } else {
    c = 1.0 / t2 - std::cos(t / 2.0) / (2.0 * t * std::sin(t / 2.0));
  }
  const Eigen::Matrix3d K = hat(p);
  return Eigen::Matrix3d::Identity() + 0.5 * K + c * K * K;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& R) {
  Eigen::Matrix3d Q;
  Q.col(0) = R.col(0).normalized();
  Q.col(1) = (R.col(1) - Q.col(0) * Q.col(0).dot(R.col(1))).normalized();
  Q.col(2) = Q.col(0).cross(Q.col(1));
  return Q;
}

double orthonormality_defect(const Eigen::Matrix3d& R) {
  return (R.transpose() * R - Eigen::Matrix3d::Identity())
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace band::so3
