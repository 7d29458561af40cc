#include "band/geometry.hpp"

#include "band/so3.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace band {

void CurvatureTwistProfile::validate() const {
  if (nodes() < 8) {
    throw std::invalid_argument("profile needs at least 8 nodes, got " +
                                std::to_string(nodes()));
  }
  if (W.size() != K.size()) {
    throw std::invalid_argument("profile K and W sizes differ");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("profile length must be positive and finite");
  }
  if (!K.isFinite().all() || !W.isFinite().all()) {
    throw std::invalid_argument("profile fields must be finite");
  }
}

void FramedCurve::validate() const {
  const int n = nodes();
  if (n < 8) {
    throw std::invalid_argument("curve needs at least 8 nodes");
  }
  if (static_cast<int>(frame.size()) != n) {
    throw std::invalid_argument("curve position/frame sizes differ");
  }
  for (int i = 0; i < n; ++i) {
    if (so3::orthonormality_defect(frame[i]) > 1e-8 ||
        frame[i].determinant() < 0.0) {
      throw std::invalid_argument("curve frame " + std::to_string(i) +
                                  " is not a right-handed orthonormal frame");
    }
  }
  const double h = spacing();
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs((position[i + 1] - position[i]).norm() - h) > 1e-10) {
      throw std::invalid_argument("curve step " + std::to_string(i) +
                                  " does not match the arclength spacing");
    }
  }
}

namespace geometry {

namespace {

// Body-frame rotation rate: columns evolve as F' = F hat(W, 0, K).
inline Eigen::Vector3d darboux_body(double K, double W) {
  return {W, 0.0, K};
}

inline Eigen::Matrix3d step_unchecked(const Eigen::Matrix3d& frame, double K,
                                      double W, double h) {
  return so3::orthonormalize(frame * so3::exp_rotvec(h * darboux_body(K, W)));
}

double default_floor(double h) { return 1e-8 / h; }

// Angle between unit vectors, robust for tiny and obtuse angles.
double angle_between(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

Eigen::Matrix3d darboux_step(const Eigen::Matrix3d& frame, double K, double W,
                             double h) {
  if (so3::orthonormality_defect(frame) > 1e-8) {
    throw std::invalid_argument("darboux_step: frame not orthonormal");
  }
  if (frame.determinant() < 0.0) {
    throw std::invalid_argument("darboux_step: frame not right-handed");
  }
  if (!std::isfinite(K) || !std::isfinite(W) || !std::isfinite(h)) {
    throw std::invalid_argument("darboux_step: non-finite input");
  }
  return step_unchecked(frame, K, W, h);
}

FramedCurve reconstruct(const CurvatureTwistProfile& profile,
                        const Eigen::Vector3d& initial_position,
                        const Eigen::Matrix3d& initial_frame) {
  profile.validate();
  if (so3::orthonormality_defect(initial_frame) > 1e-8 ||
      initial_frame.determinant() < 0.0) {
    throw std::invalid_argument("reconstruct: initial frame invalid");
  }
  const int n = profile.nodes();
  const double h = profile.spacing();

  FramedCurve curve;
  curve.length = profile.length;
  curve.position.resize(n);
  curve.frame.resize(n);
  curve.position[0] = initial_position;
  curve.frame[0] = initial_frame;

  Eigen::Vector3d x = initial_position;
  Eigen::Matrix3d R = initial_frame;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    // Seam step samples K with the monodromy sign: K is anti-periodic on a
    // half-twisted band, W is periodic.
    const double sk = (j == 0) ? profile.seam_sign() : 1.0;
    const double Km = 0.5 * (profile.K[i] + sk * profile.K[j]);
    const double Wm = 0.5 * (profile.W[i] + profile.W[j]);
    const Eigen::Matrix3d half =
        so3::exp_rotvec(0.5 * h * darboux_body(Km, Wm));
    x += h * (R * half).col(0);
    R = so3::orthonormalize(R * half * half);
    if (j != 0) {
      curve.position[j] = x;
      curve.frame[j] = R;
    }
  }
  curve.wrap_position = x;
  curve.wrap_frame = R;
  curve.has_wrap = true;
  return curve;
}

ClosureResidual closure(const FramedCurve& curve, bool moebius) {
  if (!curve.has_wrap) {
    throw std::invalid_argument(
        "closure: curve lacks the wrap state; reconstruct it first");
  }
  ClosureResidual res;
  res.moebius = moebius;
  res.position_gap = curve.wrap_position - curve.position[0];
  Eigen::Matrix3d target = curve.frame[0];
  if (moebius) {
    // Half turn about the tangent: n -> -n, b -> -b.
    target.col(1) *= -1.0;
    target.col(2) *= -1.0;
  }
  res.frame_gap = so3::log_rotmat(target.transpose() * curve.wrap_frame);
  return res;
}

ExtractedProfile extract_profile(const FramedCurve& curve, double k_floor) {
  const int n = curve.nodes();
  if (n < 8) {
    throw std::invalid_argument("extract_profile: too few nodes");
  }
  const double h = curve.spacing();
  if (k_floor < 0.0) k_floor = default_floor(h);

  // Monodromy sign of the transported (n, b) pair across the seam:
  // -1 when the strip closes with a half twist.
  double seam = 1.0;
  if (curve.has_wrap) {
    seam = curve.wrap_frame.col(2).dot(curve.frame[0].col(2)) >= 0.0 ? 1.0
                                                                     : -1.0;
  } else if (curve.frame[n - 1].col(2).dot(curve.frame[0].col(2)) < 0.0) {
    seam = -1.0;
  }

  ExtractedProfile out;
  out.profile.length = curve.length;
  out.profile.moebius = seam < 0.0;
  out.profile.K.resize(n);
  out.profile.W.resize(n);
  out.interpolated.assign(n, 0);

  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    const int im = (i + n - 1) % n;
    const double sp = (i == n - 1) ? seam : 1.0;  // crossing the seam forward
    const double sm = (i == 0) ? seam : 1.0;      // crossing it backward
    const Eigen::Vector3d tp = curve.tangent(ip);
    const Eigen::Vector3d tm = curve.tangent(im);
    const Eigen::Vector3d bp = sp * curve.binormal(ip);
    const Eigen::Vector3d bm = sm * curve.binormal(im);
    const Eigen::Vector3d nn = curve.normal(i);

    const double ksign = (tp - tm).dot(nn) >= 0.0 ? 1.0 : -1.0;
    out.profile.K[i] = ksign * angle_between(tm, tp) / (2.0 * h);
    const double wsign = -(bp - bm).dot(nn) >= 0.0 ? 1.0 : -1.0;
    out.profile.W[i] = wsign * angle_between(bm, bp) / (2.0 * h);
  }

  // Where curvature is below the floor the transported normal carries no
  // geometric information, so the torsion there is replaced by periodic
  // linear interpolation between trustworthy neighbors.
  int flagged = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(out.profile.K[i]) < k_floor) {
      out.interpolated[i] = 1;
      ++flagged;
    }
  }
  if (flagged == n) {
    out.profile.W.setZero();
    out.all_flagged = true;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (!out.interpolated[i]) continue;
    int lo = i, hi = i, dlo = 0, dhi = 0;
    while (out.interpolated[lo]) {
      lo = (lo + n - 1) % n;
      ++dlo;
    }
    while (out.interpolated[hi]) {
      hi = (hi + 1) % n;
      ++dhi;
    }
    const double t = static_cast<double>(dlo) / static_cast<double>(dlo + dhi);
    out.profile.W[i] =
        (1.0 - t) * out.profile.W[lo] + t * out.profile.W[hi];
  }
  return out;
}

GeneratorField generator_field(const CurvatureTwistProfile& profile,
                               const FramedCurve& curve, double floor) {
  profile.validate();
  const int n = profile.nodes();
  if (curve.nodes() != n) {
    throw std::invalid_argument("generator_field: profile/curve node mismatch");
  }
  if (floor < 0.0) floor = default_floor(profile.spacing());

  GeneratorField out;
  out.g.resize(n);
  out.flat.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const double K = profile.K[i];
    const double W = profile.W[i];
    const double mag2 = K * K + W * W;
    if (mag2 < floor * floor) {
      out.g[i] = curve.binormal(i);  // deterministic fallback at flat points
      out.flat[i] = 1;
    } else {
      out.g[i] = (W * curve.tangent(i) + K * curve.binormal(i)) /
                 std::sqrt(mag2);
    }
  }
  return out;
}

std::vector<Eigen::Vector3d> resample_closed(
    const std::vector<Eigen::Vector3d>& points, int n) {
  if (n < 8) {
    throw std::invalid_argument("resample_closed: need at least 8 samples");
  }
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    if (!p.allFinite()) {
      throw std::invalid_argument("resample_closed: non-finite point");
    }
    if (pts.empty() || (p - pts.back()).norm() > 0.0) pts.push_back(p);
  }
  if (pts.size() > 1 && (pts.back() - pts.front()).norm() == 0.0) {
    pts.pop_back();  // explicit closure duplicates the first point
  }
  const int m = static_cast<int>(pts.size());
  if (m < 3) {
    throw std::invalid_argument("resample_closed: fewer than 3 distinct points");
  }

  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    cum[i + 1] = cum[i] + (pts[(i + 1) % m] - pts[i]).norm();
  }
  const double total = cum[m];
  if (!(total > 0.0)) {
    throw std::invalid_argument("resample_closed: degenerate polyline");
  }

  std::vector<Eigen::Vector3d> out(n);
  int seg = 0;
  for (int i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n);
    while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
    const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out[i] = (1.0 - t) * pts[seg] + t * pts[(seg + 1) % m];
  }
  return out;
}

FramedCurve frames_from_positions(const std::vector<Eigen::Vector3d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 8) {
    throw std::invalid_argument("frames_from_positions: too few nodes");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += (points[(i + 1) % n] - points[i]).norm();
  }

  FramedCurve curve;
  curve.length = total;
  curve.position = points;
  curve.frame.resize(n);

  std::vector<Eigen::Vector3d> tangents(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d d =
        points[(i + 1) % n] - points[(i + n - 1) % n];
    if (d.norm() == 0.0) {
      throw std::invalid_argument("frames_from_positions: coincident nodes");
    }
    tangents[i] = d.normalized();
  }

  Eigen::Vector3d prev_n = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d t = tangents[i];
    Eigen::Vector3d curv =
        tangents[(i + 1) % n] - tangents[(i + n - 1) % n];
    curv -= t * t.dot(curv);
    Eigen::Vector3d nn;
    if (curv.norm() > 1e-12) {
      nn = curv.normalized();
      if (i > 0 && nn.dot(prev_n) < 0.0) nn = -nn;  // keep the field continuous
    } else if (i > 0) {
      nn = (prev_n - t * t.dot(prev_n)).normalized();  // parallel transport
    } else {
      nn = t.unitOrthogonal();
    }
    prev_n = nn;
    curve.frame[i].col(0) = t;
    curve.frame[i].col(1) = nn;
    curve.frame[i].col(2) = t.cross(nn);
    curve.frame[i] = so3::orthonormalize(curve.frame[i]);
  }

  // Continue the sign chain past the seam so a half-twist monodromy is kept.
  Eigen::Matrix3d wrap = curve.frame[0];
  if (prev_n.dot(curve.frame[0].col(1)) < 0.0) {
    wrap.col(1) *= -1.0;
    wrap.col(2) *= -1.0;
  }
  curve.wrap_position = curve.position[0];
  curve.wrap_frame = wrap;
  curve.has_wrap = true;
  return curve;
}

}  // namespace geometry
}  // namespace band
