#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "band/geometry.hpp"
#include "band/so3.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace band;

namespace {

CurvatureTwistProfile circle_profile(int n, double L = 2.0 * M_PI) {
  CurvatureTwistProfile p;
  p.length = L;
  p.moebius = false;
  p.K = Eigen::ArrayXd::Constant(n, 2.0 * M_PI / L);
  p.W = Eigen::ArrayXd::Zero(n);
  return p;
}

// Smooth periodic test profile with varying curvature and torsion.
CurvatureTwistProfile wavy_profile(int n, double L = 2.0 * M_PI) {
  CurvatureTwistProfile p;
  p.length = L;
  p.moebius = false;
  p.K.resize(n);
  p.W.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = L * i / n;
    p.K[i] = 1.0 + 0.3 * std::cos(2.0 * M_PI * s / L + 0.4);
    p.W[i] = 0.5 * std::sin(4.0 * M_PI * s / L);
  }
  return p;
}

// One RK4 step of the frame transport F' = F hat((W, 0, K)).
Eigen::Matrix3d rk4_step(const Eigen::Matrix3d& F, double K, double W,
                         double h) {
  const Eigen::Matrix3d Om = so3::hat(Eigen::Vector3d(W, 0.0, K));
  auto f = [&](const Eigen::Matrix3d& X) -> Eigen::Matrix3d { return X * Om; };
  const Eigen::Matrix3d k1 = f(F);
  const Eigen::Matrix3d k2 = f(F + 0.5 * h * k1);
  const Eigen::Matrix3d k3 = f(F + 0.5 * h * k2);
  const Eigen::Matrix3d k4 = f(F + h * k3);
  return F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TEST_CASE("darboux_step with zero rates is the identity") {
  const Eigen::Matrix3d F = so3::exp_rotvec(Eigen::Vector3d(0.3, -0.2, 0.9));
  CHECK((geometry::darboux_step(F, 0.0, 0.0, 0.1) - F).norm() == 0.0);
}

TEST_CASE("darboux_step composes a full circle back to the start") {
  const int n = 257;
  const double h = 2.0 * M_PI / n;
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  for (int i = 0; i < n; ++i) F = geometry::darboux_step(F, 1.0, 0.0, h);
  // Constant-rate steps are exact; only roundoff accumulates.
  CHECK((F - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(so3::orthonormality_defect(F) < 1e-13);
}

TEST_CASE("darboux_step pure twist spins the cross-section about the tangent") {
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  const double w = 2.0, h = 0.25;
  const Eigen::Matrix3d G = geometry::darboux_step(F, 0.0, w, h);
  CHECK((G.col(0) - F.col(0)).norm() < 1e-15);  // tangent fixed
  CHECK(G.col(1).dot(F.col(1)) == doctest::Approx(std::cos(w * h)).epsilon(1e-14));
  CHECK(G.col(2).dot(F.col(1)) == doctest::Approx(-std::sin(w * h)).epsilon(1e-14));
}

TEST_CASE("darboux_step matches an RK4 transport step") {
  Eigen::Matrix3d F = so3::exp_rotvec(Eigen::Vector3d(0.1, 0.7, -0.4));
  const double h = 0.01;
  const Eigen::Matrix3d exact = geometry::darboux_step(F, 1.0, 1.0, h);
  const Eigen::Matrix3d rk = rk4_step(F, 1.0, 1.0, h);
  CHECK((exact - rk).norm() < 1e-8);
}

TEST_CASE("darboux_step rejects degenerate frames") {
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = 1.01;
  CHECK_THROWS_AS(geometry::darboux_step(bad, 1.0, 0.0, 0.1),
                  std::invalid_argument);
  Eigen::Matrix3d lefty = Eigen::Matrix3d::Identity();
  lefty(2, 2) = -1.0;  // orthonormal but left-handed
  CHECK_THROWS_AS(geometry::darboux_step(lefty, 1.0, 0.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("reconstructing a circle profile closes the curve") {
  const auto curve = geometry::reconstruct(circle_profile(256));
  REQUIRE(curve.has_wrap);
  const auto gap = geometry::closure(curve, false);
  CHECK(gap.position_norm() < 1e-4);
  CHECK(gap.frame_norm() < 1e-4);
  // Radius 1 circle: points stay at distance 1 from the center.
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const auto& x : curve.position) center += x;
  center /= curve.nodes();
  for (const auto& x : curve.position)
    CHECK((x - center).norm() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("reconstructing zero curvature gives a straight segment") {
  CurvatureTwistProfile p;
  p.length = 3.0;
  p.K = Eigen::ArrayXd::Zero(30);
  p.W = Eigen::ArrayXd::Zero(30);
  const auto curve = geometry::reconstruct(p);
  for (int i = 0; i < 30; ++i) {
    CHECK((curve.position[i] - Eigen::Vector3d(0.1 * i, 0.0, 0.0)).norm() < 1e-13);
    CHECK((curve.frame[i] - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  }
  CHECK((curve.wrap_position - Eigen::Vector3d(3.0, 0.0, 0.0)).norm() < 1e-13);
}

TEST_CASE("reconstruct end state converges at second order") {
  // Reference on a fine grid; the same continuum fields sampled coarser
  // must approach it with error ratio ~4 per halving of h.
  const auto ref = geometry::reconstruct(wavy_profile(8192));
  auto end_error = [&](int n) {
    const auto c = geometry::reconstruct(wavy_profile(n));
    return (c.wrap_position - ref.wrap_position).norm() +
           (c.wrap_frame - ref.wrap_frame).norm();
  };
  const double e256 = end_error(256);
  const double e512 = end_error(512);
  CHECK(e256 < 1e-3);
  CHECK(e256 / e512 > 3.3);
  CHECK(e256 / e512 < 4.7);
}

TEST_CASE("reconstruct is equivariant under rigid motions") {
  const auto p = wavy_profile(128);
  const Eigen::Matrix3d R = so3::exp_rotvec(Eigen::Vector3d(0.4, -1.1, 0.2));
  const Eigen::Vector3d d(3.0, -2.0, 5.0);
  const auto base = geometry::reconstruct(p);
  const auto moved = geometry::reconstruct(p, d, R);
  for (int i = 0; i < p.nodes(); ++i) {
    CHECK((moved.position[i] - (R * base.position[i] + d)).norm() < 1e-12);
    CHECK((moved.frame[i] - R * base.frame[i]).norm() < 1e-12);
  }
  CHECK((moved.wrap_position - (R * base.wrap_position + d)).norm() < 1e-12);
}

TEST_CASE("closure of a circle reports the orientable gap and the half-twist gap") {
  for (int n : {64, 200}) {
    const auto curve = geometry::reconstruct(circle_profile(n));
    const auto plain = geometry::closure(curve, false);
    CHECK(plain.frame_norm() < 1e-10);
    // Against the half-twisted target the same curve is off by exactly a
    // half turn, independent of resolution.
    const auto twisted = geometry::closure(curve, true);
    CHECK(twisted.frame_norm() == doctest::Approx(M_PI).epsilon(1e-12));
  }
}

TEST_CASE("extract_profile recovers the circle curvature") {
  const auto curve = geometry::reconstruct(circle_profile(256));
  const auto ex = geometry::extract_profile(curve);
  REQUIRE(ex.profile.nodes() == 256);
  CHECK(!ex.all_flagged);
  for (int i = 0; i < 256; ++i) {
    CHECK(ex.profile.K[i] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(ex.profile.W[i]) < 1e-8);
  }
}

TEST_CASE("profile to curve to profile round trip converges at second order") {
  auto max_err = [&](int n) {
    const auto p = wavy_profile(n);
    const auto ex = geometry::extract_profile(geometry::reconstruct(p));
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      e = std::max(e, std::abs(ex.profile.K[i] - p.K[i]));
      e = std::max(e, std::abs(ex.profile.W[i] - p.W[i]));
    }
    return e;
  };
  const double e128 = max_err(128);
  const double e256 = max_err(256);
  CHECK(e128 < 1e-2);
  CHECK(e128 / e256 > 3.0);
  CHECK(e128 / e256 < 5.0);
}

TEST_CASE("extract_profile flags torsion across vanishing curvature") {
  CurvatureTwistProfile p;
  p.length = 4.0;
  p.K = Eigen::ArrayXd::Zero(40);
  p.W = Eigen::ArrayXd::Zero(40);
  const auto ex = geometry::extract_profile(geometry::reconstruct(p));
  CHECK(ex.all_flagged);  // a straight line has no observable torsion
  int flagged = 0;
  for (auto f : ex.interpolated) flagged += f;
  CHECK(flagged == 40);
}

TEST_CASE("generator_field follows the binormal when torsion vanishes") {
  const auto p = circle_profile(64);
  const auto curve = geometry::reconstruct(p);
  const auto gen = geometry::generator_field(p, curve);
  for (int i = 0; i < 64; ++i) {
    CHECK((gen.g[i] - curve.binormal(i)).norm() < 1e-12);
    CHECK(gen.flat[i] == 0);
  }
}

TEST_CASE("generator_field tilts 45 degrees when torsion equals curvature") {
  auto p = circle_profile(64);
  const double inv = 1.0 / std::sqrt(2.0);
  SUBCASE("same sign leans along the tangent") {
    p.W = p.K;
    const auto curve = geometry::reconstruct(p);
    const auto gen = geometry::generator_field(p, curve);
    for (int i = 0; i < 64; ++i) {
      CHECK(gen.g[i].dot(curve.tangent(i)) == doctest::Approx(inv).epsilon(1e-12));
      CHECK(gen.g[i].dot(curve.binormal(i)) == doctest::Approx(inv).epsilon(1e-12));
      CHECK(gen.g[i].norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("opposite sign leans against the tangent") {
    p.W = -p.K;
    const auto curve = geometry::reconstruct(p);
    const auto gen = geometry::generator_field(p, curve);
    for (int i = 0; i < 64; ++i)
      CHECK(gen.g[i].dot(curve.tangent(i)) == doctest::Approx(-inv).epsilon(1e-12));
  }
}

TEST_CASE("generator_field falls back to the binormal at flat points") {
  CurvatureTwistProfile p;
  p.length = 2.0;
  p.K = Eigen::ArrayXd::Zero(20);
  p.W = Eigen::ArrayXd::Zero(20);
  const auto curve = geometry::reconstruct(p);
  const auto gen = geometry::generator_field(p, curve);
  for (int i = 0; i < 20; ++i) {
    CHECK(gen.flat[i] == 1);
    CHECK((gen.g[i] - curve.binormal(i)).norm() == 0.0);
  }
}

TEST_CASE("resample_closed spaces nodes uniformly and drops duplicates") {
  std::vector<Eigen::Vector3d> square = {
      {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 0}, {0, 1, 0}};
  const auto pts = geometry::resample_closed(square, 8);
  REQUIRE(static_cast<int>(pts.size()) == 8);
  // Perimeter 4 resampled to 8 nodes: every chord has length 1/2.
  for (int i = 0; i < 8; ++i)
    CHECK((pts[(i + 1) % 8] - pts[i]).norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(
      geometry::resample_closed({{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}, 8),
      std::runtime_error);
}

TEST_CASE("frames_from_positions rebuilds a circle good enough to extract") {
  std::vector<Eigen::Vector3d> ring(400);
  for (int i = 0; i < 400; ++i) {
    const double t = 2.0 * M_PI * i / 400;
    ring[i] = Eigen::Vector3d(std::cos(t), std::sin(t), 0.0);
  }
  const auto curve = geometry::frames_from_positions(ring);
  REQUIRE(curve.has_wrap);
  for (int i = 0; i < curve.nodes(); ++i)
    CHECK(so3::orthonormality_defect(curve.frame[i]) < 1e-10);
  CHECK(geometry::closure(curve, false).frame_norm() < 1e-2);
  const auto ex = geometry::extract_profile(curve);
  for (int i = 0; i < ex.profile.nodes(); ++i)
    CHECK(ex.profile.K[i] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("frames_from_positions handles a nonplanar closed loop") {
  // Closed wavy loop with genuine torsion.
  std::vector<Eigen::Vector3d> loop(360);
  for (int i = 0; i < 360; ++i) {
    const double t = 2.0 * M_PI * i / 360;
    loop[i] = Eigen::Vector3d((2.0 + 0.3 * std::cos(3 * t)) * std::cos(t),
                              (2.0 + 0.3 * std::cos(3 * t)) * std::sin(t),
                              0.3 * std::sin(3 * t));
  }
  const auto curve = geometry::frames_from_positions(loop);
  for (int i = 0; i < curve.nodes(); ++i) {
    CHECK(so3::orthonormality_defect(curve.frame[i]) < 1e-9);
    // Tangent column aligned with the chord direction.
    const auto& x0 = curve.position[i];
    const auto& x1 = curve.position[(i + 1) % curve.nodes()];
    const auto& xm = curve.position[(i + curve.nodes() - 1) % curve.nodes()];
    CHECK(curve.tangent(i).dot((x1 - xm).normalized()) > 0.999);
  }
  CHECK(geometry::closure(curve, false).frame_norm() < 0.1);
}
