#include "band/validate.hpp"

#include "band/energy.hpp"
#include "band/geometry.hpp"
#include "band/io.hpp"
#include "band/so3.hpp"
#include "band/solver.hpp"
#include "band/statics.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

namespace band::validate {

namespace {

double urand(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

CurvatureTwistProfile random_profile(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CurvatureTwistProfile p;
  p.length = 2.0 * M_PI;
  p.K.resize(n);
  p.W.resize(n);
  for (int i = 0; i < n; ++i) {
    p.K[i] = 1.0 + 0.3 * urand(rng);
    p.W[i] = 0.4 * urand(rng);
  }
  return p;
}

CurvatureTwistProfile smooth_profile(int n) {
  CurvatureTwistProfile p;
  p.length = 2.0 * M_PI;
  p.K.resize(n);
  p.W.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = p.length * static_cast<double>(i) / n;
    p.K[i] = 1.0 + 0.35 * std::sin(s) + 0.1 * std::cos(2.0 * s);
    p.W[i] = 0.45 * std::cos(s) - 0.15 * std::sin(3.0 * s);
  }
  return p;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

Report run(bool full, const Logger& log) {
  Report report;
  const auto add = [&](const std::string& name, bool passed,
                       const std::string& detail) {
    report.checks.push_back({name, passed, detail});
    if (log) log(std::string(passed ? "[ ok ] " : "[FAIL] ") + name + ": " + detail);
  };

  // Rotation exp/log round trip, including the near-half-turn branch.
  {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    const int trials = full ? 2000 : 200;
    for (int t = 0; t < trials; ++t) {
      Eigen::Vector3d p(urand(rng), urand(rng), urand(rng));
      if (p.norm() > 0) {
        const double mag =
            (t % 4 == 0) ? M_PI - 1e-7 * std::abs(urand(rng))
                         : (t % 4 == 1 ? 1e-9 * std::abs(urand(rng))
                                       : 3.0 * std::abs(urand(rng)));
        p *= mag / p.norm();
      }
      const Eigen::Vector3d q = so3::log_rotmat(so3::exp_rotvec(p));
      worst = std::max(worst, (q - p).norm());
    }
    add("rotation exp/log round trip", worst <= 1e-8, "max error " + num(worst));
  }

  // A closed circle must reconstruct to a closed curve.
  {
    CurvatureTwistProfile circle;
    circle.length = 2.0 * M_PI;
    const int n = 256;
    circle.K = Eigen::ArrayXd::Constant(n, 1.0);
    circle.W = Eigen::ArrayXd::Zero(n);
    const auto closure =
        geometry::closure(geometry::reconstruct(circle), false);
    const bool ok =
        closure.position_norm() <= 1e-3 && closure.frame_norm() <= 1e-10;
    add("circle reconstruction closes", ok,
        "position gap " + num(closure.position_norm()) + ", frame gap " +
            num(closure.frame_norm()));
  }

  // Transport converges at second order against a fine reference.
  {
    const int n = 128;
    const auto wrap = [](int nodes) {
      return geometry::reconstruct(smooth_profile(nodes)).wrap_position;
    };
    const Eigen::Vector3d ref = wrap(full ? 16 * n : 8 * n);
    const double e1 = (wrap(n) - ref).norm();
    const double e2 = (wrap(2 * n) - ref).norm();
    const double ratio = e1 / std::max(e2, 1e-300);
    add("transport is second order", ratio > 3.0 && ratio < 5.5,
        "error ratio " + num(ratio) + " for grid doubling");
  }

  // Analytic energy gradient against central finite differences.
  {
    CurvatureTwistProfile p = random_profile(64, 11);
    const MaterialParams mat{1.3, 0.01};
    const auto grad = energy::gradient(p, mat);
    std::mt19937_64 rng(13);
    const double step = 1e-6;
    double worst = 0.0;
    const int probes = full ? 32 : 12;
    for (int t = 0; t < probes; ++t) {
      const int i = static_cast<int>(rng() % 64);
      const bool in_k = rng() % 2 == 0;
      auto& field = in_k ? p.K : p.W;
      const double saved = field[i];
      field[i] = saved + step;
      const double ep = energy::total_energy(p, mat);
      field[i] = saved - step;
      const double em = energy::total_energy(p, mat);
      field[i] = saved;
      const double fd = (ep - em) / (2.0 * step);
      const double an = in_k ? grad.dK[i] : grad.dW[i];
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
    }
    add("energy gradient matches finite differences", worst <= 1e-5,
        "max relative error " + num(worst));
  }

  // Adjoint closure Jacobian against central finite differences, on a
  // half-twisted profile so the seam sign of the K adjoint is exercised.
  {
    CurvatureTwistProfile p = random_profile(full ? 64 : 32, 17);
    p.moebius = true;
    const Eigen::MatrixXd J = solver::constraint_jacobian(p, true);
    const Eigen::MatrixXd Jfd = solver::constraint_jacobian_fd(p, true);
    const double err =
        (J - Jfd).cwiseAbs().maxCoeff() / (1.0 + Jfd.cwiseAbs().maxCoeff());
    add("closure Jacobian matches finite differences", err <= 1e-6,
        "max relative error " + num(err));
  }

  // Discrete identities: at eps = 0 (the profile keeps K > 0) the tangent
  // force and tangent moment balance laws cancel to roundoff by
  // construction of T and Mt; regularization would bias them by eps^2.
  {
    const CurvatureTwistProfile p = smooth_profile(128);
    const MaterialParams mat{1.0, 0.0};
    const auto fields = statics::evaluate_fields(p, mat);
    const auto res = statics::residuals(p, fields);
    const double scale = 1.0 + fields.U.abs().maxCoeff();
    const bool ok = res.max_norm[0] <= 1e-10 * scale &&
                    res.max_norm[3] <= 1e-10 * scale;
    add("discrete tangent balance identities", ok,
        "max residuals " + num(res.max_norm[0]) + ", " + num(res.max_norm[3]));
  }

  // Serialization round trip must be bit exact, seam flag included.
  {
    CurvatureTwistProfile p = random_profile(48, 23);
    p.moebius = true;
    const auto path = std::filesystem::temp_directory_path() /
                      ("band_validate_" + std::to_string(getpid()) + ".csv");
    io::save_profile(p, path.string(), "round trip check");
    const CurvatureTwistProfile q = io::load_profile(path.string());
    std::filesystem::remove(path);
    bool exact = q.nodes() == p.nodes() && q.length == p.length &&
                 q.moebius == p.moebius;
    for (int i = 0; exact && i < p.nodes(); ++i)
      exact = p.K[i] == q.K[i] && p.W[i] == q.W[i];
    add("profile table round trip is exact", exact,
        exact ? "bitwise equal" : "values differ");
  }

  // Negative control: a corrupted gradient must be caught, proving the
  // finite-difference comparison has teeth.
  {
    CurvatureTwistProfile p = random_profile(32, 29);
    const MaterialParams mat{1.0, 0.01};
    auto grad = energy::gradient(p, mat);
    grad.dK *= 1.0 + 1e-3;  // deliberate corruption
    const double step = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double saved = p.K[i];
      p.K[i] = saved + step;
      const double ep = energy::total_energy(p, mat);
      p.K[i] = saved - step;
      const double em = energy::total_energy(p, mat);
      p.K[i] = saved;
      const double fd = (ep - em) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - grad.dK[i]) / (1.0 + std::abs(fd)));
    }
    add("negative control: corrupted gradient is caught", worst > 1e-5,
        "corruption surfaced as error " + num(worst));
  }

  // Objective segment quadrature against closed forms, including the
  // regularization spike at an interior curvature zero, plus gradient
  // consistency by central differences.
  {
    double worst = 0.0;
    {
      const double delta = 1.3, w = 0.7, eps = 1e-3;
      const MaterialParams mat{1.0, eps};
      const double truth = delta * delta / 3.0 + eps * eps +
                           2.0 * (w * w - eps * eps) +
                           std::pow(w * w - eps * eps, 2) *
                               std::atan(delta / eps) / (delta * eps);
      const double got =
          solver::detail::segment_energy(delta, -delta, w, w, 1.0, mat,
                                         nullptr);
      worst = std::max(worst, std::abs(got - truth) / truth);
    }
    {
      const double k0 = 0.8, k1 = -1.7;  // pure curvature, eps = 0
      const MaterialParams mat{1.0, 0.0};
      const double truth = (k0 * k0 + k0 * k1 + k1 * k1) / 3.0;
      const double got =
          solver::detail::segment_energy(k0, k1, 0.0, 0.0, 1.0, mat, nullptr);
      worst = std::max(worst, std::abs(got - truth) / truth);
    }
    std::mt19937_64 rng(31);
    double worst_fd = 0.0;
    const int trials = full ? 100 : 20;
    for (int t = 0; t < trials; ++t) {
      const MaterialParams mat{1.0, std::pow(10.0, -1.0 - 3.0 *
                                                        std::abs(urand(rng)))};
      double v[4] = {2.0 * urand(rng), 2.0 * urand(rng), 1.5 * urand(rng),
                     1.5 * urand(rng)};
      double g[4];
      solver::detail::segment_energy(v[0], v[1], v[2], v[3], 0.05, mat, g);
      for (int c = 0; c < 4; ++c) {
        const double d = 1e-6 * (std::abs(v[c]) + 1.0);
        const double saved = v[c];
        v[c] = saved + d;
        const double ep = solver::detail::segment_energy(v[0], v[1], v[2],
                                                         v[3], 0.05, mat,
                                                         nullptr);
        v[c] = saved - d;
        const double em = solver::detail::segment_energy(v[0], v[1], v[2],
                                                         v[3], 0.05, mat,
                                                         nullptr);
        v[c] = saved;
        const double fd = (ep - em) / (2.0 * d);
        worst_fd = std::max(worst_fd,
                            std::abs(g[c] - fd) / (std::abs(fd) + 1e-6));
      }
    }
    add("segment quadrature matches closed forms and finite differences",
        worst <= 1e-10 && worst_fd <= 1e-4,
        "closed form " + num(worst) + ", gradient " + num(worst_fd));
  }

  if (full) {
    // Frames stay orthonormal over a million composed steps.
    Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
      const double s = 1e-3 * static_cast<double>(i);
      F = geometry::darboux_step(F, 1.0 + 0.3 * std::sin(s), 0.4 * std::cos(s),
                                 1e-3);
      if (i % 1024 == 0) worst = std::max(worst, so3::orthonormality_defect(F));
    }
    worst = std::max(worst, so3::orthonormality_defect(F));
    add("orthonormality over a million steps", worst <= 1e-10,
        "max defect " + num(worst));
  }

  return report;
}

}  // namespace band::validate
