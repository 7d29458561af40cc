#include "band/statics.hpp"

#include "band/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace band::statics {

namespace {

// Regularized reciprocals; the cubic variant is left unbounded at exactly
// K = 0 and relies on masking, matching how the fields are consumed.
inline double inv1(double K, double e2) { return K / (K * K + e2); }
inline double inv2(double K, double e2) { return 1.0 / (K * K + e2); }

}  // namespace

Moments constitutive_moments(double K, double W, const MaterialParams& p) {
  Moments m;
  m.twisting = energy::ddensity_dW(K, W, p);
  m.bending = energy::ddensity_dK(K, W, p);
  return m;
}

Eigen::ArrayXd dds(const Eigen::ArrayXd& f, double h, double seam_sign) {
  const int n = static_cast<int>(f.size());
  Eigen::ArrayXd d(n);
  for (int i = 0; i < n; ++i) {
    const double fp = (i + 1 < n) ? f[i + 1] : seam_sign * f[0];
    const double fm = (i > 0) ? f[i - 1] : seam_sign * f[n - 1];
    d[i] = (fp - fm) / (2.0 * h);
  }
  return d;
}

namespace {

struct FieldChain {
  Eigen::ArrayXd U, N, B, Mt, Mn, Mb, dN;
};

FieldChain chain(const CurvatureTwistProfile& profile,
                 const MaterialParams& p) {
  profile.validate();
  const int n = profile.nodes();
  const double h = profile.spacing();
  const double e2 = p.epsilon * p.epsilon;
  // Seam parity: U and P are even in K, while N, Mn, B inherit K's sign and
  // are anti-periodic across a half-twisted wrap.
  const double sg = profile.seam_sign();

  FieldChain f;
  f.U.resize(n);
  f.Mt.resize(n);
  f.Mb.resize(n);
  Eigen::ArrayXd P(n);  // W (K^2+W^2) / K^2, the twist-moment kernel
  for (int i = 0; i < n; ++i) {
    const double K = profile.K[i];
    const double W = profile.W[i];
    f.U[i] = energy::density(K, W, p);
    const Moments m = constitutive_moments(K, W, p);
    f.Mt[i] = m.twisting;
    f.Mb[i] = m.bending;
    P[i] = W * (K * K + W * W) * inv2(K, e2);
  }

  const Eigen::ArrayXd dU = dds(f.U, h);
  const Eigen::ArrayXd dP = dds(P, h);
  f.N.resize(n);
  f.Mn.resize(n);
  Eigen::ArrayXd B1(n);
  for (int i = 0; i < n; ++i) {
    const double K = profile.K[i];
    const double W = profile.W[i];
    const double S = K * K + W * W;
    f.N[i] = -inv1(K, e2) * dU[i];
    f.Mn[i] = 4.0 * p.A * inv1(K, e2) * dP[i];
    const double num = 2.0 * p.A * W * S * S;
    B1[i] = num == 0.0 ? 0.0 : num / (K * (K * K + e2));
  }
  f.B = B1 + dds(f.Mn, h, sg);
  f.dN = dds(f.N, h, sg);
  return f;
}

double fit_from_chain(const CurvatureTwistProfile& profile,
                      const MaterialParams& p, const FieldChain& f,
                      const std::vector<std::uint8_t>& mask) {
  const int n = profile.nodes();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!mask.empty() && mask[i]) continue;
    const double a = p.A * profile.K[i];
    const double b =
        -profile.K[i] * f.U[i] + f.dN[i] - profile.W[i] * f.B[i];
    num += a * b;
    den += a * a;
  }
  if (den <= 1e-24 * static_cast<double>(n)) {
    throw std::invalid_argument(
        "fit_C: curvature is identically ~0, the constant is unobservable");
  }
  return -num / den;
}

}  // namespace

double fit_C(const CurvatureTwistProfile& profile, const MaterialParams& p,
             const std::vector<std::uint8_t>& mask) {
  return fit_from_chain(profile, p, chain(profile, p), mask);
}

StaticFields evaluate_fields(const CurvatureTwistProfile& profile,
                             const MaterialParams& p, double C,
                             const std::vector<std::uint8_t>& fit_mask) {
  const FieldChain f = chain(profile, p);
  StaticFields out;
  out.A = p.A;
  out.epsilon = p.epsilon;
  out.C = std::isfinite(C) ? C : fit_from_chain(profile, p, f, fit_mask);
  out.U = f.U;
  out.T = p.A * out.C - f.U;
  out.N = f.N;
  out.B = f.B;
  out.Mt = f.Mt;
  out.Mn = f.Mn;
  out.Mb = f.Mb;
  return out;
}

EquilibriumResiduals residuals(const CurvatureTwistProfile& profile,
                               const StaticFields& fields,
                               const std::vector<std::uint8_t>& mask) {
  profile.validate();
  const int n = profile.nodes();
  const double h = profile.spacing();
  const Eigen::ArrayXd& K = profile.K;
  const Eigen::ArrayXd& W = profile.W;

  // T and Mt are even across the seam; N, B, Mn, Mb carry K's parity.
  const double sg = profile.seam_sign();
  EquilibriumResiduals res;
  res.r.resize(6);
  res.r[0] = dds(fields.T, h) - K * fields.N;
  res.r[1] = K * fields.T + dds(fields.N, h, sg) - W * fields.B;
  res.r[2] = W * fields.N + dds(fields.B, h, sg);
  res.r[3] = dds(fields.Mt, h) - K * fields.Mn;
  res.r[4] = K * fields.Mt + dds(fields.Mn, h, sg) - W * fields.Mb - fields.B;
  res.r[5] = W * fields.Mn + dds(fields.Mb, h, sg) + fields.N;

  int used = 0;
  for (int i = 0; i < n; ++i) {
    if (!mask.empty() && mask[i]) {
      ++res.masked_nodes;
      continue;
    }
    ++used;
    for (int k = 0; k < 6; ++k) {
      const double v = std::abs(res.r[k][i]);
      res.max_norm[k] = std::max(res.max_norm[k], v);
      res.rms_norm[k] += v * v;
    }
  }
  if (used > 0) {
    res.rms_norm = (res.rms_norm / static_cast<double>(used)).cwiseSqrt();
  }
  res.reduced_normal_max = res.max_norm[1];
  res.reduced_binormal_max = res.max_norm[2];
  return res;
}

std::vector<std::uint8_t> arc_mask(const CurvatureTwistProfile& profile,
                                   double s_center, double window) {
  const int n = profile.nodes();
  const double L = profile.length;
  if (window < 0.0) window = 0.02 * L;
  std::vector<std::uint8_t> mask(n, 0);
  for (int i = 0; i < n; ++i) {
    double d = std::fmod(std::abs(profile.s_at(i) - s_center), L);
    d = std::min(d, L - d);
    if (d <= window) mask[i] = 1;
  }
  return mask;
}

}  // namespace band::statics
