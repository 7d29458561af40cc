#include "band/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace band::energy {

double density(double K, double W, const MaterialParams& p) {
  const double S = K * K + W * W;
  if (S == 0.0) return 0.0;
  const double D = K * K + p.epsilon * p.epsilon;
  if (D == 0.0) return std::numeric_limits<double>::infinity();
  return p.A * S * S / D;
}

double ddensity_dK(double K, double W, const MaterialParams& p) {
  const double S = K * K + W * W;
  const double e2 = p.epsilon * p.epsilon;
  const double D = K * K + e2;
  if (D == 0.0) {
    return S == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  // d/dK [A S^2 / D] = 2 A K S (K^2 - W^2 + 2 eps^2) / D^2; the factored
  // difference keeps the K ~ +-W cancellation in a single subtraction.
  return 2.0 * p.A * K * S * ((K - W) * (K + W) + 2.0 * e2) / (D * D);
}

double ddensity_dW(double K, double W, const MaterialParams& p) {
  const double S = K * K + W * W;
  const double D = K * K + p.epsilon * p.epsilon;
  if (D == 0.0) {
    return S == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return 4.0 * p.A * W * S / D;
}

double total_energy(const CurvatureTwistProfile& profile,
                    const MaterialParams& p) {
  profile.validate();
  const int n = profile.nodes();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += density(profile.K[i], profile.W[i], p);
  }
  return profile.spacing() * sum;
}

EnergyGradient gradient(const CurvatureTwistProfile& profile,
                        const MaterialParams& p) {
  profile.validate();
  const int n = profile.nodes();
  const double h = profile.spacing();

  EnergyGradient g;
  g.dK.resize(n);
  g.dW.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double K = profile.K[i];
    const double W = profile.W[i];
    if (p.epsilon == 0.0 && K == 0.0 && W != 0.0) {
      throw std::domain_error(
          "energy gradient undefined at node " + std::to_string(i) +
          ": K = 0 with W != 0 and no regularization");
    }
    sum += density(K, W, p);
    g.dK[i] = h * ddensity_dK(K, W, p);
    g.dW[i] = h * ddensity_dW(K, W, p);
  }
  g.energy = h * sum;
  return g;
}

}  // namespace band::energy
