#pragma once

#include "band/types.hpp"

namespace band::energy {

/**
 * Bending energy density A (K^2 + W^2)^2 / (K^2 + eps^2).
 * K = W = 0 gives 0; with eps = 0, K = 0 and W != 0 gives +infinity,
 * signalling an inadmissible state rather than throwing.
 */
double density(double K, double W, const MaterialParams& p);

/**
 * Partial derivatives of density. With eps = 0 these are the closed-form
 * moments 4AW(K^2+W^2)/K^2 and 2A(K^4-W^4)/K^3, evaluated in a factored
 * form that shares the cancellation-prone K^2-W^2 term. Undefined where
 * density is infinite.
 */
double ddensity_dK(double K, double W, const MaterialParams& p);
double ddensity_dW(double K, double W, const MaterialParams& p);

/** Midpoint-rule total: h * sum of nodal densities. +inf if any node is. */
double total_energy(const CurvatureTwistProfile& profile,
                    const MaterialParams& p);

/**
 * Energy and its exact gradient with respect to every nodal value
 * (dE/dK_i = h dU/dK at node i). With eps = 0, an inadmissible node
 * (K = 0, W != 0) throws std::domain_error naming the node.
 */
EnergyGradient gradient(const CurvatureTwistProfile& profile,
                        const MaterialParams& p);

}  // namespace band::energy
