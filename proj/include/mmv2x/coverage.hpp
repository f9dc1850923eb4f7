#pragma once

#include <functional>

#include "mmv2x/association.hpp"
#include "mmv2x/interference.hpp"

namespace mmv2x {

/// ln T_k(x), T_k(x) = P_t G0 l_k(x) with both beams aligned.
double log_desired_power(const ValidatedConfig& cfg, Tier k, double x);

/// exp(-tau sigma^2 / T) L_I(tau / T), the coverage probability at a fixed
/// serving distance, given ln T.
double coverage_kernel(const InterferenceField& field, double noise_power, double log_T, double tau);

/// SINR threshold equivalent to a rate threshold for a given load.
double rate_to_sinr_threshold(double rho, double load, double bandwidth);

/// lambda_k of the load model: parent density times Omega_k(inf), or
/// Omega_k(r_max) for NLOS tiers.
double load_density(const ValidatedConfig& cfg, Tier k, const NumericsPolicy& policy);

/// N_k^(n,m) = 1 + P^(n,m)_{i,k} lambda_u / lambda_k
double load(const ValidatedConfig& cfg, const CaseTable& table, Tier k, AssociationState s,
            const NumericsPolicy& policy);

// Reference route: each call is a fresh adaptive quadrature over the
// serving distance. The grid-based Model gives the same numbers faster.

double sinr_coverage_tier(const ValidatedConfig& cfg, const InterferenceField& field, Tier k, AssociationState s,
                          double tau, const NumericsPolicy& policy);

double rate_coverage_tier(const ValidatedConfig& cfg, const InterferenceField& field, const CaseTable& table, Tier k,
                          AssociationState s, double rho, const NumericsPolicy& policy);

/// int_0^inf sc(u)/(1+u) du for a coverage curve with sc(0+) = 1.
double log_rate_integral(const std::function<double(double)>& sc, const NumericsPolicy& policy);

/// int_0^inf SC(u)/(1+u) du for one state, by nested quadrature.
double log_rate_integral_tier(const ValidatedConfig& cfg, const InterferenceField& field, Tier k, AssociationState s,
                              const NumericsPolicy& policy);

}  // namespace mmv2x
