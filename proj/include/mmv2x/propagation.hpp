#pragma once

#include <array>

#include "mmv2x/config.hpp"

namespace mmv2x {

/// Per-tier view of the configuration.
struct TierParams {
  Tier tier;
  Node node;
  bool los;
  double alpha;
  double zeta;
  double a;          // blockage constant of the parent process
  double ptx;        // W
  double gain_main;  // transmitter main lobe
  double density;    // parent process density, 1/m^2
};

TierParams tier_params(const ValidatedConfig& cfg, Tier t);
std::array<TierParams, 4> all_tier_params(const ValidatedConfig& cfg);

double los_probability(const ValidatedConfig& cfg, Node node, double r);
double nlos_probability(const ValidatedConfig& cfg, Node node, double r);

/// P_k(r): probability a node of the parent process at distance r belongs to tier k.
double tier_probability(const TierParams& p, double r);

double path_loss(double alpha, double zeta, double r);
double path_loss(const ValidatedConfig& cfg, Tier t, double r);
/// ln of the path loss, finite for any r > 0.
inline double log_path_loss(double alpha, double zeta, double r) { return -alpha * std::log(r) - zeta * r; }

/// r with path_loss(alpha, zeta, r) == y. Throws std::domain_error for y <= 0.
double inverse_path_loss(double alpha, double zeta, double y);
/// Same, from ln y; usable far outside the double range of y itself.
double inverse_log_path_loss(double alpha, double zeta, double log_y);
double inverse_path_loss(const ValidatedConfig& cfg, Tier t, double y);

struct GainOutcome {
  double gain;
  double prob;
};

/// Effective interferer gain outcomes for a transmitter of class `tx` towards
/// the typical V-UE: {MM, Mm, mM, mm} (transmitter side first).
std::array<GainOutcome, 4> gain_distribution(const ValidatedConfig& cfg, Node tx);

/// Desired-link gain, both beams aligned.
double aligned_gain(const ValidatedConfig& cfg, Node tx);

/// Boresight power used to rank candidate servers.
double received_power(const ValidatedConfig& cfg, Tier t, double r);

/// Distance at which tier i matches the association power of tier k at r.
double lambda_map(const ValidatedConfig& cfg, Tier k, Tier i, double r);
double lambda_map(const TierParams& k, const TierParams& i, double r);

}  // namespace mmv2x
