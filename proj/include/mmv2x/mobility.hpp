#pragma once

#include "mmv2x/association.hpp"
#include "mmv2x/config.hpp"

namespace mmv2x {

// Motion angle theta is measured from the direction pointing back at the
// serving transmitter; the V-UE sits on the beam bisector at distance x.
// Angles are folded onto [0, pi].

/// Distance the V-UE can travel before it crosses the beam edge.
/// Throws std::domain_error if it never does (theta + psi/2 >= pi).
double max_traverse_distance(double x, double theta, double psi);

/// Sojourn probability conditioned on an exit-capable angle, V2I.
double sojourn_v2i(double x, double psi_b, double v, double t_s);
double sojourn_v2i(const ValidatedConfig& cfg, double x);

/// Sojourn probability conditioned on an exit-capable angle, V2V, for
/// half-difference heading beta (relative speed 2 v |cos beta|).
double sojourn_v2v(double x, double beta, double psi_u, double v, double t_s);
double sojourn_v2v(const ValidatedConfig& cfg, double x, double beta);

/// Half-difference and mean heading densities of two uniform headings.
double beta_pdf(double beta);    // on (-pi, pi)
double theta_pdf(double theta);  // on (0, 2 pi)

/// P(angle can never leave the beam) and its complement.
struct AngleWeights {
  double always;
  double conditional;
};
AngleWeights v2i_angle_weights(double psi_b);
AngleWeights v2v_angle_weights(double psi_u);

/// Unconditional sojourn probabilities as functions of the serving distance.
double sojourn_total_v2i(const ValidatedConfig& cfg, double x);
double sojourn_total_v2v(const ValidatedConfig& cfg, double x, double beta);
/// sojourn_total_v2v averaged over beta.
double mean_sojourn_total_v2v(const ValidatedConfig& cfg, double x);

/// E[min(t_s, d/v)] given the serving distance, i.e. the slot share spent
/// connected, averaged over the motion angles.
double connection_time_v2i(const ValidatedConfig& cfg, double x);
double connection_time_v2v(const ValidatedConfig& cfg, double x);

/// Exit term only: E[d / v_eff ; exit within the slot].
double exit_time_v2i(const ValidatedConfig& cfg, double x);
double exit_time_v2v(const ValidatedConfig& cfg, double x);

/// Sojourn and connection-time factor for a serving tier.
double sojourn_total(const ValidatedConfig& cfg, Tier k, double x);
double connection_time(const ValidatedConfig& cfg, Tier k, double x);

}  // namespace mmv2x
