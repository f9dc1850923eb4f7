#include "mmv2x/coverage.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmv2x {

double log_desired_power(const ValidatedConfig& cfg, Tier k, double x) {
  const TierParams p = tier_params(cfg, k);
  return std::log(p.ptx * aligned_gain(cfg, p.node)) + log_path_loss(p.alpha, p.zeta, x);
}

double coverage_kernel(const InterferenceField& field, double noise_power, double log_T, double tau) {
  if (tau <= 0.0) return 1.0;
  const double s = tau * std::exp(-log_T);
  if (!std::isfinite(s)) return 0.0;
  const double e = -s * noise_power + field.log_laplace(s);
  return e < -745.0 ? 0.0 : std::exp(e);
}

double rate_to_sinr_threshold(double rho, double load, double bandwidth) {
  return std::expm1(std::numbers::ln2 * rho * load / bandwidth);
}

double load_density(const ValidatedConfig& cfg, Tier k, const NumericsPolicy& policy) {
  const TierParams p = tier_params(cfg, k);
  const double om = p.los && p.a > 0.0 ? omega(p, kInf) : omega(p, policy.r_max);
  return p.density * om;
}

double load(const ValidatedConfig& cfg, const CaseTable& table, Tier k, AssociationState s,
            const NumericsPolicy& policy) {
  return 1.0 + table.weight(k, s) * cfg->lambda_vue / load_density(cfg, k, policy);
}

namespace {

constexpr double kDistanceBreaks[] = {0.0, 10.0, 100.0, 1000.0, kInf};

QuadOptions distance_options(const NumericsPolicy& policy) {
  QuadOptions o = QuadOptions::from(policy);
  o.abs_tol = std::min(policy.quad_abs_tol, 1e-14);
  o.scale = 100.0;
  return o;
}

}  // namespace

double sinr_coverage_tier(const ValidatedConfig& cfg, const InterferenceField& field, Tier k, AssociationState s,
                          double tau, const NumericsPolicy& policy) {
  const auto tp = all_tier_params(cfg);
  const double a = association_probability(cfg, k, s, policy);
  if (!(a > 0.0)) return 0.0;
  const double noise = cfg.noise_power();
  auto f = [&](double x) {
    const double d = association_density(tp, k, s, x);
    if (d == 0.0) return 0.0;
    return d * coverage_kernel(field, noise, log_desired_power(cfg, k, x), tau);
  };
  return integrate_panels(f, kDistanceBreaks, distance_options(policy)).value / a;
}

double rate_coverage_tier(const ValidatedConfig& cfg, const InterferenceField& field, const CaseTable& table, Tier k,
                          AssociationState s, double rho, const NumericsPolicy& policy) {
  const double n = load(cfg, table, k, s, policy);
  return sinr_coverage_tier(cfg, field, k, s, rate_to_sinr_threshold(rho, n, cfg->bandwidth), policy);
}

double log_rate_integral(const std::function<double(double)>& sc, const NumericsPolicy& policy) {
  QuadOptions o = QuadOptions::from(policy);
  o.rel_tol = std::max(policy.quad_rel_tol, 1e-7);
  o.scale = 5.0;
  // u = e^t; below t = -50 the coverage is taken as 1
  auto f = [&](double t) { return sc(std::exp(t)) / (1.0 + std::exp(-t)); };
  return std::log1p(std::exp(-50.0)) + integrate(f, -50.0, kInf, o).value;
}

double log_rate_integral_tier(const ValidatedConfig& cfg, const InterferenceField& field, Tier k, AssociationState s,
                              const NumericsPolicy& policy) {
  return log_rate_integral([&](double u) { return sinr_coverage_tier(cfg, field, k, s, u, policy); }, policy);
}

}  // namespace mmv2x
