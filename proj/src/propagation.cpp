#include "mmv2x/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmv2x/numerics.hpp"

namespace mmv2x {

TierParams tier_params(const ValidatedConfig& cfg, Tier t) {
  const SystemConfig& c = cfg.params();
  TierParams p;
  p.tier = t;
  p.node = node_of(t);
  p.los = is_los(t);
  p.alpha = p.los ? c.alpha_los : c.alpha_nlos;
  p.zeta = c.zeta;
  if (p.node == Node::Bs) {
    p.a = c.a_los_bs;
    p.ptx = c.ptx_bs;
    p.gain_main = c.gain_main_bs;
    p.density = c.lambda_bs;
  } else {
    p.a = c.a_los_vue;
    p.ptx = c.ptx_vue;
    p.gain_main = c.gain_main_vue;
    p.density = c.lambda_vue;
  }
  return p;
}

std::array<TierParams, 4> all_tier_params(const ValidatedConfig& cfg) {
  return {tier_params(cfg, Tier::LosBs), tier_params(cfg, Tier::NlosBs), tier_params(cfg, Tier::LosVue),
          tier_params(cfg, Tier::NlosVue)};
}

double los_probability(const ValidatedConfig& cfg, Node node, double r) {
  const double a = node == Node::Bs ? cfg->a_los_bs : cfg->a_los_vue;
  return std::exp(-a * r);
}

double nlos_probability(const ValidatedConfig& cfg, Node node, double r) {
  const double a = node == Node::Bs ? cfg->a_los_bs : cfg->a_los_vue;
  return -std::expm1(-a * r);
}

double tier_probability(const TierParams& p, double r) {
  return p.los ? std::exp(-p.a * r) : -std::expm1(-p.a * r);
}

double path_loss(double alpha, double zeta, double r) {
  if (!(r > 0.0)) throw std::domain_error("path_loss: distance must be > 0");
  return std::pow(r, -alpha) * std::exp(-zeta * r);
}

double path_loss(const ValidatedConfig& cfg, Tier t, double r) {
  const TierParams p = tier_params(cfg, t);
  return path_loss(p.alpha, p.zeta, r);
}

double inverse_log_path_loss(double alpha, double zeta, double log_y) {
  // alpha ln r + zeta r = -log_y
  const double l = -log_y / alpha;
  if (zeta == 0.0) return std::exp(l);
  // r = (alpha/zeta) W0((zeta/alpha) e^l)
  const double k = alpha / zeta;
  return k * lambert_w0_exp(l - std::log(k), 1e-15);
}

double inverse_path_loss(double alpha, double zeta, double y) {
  if (!(y > 0.0)) throw std::domain_error("inverse_path_loss: argument must be > 0");
  return inverse_log_path_loss(alpha, zeta, std::log(y));
}

double inverse_path_loss(const ValidatedConfig& cfg, Tier t, double y) {
  const TierParams p = tier_params(cfg, t);
  return inverse_path_loss(p.alpha, p.zeta, y);
}

std::array<GainOutcome, 4> gain_distribution(const ValidatedConfig& cfg, Node tx) {
  const SystemConfig& c = cfg.params();
  const double two_pi = 2.0 * std::numbers::pi;
  const double gm_t = tx == Node::Bs ? c.gain_main_bs : c.gain_main_vue;
  const double gs_t = tx == Node::Bs ? c.gain_side_bs : c.gain_side_vue;
  const double q_t = (tx == Node::Bs ? c.beamwidth_bs : c.beamwidth_vue) / two_pi;
  const double q_r = c.beamwidth_vue / two_pi;
  const double p0 = q_t * q_r, p1 = q_t * (1.0 - q_r), p2 = (1.0 - q_t) * q_r;
  // complement makes the in-order sum exactly 1
  const double p3 = std::max(0.0, 1.0 - ((p0 + p1) + p2));
  return {{{gm_t * c.gain_main_vue, p0},
           {gm_t * c.gain_side_vue, p1},
           {gs_t * c.gain_main_vue, p2},
           {gs_t * c.gain_side_vue, p3}}};
}

double aligned_gain(const ValidatedConfig& cfg, Node tx) {
  return (tx == Node::Bs ? cfg->gain_main_bs : cfg->gain_main_vue) * cfg->gain_main_vue;
}

double received_power(const ValidatedConfig& cfg, Tier t, double r) {
  const TierParams p = tier_params(cfg, t);
  return p.ptx * p.gain_main * path_loss(p.alpha, p.zeta, r);
}

double lambda_map(const TierParams& k, const TierParams& i, double r) {
  if (k.tier == i.tier) return r;
  if (!(r > 0.0)) return 0.0;
  const double log_y = std::log(k.ptx * k.gain_main / (i.ptx * i.gain_main)) + log_path_loss(k.alpha, k.zeta, r);
  return inverse_log_path_loss(i.alpha, i.zeta, log_y);
}

double lambda_map(const ValidatedConfig& cfg, Tier k, Tier i, double r) {
  return lambda_map(tier_params(cfg, k), tier_params(cfg, i), r);
}

}  // namespace mmv2x
