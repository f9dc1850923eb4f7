#include "mmv2x/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mmv2x/numerics.hpp"

namespace mmv2x {

namespace {

constexpr double kPi = std::numbers::pi;

QuadOptions angle_options() {
  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-14;
  return o;
}

// conditional sojourn for effective travel distance vt; shared by both cases
// through the angle density shape
double sojourn_uniform(double x, double h, double vt) {
  if (!(vt > 0.0)) return 1.0;
  const double c = x * std::sin(h) / vt;
  if (c >= 1.0) return 1.0;
  const double s = std::asin(c);
  const double L = kPi - h;
  return x < vt ? s / L : (2.0 * s - h) / L;
}

double sojourn_triangular(double x, double h, double vt) {
  if (!(vt > 0.0)) return 1.0;
  const double c = x * std::sin(h) / vt;
  if (c >= 1.0) return 1.0;
  const double s = std::asin(c);
  const double L = kPi - h;
  if (x < vt) return s * (2.0 * kPi - 2.0 * h - s) / (L * L);
  return (h * h + 2.0 * (kPi - 2.0 * h) * s) / (L * L);
}

// int over the exit angles of d(x, theta) * w(theta)
template <class W>
double exit_integral(double x, double h, double vt, W w, bool clamp_low = true) {
  if (!(vt > 0.0)) return 0.0;
  const double c = x * std::sin(h) / vt;
  if (c >= 1.0) return 0.0;
  const double s = std::asin(c);
  double lo = s - h;
  if (clamp_low) lo = std::max(0.0, lo);
  const double hi = kPi - s - h;
  if (!(hi > lo)) return 0.0;
  const double xs = x * std::sin(h);
  return integrate([&](double th) { return xs / std::sin(th + h) * w(th); }, lo, hi, angle_options()).value;
}

// beta breakpoints on [0, pi] where the V2V branches switch
std::vector<double> beta_breaks(double x, double h, double vt2) {
  std::vector<double> pts{0.0, kPi / 2.0, kPi};
  for (double q : {x / vt2, x * std::sin(h) / vt2}) {
    if (q < 1.0) {
      const double b = std::acos(q);
      pts.push_back(b);
      pts.push_back(kPi - b);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double half_beta_pdf(double beta) { return (kPi - beta) / (kPi * kPi); }

}  // namespace

double max_traverse_distance(double x, double theta, double psi) {
  const double s = std::sin(theta + psi / 2.0);
  if (!(s > 0.0) || theta + psi / 2.0 >= kPi) throw std::domain_error("max_traverse_distance: angle never exits the beam");
  return x * std::sin(psi / 2.0) / s;
}

double sojourn_v2i(double x, double psi_b, double v, double t_s) { return sojourn_uniform(x, psi_b / 2.0, v * t_s); }

double sojourn_v2i(const ValidatedConfig& cfg, double x) {
  return sojourn_v2i(x, cfg->beamwidth_bs, cfg->speed, cfg->slot);
}

double sojourn_v2v(double x, double beta, double psi_u, double v, double t_s) {
  return sojourn_triangular(x, psi_u / 2.0, 2.0 * v * t_s * std::fabs(std::cos(beta)));
}

double sojourn_v2v(const ValidatedConfig& cfg, double x, double beta) {
  return sojourn_v2v(x, beta, cfg->beamwidth_vue, cfg->speed, cfg->slot);
}

double beta_pdf(double beta) {
  if (beta <= -kPi || beta >= kPi) return 0.0;
  return (kPi - std::fabs(beta)) / (kPi * kPi);
}

double theta_pdf(double theta) {
  if (theta <= 0.0 || theta >= 2.0 * kPi) return 0.0;
  return theta < kPi ? theta / (kPi * kPi) : (2.0 * kPi - theta) / (kPi * kPi);
}

AngleWeights v2i_angle_weights(double psi_b) {
  return {psi_b / (2.0 * kPi), (2.0 * kPi - psi_b) / (2.0 * kPi)};
}

AngleWeights v2v_angle_weights(double psi_u) {
  const double h = psi_u / 2.0;
  return {(2.0 * kPi - h) * h / (kPi * kPi), (kPi - h) * (kPi - h) / (kPi * kPi)};
}

double sojourn_total_v2i(const ValidatedConfig& cfg, double x) {
  const AngleWeights w = v2i_angle_weights(cfg->beamwidth_bs);
  return w.always + w.conditional * sojourn_v2i(cfg, x);
}

double sojourn_total_v2v(const ValidatedConfig& cfg, double x, double beta) {
  const AngleWeights w = v2v_angle_weights(cfg->beamwidth_vue);
  return w.always + w.conditional * sojourn_v2v(cfg, x, beta);
}

double mean_sojourn_total_v2v(const ValidatedConfig& cfg, double x) {
  const double vt2 = 2.0 * cfg->speed * cfg->slot;
  if (!(vt2 > 0.0)) return 1.0;
  const double h = cfg->beamwidth_vue / 2.0;
  const AngleWeights w = v2v_angle_weights(cfg->beamwidth_vue);
  if (x * std::sin(h) >= vt2) return 1.0;
  const auto pts = beta_breaks(x, h, vt2);
  const double conditional =
      2.0 * integrate_panels(
                [&](double b) { return half_beta_pdf(b) * sojourn_triangular(x, h, vt2 * std::fabs(std::cos(b))); },
                pts, angle_options())
                .value;
  return w.always + w.conditional * conditional;
}

double exit_time_v2i(const ValidatedConfig& cfg, double x) {
  const double v = cfg->speed;
  if (!(v > 0.0)) return 0.0;
  return exit_integral(x, cfg->beamwidth_bs / 2.0, v * cfg->slot, [](double) { return 1.0 / kPi; }) / v;
}

double exit_time_v2v(const ValidatedConfig& cfg, double x) {
  const double v = cfg->speed;
  const double ts = cfg->slot;
  if (!(v > 0.0)) return 0.0;
  const double h = cfg->beamwidth_vue / 2.0;
  const double vt2 = 2.0 * v * ts;
  if (x * std::sin(h) >= vt2) return 0.0;
  const auto pts = beta_breaks(x, h, vt2);
  const auto tri = [](double th) { return 2.0 * th / (kPi * kPi); };

  if (cfg->conn_time_variant == ConnTimeVariant::Consistent) {
    auto f = [&](double b) {
      const double vp = 2.0 * v * std::fabs(std::cos(b));
      if (!(vp > 0.0)) return 0.0;
      return half_beta_pdf(b) * exit_integral(x, h, vp * ts, tri) / vp;
    };
    return 2.0 * integrate_panels(f, pts, angle_options()).value;
  }

  // printed form: 1/v prefactor, theta density theta/pi^2, beta over (0, pi),
  // second region from v t_s and weighted twice
  const auto half_tri = [](double th) { return th / (kPi * kPi); };
  auto f = [&](double b) {
    const double vp_t = vt2 * std::fabs(std::cos(b));
    double acc = 0.0;
    if (x < vp_t) acc += exit_integral(x, h, vp_t, half_tri);
    if (x >= v * ts && x <= vp_t / std::sin(h)) {
      // theta_1 .. theta_2; theta_1 < 0 is clamped
      const double c = std::min(1.0, x * std::sin(h) / vp_t);
      const double s = std::asin(c);
      const double lo = std::max(0.0, s - h), hi = kPi - s - h;
      if (hi > lo)
        acc += 2.0 * integrate([&](double th) { return x * std::sin(h) / std::sin(th + h) * half_tri(th); }, lo, hi,
                               angle_options())
                         .value;
    }
    return half_beta_pdf(b) * acc;
  };
  return integrate_panels(f, pts, angle_options()).value / v;
}

double connection_time_v2i(const ValidatedConfig& cfg, double x) {
  return sojourn_total_v2i(cfg, x) * cfg->slot + exit_time_v2i(cfg, x);
}

double connection_time_v2v(const ValidatedConfig& cfg, double x) {
  return mean_sojourn_total_v2v(cfg, x) * cfg->slot + exit_time_v2v(cfg, x);
}

double sojourn_total(const ValidatedConfig& cfg, Tier k, double x) {
  return node_of(k) == Node::Bs ? sojourn_total_v2i(cfg, x) : mean_sojourn_total_v2v(cfg, x);
}

double connection_time(const ValidatedConfig& cfg, Tier k, double x) {
  return node_of(k) == Node::Bs ? connection_time_v2i(cfg, x) : connection_time_v2v(cfg, x);
}

}  // namespace mmv2x
