#include "mmv2x/interference.hpp"

#include "mmv2x/association.hpp"

#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace mmv2x {

namespace {

void check_convergent(const TierParams& p) {
  const bool all_nlos_tail = !p.los || p.a == 0.0;
  if (all_nlos_tail && p.zeta == 0.0 && p.alpha <= 2.0)
    throw std::domain_error("w_integral: diverges for an unattenuated NLOS tier with alpha <= 2; set zeta > 0");
}

// breakpoints: the crossover r* where eta*l(r*) = 1, decades around it, and
// the attenuation length
std::vector<double> w_breaks(const TierParams& p, double log_eta) {
  const double r_star = inverse_log_path_loss(p.alpha, p.zeta, -log_eta);
  const double decay = p.zeta + (p.los ? p.a : 0.0);
  const double cap = std::max(r_star * 10.0, decay > 0.0 ? 60.0 / decay : r_star * 1e8);
  std::vector<double> pts{0.0};
  for (double d = r_star; d < cap; d *= 10.0) pts.push_back(d);
  if (decay > 0.0)
    for (double c : {1.0, 10.0, 60.0}) pts.push_back(c / decay);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.push_back(kInf);
  return pts;
}

// 1/(1 + e^-z), z = ln(eta l(r))
double logistic(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

double w_integral(const TierParams& p, double eta, const QuadOptions& opt) { return w_integral(p, eta, 0.0, kInf, opt); }

double w_integral(const TierParams& p, double eta, double lo, double hi, const QuadOptions& opt) {
  if (hi == kInf) check_convergent(p);
  if (!(eta > 0.0) || !(hi > lo)) return 0.0;
  const double le = std::log(eta);
  std::vector<double> pts{lo};
  for (double b : w_breaks(p, le))
    if (b > lo && b < hi) pts.push_back(b);
  pts.push_back(hi);
  QuadOptions o = opt;
  o.scale = std::max(pts[pts.size() - 2], 1.0);
  o.abs_tol = 1e-300;
  auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    return r * tier_probability(p, r) * logistic(le + log_path_loss(p.alpha, p.zeta, r));
  };
  return integrate_panels(f, pts, o).value;
}

double w_integral_slope(const TierParams& p, double eta, const QuadOptions& opt) {
  check_convergent(p);
  if (!(eta > 0.0)) return 0.0;
  const double le = std::log(eta);
  const auto pts = w_breaks(p, le);
  QuadOptions o = opt;
  o.scale = pts[pts.size() - 2];
  o.abs_tol = 1e-300;
  auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double z = le + log_path_loss(p.alpha, p.zeta, r);
    const double s = logistic(z);
    return r * tier_probability(p, r) * s * (1.0 - s);
  };
  return integrate_panels(f, pts, o).value;
}

WTable::WTable(const TierParams& p) {
  check_convergent(p);
  // trapezoid rule in q = ln r; the integrand is analytic in a strip of
  // half-width ~pi/alpha, so the error is ~exp(-2 pi^2 / (alpha h))
  constexpr double h = 0.1;
  const int n = static_cast<int>(std::lround((kHi - kLo) / kStep)) + 1;
  y_.resize(n);
  d_.resize(n);
  const double decay = p.zeta + (p.los ? p.a : 0.0);
  for (int i = 0; i < n; ++i) {
    const double le = kLo + i * kStep;
    const double q_star = std::log(inverse_log_path_loss(p.alpha, p.zeta, -le));
    double q_hi = decay > 0.0 ? std::log(60.0 / decay) : q_star + 45.0 / (p.alpha - 2.0);
    if (p.alpha > 2.0) q_hi = std::min(q_hi, std::max(q_star, 0.0) + 45.0 / (p.alpha - 2.0));
    const double q_lo = std::min(q_star, q_hi) - 20.0;
    double w = 0.0, dw = 0.0;
    const int steps = static_cast<int>((q_hi - q_lo) / h) + 1;
    for (int j = 0; j <= steps; ++j) {
      const double r = std::exp(q_lo + j * h);
      const double s = logistic(le + log_path_loss(p.alpha, p.zeta, r));
      const double base = r * r * tier_probability(p, r);
      w += base * s;
      dw += base * s * (1.0 - s);
    }
    y_[i] = std::log(w * h);
    d_[i] = dw / w;
  }
}

double WTable::log_w(double le) const {
  const int n = static_cast<int>(y_.size());
  if (le <= kLo) return y_[0] + d_[0] * (le - kLo);
  if (le >= kHi) return y_[n - 1] + d_[n - 1] * (le - kHi);
  const double u = (le - kLo) / kStep;
  int i = static_cast<int>(u);
  if (i >= n - 1) i = n - 2;
  const double t = u - i;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * kStep * d_[i] + h01 * y_[i + 1] + h11 * kStep * d_[i + 1];
}

std::shared_ptr<const WTable> w_table(const TierParams& p) {
  using Key = std::tuple<double, double, double, bool>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const WTable>> cache;
  const Key key{p.alpha, p.zeta, p.a, p.los};
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<const WTable>(p);
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(t)).first->second;
}

InterferenceField::InterferenceField(const ValidatedConfig& cfg) {
  for (Tier k : kTiers) {
    TierTerm& t = terms_[index(k)];
    t.params = tier_params(cfg, k);
    t.gains = gain_distribution(cfg, t.params.node);
    t.table = w_table(t.params);
  }
}

double InterferenceField::log_laplace(double s) const {
  if (s < 0.0) throw std::domain_error("laplace: s must be >= 0");
  if (s == 0.0) return 0.0;
  const double ls = std::log(s);
  double acc = 0.0;
  for (const TierTerm& t : terms_) {
    const double base = ls + std::log(t.params.ptx);
    double inner = 0.0;
    for (const GainOutcome& g : t.gains)
      if (g.prob > 0.0) inner += g.prob * std::exp(t.table->log_w(base + std::log(g.gain)));
    acc += t.params.density * inner;
  }
  return -2.0 * std::numbers::pi * acc;
}

InterferenceField::Conditioned InterferenceField::conditioned(double s, const std::array<double, 4>& radius,
                                                              const QuadOptions& opt) const {
  Conditioned out;
  if (s < 0.0) throw std::domain_error("laplace: s must be >= 0");
  if (s == 0.0) return out;
  const double ls = std::log(s);
  double acc = 0.0;
  for (const TierTerm& t : terms_) {
    const double a = radius[index(t.params.tier)];
    const double om = omega(t.params, a);
    double outside = 0.0, inside = 0.0;
    for (const GainOutcome& g : t.gains) {
      if (!(g.prob > 0.0)) continue;
      const double eta = s * t.params.ptx * g.gain;
      // [0, a] part once; the tail is the full-range table minus it
      const double part = om > 0.0 ? w_integral(t.params, eta, 0.0, a, opt) : 0.0;
      const double full = std::exp(t.table->log_w(ls + std::log(t.params.ptx * g.gain)));
      outside += g.prob * std::max(full - part, 0.0);
      if (om > 0.0) inside += g.prob * std::max(om - part, 0.0) / om;
    }
    acc += t.params.density * outside;
    if (t.params.node == Node::Vue && om > 0.0)
      (t.params.los ? out.log_inside_los_vue : out.log_inside_nlos_vue) = std::log(inside);
  }
  out.log_outside = -2.0 * std::numbers::pi * acc;
  return out;
}

double InterferenceField::laplace_direct(double s, const QuadOptions& opt) const {
  if (s < 0.0) throw std::domain_error("laplace: s must be >= 0");
  if (s == 0.0) return 1.0;
  double acc = 0.0;
  for (const TierTerm& t : terms_) {
    double inner = 0.0;
    for (const GainOutcome& g : t.gains)
      if (g.prob > 0.0) inner += g.prob * w_integral(t.params, s * t.params.ptx * g.gain, opt);
    acc += t.params.density * inner;
  }
  return std::exp(-2.0 * std::numbers::pi * acc);
}

}  // namespace mmv2x
