#include "mmv2x/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmv2x/mobility.hpp"

namespace mmv2x {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ln-threshold lattice for the conditioned rate integral
constexpr double kRateTLo = -10.0;
constexpr double kRateTHi = 40.0;
constexpr double kRateStep = 0.5;
// ln-threshold lattice shared by per-state rate thresholds
constexpr double kLatticeStep = 0.01;

std::vector<double> kinks(const ValidatedConfig& cfg, Tier k) {
  const double vt = cfg->speed * cfg->slot;
  if (!(vt > 0.0)) return {};
  if (node_of(k) == Node::Bs) return {vt, vt / std::sin(cfg->beamwidth_bs / 2.0)};
  return {2.0 * vt, 2.0 * vt / std::sin(cfg->beamwidth_vue / 2.0)};
}

double log_pmf(int m, double mu) {
  if (mu <= 0.0) return m == 0 ? 0.0 : -kInf;
  return m * std::log(mu) - mu - std::lgamma(m + 1.0);
}

double safe_exp(double e) { return e < -745.0 ? 0.0 : std::exp(e); }

}  // namespace

Model::Model(const ValidatedConfig& cfg, const NumericsPolicy& policy, const GridOptions& grid, Exec exec)
    : cfg_(cfg), policy_(policy), exec_(exec) {
  validate(policy_);
  field_ = std::make_shared<const InterferenceField>(cfg_);
  tp_ = all_tier_params(cfg_);
  stride_ = policy_.series_max_steps;
  for (Tier k : kTiers) build_grid(k, grid);

  cases_ = build_case_table(
      cfg_.hit_probability(), [&](Tier k, AssociationState s) { return association(k, s); }, policy_);

  for (Tier k : kTiers) {
    TierGrid& g = grid_[index(k)];
    g.mix.assign(g.nodes.size(), 0.0);
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      double acc = 0.0;
      for (int n = 1; n <= cases_.n_stop; ++n) {
        const double cw = case_weight(case_of(k), n, cases_.p_h);
        if (cw == 0.0) continue;
        for (int m = 0; m < n; ++m) acc += cw * state_density(k, {n, m}, j);
      }
      g.mix[j] = acc;
    }
  }
}

void Model::build_grid(Tier k, const GridOptions& opt) {
  const TierParams& pk = tp_[index(k)];
  auto bs_mean = [&](double x) {
    return tier_mean(tp_[0], lambda_map(pk, tp_[0], x)) + tier_mean(tp_[1], lambda_map(pk, tp_[1], x));
  };

  // truncation radius: last point where the serving density bound is above the floor
  double x_hi = 0.0;
  for (double x = 1.0; x <= policy_.r_max; x *= 1.05) {
    const double bound = kTwoPi * x * pk.density * tier_probability(pk, x) * std::exp(-bs_mean(x));
    if (bound >= opt.density_floor) x_hi = x;
  }
  x_hi = std::min(policy_.r_max, std::max(x_hi * 1.1, 10.0));

  std::vector<double> pts{0.0};
  for (double x = opt.first_node; x < x_hi; x *= opt.panel_ratio) pts.push_back(x);
  for (double kink : kinks(cfg_, k)) {
    if (!(kink < x_hi)) continue;
    pts.push_back(kink);
    for (int j = 1; j <= opt.kink_grading; ++j) {
      const double d = std::pow(10.0, -j);
      pts.push_back(kink * (1.0 - d));
      pts.push_back(kink * (1.0 + d));
    }
  }
  pts.push_back(x_hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return x > x_hi; }), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const GaussRule& rule = gauss_legendre(opt.gl_order);
  TierGrid& g = grid_[index(k)];
  g.nodes.clear();
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double a = pts[p], b = pts[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      Node nd{};
      nd.x = c + h * rule.nodes[q];
      nd.w = h * rule.weights[q];
      g.nodes.push_back(nd);
    }
  }

  const long count = static_cast<long>(g.nodes.size());
  g.log_pmf_los.assign(count * stride_, 0.0);
  g.log_pmf_nlos.assign(count * stride_, 0.0);
  const double g0 = std::log(pk.ptx * aligned_gain(cfg_, pk.node));

#pragma omp parallel for schedule(dynamic, 8) if (exec_ == Exec::Parallel)
  for (long j = 0; j < count; ++j) {
    Node& nd = g.nodes[j];
    const double x = nd.x;
    for (Tier i : kTiers) nd.radius[index(i)] = lambda_map(pk, tp_[index(i)], x);
    nd.log_T = g0 + log_path_loss(pk.alpha, pk.zeta, x);
    nd.core = kTwoPi * x * pk.density * tier_probability(pk, x) * std::exp(-bs_mean(x));
    nd.mu_los_vue = tier_mean(tp_[2], nd.radius[2]);
    nd.mu_nlos_vue = tier_mean(tp_[3], nd.radius[3]);
    nd.sojourn = sojourn_total(cfg_, k, x);
    nd.conn_time = connection_time(cfg_, k, x);
    for (int m = 0; m < stride_; ++m) {
      g.log_pmf_los[j * stride_ + m] = log_pmf(m, nd.mu_los_vue);
      g.log_pmf_nlos[j * stride_ + m] = log_pmf(m, nd.mu_nlos_vue);
    }
  }
}

double Model::state_density(Tier k, AssociationState s, std::size_t j) const {
  const TierGrid& g = grid_[index(k)];
  const int nl = s.n - 1 - s.m;
  if (s.m >= stride_ || nl >= stride_) return 0.0;
  return g.nodes[j].core * safe_exp(g.log_pmf_los[j * stride_ + s.m] + g.log_pmf_nlos[j * stride_ + nl]);
}

double Model::Kernel::operator()(std::size_t j, AssociationState s) const {
  if (tau <= 0.0) return 1.0;
  if (!cond) return coverage_kernel(*model->field_, model->cfg_.noise_power(), model->nodes(k)[j].log_T, tau);
  return safe_exp(cond->base[j] + s.m * cond->in_los[j] + (s.n - 1 - s.m) * cond->in_nlos[j]);
}

Model::Kernel Model::kernel(Tier k, double tau) const {
  return {this, k, tau, conditioned() && tau > 0.0 ? cond_terms(k, tau) : nullptr};
}

Model::Kernel Model::kernel_interpolated(Tier k, double tau) const {
  if (!conditioned() || !(tau > 0.0)) return kernel(k, tau);
  // quadratic through the three lattice points nearest ln tau
  const double u = std::log(tau) / kLatticeStep;
  const double i0 = std::round(u);
  const double t = u - i0;
  const auto lo = cond_terms(k, std::exp((i0 - 1.0) * kLatticeStep));
  const auto mid = cond_terms(k, std::exp(i0 * kLatticeStep));
  const auto hi = cond_terms(k, std::exp((i0 + 1.0) * kLatticeStep));
  const double w_lo = 0.5 * t * (t - 1.0), w_mid = 1.0 - t * t, w_hi = 0.5 * t * (t + 1.0);
  auto out = std::make_shared<CondTerms>();
  const std::size_t n = mid->base.size();
  out->base.resize(n);
  out->in_los.resize(n);
  out->in_nlos.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool finite = lo->base[j] > -kInf && mid->base[j] > -kInf && hi->base[j] > -kInf;
    out->base[j] = finite ? w_lo * lo->base[j] + w_mid * mid->base[j] + w_hi * hi->base[j] : -kInf;
    out->in_los[j] = w_lo * lo->in_los[j] + w_mid * mid->in_los[j] + w_hi * hi->in_los[j];
    out->in_nlos[j] = w_lo * lo->in_nlos[j] + w_mid * mid->in_nlos[j] + w_hi * hi->in_nlos[j];
  }
  return {this, k, tau, std::move(out)};
}

std::shared_ptr<const Model::CondTerms> Model::cond_terms(Tier k, double tau) const {
  const std::pair<int, double> key{index(k), tau};
  {
    std::lock_guard lock(cond_mu_);
    auto it = cond_cache_.find(key);
    if (it != cond_cache_.end()) return it->second;
  }
  const auto& nodes = grid_[index(k)].nodes;
  auto out = std::make_shared<CondTerms>();
  out->base.assign(nodes.size(), -kInf);
  out->in_los.assign(nodes.size(), 0.0);
  out->in_nlos.assign(nodes.size(), 0.0);
  QuadOptions o = QuadOptions::from(policy_);
  o.rel_tol = std::max(o.rel_tol, 1e-9);
  const double noise = cfg_.noise_power();
  const long count = static_cast<long>(nodes.size());
#pragma omp parallel for schedule(dynamic, 8) if (exec_ == Exec::Parallel)
  for (long j = 0; j < count; ++j) {
    const double s = tau * std::exp(-nodes[j].log_T);
    if (!std::isfinite(s)) continue;
    const auto c = field_->conditioned(s, nodes[j].radius, o);
    out->base[j] = -s * noise + c.log_outside;
    out->in_los[j] = c.log_inside_los_vue;
    out->in_nlos[j] = c.log_inside_nlos_vue;
  }
  std::lock_guard lock(cond_mu_);
  return cond_cache_.emplace(key, std::move(out)).first->second;
}

double Model::sweep_state(Tier k, AssociationState s, const std::function<double(std::size_t)>& f) const {
  const auto& nodes = grid_[index(k)].nodes;
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double u = state_density(k, s, j);
    if (u == 0.0) continue;
    acc += nodes[j].w * u * f(j);
  }
  return acc;
}

double Model::sweep_mix(Tier k, const Kernel& K, const std::function<double(std::size_t)>& f) const {
  const TierGrid& g = grid_[index(k)];
  double acc = 0.0;
  if (!K.cond) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      if (g.mix[j] == 0.0) continue;
      acc += g.nodes[j].w * g.mix[j] * K(j, {1, 0}) * f(j);
    }
    return acc;
  }
  // the kernel factorises over (m, n-1-m), so the state sum is a convolution
  const CaseKind c = case_of(k);
  const int n_stop = cases_.n_stop;
  std::vector<double> cw(n_stop + 1), a_los(stride_), a_nlos(stride_);
  for (int n = 1; n <= n_stop; ++n) cw[n] = case_weight(c, n, cases_.p_h);
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    if (g.mix[j] == 0.0 || K.cond->base[j] == -kInf) continue;
    for (int m = 0; m < stride_; ++m) {
      a_los[m] = safe_exp(g.log_pmf_los[j * stride_ + m] + m * K.cond->in_los[j]);
      a_nlos[m] = safe_exp(g.log_pmf_nlos[j * stride_ + m] + m * K.cond->in_nlos[j]);
    }
    double sum = 0.0;
    for (int n = 1; n <= n_stop; ++n) {
      if (cw[n] == 0.0) continue;
      double inner = 0.0;
      for (int m = 0; m < n && m < stride_; ++m)
        if (n - 1 - m < stride_) inner += a_los[m] * a_nlos[n - 1 - m];
      sum += cw[n] * inner;
    }
    acc += g.nodes[j].w * g.nodes[j].core * safe_exp(K.cond->base[j]) * sum * f(j);
  }
  return acc;
}

double Model::association(Tier k, AssociationState s) const {
  return sweep_state(k, s, [](std::size_t) { return 1.0; });
}

double Model::load(Tier k, AssociationState s) const { return mmv2x::load(cfg_, cases_, k, s, policy_); }

double Model::coverage_at(Tier k, AssociationState s, std::size_t j, double tau) const { return kernel(k, tau)(j, s); }

double Model::sinr_coverage(Tier k, AssociationState s, double tau) const {
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  const Kernel K = kernel(k, tau);
  return sweep_state(k, s, [&](std::size_t j) { return K(j, s); }) / a;
}

double Model::connectivity(Tier k, AssociationState s, double tau) const {
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  const Kernel K = kernel(k, tau);
  const auto& nodes = grid_[index(k)].nodes;
  return sweep_state(k, s, [&](std::size_t j) { return K(j, s) * nodes[j].sojourn; }) / a;
}

double Model::rate_coverage(Tier k, AssociationState s, double rho) const {
  const double tau = rate_to_sinr_threshold(rho, load(k, s), cfg_->bandwidth);
  if (!conditioned()) return sinr_coverage(k, s, tau);
  // every state has its own threshold; share conditioned terms through a lattice
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  const Kernel K = kernel_interpolated(k, tau);
  return sweep_state(k, s, [&](std::size_t j) { return K(j, s); }) / a;
}

double Model::mean_sojourn(Tier k, AssociationState s) const {
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  const auto& nodes = grid_[index(k)].nodes;
  return sweep_state(k, s, [&](std::size_t j) { return nodes[j].sojourn; }) / a;
}

double Model::average_connection_time(Tier k, AssociationState s) const {
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  const auto& nodes = grid_[index(k)].nodes;
  return sweep_state(k, s, [&](std::size_t j) { return nodes[j].conn_time; }) / a;
}

double Model::average_rate(Tier k, AssociationState s) const {
  const double a = association(k, s);
  if (!(a > 0.0)) return 0.0;
  double integral = 0.0;
  if (conditioned()) {
    integral = conditioned_log_rate_integral(k, s);
  } else {
    const auto& table = log_rate_table(k);
    integral = sweep_state(k, s, [&](std::size_t j) { return table[j]; }) / a;
  }
  return cfg_->bandwidth / (load(k, s) * std::numbers::ln2) * integral;
}

double Model::conditioned_log_rate_integral(Tier k, AssociationState s) const {
  // int SC(e^t) / (1 + e^-t) dt by Simpson on a fixed lattice; below the
  // lattice SC is flat to within e^t
  const int steps = static_cast<int>(std::lround((kRateTHi - kRateTLo) / kRateStep));
  double acc = 0.0;
  double first = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = kRateTLo + i * kRateStep;
    const double sc = sinr_coverage(k, s, std::exp(t));
    if (i == 0) first = sc;
    const double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += wgt * sc / (1.0 + std::exp(-t));
  }
  return first * std::log1p(std::exp(kRateTLo)) + acc * kRateStep / 3.0;
}

const std::vector<double>& Model::log_rate_table(Tier k) const {
  ensure_rate_tables();
  return rate_tables_[index(k)];
}

void Model::ensure_rate_tables() const {
  std::call_once(rate_once_, [this] {
    QuadOptions o = QuadOptions::from(policy_);
    o.scale = 5.0;
    o.abs_tol = 1e-13;
    const double noise = cfg_.noise_power();
    for (Tier k : kTiers) {
      const auto& nodes = grid_[index(k)].nodes;
      auto& out = rate_tables_[index(k)];
      out.assign(nodes.size(), 0.0);
      const long count = static_cast<long>(nodes.size());
#pragma omp parallel for schedule(dynamic, 8) if (exec_ == Exec::Parallel)
      for (long j = 0; j < count; ++j) {
        const double log_T = nodes[j].log_T;
        // int_0^inf g(u)/(1+u) du with u = e^t; below t = -50 g is 1 to double precision
        const double t_lo = -50.0;
        auto f = [&](double t) { return coverage_kernel(*field_, noise, log_T, std::exp(t)) / (1.0 + std::exp(-t)); };
        out[j] = std::log1p(std::exp(t_lo)) + try_integrate(f, t_lo, kInf, o).value;
      }
    }
  });
}

double Model::case_mass(CaseKind c) const { return cases_.case_total(c); }

double Model::sinr_coverage(CaseKind c, double tau) const {
  if (c == CaseKind::Local) return 1.0;
  const double mass = case_mass(c);
  if (!(mass > 0.0)) return 0.0;
  double acc = 0.0;
  for (Tier k : kTiers)
    if (case_of(k) == c) acc += sweep_mix(k, kernel(k, tau), [](std::size_t) { return 1.0; });
  return acc / mass;
}

double Model::connectivity(CaseKind c, double tau) const {
  if (c == CaseKind::Local) return 1.0;
  const double mass = case_mass(c);
  if (!(mass > 0.0)) return 0.0;
  double acc = 0.0;
  for (Tier k : kTiers) {
    if (case_of(k) != c) continue;
    const auto& nodes = grid_[index(k)].nodes;
    acc += sweep_mix(k, kernel(k, tau), [&](std::size_t j) { return nodes[j].sojourn; });
  }
  return acc / mass;
}

double Model::rate_coverage(CaseKind c, double rho) const {
  if (c == CaseKind::Local) return 1.0;
  const double mass = case_mass(c);
  if (!(mass > 0.0)) return 0.0;
  double acc = 0.0;
  for (Tier k : kTiers) {
    if (case_of(k) != c) continue;
    for (int n = 1; n <= cases_.n_stop; ++n)
      for (int m = 0; m < n; ++m) {
        const double w = cases_.weight(k, {n, m});
        if (w > 0.0) acc += w * rate_coverage(k, {n, m}, rho);
      }
  }
  return cfg_->literal_case_mixtures ? acc : acc / mass;
}

double Model::sinr_coverage(double tau) const {
  double acc = cases_.p_local;
  for (CaseKind c : {CaseKind::V2I, CaseKind::V2V}) acc += case_mass(c) * sinr_coverage(c, tau);
  return acc;
}

double Model::connectivity(double tau) const {
  double acc = cases_.p_local;
  for (CaseKind c : {CaseKind::V2I, CaseKind::V2V}) acc += case_mass(c) * connectivity(c, tau);
  return acc;
}

double Model::rate_coverage(double rho) const {
  double acc = cases_.p_local;
  for (CaseKind c : {CaseKind::V2I, CaseKind::V2V}) acc += case_mass(c) * rate_coverage(c, rho);
  return acc;
}

}  // namespace mmv2x
