#include "mmv2x/association.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmv2x {

std::string_view to_string(CaseKind c) {
  switch (c) {
    case CaseKind::Local: return "local";
    case CaseKind::V2I: return "v2i";
    case CaseKind::V2V: return "v2v";
  }
  return "?";
}

int step_index(Tier i, AssociationState s) {
  switch (i) {
    case Tier::LosBs:
    case Tier::NlosBs: return 1;
    case Tier::LosVue: return s.m + 1;
    case Tier::NlosVue: return s.n - s.m;
  }
  return 1;
}

namespace {

// sum_{j>=j0} (-1)^j t^j (j-1)/j!
double omega_series(double t, int j0) {
  double term = 1.0;  // t^j / j!
  for (int j = 1; j <= j0; ++j) term *= t / j;
  double s = 0.0;
  for (int j = j0; j < j0 + 60; ++j) {
    const double c = ((j % 2) ? -1.0 : 1.0) * term * (j - 1);
    s += c;
    if (std::fabs(c) < 1e-18 * std::fabs(s)) break;
    term *= t / (j + 1);
  }
  return s;
}

double omega_los(double a, double r) {
  if (a == 0.0) return 0.5 * r * r;
  if (std::isinf(r)) return 1.0 / (a * a);
  const double t = a * r;
  if (t < 0.5) return omega_series(t, 2) / (a * a);
  return (1.0 - (1.0 + t) * std::exp(-t)) / (a * a);
}

double omega_nlos(double a, double r) {
  if (std::isinf(r)) throw std::domain_error("omega: NLOS tier diverges at r = inf; use the r_max policy");
  if (a == 0.0) return 0.0;
  const double t = a * r;
  if (t < 1.0) return -omega_series(t, 3) / (a * a);
  return 0.5 * r * r - omega_los(a, r);
}

}  // namespace

double omega(const TierParams& p, double r) {
  if (r < 0.0) throw std::domain_error("omega: r must be >= 0");
  if (r == 0.0) return 0.0;
  return p.los ? omega_los(p.a, r) : omega_nlos(p.a, r);
}

double omega(const ValidatedConfig& cfg, Tier t, double r) { return omega(tier_params(cfg, t), r); }

double tier_mean(const TierParams& p, double r) { return 2.0 * std::numbers::pi * p.density * omega(p, r); }

double nth_distance_cdf(const ValidatedConfig& cfg, Tier t, int n, double r) {
  if (n <= 0) return 0.0;
  return poisson_tail(n, tier_mean(tier_params(cfg, t), r));
}

double nth_distance_pdf(const ValidatedConfig& cfg, Tier t, int n, double r) {
  if (n <= 0 || r <= 0.0) return 0.0;
  const TierParams p = tier_params(cfg, t);
  return 2.0 * std::numbers::pi * r * p.density * tier_probability(p, r) * poisson_pmf(n - 1, tier_mean(p, r));
}

double association_density(const std::array<TierParams, 4>& tp, Tier k, AssociationState s, double r) {
  if (r <= 0.0) return 0.0;
  const TierParams& pk = tp[index(k)];
  double v = 2.0 * std::numbers::pi * r * pk.density * tier_probability(pk, r);
  if (v == 0.0) return 0.0;
  for (Tier i : kTiers) {
    const TierParams& pi = tp[index(i)];
    const double ri = lambda_map(pk, pi, r);
    // F^(n_i - 1) - F^(n_i): exactly n_i - 1 nodes of tier i inside ri
    v *= poisson_pmf(step_index(i, s) - 1, tier_mean(pi, ri));
    if (v == 0.0) return 0.0;
  }
  return v;
}

namespace {

QuadOptions assoc_options(const NumericsPolicy& policy) {
  QuadOptions o = QuadOptions::from(policy);
  o.abs_tol = std::min(policy.quad_abs_tol, 1e-14);
  o.scale = 100.0;
  return o;
}

}  // namespace

double association_probability(const ValidatedConfig& cfg, Tier k, AssociationState s, const NumericsPolicy& policy) {
  if (!s.valid()) throw std::invalid_argument("association_probability: invalid state");
  const auto tp = all_tier_params(cfg);
  const double pts[] = {0.0, 10.0, 100.0, 1000.0, kInf};
  return integrate_panels([&](double r) { return association_density(tp, k, s, r); }, pts, assoc_options(policy))
      .value;
}

double serving_distance_pdf(const ValidatedConfig& cfg, Tier k, AssociationState s, double x,
                            const NumericsPolicy& policy) {
  const double a = association_probability(cfg, k, s, policy);
  if (!(a > 0.0)) throw std::domain_error("serving_distance_pdf: state has zero association probability");
  return association_density(all_tier_params(cfg), k, s, x) / a;
}

double cache_hit_probability(const ValidatedConfig& cfg) { return cfg.hit_probability(); }

double case_weight(CaseKind c, int n, double p_h) {
  if (c == CaseKind::Local) return n == 0 ? p_h : 0.0;
  const double miss = std::pow(1.0 - p_h, n);
  return c == CaseKind::V2I ? miss : miss * p_h;
}

CaseTable build_case_table(double p_h, const std::function<double(Tier, AssociationState)>& assoc_fn,
                           const NumericsPolicy& policy) {
  CaseTable t;
  t.p_h = p_h;
  t.p_local = p_h;
  const int cap = policy.series_max_steps;
  for (auto& v : t.assoc) v.assign(CaseTable::idx(cap + 1, 0), 0.0);

  double v2i = 0.0, v2v = 0.0;
  auto weight = [&](int n, int m) {
    double w = 0.0;
    for (Tier k : kTiers) {
      const double a = assoc_fn(k, {n, m});
      t.assoc[index(k)][CaseTable::idx(n, m)] = a;
      const double wk = case_weight(case_of(k), n, p_h) * a;
      (case_of(k) == CaseKind::V2I ? v2i : v2v) += wk;
      w += wk;
    }
    return w;
  };
  const SeriesResult r = sum_steps([](int, int) { return 1.0; }, weight, 1.0 - p_h, policy);
  t.n_stop = r.truncated_at;
  t.p_v2i = v2i;
  t.p_v2v = v2v;
  t.tail_mass = r.tail_mass_bound;
  t.tail_warning = r.warning;
  for (auto& v : t.assoc) v.resize(CaseTable::idx(t.n_stop + 1, 0));
  return t;
}

CaseTable case_probabilities(const ValidatedConfig& cfg, const NumericsPolicy& policy) {
  return build_case_table(
      cache_hit_probability(cfg),
      [&](Tier k, AssociationState s) { return association_probability(cfg, k, s, policy); }, policy);
}

}  // namespace mmv2x
