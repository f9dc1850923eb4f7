#include "mmv2x/performance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmv2x/mobility.hpp"

namespace mmv2x {

double delay_slots(double p_h, double content_bits, double throughput) {
  if (p_h >= 1.0) return 0.0;
  if (!(throughput > 0.0)) return kInfiniteDelay;
  return (1.0 - p_h) * content_bits / throughput;
}

PerfBreakdown evaluate_performance(const Model& model) {
  const ValidatedConfig& cfg = model.config();
  const CaseTable& ct = model.cases();
  PerfBreakdown out;
  out.p_h = ct.p_h;
  out.throughput_local = cfg->local_rate * cfg->slot;

  double sum_v2i = 0.0, sum_v2v = 0.0;
  for (Tier k : kTiers) {
    for (int n = 1; n <= ct.n_stop; ++n)
      for (int m = 0; m < n; ++m) {
        const AssociationState s{n, m};
        const double w = ct.weight(k, s);
        if (!(w > 0.0)) continue;
        StatePerf sp{k, s, w, model.load(k, s), model.average_rate(k, s), model.average_connection_time(k, s), 0.0};
        sp.throughput = sp.avg_rate * sp.avg_conn_time;
        (case_of(k) == CaseKind::V2I ? sum_v2i : sum_v2v) += w * sp.throughput;
        out.states.push_back(sp);
      }
  }

  const bool literal = cfg->literal_case_mixtures;
  auto per_case = [&](double sum, double mass) { return literal ? sum : (mass > 0.0 ? sum / mass : 0.0); };
  out.throughput_v2i = per_case(sum_v2i, ct.p_v2i);
  out.throughput_v2v = per_case(sum_v2v, ct.p_v2v);
  out.throughput_total =
      ct.p_local * out.throughput_local + ct.p_v2i * out.throughput_v2i + ct.p_v2v * out.throughput_v2v;
  out.delay_slots = delay_slots(ct.p_h, cfg->content_bits, out.throughput_total);
  return out;
}

double average_rate_direct(const ValidatedConfig& cfg, const InterferenceField& field, const CaseTable& table, Tier k,
                           AssociationState s, const NumericsPolicy& policy) {
  if (!(association_probability(cfg, k, s, policy) > 0.0)) return 0.0;
  const double n = load(cfg, table, k, s, policy);
  return cfg->bandwidth / (n * std::numbers::ln2) * log_rate_integral_tier(cfg, field, k, s, policy);
}

double average_connection_time_direct(const ValidatedConfig& cfg, Tier k, AssociationState s,
                                      const NumericsPolicy& policy) {
  const double a = association_probability(cfg, k, s, policy);
  if (!(a > 0.0)) return 0.0;
  const auto tp = all_tier_params(cfg);
  std::vector<double> pts{0.0, 10.0, 100.0, 1000.0, kInf};
  const double vt = cfg->speed * cfg->slot;
  if (vt > 0.0) {
    const bool bs = node_of(k) == Node::Bs;
    const double base = bs ? vt : 2.0 * vt;
    const double psi = bs ? cfg->beamwidth_bs : cfg->beamwidth_vue;
    pts.push_back(base);
    pts.push_back(base / std::sin(psi / 2.0));
    std::sort(pts.begin(), pts.end());
  }
  QuadOptions o = QuadOptions::from(policy);
  o.abs_tol = 1e-14;
  o.scale = 100.0;
  auto f = [&](double x) {
    const double d = association_density(tp, k, s, x);
    return d == 0.0 ? 0.0 : d * connection_time(cfg, k, x);
  };
  return integrate_panels(f, pts, o).value / a;
}

}  // namespace mmv2x
