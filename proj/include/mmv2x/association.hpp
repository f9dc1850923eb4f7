#pragma once

#include <array>
#include <compare>
#include <vector>

#include "mmv2x/config.hpp"
#include "mmv2x/numerics.hpp"
#include "mmv2x/propagation.hpp"

namespace mmv2x {

/// n-th contacted node, m of the previous n-1 contacts being LOS V-UEs.
struct AssociationState {
  int n = 1;
  int m = 0;
  bool valid() const { return n >= 1 && m >= 0 && m <= n - 1; }
  auto operator<=>(const AssociationState&) const = default;
};

enum class CaseKind { Local, V2I, V2V };
std::string_view to_string(CaseKind c);

/// Case a tier can serve.
constexpr CaseKind case_of(Tier t) { return node_of(t) == Node::Bs ? CaseKind::V2I : CaseKind::V2V; }

/// Order-statistic index of tier i for state s.
int step_index(Tier i, AssociationState s);

/// Omega_k(r) = int_0^r P_k(x) x dx. NLOS tiers at r = inf throw std::domain_error.
double omega(const TierParams& p, double r);
double omega(const ValidatedConfig& cfg, Tier t, double r);

/// Mean node count of tier k inside radius r: 2 pi lambda Omega_k(r).
double tier_mean(const TierParams& p, double r);

/// F^(n)(r) = P(Poisson(tier_mean) >= n); F^(0) = 0 by convention.
double nth_distance_cdf(const ValidatedConfig& cfg, Tier t, int n, double r);
double nth_distance_pdf(const ValidatedConfig& cfg, Tier t, int n, double r);

/// Integrand of the association probability: density of "the n-th ranked
/// node is of tier k, lies at r, and m of the earlier ones are LOS V-UEs".
double association_density(const std::array<TierParams, 4>& tp, Tier k, AssociationState s, double r);

double association_probability(const ValidatedConfig& cfg, Tier k, AssociationState s, const NumericsPolicy& policy);

/// Serving-distance density conditioned on (k, s). Throws std::domain_error
/// when the association probability vanishes.
double serving_distance_pdf(const ValidatedConfig& cfg, Tier k, AssociationState s, double x,
                            const NumericsPolicy& policy);

double cache_hit_probability(const ValidatedConfig& cfg);

/// Weight (1-p_h)^n for V2I, (1-p_h)^n p_h for V2V.
double case_weight(CaseKind c, int n, double p_h);

/// Association probabilities A_k^(n,m) for n <= n_stop, and the case
/// probabilities they imply.
struct CaseTable {
  double p_h = 0.0;
  int n_stop = 0;  // largest n included
  // a[k][idx(n,m)]
  std::array<std::vector<double>, 4> assoc;
  double p_local = 0.0;
  double p_v2i = 0.0;
  double p_v2v = 0.0;
  double tail_mass = 0.0;
  bool tail_warning = false;

  static int idx(int n, int m) { return (n - 1) * n / 2 + m; }
  double A(Tier k, AssociationState s) const { return assoc[index(k)][idx(s.n, s.m)]; }
  /// P^(n,m)_{i,k}
  double weight(Tier k, AssociationState s) const { return case_weight(case_of(k), s.n, p_h) * A(k, s); }
  double case_total(CaseKind c) const {
    return c == CaseKind::Local ? p_local : (c == CaseKind::V2I ? p_v2i : p_v2v);
  }
};

/// Builds the table from per-state association probabilities; `assoc_fn`
/// supplies A_k^(n,m). Truncation follows sum_steps.
CaseTable build_case_table(double p_h, const std::function<double(Tier, AssociationState)>& assoc_fn,
                           const NumericsPolicy& policy);

/// Direct route: every A_k^(n,m) by adaptive quadrature.
CaseTable case_probabilities(const ValidatedConfig& cfg, const NumericsPolicy& policy);

}  // namespace mmv2x
