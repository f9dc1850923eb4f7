#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mmv2x/association.hpp"
#include "mmv2x/coverage.hpp"
#include "mmv2x/interference.hpp"
#include "mmv2x/parallel.hpp"

namespace mmv2x {

/// Layout of the per-tier serving-distance grids.
struct GridOptions {
  int gl_order = 16;
  double first_node = 0.5;       // end of the first panel, m
  double panel_ratio = 1.2;      // geometric panel growth
  double density_floor = 1e-19;  // truncate where the serving density bound drops below this
  int kink_grading = 8;          // panels graded as kink*(1 +- 10^-j), j = 1..kink_grading
};

/// Analytic engine. Every tier gets a composite Gauss-Legendre grid over the
/// serving distance; each state integral is a weighted sum over that grid.
/// Immutable after construction apart from lazily filled caches, which are
/// guarded.
class Model {
 public:
  Model(const ValidatedConfig& cfg, const NumericsPolicy& policy, const GridOptions& grid = {},
        Exec exec = Exec::Parallel);

  const ValidatedConfig& config() const { return cfg_; }
  const NumericsPolicy& policy() const { return policy_; }
  const InterferenceField& field() const { return *field_; }
  const CaseTable& cases() const { return cases_; }
  double hit_probability() const { return cases_.p_h; }
  double tail_mass() const { return cases_.tail_mass; }
  bool conditioned() const { return cfg_->interference_model == InterferenceModel::Conditioned; }

  struct Node {
    double x;
    double w;
    double log_T;     // ln of the aligned received power
    double core;      // 2 pi x lambda P_k(x) exp(-BS means), the shared density factor
    double mu_los_vue;
    double mu_nlos_vue;
    double sojourn;   // unconditional sojourn probability (beta-averaged for V2V)
    double conn_time; // E[min(t_s, d/v)] at this distance
    std::array<double, 4> radius;  // Lambda_{k,i}(x) per tier i
  };
  const std::vector<Node>& nodes(Tier k) const { return grid_[index(k)].nodes; }

  /// Density of (k, s) at node j; integrates to A_k^(n,m).
  double state_density(Tier k, AssociationState s, std::size_t j) const;
  /// Case-weighted density summed over the retained states at node j.
  double mixture_density(Tier k, std::size_t j) const { return grid_[index(k)].mix[j]; }

  double association(Tier k, AssociationState s) const;
  double load(Tier k, AssociationState s) const;

  /// P(SINR > tau) at node j of tier k given state s.
  double coverage_at(Tier k, AssociationState s, std::size_t j, double tau) const;

  // per-state conditional metrics
  double sinr_coverage(Tier k, AssociationState s, double tau) const;
  double connectivity(Tier k, AssociationState s, double tau) const;
  double rate_coverage(Tier k, AssociationState s, double rho) const;
  double mean_sojourn(Tier k, AssociationState s) const;
  double average_rate(Tier k, AssociationState s) const;
  double average_connection_time(Tier k, AssociationState s) const;

  // case mixtures; Local is 1 for coverage metrics
  double sinr_coverage(CaseKind c, double tau) const;
  double connectivity(CaseKind c, double tau) const;
  double rate_coverage(CaseKind c, double rho) const;

  // totals over the three cases
  double sinr_coverage(double tau) const;
  double connectivity(double tau) const;
  double rate_coverage(double rho) const;

  /// Per-node int_0^inf g(x;u)/(1+u) du for the unconditioned kernel,
  /// filled on first use.
  const std::vector<double>& log_rate_table(Tier k) const;

 private:
  struct TierGrid {
    std::vector<Node> nodes;
    std::vector<double> log_pmf_los;   // [node * stride + m]
    std::vector<double> log_pmf_nlos;  // [node * stride + j]
    std::vector<double> mix;
  };
  // conditioned Laplace terms per node; ln P(cover) = base + m in_los + (n-1-m) in_nlos
  struct CondTerms {
    std::vector<double> base;  // includes the noise term
    std::vector<double> in_los;
    std::vector<double> in_nlos;
  };
  // coverage kernel of one tier at a fixed threshold
  struct Kernel {
    const Model* model;
    Tier k;
    double tau;
    std::shared_ptr<const CondTerms> cond;
    double operator()(std::size_t j, AssociationState s) const;
  };

  void build_grid(Tier k, const GridOptions& opt);
  Kernel kernel(Tier k, double tau) const;
  Kernel kernel_interpolated(Tier k, double tau) const;
  std::shared_ptr<const CondTerms> cond_terms(Tier k, double tau) const;
  double sweep_state(Tier k, AssociationState s, const std::function<double(std::size_t)>& f) const;
  // sum_j w_j f(j) sum_states cw u_s(j) K(j, s)
  double sweep_mix(Tier k, const Kernel& K, const std::function<double(std::size_t)>& f) const;
  double case_mass(CaseKind c) const;
  void ensure_rate_tables() const;
  double conditioned_log_rate_integral(Tier k, AssociationState s) const;

  ValidatedConfig cfg_;
  NumericsPolicy policy_;
  Exec exec_;
  std::shared_ptr<const InterferenceField> field_;
  std::array<TierParams, 4> tp_;
  int stride_ = 0;
  std::array<TierGrid, 4> grid_;
  CaseTable cases_;
  mutable std::once_flag rate_once_;
  mutable std::array<std::vector<double>, 4> rate_tables_;
  mutable std::mutex cond_mu_;
  mutable std::map<std::pair<int, double>, std::shared_ptr<const CondTerms>> cond_cache_;
};

}  // namespace mmv2x
