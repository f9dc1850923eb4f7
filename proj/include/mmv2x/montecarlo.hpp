#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "mmv2x/association.hpp"
#include "mmv2x/parallel.hpp"

namespace mmv2x {

/// Outcome of one simulated drop.
struct DropRecord {
  CaseKind kind = CaseKind::Local;
  Tier tier = Tier::LosBs;      // serving tier; meaningless for Local
  AssociationState state{};     // (n, m) of the serving contact
  double distance = 0.0;        // serving distance, m
  double sinr = 0.0;            // linear; +inf for Local
  bool sojourn = true;          // stays inside the serving beam for the whole slot
  double conn_time = 0.0;       // min(t_s, exit time), s
  double load = 1.0;            // N used for the rate
  double rate = 0.0;            // bit/s
  std::uint32_t redraws = 0;    // topologies rejected for lack of any server

  bool covered(double tau) const { return kind == CaseKind::Local || sinr > tau; }
  bool connected(double tau) const { return covered(tau) && sojourn; }
  bool rate_covered(double rho) const { return kind == CaseKind::Local || rate > rho; }
};

struct McOptions {
  std::uint64_t drops = 100000;
  std::uint64_t seed = 1;
  double window_radius = 2000.0;
  bool walk_only = false;  // association only: no SINR, motion or rate
  Exec exec = Exec::Parallel;

  static McOptions from(const NumericsPolicy& p) { return {p.mc_drops, p.mc_seed, p.mc_window_radius}; }
};

/// Load N for a serving (tier, state); used in LoadMode::Analytic.
using LoadFn = std::function<double(Tier, AssociationState)>;

/// Engine for a drop's random stream; depends only on (seed, index).
std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t index);

class Simulator {
 public:
  /// With LoadMode::Analytic and no `load`, loads come from the direct-route
  /// case table.
  Simulator(const ValidatedConfig& cfg, const NumericsPolicy& policy, LoadFn load = {});

  DropRecord run_drop(std::uint64_t drop, const McOptions& opt) const;
  std::vector<DropRecord> run(const McOptions& opt) const;

  const ValidatedConfig& config() const { return cfg_; }

 private:
  ValidatedConfig cfg_;
  NumericsPolicy policy_;
  LoadFn load_;
};

/// Exit distance from (x, 0) along direction `dir` (radians from +x) of the
/// wedge |angle| <= h with apex at the origin; +inf if the ray never leaves.
double wedge_exit_distance(double x, double h, double dir);

/// Samples of the n-th nearest distance of tier k, from the radial
/// construction of the parent process thinned by P_k(r).
std::vector<double> sample_nth_distance(const ValidatedConfig& cfg, Tier k, int n, std::size_t samples,
                                        std::uint64_t seed);

/// One line per record, space separated, with a header line.
void write_trace(std::ostream& os, std::span<const DropRecord> records);

}  // namespace mmv2x
