#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmv2x/montecarlo.hpp"
#include "mmv2x/performance.hpp"

namespace mmv2x {

/// Quantities both engines can report.
enum class Metric {
  SinrCoverage,     // sc: P(SINR > sinr_threshold)
  Connectivity,     // pc: covered and stays in the beam
  RateCoverage,     // rc: P(rate > rate_threshold)
  PLocal,           // p_local
  PV2i,             // p_v2i
  PV2v,             // p_v2v
  ConnTime,         // conn_time: E[t] over non-local requests, s
  AvgRate,          // avg_rate: E[R] over non-local requests, bit/s
  Throughput,       // throughput: sum of state weights times E[R] E[t], bits per slot
  ThroughputJoint,  // throughput_joint: E[R t] per drop; simulator only
  Delay,            // delay: (1 - p_h) S / T, slots
};

inline constexpr Metric kAllMetrics[] = {Metric::SinrCoverage, Metric::Connectivity, Metric::RateCoverage,
                                         Metric::PLocal,       Metric::PV2i,         Metric::PV2v,
                                         Metric::ConnTime,     Metric::AvgRate,      Metric::Throughput,
                                         Metric::ThroughputJoint, Metric::Delay};

std::string_view to_string(Metric m);
/// Throws std::invalid_argument for an unknown name.
Metric parse_metric(std::string_view name);

/// Point estimate with a 95% normal-approximation interval. `empty` marks a
/// stratum with no samples; its numbers are NaN.
struct Estimate {
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t count = 0;
  bool empty = false;

  double half_width() const { return 0.5 * (ci_hi - ci_lo); }
  bool contains(double x) const { return x >= ci_lo && x <= ci_hi; }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Sample mean and interval of iid values, summed in order.
Estimate mean_estimate(std::span<const double> values);

/// Serving-contact key. Local drops use tier LosBs and state (0, 0).
struct Stratum {
  CaseKind kind;
  Tier tier;
  AssociationState state;
  auto operator<=>(const Stratum&) const = default;
};

Stratum stratum_of(const DropRecord& r);

/// MC estimate of `metric` from drop records, which must be in drop order.
/// Ratio metrics (throughput, delay) take their interval from batch means.
Estimate estimate(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg);

/// Same, restricted to the records of one stratum; flagged empty if none.
Estimate estimate(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg,
                  const Stratum& stratum);

/// Every non-empty stratum present in the records.
std::map<Stratum, Estimate> stratify(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg);

/// Analytic value of `metric`; nullopt when the metric has no closed form.
/// `perf` is required for the rate, time, throughput and delay metrics.
std::optional<double> analytic_value(const Model& model, const PerfBreakdown* perf, Metric metric);

/// True if the analytic value needs evaluate_performance.
bool needs_performance(Metric metric);

}  // namespace mmv2x
