#include "mmv2x/estimate.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mmv2x {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInfd = std::numeric_limits<double>::infinity();
constexpr std::size_t kBatches = 20;

struct MetricName {
  Metric metric;
  std::string_view name;
};

constexpr MetricName kNames[] = {
    {Metric::SinrCoverage, "sc"},  {Metric::Connectivity, "pc"},   {Metric::RateCoverage, "rc"},
    {Metric::PLocal, "p_local"},   {Metric::PV2i, "p_v2i"},        {Metric::PV2v, "p_v2v"},
    {Metric::ConnTime, "conn_time"}, {Metric::AvgRate, "avg_rate"}, {Metric::Throughput, "throughput"},
    {Metric::ThroughputJoint, "throughput_joint"}, {Metric::Delay, "delay"},
};

Estimate empty_estimate() { return {kNaN, kNaN, kNaN, 0, true}; }

// per-drop sample of a mean-type metric; nullopt excludes the drop
std::optional<double> sample(const DropRecord& r, Metric m, const SystemConfig& cfg) {
  const bool local = r.kind == CaseKind::Local;
  switch (m) {
    case Metric::SinrCoverage: return r.covered(cfg.sinr_threshold) ? 1.0 : 0.0;
    case Metric::Connectivity: return r.connected(cfg.sinr_threshold) ? 1.0 : 0.0;
    case Metric::RateCoverage: return r.rate_covered(cfg.rate_threshold) ? 1.0 : 0.0;
    case Metric::PLocal: return local ? 1.0 : 0.0;
    case Metric::PV2i: return r.kind == CaseKind::V2I ? 1.0 : 0.0;
    case Metric::PV2v: return r.kind == CaseKind::V2V ? 1.0 : 0.0;
    case Metric::ConnTime: return local ? std::nullopt : std::optional<double>(r.conn_time);
    case Metric::AvgRate: return local ? std::nullopt : std::optional<double>(r.rate);
    case Metric::ThroughputJoint: return r.rate * r.conn_time;
    default: break;
  }
  return std::nullopt;
}

// sum over strata of freq * mean rate * mean connection time
double product_throughput(std::span<const DropRecord> records, const SystemConfig& cfg, double* p_local) {
  struct Acc {
    std::uint64_t count = 0;
    double rate = 0.0;
    double time = 0.0;
  };
  std::map<Stratum, Acc> acc;
  std::uint64_t local = 0;
  for (const DropRecord& r : records) {
    if (r.kind == CaseKind::Local) {
      ++local;
      continue;
    }
    Acc& a = acc[stratum_of(r)];
    ++a.count;
    a.rate += r.rate;
    a.time += r.conn_time;
  }
  const double total = static_cast<double>(records.size());
  double t = static_cast<double>(local) / total * cfg.local_rate * cfg.slot;
  for (const auto& [s, a] : acc) {
    const double c = static_cast<double>(a.count);
    t += c / total * (a.rate / c) * (a.time / c);
  }
  if (p_local) *p_local = static_cast<double>(local) / total;
  return t;
}

double ratio_statistic(std::span<const DropRecord> records, Metric m, const SystemConfig& cfg) {
  double p_local = 0.0;
  const double t = product_throughput(records, cfg, &p_local);
  if (m == Metric::Throughput) return t;
  return delay_slots(p_local, cfg.content_bits, t);
}

Estimate batch_estimate(std::span<const DropRecord> records, Metric m, const SystemConfig& cfg) {
  if (records.empty()) return empty_estimate();
  Estimate e;
  e.count = records.size();
  e.mean = ratio_statistic(records, m, cfg);
  if (records.size() < 2 * kBatches) {
    e.ci_lo = -kInfd;
    e.ci_hi = kInfd;
    return e;
  }
  std::vector<double> batch(kBatches);
  const std::size_t n = records.size();
  for (std::size_t b = 0; b < kBatches; ++b) {
    const std::size_t lo = b * n / kBatches, hi = (b + 1) * n / kBatches;
    batch[b] = ratio_statistic(records.subspan(lo, hi - lo), m, cfg);
  }
  const Estimate be = mean_estimate(batch);
  const double half = be.half_width();
  e.ci_lo = e.mean - half;
  e.ci_hi = e.mean + half;
  return e;
}

bool is_ratio(Metric m) { return m == Metric::Throughput || m == Metric::Delay; }

}  // namespace

std::string_view to_string(Metric m) {
  for (const auto& n : kNames)
    if (n.metric == m) return n.name;
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.metric;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

Estimate mean_estimate(std::span<const double> values) {
  if (values.empty()) return empty_estimate();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  Estimate e;
  e.mean = mean;
  e.count = values.size();
  if (values.size() < 2) {
    e.ci_lo = -kInfd;
    e.ci_hi = kInfd;
    return e;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double half = kZ95 * std::sqrt(ss / (n - 1.0) / n);
  e.ci_lo = mean - half;
  e.ci_hi = mean + half;
  return e;
}

Stratum stratum_of(const DropRecord& r) {
  if (r.kind == CaseKind::Local) return {CaseKind::Local, Tier::LosBs, {0, 0}};
  return {r.kind, r.tier, r.state};
}

Estimate estimate(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg) {
  if (is_ratio(metric)) return batch_estimate(records, metric, cfg);
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const DropRecord& r : records)
    if (auto v = sample(r, metric, cfg)) xs.push_back(*v);
  return mean_estimate(xs);
}

Estimate estimate(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg,
                  const Stratum& stratum) {
  std::vector<DropRecord> sub;
  for (const DropRecord& r : records)
    if (stratum_of(r) == stratum) sub.push_back(r);
  if (sub.empty()) return empty_estimate();
  return estimate(sub, metric, cfg);
}

std::map<Stratum, Estimate> stratify(std::span<const DropRecord> records, Metric metric, const SystemConfig& cfg) {
  std::map<Stratum, std::vector<DropRecord>> groups;
  for (const DropRecord& r : records) groups[stratum_of(r)].push_back(r);
  std::map<Stratum, Estimate> out;
  for (const auto& [s, g] : groups) {
    const Estimate e = estimate(g, metric, cfg);
    if (!e.empty) out.emplace(s, e);
  }
  return out;
}

bool needs_performance(Metric m) {
  return m == Metric::ConnTime || m == Metric::AvgRate || m == Metric::Throughput || m == Metric::Delay;
}

std::optional<double> analytic_value(const Model& model, const PerfBreakdown* perf, Metric metric) {
  const SystemConfig& c = model.config().params();
  const CaseTable& ct = model.cases();
  if (needs_performance(metric) && !perf) throw std::invalid_argument("analytic_value: performance breakdown required");
  auto state_mean = [&](const std::function<double(const StatePerf&)>& f) {
    double num = 0.0, den = 0.0;
    for (const StatePerf& s : perf->states) {
      num += s.weight * f(s);
      den += s.weight;
    }
    return den > 0.0 ? num / den : kNaN;
  };
  switch (metric) {
    case Metric::SinrCoverage: return model.sinr_coverage(c.sinr_threshold);
    case Metric::Connectivity: return model.connectivity(c.sinr_threshold);
    case Metric::RateCoverage: return model.rate_coverage(c.rate_threshold);
    case Metric::PLocal: return ct.p_local;
    case Metric::PV2i: return ct.p_v2i;
    case Metric::PV2v: return ct.p_v2v;
    case Metric::ConnTime: return state_mean([](const StatePerf& s) { return s.avg_conn_time; });
    case Metric::AvgRate: return state_mean([](const StatePerf& s) { return s.avg_rate; });
    case Metric::Throughput: return perf->throughput_total;
    case Metric::Delay: return perf->delay_slots;
    case Metric::ThroughputJoint: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace mmv2x
