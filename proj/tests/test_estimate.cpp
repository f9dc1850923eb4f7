#include <doctest.h>

#include <cmath>
#include <vector>

#include "mmv2x/estimate.hpp"

using namespace mmv2x;

namespace {

DropRecord v2i(Tier t, AssociationState s, double sinr, double rate, double conn) {
  DropRecord r;
  r.kind = case_of(t);
  r.tier = t;
  r.state = s;
  r.distance = 10.0;
  r.sinr = sinr;
  r.rate = rate;
  r.conn_time = conn;
  r.sojourn = conn == 0.1;
  return r;
}

DropRecord local() {
  DropRecord r;
  r.sinr = kInf;
  r.conn_time = 0.1;
  return r;
}

}  // namespace

TEST_CASE("metric names round trip") {
  for (Metric m : kAllMetrics) CHECK(parse_metric(to_string(m)) == m);
  CHECK(parse_metric("pc") == Metric::Connectivity);
  CHECK_THROWS_AS(parse_metric("coverage"), std::invalid_argument);
}

TEST_CASE("mean estimate") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const Estimate e = mean_estimate(x);
  const double sd = std::sqrt(5.0 / 3.0);
  CHECK(e.mean == 2.5);
  CHECK(e.count == 4);
  CHECK(e.half_width() == doctest::Approx(kZ95 * sd / 2.0).epsilon(1e-14));
  CHECK(e.contains(2.5));
  const std::vector<double> one{7.0};
  const Estimate e1 = mean_estimate(one);
  CHECK(e1.mean == 7.0);
  CHECK(std::isinf(e1.half_width()));
  const Estimate e0 = mean_estimate(std::vector<double>{});
  CHECK(e0.empty);
  CHECK(std::isnan(e0.mean));
}

TEST_CASE("indicator metrics, strata and the product throughput on fixed records") {
  SystemConfig cfg;
  cfg.sinr_threshold = 1.0;
  cfg.rate_threshold = 5e8;
  cfg.slot = 0.1;
  cfg.local_rate = 0.0;
  std::vector<DropRecord> rec{
      local(),
      v2i(Tier::LosBs, {1, 0}, 3.0, 1e9, 0.1),
      v2i(Tier::LosBs, {1, 0}, 0.5, 2e8, 0.05),
      v2i(Tier::NlosVue, {2, 1}, 2.0, 6e8, 0.1),
  };
  CHECK(estimate(rec, Metric::SinrCoverage, cfg).mean == 0.75);
  CHECK(estimate(rec, Metric::Connectivity, cfg).mean == 0.75);
  CHECK(estimate(rec, Metric::RateCoverage, cfg).mean == 0.75);
  CHECK(estimate(rec, Metric::PLocal, cfg).mean == 0.25);
  CHECK(estimate(rec, Metric::PV2i, cfg).mean == 0.5);
  CHECK(estimate(rec, Metric::PV2v, cfg).mean == 0.25);
  CHECK(estimate(rec, Metric::ConnTime, cfg).mean == doctest::Approx(0.25 / 3.0));
  CHECK(estimate(rec, Metric::ConnTime, cfg).count == 3);
  CHECK(estimate(rec, Metric::AvgRate, cfg).mean == doctest::Approx(1.8e9 / 3.0));
  CHECK(estimate(rec, Metric::ThroughputJoint, cfg).mean == doctest::Approx((1e8 + 1e7 + 6e7) / 4.0));

  // sum over strata of frequency * mean rate * mean time
  const double t = 0.5 * 6e8 * 0.075 + 0.25 * 6e8 * 0.1;
  CHECK(estimate(rec, Metric::Throughput, cfg).mean == doctest::Approx(t));
  CHECK(estimate(rec, Metric::Delay, cfg).mean == doctest::Approx(0.75 * cfg.content_bits / t));

  const Estimate s = estimate(rec, Metric::SinrCoverage, cfg, Stratum{CaseKind::V2I, Tier::LosBs, {1, 0}});
  CHECK(s.mean == 0.5);
  CHECK(s.count == 2);
  const Estimate none = estimate(rec, Metric::SinrCoverage, cfg, Stratum{CaseKind::V2I, Tier::NlosBs, {3, 0}});
  CHECK(none.empty);
  CHECK(std::isnan(none.mean));

  const auto strata = stratify(rec, Metric::PLocal, cfg);
  CHECK(strata.size() == 3);
  std::uint64_t total = 0;
  for (const auto& [k, e] : strata) total += e.count;
  CHECK(total == rec.size());
}

TEST_CASE("simulated SC as the threshold vanishes is one") {
  SystemConfig cfg;
  cfg.sinr_threshold = 1e-30;
  const Simulator sim(validate(cfg), NumericsPolicy{});
  McOptions o;
  o.drops = 2000;
  const auto rec = sim.run(o);
  const Estimate e = estimate(rec, Metric::SinrCoverage, cfg);
  CHECK(e.mean == 1.0);
  CHECK(e.contains(1.0));
}

TEST_CASE("interval width shrinks as one over root drops") {
  SystemConfig cfg;
  cfg.sinr_threshold = 1.0;
  const Simulator sim(validate(cfg), NumericsPolicy{});
  McOptions o;
  o.walk_only = true;
  o.drops = 1000;
  const auto a = sim.run(o);
  o.drops = 4000;
  const auto b = sim.run(o);
  for (Metric m : {Metric::PLocal, Metric::PV2v}) {
    const double r = estimate(a, m, cfg).half_width() / estimate(b, m, cfg).half_width();
    INFO(to_string(m) << " ratio " << r);
    CHECK(r == doctest::Approx(2.0).epsilon(0.2));
  }
}

TEST_CASE("analytic values by metric") {
  const Model model(validate(SystemConfig{}), NumericsPolicy{});
  const PerfBreakdown perf = evaluate_performance(model);
  const SystemConfig& c = model.config().params();
  CHECK(*analytic_value(model, &perf, Metric::Connectivity) == model.connectivity(c.sinr_threshold));
  CHECK(*analytic_value(model, nullptr, Metric::SinrCoverage) == model.sinr_coverage(c.sinr_threshold));
  CHECK(*analytic_value(model, nullptr, Metric::PV2v) == model.cases().p_v2v);
  CHECK(*analytic_value(model, &perf, Metric::Delay) == perf.delay_slots);
  CHECK_FALSE(analytic_value(model, &perf, Metric::ThroughputJoint).has_value());
  CHECK_THROWS_AS(analytic_value(model, nullptr, Metric::Throughput), std::invalid_argument);
  for (Metric m : kAllMetrics) {
    const bool needs = needs_performance(m);
    CHECK(needs == (m == Metric::ConnTime || m == Metric::AvgRate || m == Metric::Throughput || m == Metric::Delay));
  }
  const double t = *analytic_value(model, &perf, Metric::ConnTime);
  CHECK(t > 0.0);
  CHECK(t <= c.slot);
}
