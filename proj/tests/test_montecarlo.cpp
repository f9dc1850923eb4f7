#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mmv2x/estimate.hpp"
#include "mmv2x/mobility.hpp"
#include "mmv2x/montecarlo.hpp"

using namespace mmv2x;

namespace {

constexpr double kPi = std::numbers::pi;

bool same(const DropRecord& a, const DropRecord& b) {
  return a.kind == b.kind && a.tier == b.tier && a.state == b.state && a.distance == b.distance && a.sinr == b.sinr &&
         a.sojourn == b.sojourn && a.conn_time == b.conn_time && a.load == b.load && a.rate == b.rate &&
         a.redraws == b.redraws;
}

bool same(const std::vector<DropRecord>& a, const std::vector<DropRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

McOptions drops(std::uint64_t n, std::uint64_t seed) {
  McOptions o;
  o.drops = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("drop streams depend only on seed and index") {
  auto a = drop_engine(7, 12), b = drop_engine(7, 12), c = drop_engine(7, 13), d = drop_engine(8, 12);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("identical seed reproduces the record stream across runs, exec modes and thread counts") {
  const Simulator sim(validate(SystemConfig{}), NumericsPolicy{});
  McOptions o = drops(3000, 5);
  o.exec = Exec::Serial;
  const auto ref = sim.run(o);
  CHECK(same(ref, sim.run(o)));
  o.exec = Exec::Parallel;
  const int before = max_threads();
  for (int t : {1, 2, 4}) {
    set_threads(t);
    INFO("threads " << t);
    CHECK(same(ref, sim.run(o)));
  }
  set_threads(before);
  CHECK(same(sim.run_drop(1234, o), ref[1234]));
  CHECK_FALSE(same(ref, sim.run(drops(3000, 6))));
}

TEST_CASE("record invariants") {
  const Simulator sim(validate(SystemConfig{}), NumericsPolicy{});
  const auto rec = sim.run(drops(5000, 9));
  const double ts = sim.config()->slot;
  for (const auto& r : rec) {
    if (r.connected(1.0)) {
      CHECK(r.covered(1.0));
      CHECK(r.sojourn);
    }
    if (r.kind == CaseKind::Local) {
      CHECK(r.connected(1e9));
      continue;
    }
    CHECK(r.state.n >= 1);
    CHECK(r.state.m < r.state.n);
    CHECK(r.distance > 0.0);
    CHECK(r.sinr >= 0.0);
    CHECK(r.conn_time > 0.0);
    CHECK(r.conn_time <= ts);
    CHECK(r.sojourn == (r.conn_time == ts));
    CHECK(r.load >= 1.0);
    CHECK(case_of(r.tier) == r.kind);
  }
}

TEST_CASE("p_h = 1 gives only local drops") {
  SystemConfig s;
  s.cache_size = s.catalog_size;
  const Simulator sim(validate(s), NumericsPolicy{});
  for (const auto& r : sim.run(drops(2000, 3))) CHECK(r.kind == CaseKind::Local);
}

TEST_CASE("vanishing V-UE density with p_h = 0 gives only V2I drops") {
  SystemConfig s;
  s.cache_size = 0;
  s.lambda_vue = 1e-12;
  const Simulator sim(validate(s, {.density_order = false}), NumericsPolicy{});
  McOptions o = drops(2000, 3);
  o.walk_only = true;
  for (const auto& r : sim.run(o)) CHECK(r.kind == CaseKind::V2I);
}

TEST_CASE("wedge exit distance geometry") {
  const double x = 10.0, h = kPi / 4.0;
  CHECK(wedge_exit_distance(x, h, 0.0) == kInf);
  CHECK(wedge_exit_distance(x, h, kPi / 2.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(wedge_exit_distance(x, h, -kPi / 2.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(wedge_exit_distance(x, h, kPi) == doctest::Approx(10.0).epsilon(1e-12));
  // theta is measured from the direction back at the apex
  for (double th = 0.01; th < kPi - h - 0.01; th += 0.05) {
    CHECK(wedge_exit_distance(x, h, kPi - th) == doctest::Approx(max_traverse_distance(x, th, 2.0 * h)).epsilon(1e-12));
    CHECK(wedge_exit_distance(x, h, kPi + th) == doctest::Approx(max_traverse_distance(x, th, 2.0 * h)).epsilon(1e-12));
  }
  for (double dir = -h + 1e-6; dir < h; dir += 0.01) CHECK(wedge_exit_distance(x, h, dir) == kInf);
}

TEST_CASE("simulated case split matches the analytic case probabilities within 0.01 at 1e5 drops") {
  const ValidatedConfig c = validate(SystemConfig{});
  const NumericsPolicy p;
  const CaseTable t = case_probabilities(c, p);
  const Simulator sim(c, p);
  McOptions o = drops(100000, 11);
  o.walk_only = true;
  const auto rec = sim.run(o);
  const SystemConfig& s = c.params();
  const double local = estimate(rec, Metric::PLocal, s).mean;
  const double v2i = estimate(rec, Metric::PV2i, s).mean;
  const double v2v = estimate(rec, Metric::PV2v, s).mean;
  CHECK(local + v2i + v2v == doctest::Approx(1.0));
  CHECK(std::abs(local - t.p_local) <= 0.01);
  CHECK(std::abs(v2i - t.p_v2i) <= 0.01);
  CHECK(std::abs(v2v - t.p_v2v) <= 0.01);
}

TEST_CASE("doubling the window moves SC and PC by less than the interval width") {
  SystemConfig s;
  s.sinr_threshold = 1.0;
  const Simulator sim(validate(s), NumericsPolicy{});
  McOptions small = drops(10000, 17), large = drops(10000, 17);
  large.window_radius = 2.0 * small.window_radius;
  const auto a = sim.run(small), b = sim.run(large);
  for (Metric m : {Metric::SinrCoverage, Metric::Connectivity}) {
    const Estimate ea = estimate(a, m, s), eb = estimate(b, m, s);
    INFO(to_string(m) << " " << ea.mean << " vs " << eb.mean);
    CHECK(std::abs(ea.mean - eb.mean) < ea.ci_hi - ea.ci_lo);
  }
}

TEST_CASE("trace output has a header and one line per record") {
  const Simulator sim(validate(SystemConfig{}), NumericsPolicy{});
  const auto rec = sim.run(drops(50, 2));
  std::ostringstream os;
  write_trace(os, rec);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "case tier n m distance sinr sojourn conn_time load rate redraws");
  int n = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    int fields = 0;
    std::string f;
    while (ls >> f) ++fields;
    CHECK(fields == 11);
    ++n;
  }
  CHECK(n == 50);
}
