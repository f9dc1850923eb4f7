#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmv2x/sweep.hpp"

using namespace mmv2x;

namespace {

namespace fs = std::filesystem;

SweepSpec speed_spec() {
  SweepSpec s;
  s.param = "speed_kmh";
  s.values = {0.0, 60.0, 120.0};
  s.metrics = {Metric::Connectivity, Metric::SinrCoverage};
  return s;
}

bool same_rows(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same_as(b[i])) return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<ResultRow> sample_rows() {
  const double nan = std::nan("");
  return {
      {"speed_kmh", 0.0, "pc", "analytic", 0.6876543210987654, nan, nan, 1.1650173e-4, 812.5, ""},
      {"speed_kmh", 0.0, "pc", "mc", 0.68125, 0.678, 0.684, 0.0, 1.0 / 3.0, ""},
      {"speed_kmh", 1e-300, "delay", "analytic", kInf, nan, nan, 2.5e-17, 0.1, "quadrature, \"did not\" converge"},
      {"speed_kmh", -0.0, "rc", "mc", nan, nan, nan, 0.0, 5e-324, "line one\nline two"},
  };
}

}  // namespace

TEST_CASE("engine and format names") {
  CHECK(parse_engine("analytic") == Engine::Analytic);
  CHECK(parse_engine("mc") == Engine::MonteCarlo);
  CHECK(parse_engine("montecarlo") == Engine::MonteCarlo);
  CHECK(parse_engine("both") == Engine::Both);
  CHECK_THROWS_AS(parse_engine("fast"), std::invalid_argument);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("json") == Format::Json);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("grids and sweep arguments") {
  CHECK(linear_grid(0.0, 120.0, 7) == std::vector<double>{0, 20, 40, 60, 80, 100, 120});
  CHECK(linear_grid(3.0, 9.0, 1) == std::vector<double>{3.0});
  CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), std::invalid_argument);
  const auto [p, v] = parse_sweep_arg("sinr_threshold_db=-20:40:7");
  CHECK(p == "sinr_threshold_db");
  CHECK(v.size() == 7);
  CHECK(v.front() == -20.0);
  CHECK(v.back() == 40.0);
  CHECK_THROWS_AS(parse_sweep_arg("speed=0:10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep_arg("speed=0:10:2.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep_arg("=0:10:3"), std::invalid_argument);
}

TEST_CASE("sweep spec checks") {
  SweepSpec s = speed_spec();
  CHECK_NOTHROW(check(s));
  s.values = {120.0, 60.0, 0.0};
  CHECK_NOTHROW(check(s));
  s.values = {0.0, 60.0, 60.0};
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s.values = {0.0, 60.0, 30.0};
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s.values = {};
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s = speed_spec();
  s.values = {0.0, kInf};
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s = speed_spec();
  s.param = "sped";
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s.param = "mc_drops";
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s.param = "load_mode";
  CHECK_THROWS_AS(check(s), std::invalid_argument);
  s = speed_spec();
  s.metrics.clear();
  CHECK_THROWS_AS(check(s), std::invalid_argument);
}

TEST_CASE("planned rows are ordered by grid point, metric, then engine") {
  SweepSpec s = speed_spec();
  s.engine = Engine::Both;
  const auto rows = plan_rows(s);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].value == 0.0);
  CHECK(rows[0].metric == "pc");
  CHECK(rows[0].engine == "analytic");
  CHECK(rows[1].engine == "mc");
  CHECK(rows[2].metric == "sc");
  CHECK(rows[4].value == 60.0);
  for (const auto& r : rows) CHECK(std::isnan(r.estimate));
}

TEST_CASE("empty results give a header-only CSV") {
  std::ostringstream os;
  write_csv(os, {});
  CHECK(os.str() == std::string(kCsvHeader) + "\n");
  std::istringstream is(os.str());
  CHECK(read_csv(is).empty());
}

TEST_CASE("CSV round trip is exact, including non-finite values and quoting") {
  const auto rows = sample_rows();
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream is(os.str());
  CHECK(same_rows(read_csv(is), rows));
  std::istringstream bad("sweep_param,value\n");
  CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}

TEST_CASE("JSON round trip is exact and carries the config") {
  SweepResult r;
  r.rows = sample_rows();
  r.config = to_json(SystemConfig{}, NumericsPolicy{});
  const nlohmann::json j = to_json(r);
  const SweepResult back = sweep_result_from_json(nlohmann::json::parse(j.dump()));
  CHECK(same_rows(back.rows, r.rows));
  CHECK(back.config == r.config);
}

TEST_CASE("emit to an unwritable path is an error") {
  SweepResult r;
  CHECK_THROWS_AS(emit(r, Format::Csv, fs::path("/nonexistent-dir/out.csv")), std::runtime_error);
  const fs::path p = fs::temp_directory_path() / "mmv2x_emit_test.csv";
  emit(r, Format::Csv, p);
  CHECK(slurp(p) == std::string(kCsvHeader) + "\n");
  fs::remove(p);
}

TEST_CASE("run_sweep: analytic rows, tail mass and determinism") {
  SweepSpec s = speed_spec();
  s.values = {0.0, 120.0};
  const SweepResult r = run_sweep(s);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.error.empty());
    CHECK(row.tail_mass > 0.0);
    CHECK(row.tail_mass < 1e-3);
    CHECK(std::isnan(row.ci_lo));
    CHECK(row.runtime_ms >= 0.0);
  }
  // v = 0: PC equals SC
  CHECK(r.rows[0].estimate == doctest::Approx(r.rows[1].estimate).epsilon(1e-10));
  CHECK(r.rows[2].estimate < r.rows[0].estimate);
  CHECK(r.config == to_json(s.base, s.policy));

  s.engine = Engine::MonteCarlo;
  s.policy.mc_drops = 2000;
  s.exec = Exec::Serial;
  const SweepResult a = run_sweep(s);
  s.exec = Exec::Parallel;
  const SweepResult b = run_sweep(s);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].estimate == b.rows[i].estimate);
    CHECK(a.rows[i].ci_lo == b.rows[i].ci_lo);
    CHECK(a.rows[i].tail_mass == 0.0);
    CHECK(a.rows[i].ci_lo <= a.rows[i].estimate);
  }
}

TEST_CASE("a failing grid point is recorded in its row and the sweep continues") {
  SweepSpec s;
  s.param = "cache_size";
  s.values = {50.0, 150.0};
  s.metrics = {Metric::PLocal};
  const SweepResult r = run_sweep(s);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error.empty());
  CHECK(r.rows[0].estimate == doctest::Approx(0.5));
  CHECK_FALSE(r.rows[1].error.empty());
  CHECK(std::isnan(r.rows[1].estimate));
}

TEST_CASE("verify pairs analytic and simulator rows") {
  SweepResult r;
  const double nan = std::nan("");
  r.rows = {
      {"speed_kmh", 0.0, "pc", "analytic", 0.50, nan, nan, 1e-4, 1.0, ""},
      {"speed_kmh", 0.0, "pc", "mc", 0.52, 0.51, 0.53, 0.0, 1.0, ""},
      {"speed_kmh", 60.0, "pc", "analytic", 0.40, nan, nan, 1e-4, 1.0, ""},
      {"speed_kmh", 60.0, "pc", "mc", 0.45, 0.44, 0.46, 0.0, 1.0, ""},
      {"speed_kmh", 120.0, "pc", "analytic", nan, nan, nan, nan, 1.0, "boom"},
      {"speed_kmh", 120.0, "pc", "mc", 0.30, 0.29, 0.31, 0.0, 1.0, ""},
  };
  const auto v = verify(r, 0.03);
  REQUIRE(v.size() == 3);
  CHECK(v[0].pass);
  CHECK(v[0].diff == doctest::Approx(0.02));
  CHECK_FALSE(v[1].pass);
  CHECK_FALSE(v[2].pass);
}

TEST_CASE("recipes load from JSON documents") {
  const Recipe a = load_recipe(nlohmann::json{{"_sweep", "speed_kmh=0:120:7"},
                                              {"_metrics", "pc,delay"},
                                              {"_engine", "both"},
                                              {"_description", "demo"},
                                              {"beamwidth_bs_deg", 20.0}});
  CHECK(a.spec.param == "speed_kmh");
  CHECK(a.spec.values.size() == 7);
  CHECK(a.spec.metrics == std::vector<Metric>{Metric::Connectivity, Metric::Delay});
  CHECK(a.spec.engine == Engine::Both);
  CHECK(a.description == "demo");
  CHECK(a.spec.base.beamwidth_bs == doctest::Approx(20.0 * std::numbers::pi / 180.0));

  const Recipe b = load_recipe(
      nlohmann::json{{"_param", "lambda_bs_per_km2"}, {"_values", {1, 2, 5}}, {"_metrics", {"pc"}}, {"mc_drops", 500}});
  CHECK(b.spec.values == std::vector<double>{1, 2, 5});
  CHECK(b.spec.policy.mc_drops == 500u);
  CHECK(b.spec.engine == Engine::Analytic);
  CHECK_THROWS(load_recipe(nlohmann::json{{"_metrics", "pc"}, {"bogus_key", 1}}));
  CHECK_THROWS(load_recipe(fs::path("/nonexistent/recipe.json")));
}

TEST_CASE("figure recipes produce the documented column sets") {
  int n = 0;
  for (const auto& e : fs::directory_iterator(MMV2X_RECIPE_DIR)) {
    if (e.path().extension() != ".json") continue;
    const std::string name = e.path().stem().string();
    if (name.rfind("fig", 0) != 0) continue;
    INFO("recipe " << name);
    const Recipe r = load_recipe(e.path());
    CHECK_NOTHROW(check(r.spec));
    CHECK_FALSE(r.description.empty());
    std::ostringstream os;
    write_csv(os, plan_rows(r.spec));
    const fs::path golden = fs::path(MMV2X_GOLDEN_DIR) / (name + ".csv");
    REQUIRE(fs::exists(golden));
    CHECK(os.str() == slurp(golden));
    ++n;
  }
  CHECK(n == 12);
}
