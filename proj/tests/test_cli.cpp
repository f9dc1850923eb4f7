#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "mmv2x/sweep.hpp"

using namespace mmv2x;

namespace {

struct Run {
  int status;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + MMV2X_CLI + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::vector<ResultRow> rows_of(const std::string& csv) {
  std::istringstream is(csv);
  return read_csv(is);
}

std::string recipe(const std::string& name) { return std::string(MMV2X_RECIPE_DIR) + "/" + name + ".json"; }

}  // namespace

TEST_CASE("dry run of a recipe plans its rows") {
  const Run r = cli("--config " + recipe("fig4a") + " --dry-run");
  CHECK(r.status == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 14);
  CHECK(rows[0].sweep_param == "sinr_threshold_db");
  CHECK(rows[0].metric == "sc");
  CHECK(rows[1].metric == "pc");
}

TEST_CASE("usage and configuration errors exit with 2") {
  CHECK(cli("--sweep speed_kmh=0:10 --dry-run").status == 2);
  CHECK(cli("--sweep sped=0:10:2 --dry-run").status == 2);
  CHECK(cli("--set bogus=1 --sweep speed_kmh=0:10:2 --dry-run").status == 2);
  CHECK(cli("--set cache_size=500 --sweep speed_kmh=0:10:2 --metric pc").status == 0);
  CHECK(cli("--sweep speed_kmh=0:10:2 --metric nonsense").status == 2);
  CHECK(cli("--sweep speed_kmh=0:10:2 --metric pc --out /nonexistent-dir/x.csv").status == 2);
  CHECK(cli("--config /nonexistent/recipe.json").status == 2);
  CHECK(cli("--format xml").status != 0);
}

TEST_CASE("a failing grid point keeps its row") {
  const Run r = cli("--set cache_size=500 --sweep speed_kmh=0:10:2 --metric pc");
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) CHECK_FALSE(row.error.empty());
}

TEST_CASE("json output carries the resolved config") {
  const Run r = cli("--sweep cache_size=0:20:3 --metric p_local --format json --set speed_kmh=90");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const SweepResult s = sweep_result_from_json(doc);
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[1].estimate == doctest::Approx(0.1));
  CHECK(doc["config"]["speed"].get<double>() == doctest::Approx(25.0));
}

TEST_CASE("verify exits 0 within tolerance and 1 beyond it") {
  const std::string base = "--sweep cache_size=5:10:2 --metric p_local,p_v2v --drops 4000 --seed 3 --verify";
  const Run ok = cli(base + " --tol 0.05");
  CHECK(ok.status == 0);
  CHECK(rows_of(ok.out).size() == 8);
  CHECK(cli(base + " --tol 1e-9").status == 1);
}

TEST_CASE("MMV2X_THREADS does not change simulator output") {
  const std::string args = "--sweep speed_kmh=0:120:3 --metric pc,rc --engine mc --drops 1500 --seed 9";
  const auto a = rows_of(cli(args, "MMV2X_THREADS=1").out);
  const auto b = rows_of(cli(args, "MMV2X_THREADS=3").out);
  REQUIRE(a.size() == 6);
  REQUIRE(b.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].estimate == b[i].estimate);
    CHECK(a[i].ci_lo == b[i].ci_lo);
    CHECK(a[i].ci_hi == b[i].ci_hi);
  }
}

TEST_CASE("speed sweep, PC, both engines: analytic inside the MC interval at >= 90% of points") {
  const Run r = cli("--sweep speed_kmh=0:120:7 --metric pc --engine both --drops 10000 --seed 1");
  REQUIRE(r.status == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 14);
  int inside = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    REQUIRE(rows[i].engine == "analytic");
    REQUIRE(rows[i + 1].engine == "mc");
    inside += rows[i].estimate >= rows[i + 1].ci_lo && rows[i].estimate <= rows[i + 1].ci_hi;
  }
  INFO("inside " << inside << " of 7");
  CHECK(inside >= 0.9 * 7);
}
