#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmv2x/estimate.hpp"

namespace mmv2x {

enum class Engine { Analytic, MonteCarlo, Both };

std::string_view to_string(Engine e);
/// Accepts analytic, mc, montecarlo, both.
Engine parse_engine(std::string_view name);

struct SweepSpec {
  SystemConfig base;
  NumericsPolicy policy;
  std::string param;           // a SystemConfig key, unit-suffixed spellings allowed
  std::vector<double> values;  // in the units of `param`
  std::vector<Metric> metrics;
  Engine engine = Engine::Analytic;
  Exec exec = Exec::Parallel;
};

/// Throws std::invalid_argument unless the parameter is a sweepable system
/// field, the grid is nonempty and strictly monotone, and metrics are given.
void check(const SweepSpec& spec);

/// lo, lo + h, ..., hi with `steps` points; steps = 1 gives {lo}.
std::vector<double> linear_grid(double lo, double hi, int steps);

/// Parses "param=lo:hi:steps" into the parameter and a linear grid.
std::pair<std::string, std::vector<double>> parse_sweep_arg(std::string_view arg);

/// One grid point, metric and engine. Analytic rows have NaN interval
/// bounds; simulator rows have tail_mass 0. A failed evaluation keeps its
/// row with NaN numbers and the message in `error`.
struct ResultRow {
  std::string sweep_param;
  double value = 0.0;
  std::string metric;
  std::string engine;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double tail_mass = 0.0;
  double runtime_ms = 0.0;  // wall time of the engine at this grid point
  std::string error;

  /// Field-wise equality with NaN equal to NaN.
  bool same_as(const ResultRow& o) const;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // grid index, then metric, then engine
  nlohmann::json config;        // resolved base configuration
};

/// Rows the spec will produce, numbers left NaN.
std::vector<ResultRow> plan_rows(const SweepSpec& spec);

SweepResult run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "sweep_param,value,metric,engine,estimate,ci_lo,ci_hi,tail_mass,runtime_ms,error";

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

nlohmann::json to_json(const SweepResult& result);
SweepResult sweep_result_from_json(const nlohmann::json& doc);

enum class Format { Csv, Json };
Format parse_format(std::string_view name);

/// Writes to `path`; throws std::runtime_error if it cannot be opened.
void emit(const SweepResult& result, Format format, const std::filesystem::path& path);
void emit(const SweepResult& result, Format format, std::ostream& os);

/// Paired analytic/simulator comparison of one grid point and metric.
struct VerifyPoint {
  double value;
  std::string metric;
  double analytic;
  double mc;
  double diff;
  bool pass;
};

/// Pairs the analytic and simulator rows of a Both sweep; a point fails if
/// |analytic - mc| > tol or either side errored.
std::vector<VerifyPoint> verify(const SweepResult& result, double tol);

/// A sweep stored as a flat configuration document. Keys starting with an
/// underscore describe the sweep: _sweep ("param=lo:hi:steps"), or _param
/// with _values; _metrics (list); _engine. Every other key is a config
/// field.
struct Recipe {
  SweepSpec spec;
  std::string description;
};

Recipe load_recipe(const nlohmann::json& doc);
Recipe load_recipe(const std::filesystem::path& path);

}  // namespace mmv2x
