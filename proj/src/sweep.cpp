#include "mmv2x/sweep.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mmv2x {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan" || s.empty()) return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return x;
}

bool same_double(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return a == b;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// RFC 4180 records; quoted fields may span lines
std::vector<std::vector<std::string>> csv_records(std::istream& is) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  char c;
  auto end_record = [&] {
    rec.push_back(std::move(field));
    field.clear();
    out.push_back(std::move(rec));
    rec.clear();
    any = false;
  };
  while (is.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any) end_record();
  return out;
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double json_double(const nlohmann::json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

ResultRow blank_row(const SweepSpec& spec, double value, Metric m, std::string_view engine) {
  return {spec.param, value, std::string(to_string(m)), std::string(engine), kNaN, kNaN, kNaN, kNaN, kNaN, {}};
}

bool case_metric(Metric m) { return m == Metric::PLocal || m == Metric::PV2i || m == Metric::PV2v; }

void fail_all(std::vector<ResultRow*>& rows, const std::string& msg, double runtime) {
  for (ResultRow* r : rows) {
    if (!r->error.empty()) continue;
    r->estimate = r->ci_lo = r->ci_hi = kNaN;
    r->runtime_ms = runtime;
    r->error = msg;
  }
}

void run_analytic(const SweepSpec& spec, const ValidatedConfig& vc, const NumericsPolicy& policy, Exec exec,
                  std::vector<ResultRow*> rows) {
  const auto t0 = Clock::now();
  try {
    const Model model(vc, policy, {}, exec);
    std::optional<PerfBreakdown> perf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ResultRow& r = *rows[i];
      r.tail_mass = model.tail_mass();
      try {
        const Metric m = spec.metrics[i];
        if (needs_performance(m) && !perf) perf = evaluate_performance(model);
        const auto v = analytic_value(model, perf ? &*perf : nullptr, m);
        if (v)
          r.estimate = *v;
        else
          r.error = "no analytic form";
      } catch (const std::exception& e) {
        r.estimate = kNaN;
        r.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    fail_all(rows, e.what(), ms_since(t0));
  }
  const double ms = ms_since(t0);
  for (ResultRow* r : rows) r->runtime_ms = ms;
}

void run_mc(const SweepSpec& spec, const ValidatedConfig& vc, const NumericsPolicy& policy, Exec exec,
            std::vector<ResultRow*> rows) {
  const auto t0 = Clock::now();
  try {
    const Simulator sim(vc, policy);
    McOptions opt = McOptions::from(policy);
    opt.exec = exec;
    opt.walk_only = true;
    for (Metric m : spec.metrics) opt.walk_only = opt.walk_only && case_metric(m);
    const std::vector<DropRecord> records = sim.run(opt);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ResultRow& r = *rows[i];
      r.tail_mass = 0.0;
      const Estimate e = estimate(records, spec.metrics[i], vc.params());
      r.estimate = e.mean;
      r.ci_lo = e.ci_lo;
      r.ci_hi = e.ci_hi;
      if (e.empty) r.error = "no samples";
    }
  } catch (const std::exception& e) {
    fail_all(rows, e.what(), ms_since(t0));
  }
  const double ms = ms_since(t0);
  for (ResultRow* r : rows) r->runtime_ms = ms;
}

}  // namespace

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::MonteCarlo: return "mc";
    case Engine::Both: return "both";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  if (name == "analytic") return Engine::Analytic;
  if (name == "mc" || name == "montecarlo") return Engine::MonteCarlo;
  if (name == "both") return Engine::Both;
  throw std::invalid_argument("unknown engine '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

void check(const SweepSpec& spec) {
  if (spec.param.empty()) throw std::invalid_argument("sweep: no parameter");
  if (!is_known_key(spec.param) || is_numerics_key(spec.param))
    throw std::invalid_argument("sweep: '" + spec.param + "' is not a system parameter");
  try {
    (void)get_field(spec.base, spec.policy, spec.param);
  } catch (const ConfigError&) {
    throw std::invalid_argument("sweep: '" + spec.param + "' is not numeric");
  }
  if (spec.values.empty()) throw std::invalid_argument("sweep: empty grid");
  if (spec.values.size() > 1) {
    const bool up = spec.values[1] > spec.values[0];
    for (std::size_t i = 1; i < spec.values.size(); ++i) {
      const bool ok = up ? spec.values[i] > spec.values[i - 1] : spec.values[i] < spec.values[i - 1];
      if (!ok) throw std::invalid_argument("sweep: grid must be strictly monotone");
    }
  }
  for (double v : spec.values)
    if (!std::isfinite(v)) throw std::invalid_argument("sweep: non-finite grid value");
  if (spec.metrics.empty()) throw std::invalid_argument("sweep: no metrics");
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < steps; ++i) v[i] = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
  return v;
}

std::pair<std::string, std::vector<double>> parse_sweep_arg(std::string_view arg) {
  const auto eq = arg.find('=');
  if (eq == std::string_view::npos || eq == 0) throw std::invalid_argument("sweep: expected param=lo:hi:steps");
  std::string_view rest = arg.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw std::invalid_argument("sweep: expected param=lo:hi:steps");
  const double lo = parse_double(rest.substr(0, c1));
  const double hi = parse_double(rest.substr(c1 + 1, c2 - c1 - 1));
  const double steps = parse_double(rest.substr(c2 + 1));
  if (!(steps >= 1.0) || steps != std::floor(steps)) throw std::invalid_argument("sweep: steps must be a positive integer");
  return {std::string(arg.substr(0, eq)), linear_grid(lo, hi, static_cast<int>(steps))};
}

bool ResultRow::same_as(const ResultRow& o) const {
  return sweep_param == o.sweep_param && same_double(value, o.value) && metric == o.metric && engine == o.engine &&
         same_double(estimate, o.estimate) && same_double(ci_lo, o.ci_lo) && same_double(ci_hi, o.ci_hi) &&
         same_double(tail_mass, o.tail_mass) && same_double(runtime_ms, o.runtime_ms) && error == o.error;
}

std::vector<ResultRow> plan_rows(const SweepSpec& spec) {
  check(spec);
  std::vector<ResultRow> rows;
  for (double v : spec.values)
    for (Metric m : spec.metrics) {
      if (spec.engine != Engine::MonteCarlo) rows.push_back(blank_row(spec, v, m, "analytic"));
      if (spec.engine != Engine::Analytic) rows.push_back(blank_row(spec, v, m, "mc"));
    }
  return rows;
}

SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult out;
  out.rows = plan_rows(spec);
  out.config = to_json(spec.base, spec.policy);
  const std::size_t per_point = out.rows.size() / spec.values.size();
  const long points = static_cast<long>(spec.values.size());
  const bool outer = spec.exec == Exec::Parallel && points > 1 && max_threads() > 1;
  const Exec inner = outer ? Exec::Serial : spec.exec;

  auto run_point = [&](std::size_t i) {
    ResultRow* first = &out.rows[i * per_point];
    std::vector<ResultRow*> analytic, mc;
    for (std::size_t j = 0; j < per_point; ++j) (first[j].engine == "analytic" ? analytic : mc).push_back(first + j);
    SystemConfig c = spec.base;
    NumericsPolicy p = spec.policy;
    std::optional<ValidatedConfig> vc;
    try {
      set_field(c, p, spec.param, spec.values[i]);
      vc = validate(c);
    } catch (const std::exception& e) {
      fail_all(analytic, e.what(), 0.0);
      fail_all(mc, e.what(), 0.0);
      return;
    }
    if (!analytic.empty()) run_analytic(spec, *vc, p, inner, analytic);
    if (!mc.empty()) run_mc(spec, *vc, p, inner, mc);
  };

  if (outer) {
#ifdef MMV2X_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long i = 0; i < points; ++i) run_point(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < points; ++i) run_point(static_cast<std::size_t>(i));
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << csv_field(r.sweep_param) << ',' << format_double(r.value) << ',' << csv_field(r.metric) << ','
       << csv_field(r.engine) << ',' << format_double(r.estimate) << ',' << format_double(r.ci_lo) << ','
       << format_double(r.ci_hi) << ',' << format_double(r.tail_mass) << ',' << format_double(r.runtime_ms) << ','
       << csv_field(r.error) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  auto recs = csv_records(is);
  if (recs.empty()) throw std::invalid_argument("csv: missing header");
  std::string header;
  for (std::size_t i = 0; i < recs[0].size(); ++i) header += (i ? "," : "") + recs[0][i];
  if (header != kCsvHeader) throw std::invalid_argument("csv: unexpected header '" + header + "'");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& f = recs[i];
    if (f.size() != 10) throw std::invalid_argument("csv: row " + std::to_string(i) + " has wrong field count");
    rows.push_back({f[0], parse_double(f[1]), f[2], f[3], parse_double(f[4]), parse_double(f[5]), parse_double(f[6]),
                    parse_double(f[7]), parse_double(f[8]), f[9]});
  }
  return rows;
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ResultRow& r : result.rows) {
    rows.push_back({{"sweep_param", r.sweep_param},
                    {"value", json_number(r.value)},
                    {"metric", r.metric},
                    {"engine", r.engine},
                    {"estimate", json_number(r.estimate)},
                    {"ci_lo", json_number(r.ci_lo)},
                    {"ci_hi", json_number(r.ci_hi)},
                    {"tail_mass", json_number(r.tail_mass)},
                    {"runtime_ms", json_number(r.runtime_ms)},
                    {"error", r.error}});
  }
  return {{"config", result.config}, {"rows", rows}};
}

SweepResult sweep_result_from_json(const nlohmann::json& doc) {
  SweepResult out;
  out.config = doc.value("config", nlohmann::json::object());
  for (const auto& j : doc.at("rows")) {
    out.rows.push_back({j.at("sweep_param").get<std::string>(), json_double(j.at("value")),
                        j.at("metric").get<std::string>(), j.at("engine").get<std::string>(),
                        json_double(j.at("estimate")), json_double(j.at("ci_lo")), json_double(j.at("ci_hi")),
                        json_double(j.at("tail_mass")), json_double(j.at("runtime_ms")),
                        j.value("error", std::string())});
  }
  return out;
}

void emit(const SweepResult& result, Format format, std::ostream& os) {
  if (format == Format::Csv)
    write_csv(os, result.rows);
  else
    os << to_json(result).dump(2) << '\n';
}

void emit(const SweepResult& result, Format format, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  emit(result, format, os);
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<VerifyPoint> verify(const SweepResult& result, double tol) {
  std::vector<VerifyPoint> out;
  for (const ResultRow& a : result.rows) {
    if (a.engine != "analytic") continue;
    for (const ResultRow& m : result.rows) {
      if (m.engine != "mc" || m.metric != a.metric || !same_double(m.value, a.value)) continue;
      const double d = std::abs(a.estimate - m.estimate);
      const bool ok = a.error.empty() && m.error.empty() && d <= tol;
      out.push_back({a.value, a.metric, a.estimate, m.estimate, d, ok});
      break;
    }
  }
  return out;
}

Recipe load_recipe(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("recipe must be a JSON object");
  Recipe r;
  apply_json(r.spec.base, r.spec.policy, doc);
  r.description = doc.value("_description", std::string());
  if (doc.contains("_sweep")) {
    auto [param, values] = parse_sweep_arg(doc.at("_sweep").get<std::string>());
    r.spec.param = param;
    r.spec.values = values;
  } else if (doc.contains("_param")) {
    r.spec.param = doc.at("_param").get<std::string>();
    for (const auto& v : doc.at("_values")) r.spec.values.push_back(v.get<double>());
  }
  if (doc.contains("_metrics")) {
    const auto& m = doc.at("_metrics");
    if (m.is_string()) {
      std::stringstream ss(m.get<std::string>());
      std::string name;
      while (std::getline(ss, name, ','))
        if (!name.empty()) r.spec.metrics.push_back(parse_metric(name));
    } else {
      for (const auto& name : m) r.spec.metrics.push_back(parse_metric(name.get<std::string>()));
    }
  }
  if (doc.contains("_engine")) r.spec.engine = parse_engine(doc.at("_engine").get<std::string>());
  return r;
}

Recipe load_recipe(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return load_recipe(doc);
}

}  // namespace mmv2x
