#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mmv2x/sweep.hpp"

using namespace mmv2x;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

void apply_set(SweepSpec& spec, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  nlohmann::json doc = nlohmann::json::object();
  try {
    std::size_t pos = 0;
    const double x = std::stod(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    doc[key] = x;
  } catch (const std::invalid_argument&) {
    doc[key] = val;
  }
  apply_json(spec.base, spec.policy, doc);
}

int run(int argc, char** argv) {
  CLI::App app{"mmv2x: cache-enabled mmWave V2X performance, closed form and Monte Carlo"};
  std::string config_path, sweep_arg, metric_arg, engine_arg, out_path, format_arg = "csv", trace_path;
  std::vector<std::string> sets;
  std::uint64_t drops = 0, seed = 0;
  bool verify_mode = false, dry_run = false;
  double tol = 0.03;

  app.add_option("--config", config_path, "config or recipe file (flat JSON)");
  app.add_option("--sweep", sweep_arg, "param=lo:hi:steps");
  app.add_option("--metric", metric_arg, "comma separated: sc,pc,rc,p_local,p_v2i,p_v2v,conn_time,avg_rate,"
                                         "throughput,throughput_joint,delay");
  app.add_option("--engine", engine_arg, "analytic | mc | both");
  auto* drops_opt = app.add_option("--drops", drops, "Monte Carlo drops per grid point");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format_arg, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--verify", verify_mode, "compare analytic and mc; exit 1 if any point exceeds --tol");
  app.add_option("--tol", tol, "absolute tolerance for --verify");
  app.add_option("--set", sets, "override a config key, key=value (repeatable)");
  app.add_flag("--dry-run", dry_run, "print the planned rows without evaluating");
  app.add_option("--trace", trace_path, "write per-drop simulator records at the base config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const int threads = apply_thread_env();
  Recipe recipe;
  try {
    if (!config_path.empty()) recipe = load_recipe(std::filesystem::path(config_path));
    SweepSpec& spec = recipe.spec;
    for (const auto& kv : sets) apply_set(spec, kv);
    if (!sweep_arg.empty()) std::tie(spec.param, spec.values) = parse_sweep_arg(sweep_arg);
    if (!metric_arg.empty()) {
      spec.metrics.clear();
      for (const auto& m : split(metric_arg, ',')) spec.metrics.push_back(parse_metric(m));
    }
    if (!engine_arg.empty()) spec.engine = parse_engine(engine_arg);
    if (verify_mode) spec.engine = Engine::Both;
    if (*drops_opt) spec.policy.mc_drops = drops;
    if (*seed_opt) spec.policy.mc_seed = seed;
    validate(spec.policy);
    if (spec.metrics.empty()) spec.metrics = {Metric::Connectivity};

    if (!trace_path.empty()) {
      const ValidatedConfig vc = validate(spec.base);
      const Simulator sim(vc, spec.policy);
      const auto records = sim.run(McOptions::from(spec.policy));
      std::ofstream os(trace_path);
      if (!os) throw std::runtime_error("cannot open '" + trace_path + "' for writing");
      write_trace(os, records);
      if (spec.param.empty()) return 0;
    }

    SweepResult result;
    if (dry_run) {
      result.rows = plan_rows(spec);
      result.config = to_json(spec.base, spec.policy);
    } else {
      result = run_sweep(spec);
    }
    const Format fmt = parse_format(format_arg);
    if (out_path.empty())
      emit(result, fmt, std::cout);
    else
      emit(result, fmt, std::filesystem::path(out_path));

    for (const auto& r : result.rows)
      if (!r.error.empty())
        std::cerr << "warning: " << r.metric << " (" << r.engine << ") at " << r.sweep_param << "=" << r.value << ": "
                  << r.error << "\n";

    if (verify_mode && !dry_run) {
      const auto pts = verify(result, tol);
      int failed = 0;
      std::cerr << "verify (tol " << tol << ", threads " << threads << ")\n";
      for (const auto& p : pts) {
        std::fprintf(stderr, "  %-10s %s=%-12g analytic %.6f  mc %.6f  |diff| %.6f  %s\n", p.metric.c_str(),
                     spec.param.c_str(), p.value, p.analytic, p.mc, p.diff, p.pass ? "ok" : "FAIL");
        failed += !p.pass;
      }
      if (pts.empty()) {
        std::cerr << "verify: no paired points\n";
        return 1;
      }
      if (failed) {
        std::cerr << "verify: " << failed << " of " << pts.size() << " points exceed tolerance\n";
        return 1;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
