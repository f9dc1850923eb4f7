#include "mmv2x/config.hpp"

#include <functional>
#include <sstream>

namespace mmv2x {

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::LosBs: return "los_bs";
    case Tier::NlosBs: return "nlos_bs";
    case Tier::LosVue: return "los_vue";
    case Tier::NlosVue: return "nlos_vue";
  }
  return "?";
}

std::string_view to_string(Node n) { return n == Node::Bs ? "bs" : "vue"; }

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& d : diags)
    if (d.level == Diagnostic::Level::Error) os << "\n  " << d.field << ": " << d.message;
  return os.str();
}

void error(std::vector<Diagnostic>& out, std::string field, std::string msg) {
  out.push_back({Diagnostic::Level::Error, std::move(field), std::move(msg)});
}

void warning(std::vector<Diagnostic>& out, std::string field, std::string msg) {
  out.push_back({Diagnostic::Level::Warning, std::move(field), std::move(msg)});
}

bool has_errors(const std::vector<Diagnostic>& d) {
  for (const auto& x : d)
    if (x.level == Diagnostic::Level::Error) return true;
  return false;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

std::vector<Diagnostic> check(const SystemConfig& c, const ValidateOptions& opt) {
  std::vector<Diagnostic> d;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) error(d, name, "must be finite and strictly positive");
  };
  positive("lambda_bs", c.lambda_bs);
  positive("lambda_vue", c.lambda_vue);
  positive("ptx_bs", c.ptx_bs);
  positive("ptx_vue", c.ptx_vue);
  positive("gain_main_bs", c.gain_main_bs);
  positive("gain_side_bs", c.gain_side_bs);
  positive("gain_main_vue", c.gain_main_vue);
  positive("gain_side_vue", c.gain_side_vue);
  positive("bandwidth", c.bandwidth);
  positive("noise_psd", c.noise_psd);
  positive("alpha_los", c.alpha_los);
  positive("alpha_nlos", c.alpha_nlos);
  positive("slot", c.slot);
  positive("content_bits", c.content_bits);
  positive("sinr_threshold", c.sinr_threshold);
  positive("rate_threshold", c.rate_threshold);

  // a value above ~1e3 in a "linear" slot almost certainly came in as dBm/dBi
  // with a missing suffix; negatives were caught above
  if (c.ptx_bs > 1e3 || c.ptx_vue > 1e3)
    warning(d, "ptx", "transmit power above 1 kW; was a dBm value passed without the _dbm suffix?");

  auto beam = [&](const char* name, double v) {
    if (!(v > 0.0 && v <= 2.0 * std::numbers::pi))
      error(d, name, v > 2.0 * std::numbers::pi ? "beamwidth must lie in (0, 2*pi] radians; degrees go in the _deg key"
                                                 : "beamwidth must lie in (0, 2*pi] radians");
    else if (v > 2.0 * std::numbers::pi - 1e-12)
      ;  // omnidirectional, fine
    else if (v >= std::numbers::pi)
      warning(d, name, "beamwidth >= pi; sojourn geometry assumes a narrow beam");
  };
  beam("beamwidth_bs", c.beamwidth_bs);
  beam("beamwidth_vue", c.beamwidth_vue);

  if (!(c.zeta >= 0.0) || !std::isfinite(c.zeta)) error(d, "zeta", "must be finite and >= 0");
  if (!(c.a_los_bs >= 0.0)) error(d, "a_los_bs", "must be >= 0");
  if (!(c.a_los_vue >= 0.0)) error(d, "a_los_vue", "must be >= 0");
  if (!(c.speed >= 0.0) || !std::isfinite(c.speed)) error(d, "speed", "must be finite and >= 0");
  if (!(c.local_rate >= 0.0)) error(d, "local_rate", "must be >= 0");

  if (c.catalog_size < 1) error(d, "catalog_size", "must be >= 1");
  if (c.cache_size < 0) error(d, "cache_size", "must be >= 0");
  if (c.cache_size > c.catalog_size) error(d, "cache_size", "cache_size exceeds catalog_size");

  if (c.lambda_vue < c.lambda_bs && opt.density_order)
    error(d, "lambda_vue", "lambda_vue must be >= lambda_bs");
  else if (c.lambda_vue < c.lambda_bs)
    warning(d, "lambda_vue", "lambda_vue < lambda_bs");
  else if (c.lambda_vue < 2.0 * c.lambda_bs)
    warning(d, "lambda_vue", "lambda_vue / lambda_bs < 2; the model assumes a much denser V-UE process");

  if (c.alpha_nlos <= 2.0 && c.zeta == 0.0)
    warning(d, "alpha_nlos", "NLOS interference integral diverges for alpha <= 2 without attenuation");
  return d;
}

std::vector<Diagnostic> check(const NumericsPolicy& p) {
  std::vector<Diagnostic> d;
  if (!(p.quad_rel_tol > 0.0)) error(d, "quad_rel_tol", "must be > 0");
  if (!(p.quad_abs_tol > 0.0)) error(d, "quad_abs_tol", "must be > 0");
  if (p.series_max_steps < 1) error(d, "series_max_steps", "must be >= 1");
  if (!(p.series_tail_tol > 0.0)) error(d, "series_tail_tol", "must be > 0");
  if (!(p.r_max > 0.0)) error(d, "r_max", "must be > 0");
  if (!(p.lambertw_tol > 0.0)) error(d, "lambertw_tol", "must be > 0");
  if (!(p.mc_window_radius > 1.0)) error(d, "mc_window_radius", "must exceed the 1 m exclusion radius");
  return d;
}

ValidatedConfig::ValidatedConfig(const SystemConfig& cfg) : cfg_(cfg) {
  noise_power_ = cfg.noise_psd * cfg.bandwidth;
  hit_probability_ = static_cast<double>(cfg.cache_size) / static_cast<double>(cfg.catalog_size);
}

ValidatedConfig validate(const SystemConfig& cfg, const ValidateOptions& opt) {
  auto diags = check(cfg, opt);
  if (has_errors(diags)) throw ConfigError(std::move(diags));
  ValidatedConfig v(cfg);
  v.warnings_ = std::move(diags);
  return v;
}

void validate(const NumericsPolicy& policy) {
  auto diags = check(policy);
  if (has_errors(diags)) throw ConfigError(std::move(diags));
}

// ---------------------------------------------------------------------------
// field registry

namespace {

struct Field {
  std::function<void(SystemConfig&, NumericsPolicy&, double)> set;
  std::function<double(const SystemConfig&, const NumericsPolicy&)> get;
};

struct Unit {
  std::string_view suffix;
  double (*in)(double);   // user unit -> SI
  double (*out)(double);  // SI -> user unit
};

double gbps_in(double x) { return x * 1e9; }
double gbps_out(double x) { return x / 1e9; }
double mbps_in(double x) { return x * 1e6; }
double mbps_out(double x) { return x / 1e6; }
double per_m2_to_km2(double x) { return x * 1e6; }
double mps_to_kmh(double x) { return x * 3.6; }
double dbm_hz_in(double x) { return dbm_to_watt(x); }
double per_km_in(double x) { return x * 1e-3; }
double per_km_out(double x) { return x * 1e3; }
double mhz_in(double x) { return x * 1e6; }
double mhz_out(double x) { return x / 1e6; }
double ghz_in(double x) { return x * 1e9; }
double ghz_out(double x) { return x / 1e9; }

int to_int(std::string_view key, double v) {
  if (v != std::floor(v) || std::fabs(v) > 1e9)
    throw ConfigError({{Diagnostic::Level::Error, std::string(key), "expects an integer"}});
  return static_cast<int>(v);
}

#define MMV2X_DOUBLE(obj, name) \
  {#name, {[](SystemConfig& c, NumericsPolicy& p, double v) { (void)c; (void)p; obj.name = v; }, \
           [](const SystemConfig& c, const NumericsPolicy& p) { (void)c; (void)p; return static_cast<double>(obj.name); }}}

const std::vector<std::pair<std::string_view, Field>>& fields() {
  static const std::vector<std::pair<std::string_view, Field>> table = {
      MMV2X_DOUBLE(c, lambda_bs),
      MMV2X_DOUBLE(c, lambda_vue),
      MMV2X_DOUBLE(c, ptx_bs),
      MMV2X_DOUBLE(c, ptx_vue),
      MMV2X_DOUBLE(c, gain_main_bs),
      MMV2X_DOUBLE(c, gain_side_bs),
      MMV2X_DOUBLE(c, gain_main_vue),
      MMV2X_DOUBLE(c, gain_side_vue),
      MMV2X_DOUBLE(c, beamwidth_bs),
      MMV2X_DOUBLE(c, beamwidth_vue),
      MMV2X_DOUBLE(c, alpha_los),
      MMV2X_DOUBLE(c, alpha_nlos),
      MMV2X_DOUBLE(c, zeta),
      MMV2X_DOUBLE(c, a_los_bs),
      MMV2X_DOUBLE(c, a_los_vue),
      MMV2X_DOUBLE(c, noise_psd),
      MMV2X_DOUBLE(c, bandwidth),
      MMV2X_DOUBLE(c, carrier_frequency),
      MMV2X_DOUBLE(c, speed),
      MMV2X_DOUBLE(c, slot),
      MMV2X_DOUBLE(c, content_bits),
      MMV2X_DOUBLE(c, sinr_threshold),
      MMV2X_DOUBLE(c, rate_threshold),
      MMV2X_DOUBLE(c, local_rate),
      {"cache_size", {[](SystemConfig& c, NumericsPolicy&, double v) { c.cache_size = to_int("cache_size", v); },
                      [](const SystemConfig& c, const NumericsPolicy&) { return double(c.cache_size); }}},
      {"catalog_size", {[](SystemConfig& c, NumericsPolicy&, double v) { c.catalog_size = to_int("catalog_size", v); },
                        [](const SystemConfig& c, const NumericsPolicy&) { return double(c.catalog_size); }}},
      {"literal_case_mixtures",
       {[](SystemConfig& c, NumericsPolicy&, double v) { c.literal_case_mixtures = v != 0.0; },
        [](const SystemConfig& c, const NumericsPolicy&) { return c.literal_case_mixtures ? 1.0 : 0.0; }}},
      MMV2X_DOUBLE(p, quad_rel_tol),
      MMV2X_DOUBLE(p, quad_abs_tol),
      MMV2X_DOUBLE(p, series_tail_tol),
      MMV2X_DOUBLE(p, r_max),
      MMV2X_DOUBLE(p, lambertw_tol),
      MMV2X_DOUBLE(p, mc_window_radius),
      {"series_max_steps",
       {[](SystemConfig&, NumericsPolicy& p, double v) { p.series_max_steps = to_int("series_max_steps", v); },
        [](const SystemConfig&, const NumericsPolicy& p) { return double(p.series_max_steps); }}},
      {"mc_drops", {[](SystemConfig&, NumericsPolicy& p, double v) {
                      if (v < 0 || v != std::floor(v))
                        throw ConfigError({{Diagnostic::Level::Error, "mc_drops", "expects a non-negative integer"}});
                      p.mc_drops = static_cast<std::uint64_t>(v);
                    },
                    [](const SystemConfig&, const NumericsPolicy& p) { return double(p.mc_drops); }}},
      {"mc_seed", {[](SystemConfig&, NumericsPolicy& p, double v) {
                     if (v < 0 || v != std::floor(v))
                       throw ConfigError({{Diagnostic::Level::Error, "mc_seed", "expects a non-negative integer"}});
                     p.mc_seed = static_cast<std::uint64_t>(v);
                   },
                   [](const SystemConfig&, const NumericsPolicy& p) { return double(p.mc_seed); }}},
  };
  return table;
}

#undef MMV2X_DOUBLE

// suffix -> which base fields accept it
struct Alias {
  std::string_view key;
  std::string_view base;
  Unit unit;
};

const std::vector<Alias>& aliases() {
  static const std::vector<Alias> table = {
      {"ptx_bs_dbm", "ptx_bs", {"_dbm", dbm_to_watt, watt_to_dbm}},
      {"ptx_vue_dbm", "ptx_vue", {"_dbm", dbm_to_watt, watt_to_dbm}},
      {"gain_main_bs_dbi", "gain_main_bs", {"_dbi", db_to_linear, linear_to_db}},
      {"gain_side_bs_dbi", "gain_side_bs", {"_dbi", db_to_linear, linear_to_db}},
      {"gain_main_vue_dbi", "gain_main_vue", {"_dbi", db_to_linear, linear_to_db}},
      {"gain_side_vue_dbi", "gain_side_vue", {"_dbi", db_to_linear, linear_to_db}},
      {"beamwidth_bs_deg", "beamwidth_bs", {"_deg", deg_to_rad, rad_to_deg}},
      {"beamwidth_vue_deg", "beamwidth_vue", {"_deg", deg_to_rad, rad_to_deg}},
      {"lambda_bs_per_km2", "lambda_bs", {"_per_km2", per_km2_to_per_m2, per_m2_to_km2}},
      {"lambda_vue_per_km2", "lambda_vue", {"_per_km2", per_km2_to_per_m2, per_m2_to_km2}},
      {"speed_kmh", "speed", {"_kmh", kmh_to_mps, mps_to_kmh}},
      {"noise_psd_dbm_hz", "noise_psd", {"_dbm_hz", dbm_hz_in, watt_to_dbm}},
      {"zeta_per_km", "zeta", {"_per_km", per_km_in, per_km_out}},
      {"sinr_threshold_db", "sinr_threshold", {"_db", db_to_linear, linear_to_db}},
      {"rate_threshold_gbps", "rate_threshold", {"_gbps", gbps_in, gbps_out}},
      {"rate_threshold_mbps", "rate_threshold", {"_mbps", mbps_in, mbps_out}},
      {"local_rate_gbps", "local_rate", {"_gbps", gbps_in, gbps_out}},
      {"bandwidth_mhz", "bandwidth", {"_mhz", mhz_in, mhz_out}},
      {"carrier_frequency_ghz", "carrier_frequency", {"_ghz", ghz_in, ghz_out}},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

const Alias* find_alias(std::string_view key) {
  for (const auto& a : aliases())
    if (a.key == key) return &a;
  return nullptr;
}

[[noreturn]] void unknown(std::string_view key) {
  throw ConfigError({{Diagnostic::Level::Error, std::string(key), "unknown configuration key"}});
}

}  // namespace

bool is_known_key(std::string_view key) {
  return find_field(key) != nullptr || find_alias(key) != nullptr || key == "conn_time_variant" ||
         key == "load_mode" || key == "v2v_motion" || key == "interference_model";
}

bool is_numerics_key(std::string_view key) {
  static constexpr std::string_view names[] = {"quad_rel_tol", "quad_abs_tol", "series_max_steps",
                                                "series_tail_tol", "r_max", "lambertw_tol",
                                                "mc_drops", "mc_seed", "mc_window_radius"};
  for (std::string_view n : names)
    if (n == key) return true;
  return false;
}

void set_field(SystemConfig& cfg, NumericsPolicy& policy, std::string_view key, double value) {
  if (const Field* f = find_field(key)) {
    f->set(cfg, policy, value);
    return;
  }
  if (const Alias* a = find_alias(key)) {
    find_field(a->base)->set(cfg, policy, a->unit.in(value));
    return;
  }
  unknown(key);
}

double get_field(const SystemConfig& cfg, const NumericsPolicy& policy, std::string_view key) {
  if (const Field* f = find_field(key)) return f->get(cfg, policy);
  if (const Alias* a = find_alias(key)) return a->unit.out(find_field(a->base)->get(cfg, policy));
  unknown(key);
}

namespace {

template <class E>
E parse_enum(std::string_view key, const std::string& v, std::initializer_list<std::pair<const char*, E>> opts) {
  for (const auto& [name, e] : opts)
    if (v == name) return e;
  throw ConfigError({{Diagnostic::Level::Error, std::string(key), "unrecognised value '" + v + "'"}});
}

}  // namespace

void apply_json(SystemConfig& cfg, NumericsPolicy& policy, const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ConfigError({{Diagnostic::Level::Error, "<document>", "configuration must be a flat JSON object"}});
  std::vector<Diagnostic> diags;
  for (const auto& [key, val] : doc.items()) {
    try {
      if (key == "conn_time_variant") {
        cfg.conn_time_variant = parse_enum<ConnTimeVariant>(
            key, val.get<std::string>(), {{"consistent", ConnTimeVariant::Consistent}, {"literal", ConnTimeVariant::Literal}});
      } else if (key == "load_mode") {
        cfg.load_mode = parse_enum<LoadMode>(key, val.get<std::string>(),
                                             {{"analytic", LoadMode::Analytic}, {"empirical", LoadMode::Empirical}});
      } else if (key == "v2v_motion") {
        cfg.v2v_motion = parse_enum<V2vMotion>(key, val.get<std::string>(),
                                               {{"paired", V2vMotion::Paired}, {"independent", V2vMotion::Independent}});
      } else if (key == "interference_model") {
        cfg.interference_model =
            parse_enum<InterferenceModel>(key, val.get<std::string>(),
                                          {{"unconditioned", InterferenceModel::Unconditioned},
                                           {"conditioned", InterferenceModel::Conditioned}});
      } else if (key.size() && key[0] == '_') {
        // comment / annotation keys
      } else if (val.is_boolean()) {
        set_field(cfg, policy, key, val.get<bool>() ? 1.0 : 0.0);
      } else if (val.is_number()) {
        set_field(cfg, policy, key, val.get<double>());
      } else {
        diags.push_back({Diagnostic::Level::Error, key, "expects a number"});
      }
    } catch (const ConfigError& e) {
      diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
    } catch (const nlohmann::json::exception& e) {
      diags.push_back({Diagnostic::Level::Error, key, e.what()});
    }
  }
  if (!diags.empty()) throw ConfigError(std::move(diags));
}

nlohmann::json to_json(const SystemConfig& cfg, const NumericsPolicy& policy) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, f] : fields()) {
    if (name == "literal_case_mixtures")
      j[std::string(name)] = cfg.literal_case_mixtures;
    else
      j[std::string(name)] = f.get(cfg, policy);
  }
  j["conn_time_variant"] = cfg.conn_time_variant == ConnTimeVariant::Consistent ? "consistent" : "literal";
  j["load_mode"] = cfg.load_mode == LoadMode::Analytic ? "analytic" : "empirical";
  j["v2v_motion"] = cfg.v2v_motion == V2vMotion::Paired ? "paired" : "independent";
  j["interference_model"] =
      cfg.interference_model == InterferenceModel::Unconditioned ? "unconditioned" : "conditioned";
  return j;
}

}  // namespace mmv2x
