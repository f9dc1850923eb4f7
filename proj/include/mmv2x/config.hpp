#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mmv2x {

// ---------------------------------------------------------------------------
// Unit helpers. Everything inside the library is SI and linear.
// ---------------------------------------------------------------------------

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
inline double per_km2_to_per_m2(double d) { return d * 1e-6; }
inline double kmh_to_mps(double v) { return v / 3.6; }

/// Transmitter class: base station or vehicular UE.
enum class Node { Bs, Vue };

/// The four link classes. LOS/NLOS is a property of the link to the typical
/// receiver, so each node process splits into two independent tiers.
enum class Tier { LosBs = 0, NlosBs = 1, LosVue = 2, NlosVue = 3 };

inline constexpr std::array<Tier, 4> kTiers{Tier::LosBs, Tier::NlosBs, Tier::LosVue, Tier::NlosVue};

constexpr int index(Tier t) { return static_cast<int>(t); }
constexpr bool is_los(Tier t) { return t == Tier::LosBs || t == Tier::LosVue; }
constexpr Node node_of(Tier t) { return (t == Tier::LosBs || t == Tier::NlosBs) ? Node::Bs : Node::Vue; }
std::string_view to_string(Tier t);
std::string_view to_string(Node n);

/// How the connection-time integral for V2V links is evaluated.
///  Consistent: exit time d/v' integrated against the same angle model the
///              sojourn probability uses (matches the simulator).
///  Literal:    the printed form, with 1/v prefactor, the doubled second
///              term and a v*t_s lower limit.
enum class ConnTimeVariant { Consistent, Literal };

/// Load estimate used by the simulator when it converts SINR to rate.
enum class LoadMode { Analytic, Empirical };

/// V2V motion sampling in the simulator. Paired derives the average motion
/// angle and the half-difference from the same two headings; Independent
/// draws them from separate heading pairs, matching the product form the
/// analytic connectivity integral assumes.
enum class V2vMotion { Paired, Independent };

/// Interference seen by the analytic engine.
///  Unconditioned: every node of every tier interferes as an unconstrained
///                 PPP, including the server.
///  Conditioned:   the association outcome is respected: no node inside the
///                 serving power level except the V-UEs the walk skipped,
///                 and the server itself excluded.
enum class InterferenceModel { Unconditioned, Conditioned };

struct SystemConfig {
  double lambda_bs = 10e-6;    // BS density, 1/m^2
  double lambda_vue = 200e-6;  // V-UE density, 1/m^2
  double ptx_bs = 1.0;         // W (30 dBm)
  double ptx_vue = 0.19952623149688797;  // W (23 dBm)
  double gain_main_bs = 63.09573444801933;   // 18 dBi
  double gain_side_bs = 0.630957344480193;   // -2 dBi
  double gain_main_vue = 15.848931924611133; // 12 dBi
  double gain_side_vue = 0.1;                // -10 dBi
  double beamwidth_bs = 10.0 * std::numbers::pi / 180.0;
  double beamwidth_vue = 30.0 * std::numbers::pi / 180.0;
  double alpha_los = 2.0;
  double alpha_nlos = 4.0;
  double zeta = 0.45e-3;  // atmospheric attenuation, 1/m
  double a_los_bs = 0.0149;
  double a_los_vue = 0.033;
  double noise_psd = 3.981071705534969e-21;  // W/Hz (-174 dBm/Hz)
  double bandwidth = 400e6;
  double carrier_frequency = 28e9;  // metadata only
  double speed = 60.0 / 3.6;        // m/s
  double slot = 1.0;                // s
  int cache_size = 10;
  int catalog_size = 100;
  double content_bits = 1e9;
  double sinr_threshold = 1.0;   // linear
  double rate_threshold = 1e8;   // bit/s
  double local_rate = 0.0;       // bit/s served from the local cache; 0 = excluded from throughput

  ConnTimeVariant conn_time_variant = ConnTimeVariant::Consistent;
  bool literal_case_mixtures = false;  // weight rate/throughput mixtures without 1/P_i
  LoadMode load_mode = LoadMode::Analytic;
  V2vMotion v2v_motion = V2vMotion::Independent;
  InterferenceModel interference_model = InterferenceModel::Unconditioned;
};

struct NumericsPolicy {
  double quad_rel_tol = 1e-8;
  double quad_abs_tol = 1e-12;
  int series_max_steps = 30;
  double series_tail_tol = 1e-4;
  double r_max = 20000.0;
  double lambertw_tol = 1e-12;
  std::uint64_t mc_drops = 100000;
  std::uint64_t mc_seed = 1;
  double mc_window_radius = 2000.0;
};

struct Diagnostic {
  enum class Level { Warning, Error };
  Level level;
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

struct ValidateOptions {
  // lambda_vue >= lambda_bs; off only for limit studies with a vanishing V-UE density
  bool density_order = true;
};

/// All invariant checks; never throws.
std::vector<Diagnostic> check(const SystemConfig& cfg, const ValidateOptions& opt = {});
std::vector<Diagnostic> check(const NumericsPolicy& policy);

/// Immutable, validated parameter set with derived quantities. Every
/// downstream computation is a pure function of one of these.
class ValidatedConfig {
 public:
  const SystemConfig& params() const { return cfg_; }
  const SystemConfig* operator->() const { return &cfg_; }
  double noise_power() const { return noise_power_; }
  double hit_probability() const { return hit_probability_; }
  const std::vector<Diagnostic>& warnings() const { return warnings_; }

 private:
  friend ValidatedConfig validate(const SystemConfig& cfg, const ValidateOptions& opt);
  explicit ValidatedConfig(const SystemConfig& cfg);
  SystemConfig cfg_;
  double noise_power_ = 0.0;
  double hit_probability_ = 0.0;
  std::vector<Diagnostic> warnings_;
};

/// Throws ConfigError listing every violated invariant.
ValidatedConfig validate(const SystemConfig& cfg, const ValidateOptions& opt = {});
void validate(const NumericsPolicy& policy);

// ---------------------------------------------------------------------------
// Flat key/value documents. Keys are the field names above, or one of the
// unit-suffixed spellings (ptx_bs_dbm, gain_main_bs_dbi, beamwidth_bs_deg,
// lambda_bs_per_km2, speed_kmh, ...), which are converted on the way in.
// ---------------------------------------------------------------------------

/// True if `key` names a settable field (with or without unit suffix).
bool is_known_key(std::string_view key);

/// True if `key` names a NumericsPolicy field rather than a system parameter.
bool is_numerics_key(std::string_view key);

/// Sets one numeric field. Throws ConfigError for unknown keys.
void set_field(SystemConfig& cfg, NumericsPolicy& policy, std::string_view key, double value);

/// Reads one numeric field in the units implied by `key`.
double get_field(const SystemConfig& cfg, const NumericsPolicy& policy, std::string_view key);

/// Applies every entry of a flat JSON object. String-valued enum fields
/// (conn_time_variant, load_mode, v2v_motion, interference_model) are
/// accepted too.
void apply_json(SystemConfig& cfg, NumericsPolicy& policy, const nlohmann::json& doc);

/// Canonical SI form of a resolved configuration.
nlohmann::json to_json(const SystemConfig& cfg, const NumericsPolicy& policy);

}  // namespace mmv2x
