#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace noma {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration values.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// The requested problem has no feasible point (capacity or QoS).
class InfeasibleError : public Error {
public:
  using Error::Error;
};

enum class PowerMode {
  global_budget, ///< sum of relay powers equals P_s
  per_sc_cap,    ///< additionally each SC pair carries at most P_s / N
};

/// All scenario constants. Powers are linear watts, N0 is W/Hz, bandwidth is
/// Hz, distances are metres and the carrier frequency is MHz.
struct SystemConfig {
  int M = 10; ///< user pairs
  int N = 10; ///< subcarriers
  int H = 3;  ///< max user pairs per SC pair
  int V = 4;  ///< max SC pairs per user pair

  double bandwidth_total = 4.5e6;
  double P_s = 39.810717055349734; // 46 dBm
  double P_Am = 0.3;
  double P_Bm = 0.3;
  double P_c = 1.2589254117941673; // 1 dBW
  double N0 = 1e-18;               // -150 dBm/Hz
  double R_min = 0.0;

  double lambda_ftpa = 0.5;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  bool cj_enabled = false;
  /// Add the RS-side received power to the MA-phase eavesdropper covariance
  /// under jamming. Off by default; see README.
  bool eve_cov_strict_paper = false;

  double epsilon = 1e-4; ///< Dinkelbach tolerance, bit/s/Hz of total bandwidth
  int L_m = 50;
  std::uint64_t rng_seed = 1;

  double cell_radius = 30.0;
  double eve_distance = 500.0;
  double pair_radius = 5.0;
  double min_distance = 1.0; ///< path-loss distance floor
  double carrier_freq = 900.0;
  double h_base = 30.0;
  double h_mobile = 1.5;

  /// SC pair k uses MA subcarrier k and BC subcarrier (k + offset) mod N.
  int sc_pair_offset = 0;
  PowerMode power_mode = PowerMode::global_budget;

  [[nodiscard]] double bandwidth_sc() const { return bandwidth_total / N; }
  [[nodiscard]] double sigma2() const { return N0 * bandwidth_sc(); }

  /// Throws ConfigError describing every violated invariant.
  void validate() const;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);

/// Applies one `key = value` assignment. Unknown keys and malformed values
/// raise ConfigError naming the key.
void apply_setting(SystemConfig& cfg, std::string_view key, std::string_view value);

/// True when `key` names a SystemConfig field.
bool is_config_key(std::string_view key);
const std::vector<std::string>& config_keys();

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits flat `key = value` text into entries; `#` starts a comment.
std::vector<KeyValue> parse_key_values(std::string_view text);

SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::string& path);
std::string read_text_file(const std::string& path);

/// Writes every field back in the config file format (watts, W/Hz).
std::string format_config(const SystemConfig& cfg);

} // namespace noma
