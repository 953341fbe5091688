#include "noma_lab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace noma {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace {

std::string_view trim(std::string_view s) {
  auto const ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "' (" +
                    std::string(why) + ")");
}

// Splits "46 dBm" into (46, "dBm"). The suffix may be glued to the number.
std::pair<double, std::string> number_with_suffix(std::string_view key, std::string_view raw) {
  auto text = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr == text.data())
    bad_value(key, raw, "expected a number");
  auto suffix = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
  if (!std::isfinite(v))
    bad_value(key, raw, "not finite");
  return {v, std::string(suffix)};
}

double parse_plain(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (!suffix.empty())
    bad_value(key, raw, "unexpected unit suffix");
  return v;
}

int parse_int(std::string_view key, std::string_view raw) {
  auto text = trim(raw);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    bad_value(key, raw, "expected an integer");
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view raw) {
  auto text = trim(raw);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    bad_value(key, raw, "expected an unsigned integer");
  return v;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  auto t = std::string(trim(raw));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "on" || t == "yes")
    return true;
  if (t == "0" || t == "false" || t == "off" || t == "no")
    return false;
  bad_value(key, raw, "expected a boolean");
}

double parse_power(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (suffix.empty() || suffix == "W")
    return v;
  if (suffix == "mW")
    return v * 1e-3;
  if (suffix == "dBm")
    return dbm_to_watt(v);
  if (suffix == "dBW" || suffix == "dB")
    return db_to_linear(v);
  bad_value(key, raw, "power suffix must be W, mW, dBm or dBW");
}

double parse_psd(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (suffix.empty() || suffix == "W/Hz")
    return v;
  if (suffix == "dBm/Hz")
    return dbm_to_watt(v);
  bad_value(key, raw, "noise density suffix must be W/Hz or dBm/Hz");
}

double parse_frequency(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (suffix.empty() || suffix == "Hz")
    return v;
  if (suffix == "kHz")
    return v * 1e3;
  if (suffix == "MHz")
    return v * 1e6;
  bad_value(key, raw, "bandwidth suffix must be Hz, kHz or MHz");
}

double parse_rate(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (suffix.empty() || suffix == "bit/s" || suffix == "bps")
    return v;
  if (suffix == "kbit/s" || suffix == "kbps")
    return v * 1e3;
  if (suffix == "Mbit/s" || suffix == "Mbps")
    return v * 1e6;
  bad_value(key, raw, "rate suffix must be bit/s, kbit/s or Mbit/s");
}

double parse_metres(std::string_view key, std::string_view raw) {
  auto [v, suffix] = number_with_suffix(key, raw);
  if (suffix.empty() || suffix == "m")
    return v;
  if (suffix == "km")
    return v * 1e3;
  bad_value(key, raw, "distance suffix must be m or km");
}

using Setter = std::function<void(SystemConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"M", [](SystemConfig& c, auto k, auto v) { c.M = parse_int(k, v); }},
      {"N", [](SystemConfig& c, auto k, auto v) { c.N = parse_int(k, v); }},
      {"H", [](SystemConfig& c, auto k, auto v) { c.H = parse_int(k, v); }},
      {"V", [](SystemConfig& c, auto k, auto v) { c.V = parse_int(k, v); }},
      {"bandwidth_total", [](SystemConfig& c, auto k, auto v) { c.bandwidth_total = parse_frequency(k, v); }},
      {"P_s", [](SystemConfig& c, auto k, auto v) { c.P_s = parse_power(k, v); }},
      {"P_Am", [](SystemConfig& c, auto k, auto v) { c.P_Am = parse_power(k, v); }},
      {"P_Bm", [](SystemConfig& c, auto k, auto v) { c.P_Bm = parse_power(k, v); }},
      {"P_c", [](SystemConfig& c, auto k, auto v) { c.P_c = parse_power(k, v); }},
      {"N0", [](SystemConfig& c, auto k, auto v) { c.N0 = parse_psd(k, v); }},
      {"R_min", [](SystemConfig& c, auto k, auto v) { c.R_min = parse_rate(k, v); }},
      {"lambda_ftpa", [](SystemConfig& c, auto k, auto v) { c.lambda_ftpa = parse_plain(k, v); }},
      {"alpha1", [](SystemConfig& c, auto k, auto v) { c.alpha1 = parse_plain(k, v); }},
      {"alpha2", [](SystemConfig& c, auto k, auto v) { c.alpha2 = parse_plain(k, v); }},
      {"cj_enabled", [](SystemConfig& c, auto k, auto v) { c.cj_enabled = parse_bool(k, v); }},
      {"eve_cov_strict_paper",
       [](SystemConfig& c, auto k, auto v) { c.eve_cov_strict_paper = parse_bool(k, v); }},
      {"epsilon", [](SystemConfig& c, auto k, auto v) { c.epsilon = parse_plain(k, v); }},
      {"L_m", [](SystemConfig& c, auto k, auto v) { c.L_m = parse_int(k, v); }},
      {"rng_seed", [](SystemConfig& c, auto k, auto v) { c.rng_seed = parse_u64(k, v); }},
      {"cell_radius", [](SystemConfig& c, auto k, auto v) { c.cell_radius = parse_metres(k, v); }},
      {"eve_distance", [](SystemConfig& c, auto k, auto v) { c.eve_distance = parse_metres(k, v); }},
      {"pair_radius", [](SystemConfig& c, auto k, auto v) { c.pair_radius = parse_metres(k, v); }},
      {"min_distance", [](SystemConfig& c, auto k, auto v) { c.min_distance = parse_metres(k, v); }},
      {"carrier_freq", [](SystemConfig& c, auto k, auto v) { c.carrier_freq = parse_plain(k, v); }},
      {"h_base", [](SystemConfig& c, auto k, auto v) { c.h_base = parse_metres(k, v); }},
      {"h_mobile", [](SystemConfig& c, auto k, auto v) { c.h_mobile = parse_metres(k, v); }},
      {"sc_pair_offset", [](SystemConfig& c, auto k, auto v) { c.sc_pair_offset = parse_int(k, v); }},
      {"power_mode",
       [](SystemConfig& c, auto k, auto v) {
         auto t = trim(v);
         if (t == "global")
           c.power_mode = PowerMode::global_budget;
         else if (t == "per_sc_cap")
           c.power_mode = PowerMode::per_sc_cap;
         else
           bad_value(k, v, "expected 'global' or 'per_sc_cap'");
       }},
  };
  return table;
}

} // namespace

void SystemConfig::validate() const {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const char* what) {
    if (!ok)
      problems.emplace_back(what);
  };
  require(M >= 1, "M must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(H >= 1, "H must be >= 1");
  require(V >= 1, "V must be >= 1");
  require(bandwidth_total > 0, "bandwidth_total must be > 0");
  require(P_s > 0, "P_s must be > 0");
  require(P_Am > 0, "P_Am must be > 0");
  require(P_Bm > 0, "P_Bm must be > 0");
  require(P_c > 0, "P_c must be > 0");
  require(N0 > 0, "N0 must be > 0");
  require(R_min >= 0, "R_min must be >= 0");
  require(lambda_ftpa >= 0, "lambda_ftpa must be >= 0");
  require(alpha1 >= 0 && alpha1 <= 1, "alpha1 must lie in [0, 1]");
  require(alpha2 >= 0 && alpha2 <= 1, "alpha2 must lie in [0, 1]");
  require(epsilon > 0, "epsilon must be > 0");
  require(L_m >= 1, "L_m must be >= 1");
  require(cell_radius > 0, "cell_radius must be > 0");
  require(eve_distance > 0, "eve_distance must be > 0");
  require(pair_radius > 0, "pair_radius must be > 0");
  require(min_distance > 0, "min_distance must be > 0");
  require(carrier_freq > 0, "carrier_freq must be > 0");
  require(h_base > 0, "h_base must be > 0");
  require(h_mobile > 0, "h_mobile must be > 0");
  require(sc_pair_offset >= 0, "sc_pair_offset must be >= 0");
  if (N >= 1)
    require(bandwidth_total / N > 0, "per-SC bandwidth must be > 0");
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (auto const& p : problems)
      msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

void apply_setting(SystemConfig& cfg, std::string_view key, std::string_view value) {
  for (auto const& [name, set] : setters()) {
    if (name == key) {
      set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

bool is_config_key(std::string_view key) {
  auto const& t = setters();
  return std::any_of(t.begin(), t.end(), [&](auto const& e) { return e.first == key; });
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (auto const& e : setters())
      k.push_back(e.first);
    return k;
  }();
  return keys;
}

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out.push_back({std::string(key), std::string(value), lineno});
  }
  return out;
}

SystemConfig parse_config(std::string_view text) {
  SystemConfig cfg;
  for (auto const& kv : parse_key_values(text))
    apply_setting(cfg, kv.key, kv.value);
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string format_config(const SystemConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "M = " << c.M << "\nN = " << c.N << "\nH = " << c.H << "\nV = " << c.V << "\n"
     << "bandwidth_total = " << c.bandwidth_total << " Hz\n"
     << "P_s = " << c.P_s << " W\nP_Am = " << c.P_Am << " W\nP_Bm = " << c.P_Bm << " W\n"
     << "P_c = " << c.P_c << " W\nN0 = " << c.N0 << " W/Hz\nR_min = " << c.R_min << "\n"
     << "lambda_ftpa = " << c.lambda_ftpa << "\nalpha1 = " << c.alpha1 << "\nalpha2 = " << c.alpha2 << "\n"
     << "cj_enabled = " << (c.cj_enabled ? "true" : "false") << "\n"
     << "eve_cov_strict_paper = " << (c.eve_cov_strict_paper ? "true" : "false") << "\n"
     << "epsilon = " << c.epsilon << "\nL_m = " << c.L_m << "\nrng_seed = " << c.rng_seed << "\n"
     << "cell_radius = " << c.cell_radius << "\neve_distance = " << c.eve_distance << "\n"
     << "pair_radius = " << c.pair_radius << "\nmin_distance = " << c.min_distance << "\n"
     << "carrier_freq = " << c.carrier_freq << "\nh_base = " << c.h_base << "\nh_mobile = " << c.h_mobile
     << "\nsc_pair_offset = " << c.sc_pair_offset << "\n"
     << "power_mode = " << (c.power_mode == PowerMode::global_budget ? "global" : "per_sc_cap") << "\n";
  return os.str();
}

} // namespace noma
