#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noma_lab/channel.hpp"
#include "noma_lab/config.hpp"
#include "noma_lab/matching.hpp"
#include "noma_lab/power.hpp"

namespace noma {

enum class Scheme { sspa1, sspa2, ra_noma };

std::string_view scheme_name(Scheme s);
/// Accepts SSPA-1, SSPA-2, RA-NOMA (case-insensitive); throws ConfigError.
Scheme parse_scheme(std::string_view name);

struct Sweep {
  std::string param;
  std::vector<double> values;
};

/// Sweep parameters beyond plain config keys:
///   sigma2_dBm          noise power per SC, sets N0
///   P_Am_over_sigma2_dB uplink power of both users relative to sigma2
///   Pc                  circuit power in dBW
bool is_sweep_param(std::string_view param);
void apply_sweep(SystemConfig& cfg, std::string_view param, double value);

struct Scenario {
  std::string name = "custom";
  SystemConfig base;
  Sweep sweep;
  std::vector<Scheme> schemes;
  int trials = 200;

  /// Throws ConfigError on an empty sweep, unknown parameter, no schemes,
  /// trials < 1 or an invalid config at any sweep value.
  void validate() const;
};

std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(std::string_view name);
Scenario builtin_scenario(std::string_view name);

/// Scenario file: config keys plus `name`, `trials`, `schemes = A, B` and
/// `sweep = param: v1, v2, ...`.
Scenario parse_scenario(std::string_view text, Scenario base = {});
/// Applies one `key=value` to a scenario (scenario keys or config keys).
void apply_scenario_setting(Scenario& sc, std::string_view key, std::string_view value);

struct ResultRow {
  std::string scenario;
  std::string scheme;
  std::string sweep_param;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double total_r_sec = 0.0;
  double ee = 0.0;
  long match_ops = 0;
  int solver_iters = 0;
  bool converged = false;

  bool operator==(const ResultRow&) const = default;
};

struct SolverRow {
  std::string scenario;
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double final_ee = 0.0;

  bool operator==(const SolverRow&) const = default;
};

/// One point of an EE trajectory: matching swaps (kind "match") or
/// parametric iterations (kind "power").
struct TrajectoryRow {
  std::string scenario;
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  std::string kind;
  int step = 0;
  double ee = 0.0;

  bool operator==(const TrajectoryRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<SolverRow> solver;
  std::vector<TrajectoryRow> trajectory;
  long infeasible = 0; ///< rows whose QoS floor could not be met
};

/// Seed of one trial; shared by every sweep value and scheme so that
/// comparisons use common random numbers.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

struct TrialOutcome {
  std::vector<ResultRow> rows;
  std::vector<SolverRow> solver;
  std::vector<TrajectoryRow> trajectory;
  long infeasible = 0;
};

/// Runs every scheme of the scenario on one (sweep value, trial) with the
/// given seed. Replays any recorded row from its seed.
TrialOutcome run_trial(const Scenario& sc, double sweep_value, int trial, std::uint64_t seed);

/// Threads used by run_scenario: NOMA_LAB_THREADS if set and > 0, else the
/// hardware concurrency.
unsigned harness_threads();

ResultTable run_scenario(const Scenario& sc, unsigned threads = 0);

/// Empirical CDF with ties merged; throws Error on empty input.
std::vector<std::pair<double, double>> cdf(std::vector<double> values);

/// Shortest round-trip decimal form.
std::string format_double(double v);

inline constexpr std::string_view kCsvHeader =
    "scenario,scheme,sweep_param,sweep_value,trial,seed,total_r_sec_bps,ee_bps_per_w,match_ops,solver_iters,"
    "converged";
inline constexpr std::string_view kSolverCsvHeader =
    "scenario,scheme,sweep_value,trial,iterations,converged,residual,final_ee";
inline constexpr std::string_view kTrajectoryCsvHeader = "scenario,scheme,sweep_value,trial,kind,step,ee";

/// Sorts rows by (sweep_value, scheme, trial) and writes them.
void write_csv(std::ostream& out, std::vector<ResultRow> rows);
void emit_csv(const ResultTable& table, const std::string& path);
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv_file(const std::string& path);

void write_solver_csv(std::ostream& out, std::vector<SolverRow> rows);
void write_trajectory_csv(std::ostream& out, std::vector<TrajectoryRow> rows);
void write_text_file(const std::string& path, const std::string& content);

struct SchemeSummary {
  std::string scheme;
  double sweep_value = 0.0;
  double mean_ee = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  int trials = 0;
  int not_converged = 0;
};

/// Mean EE with a normal-approximation 95% interval per (sweep value,
/// scheme), in row order.
std::vector<SchemeSummary> summarize(const std::vector<ResultRow>& rows);

/// Paired comparison of two equal-length samples: mean of (a - b) and its
/// one-sided 95% lower confidence bound.
struct PairedDiff {
  double mean = 0.0;
  double lower95 = 0.0;
  std::size_t n = 0;
};
PairedDiff paired_difference(const std::vector<double>& a, const std::vector<double>& b);

/// EE values of one (scheme, sweep value) ordered by trial.
std::vector<double> ee_series(const std::vector<ResultRow>& rows, std::string_view scheme, double sweep_value);

} // namespace noma
