#include "noma_lab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace noma {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(std::string(key) + ": '" + t + "' is not a number");
  return v;
}

} // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
  case Scheme::sspa1:
    return "SSPA-1";
  case Scheme::sspa2:
    return "SSPA-2";
  case Scheme::ra_noma:
    return "RA-NOMA";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  const auto n = lower(trim(name));
  if (n == "sspa-1")
    return Scheme::sspa1;
  if (n == "sspa-2")
    return Scheme::sspa2;
  if (n == "ra-noma")
    return Scheme::ra_noma;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected SSPA-1, SSPA-2 or RA-NOMA)");
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

const std::vector<std::string>& numeric_config_keys() {
  static const std::vector<std::string> keys = {
      "M",      "N",       "H",           "V",           "bandwidth_total", "P_s",          "P_Am",
      "P_Bm",   "P_c",     "N0",          "R_min",       "lambda_ftpa",     "alpha1",       "alpha2",
      "epsilon", "L_m",    "cell_radius", "eve_distance", "pair_radius",    "min_distance", "carrier_freq",
      "h_base", "h_mobile", "sc_pair_offset"};
  return keys;
}

} // namespace

bool is_sweep_param(std::string_view param) {
  if (param == "sigma2_dBm" || param == "P_Am_over_sigma2_dB" || param == "Pc")
    return true;
  auto const& k = numeric_config_keys();
  return std::find(k.begin(), k.end(), param) != k.end();
}

void apply_sweep(SystemConfig& cfg, std::string_view param, double value) {
  if (param == "sigma2_dBm") {
    cfg.N0 = dbm_to_watt(value) / cfg.bandwidth_sc();
  } else if (param == "P_Am_over_sigma2_dB") {
    cfg.P_Am = cfg.P_Bm = cfg.sigma2() * db_to_linear(value);
  } else if (param == "Pc") {
    cfg.P_c = db_to_linear(value);
  } else if (is_sweep_param(param)) {
    apply_setting(cfg, param, format_double(value));
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(param) + "'");
  }
}

void Scenario::validate() const {
  std::string problems;
  if (sweep.values.empty())
    problems += "; sweep has no values";
  if (!is_sweep_param(sweep.param))
    problems += "; unknown sweep parameter '" + sweep.param + "'";
  if (schemes.empty())
    problems += "; no schemes";
  if (trials < 1)
    problems += "; trials must be >= 1";
  if (!problems.empty())
    throw ConfigError("scenario " + name + ": " + problems.substr(2));
  for (double v : sweep.values) {
    SystemConfig cfg = base;
    apply_sweep(cfg, sweep.param, v);
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("scenario " + name + " at " + sweep.param + "=" + format_double(v) + ": " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace {

Scenario make(std::string name, std::string param, std::vector<double> values, std::vector<Scheme> schemes,
              bool cj) {
  Scenario s;
  s.name = std::move(name);
  s.sweep = {std::move(param), std::move(values)};
  s.schemes = std::move(schemes);
  s.base.cj_enabled = cj;
  return s;
}

std::vector<Scenario> builtins() {
  using enum Scheme;
  return {
      make("fig2", "M", {6, 8, 10}, {sspa1}, false),
      make("fig3", "M", {6, 8, 10}, {sspa2}, false),
      make("fig4", "M", {10}, {sspa1, sspa2}, false),
      make("fig5", "P_Am_over_sigma2_dB", {100, 110, 120, 130, 140, 150}, {sspa1, sspa2, ra_noma}, false),
      make("fig6", "Pc", {0.1, 0.5, 1.0, 1.5}, {sspa1, sspa2, ra_noma}, false),
      make("fig7", "sigma2_dBm", {-60, -50, -40, -30, -20}, {sspa1, sspa2, ra_noma}, true),
      make("fig8", "N", {6, 8, 10}, {sspa1}, true),
      make("fig9", "M", {10, 15, 20}, {sspa2}, true),
  };
}

} // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (auto const& s : builtins())
    out.push_back(s.name);
  return out;
}

bool is_builtin_scenario(std::string_view name) {
  auto names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(std::string_view name) {
  for (auto& s : builtins())
    if (s.name == name)
      return s;
  std::string list;
  for (auto const& n : builtin_scenario_names())
    list += (list.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + std::string(name) + "'; built-in scenarios: " + list);
}

void apply_scenario_setting(Scenario& sc, std::string_view key, std::string_view value) {
  if (key == "name") {
    sc.name = trim(value);
    if (sc.name.empty() || sc.name.find(',') != std::string::npos)
      throw ConfigError("name: must be nonempty and contain no commas");
  } else if (key == "trials") {
    const double t = parse_number(key, value);
    if (t < 1 || t != std::floor(t) || t > 1e9)
      throw ConfigError("trials: expected a positive integer, got '" + trim(value) + "'");
    sc.trials = static_cast<int>(t);
  } else if (key == "schemes") {
    sc.schemes.clear();
    for (auto const& s : split(value, ','))
      sc.schemes.push_back(parse_scheme(s));
  } else if (key == "sweep") {
    const auto colon = value.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError("sweep: expected 'param: v1, v2, ...'");
    sc.sweep.param = trim(value.substr(0, colon));
    if (!is_sweep_param(sc.sweep.param))
      throw ConfigError("sweep: unknown parameter '" + sc.sweep.param + "'");
    sc.sweep.values.clear();
    for (auto const& v : split(value.substr(colon + 1), ','))
      sc.sweep.values.push_back(parse_number("sweep", v));
  } else {
    apply_setting(sc.base, key, value);
  }
}

Scenario parse_scenario(std::string_view text, Scenario base) {
  for (auto const& kv : parse_key_values(text)) {
    try {
      apply_scenario_setting(base, kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(kv.line) + ": " + e.what());
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// Trials

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(trial)});
}

TrialOutcome run_trial(const Scenario& sc, double sweep_value, int trial, std::uint64_t seed) {
  SystemConfig cfg = sc.base;
  apply_sweep(cfg, sc.sweep.param, sweep_value);
  cfg.validate();
  Rng rng(seed);
  const auto topo = generate_topology(cfg, rng);
  const auto ch = sample_channels(topo, cfg, rng);

  TrialOutcome out;
  for (auto scheme : sc.schemes) {
    ResultRow row{sc.name, std::string(scheme_name(scheme)), sc.sweep.param, sweep_value, trial, seed};
    auto trace = [&](const char* kind, const std::vector<double>& ee) {
      for (std::size_t s = 0; s < ee.size(); ++s)
        out.trajectory.push_back({row.scenario, row.scheme, sweep_value, trial, kind, static_cast<int>(s), ee[s]});
    };
    // SSPA-2 starts from the same random matching the baseline uses.
    Rng init_rng(derive_seed(seed, {1}));
    try {
      if (scheme == Scheme::ra_noma) {
        const auto mt = random_assignment(cfg, init_rng);
        Evaluator ev(ch, cfg);
        const auto e = ev.evaluate(mt);
        row.total_r_sec = e.ee.r_total;
        row.ee = e.ee.ee;
        row.converged = true;
        for (std::size_t m = 0; m < mt.pairs(); ++m)
          if (cfg.R_min > 0.0 && !mt.scs_of(m).empty() && e.pair_rate[m] < cfg.R_min)
            row.converged = false;
        out.infeasible += row.converged ? 0 : 1;
      } else {
        const auto mr = scheme == Scheme::sspa1 ? scas1(ch, cfg) : scas2(ch, cfg, random_assignment(cfg, init_rng));
        const auto pr = dinkelbach_allocate(mr.matching, ch, cfg);
        row.total_r_sec = pr.eval.ee.r_total;
        row.ee = pr.eval.ee.ee;
        row.match_ops = mr.stats.accepted;
        row.solver_iters = pr.report.iterations;
        row.converged = pr.report.converged;
        out.infeasible += pr.report.infeasible ? 1 : 0;
        out.solver.push_back({row.scenario, row.scheme, sweep_value, trial, pr.report.iterations,
                              pr.report.converged, pr.report.residual, row.ee});
        trace("match", mr.stats.ee_trajectory);
        trace("power", pr.report.ee_trajectory);
      }
    } catch (const InfeasibleError&) {
      row.total_r_sec = 0.0;
      row.ee = 0.0;
      row.converged = false;
      ++out.infeasible;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

unsigned harness_threads() {
  if (const char* env = std::getenv("NOMA_LAB_THREADS")) {
    unsigned n = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && p == s.data() + s.size() && n > 0)
      return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultTable run_scenario(const Scenario& sc, unsigned threads) {
  sc.validate();
  if (threads == 0)
    threads = harness_threads();
  const std::size_t per_value = static_cast<std::size_t>(sc.trials);
  const std::size_t jobs = sc.sweep.values.size() * per_value;
  std::vector<TrialOutcome> results(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        const int trial = static_cast<int>(j % per_value);
        results[j] = run_trial(sc, sc.sweep.values[j / per_value], trial, trial_seed(sc.base.rng_seed, trial));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = jobs;
      }
    }
  };
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);

  ResultTable table;
  for (auto& r : results) {
    std::move(r.rows.begin(), r.rows.end(), std::back_inserter(table.rows));
    std::move(r.solver.begin(), r.solver.end(), std::back_inserter(table.solver));
    std::move(r.trajectory.begin(), r.trajectory.end(), std::back_inserter(table.trajectory));
    table.infeasible += r.infeasible;
  }
  auto key = [](auto const& r) { return std::tie(r.sweep_value, r.scheme, r.trial); };
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](auto const& a, auto const& b) { return key(a) < key(b); });
  std::stable_sort(table.solver.begin(), table.solver.end(),
                   [&](auto const& a, auto const& b) { return key(a) < key(b); });
  std::stable_sort(table.trajectory.begin(), table.trajectory.end(),
                   [&](auto const& a, auto const& b) { return key(a) < key(b); });
  return table;
}

// ---------------------------------------------------------------------------
// Statistics

std::vector<std::pair<double, double>> cdf(std::vector<double> values) {
  if (values.empty())
    throw Error("cdf: empty input");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i])
      continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  out.back().second = 1.0;
  return out;
}

std::vector<SchemeSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SchemeSummary> out;
  std::map<std::pair<double, std::string>, std::vector<double>> groups;
  std::map<std::pair<double, std::string>, int> unconverged;
  std::vector<std::pair<double, std::string>> order;
  for (auto const& r : rows) {
    auto k = std::make_pair(r.sweep_value, r.scheme);
    if (!groups.count(k))
      order.push_back(k);
    groups[k].push_back(r.ee);
    if (!r.converged)
      ++unconverged[k];
  }
  for (auto const& k : order) {
    auto const& v = groups[k];
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v)
      mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v)
      var += (x - mean) * (x - mean);
    const double half = v.size() > 1 ? 1.96 * std::sqrt(var / (n - 1.0) / n) : 0.0;
    out.push_back({k.second, k.first, mean, mean - half, mean + half, static_cast<int>(v.size()), unconverged[k]});
  }
  return out;
}

PairedDiff paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw Error("paired_difference: samples must be nonempty and of equal length");
  PairedDiff d;
  d.n = a.size();
  const double n = static_cast<double>(d.n);
  for (std::size_t i = 0; i < d.n; ++i)
    d.mean += a[i] - b[i];
  d.mean /= n;
  if (d.n < 2) {
    d.lower95 = -std::numeric_limits<double>::infinity();
    return d;
  }
  double var = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) {
    const double x = a[i] - b[i] - d.mean;
    var += x * x;
  }
  d.lower95 = d.mean - 1.645 * std::sqrt(var / (n - 1.0) / n);
  return d;
}

std::vector<double> ee_series(const std::vector<ResultRow>& rows, std::string_view scheme, double sweep_value) {
  std::vector<std::pair<int, double>> v;
  for (auto const& r : rows)
    if (r.scheme == scheme && r.sweep_value == sweep_value)
      v.emplace_back(r.trial, r.ee);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (auto const& p : v)
    out.push_back(p.second);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_csv(std::ostream& out, std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](auto const& a, auto const& b) {
    return std::tie(a.sweep_value, a.scheme, a.trial) < std::tie(b.sweep_value, b.scheme, b.trial);
  });
  out << kCsvHeader << '\n';
  for (auto const& r : rows) {
    out << r.scenario << ',' << r.scheme << ',' << r.sweep_param << ',' << format_double(r.sweep_value) << ','
        << r.trial << ',' << r.seed << ',' << format_double(r.total_r_sec) << ',' << format_double(r.ee) << ','
        << r.match_ops << ',' << r.solver_iters << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_solver_csv(std::ostream& out, std::vector<SolverRow> rows) {
  out << kSolverCsvHeader << '\n';
  for (auto const& r : rows)
    out << r.scenario << ',' << r.scheme << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.residual) << ','
        << format_double(r.final_ee) << '\n';
}

void write_trajectory_csv(std::ostream& out, std::vector<TrajectoryRow> rows) {
  out << kTrajectoryCsvHeader << '\n';
  for (auto const& r : rows)
    out << r.scenario << ',' << r.scheme << ',' << format_double(r.sweep_value) << ',' << r.trial << ',' << r.kind
        << ',' << r.step << ',' << format_double(r.ee) << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f)
    throw Error("write to '" + path + "' failed");
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ostringstream s;
  write_csv(s, table.rows);
  write_text_file(path, s.str());
}

namespace {

template <class T>
T parse_field(const std::string& text, int line, const char* column) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
    throw Error("csv line " + std::to_string(line) + ": bad " + column + " '" + text + "'");
  return v;
}

} // namespace

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw Error("csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty())
      continue;
    auto f = split(line, ',');
    if (f.size() != 11)
      throw Error("csv line " + std::to_string(n) + ": expected 11 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.scenario = f[0];
    r.scheme = f[1];
    r.sweep_param = f[2];
    r.sweep_value = parse_field<double>(f[3], n, "sweep_value");
    r.trial = parse_field<int>(f[4], n, "trial");
    r.seed = parse_field<std::uint64_t>(f[5], n, "seed");
    r.total_r_sec = parse_field<double>(f[6], n, "total_r_sec_bps");
    r.ee = parse_field<double>(f[7], n, "ee_bps_per_w");
    r.match_ops = parse_field<long>(f[8], n, "match_ops");
    r.solver_iters = parse_field<int>(f[9], n, "solver_iters");
    const int c = parse_field<int>(f[10], n, "converged");
    if (c != 0 && c != 1)
      throw Error("csv line " + std::to_string(n) + ": converged must be 0 or 1");
    r.converged = c == 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot open '" + path + "'");
  return read_csv(f);
}

} // namespace noma
