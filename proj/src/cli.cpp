#include "noma_lab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "noma_lab/harness.hpp"
#include "noma_lab/matching.hpp"
#include "noma_lab/power.hpp"

namespace noma {

namespace {

bool is_scenario_key(std::string_view key) {
  return key == "name" || key == "trials" || key == "schemes" || key == "sweep";
}

std::pair<std::string, std::string> split_override(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("--set expects key=value, got '" + s + "'");
  std::string key = s.substr(0, eq);
  if (!is_config_key(key) && !is_scenario_key(key))
    throw UsageError("--set: unknown key '" + key + "'");
  return {std::move(key), s.substr(eq + 1)};
}

} // namespace

Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Secure NOMA two-way relay resource allocation lab", "noma_lab"};
  app.require_subcommand(1);
  Command cmd;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int trials = 0;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a built-in scenario or a scenario file");
  run->add_option("scenario", cmd.target, "Built-in name (see list-scenarios) or scenario file")->required();
  run->add_option("--out", cmd.out, "Result CSV path");
  run->add_option("--solver-out", cmd.solver_out, "Per-trial power solver CSV path");
  run->add_option("--trajectory-out", cmd.trajectory_out, "EE trajectory CSV path");
  auto* seed_opt = run->add_option("--seed", seed, "Base seed");
  auto* trials_opt = run->add_option("--trials", trials, "Trials per sweep value")->check(CLI::PositiveNumber);
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (default NOMA_LAB_THREADS or all cores)");
  run->add_option("--set", sets, "Override key=value (repeatable)");
  run->add_flag("-v,--verbose", cmd.verbosity, "More output");

  auto* validate = app.add_subcommand("validate", "Check a config or scenario file");
  validate->add_option("config", cmd.target, "Config file")->required();
  validate->add_option("--set", sets, "Override key=value (repeatable)");

  auto* oracle = app.add_subcommand("oracle", "Compare heuristics with exhaustive and grid oracles on a small instance");
  oracle->add_option("config", cmd.target, "Config file")->required();
  auto* oseed = oracle->add_option("--seed", seed, "Instance seed");
  oracle->add_option("--set", sets, "Override key=value (repeatable)");

  auto* list = app.add_subcommand("list-scenarios", "Print the built-in scenarios");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\nRun with --help for usage.");
  }

  if (run->parsed()) {
    cmd.verb = Verb::run;
    if (seed_opt->count())
      cmd.seed = seed;
    if (trials_opt->count())
      cmd.trials = trials;
    if (threads_opt->count())
      cmd.threads = threads;
  } else if (validate->parsed()) {
    cmd.verb = Verb::validate;
  } else if (oracle->parsed()) {
    cmd.verb = Verb::oracle;
    if (oseed->count())
      cmd.seed = seed;
  } else if (list->parsed()) {
    cmd.verb = Verb::list_scenarios;
  }
  for (auto const& s : sets)
    cmd.overrides.push_back(split_override(s));
  return cmd;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v)
    s += (s.empty() ? "" : ",") + format_double(x);
  return s;
}

Scenario resolve_scenario(const Command& cmd) {
  Scenario sc;
  if (is_builtin_scenario(cmd.target)) {
    sc = builtin_scenario(cmd.target);
  } else if (std::filesystem::is_regular_file(cmd.target)) {
    sc = parse_scenario(read_text_file(cmd.target));
  } else {
    builtin_scenario(cmd.target); // throws with the list of names
  }
  for (auto const& [k, v] : cmd.overrides)
    apply_scenario_setting(sc, k, v);
  if (cmd.seed)
    sc.base.rng_seed = *cmd.seed;
  if (cmd.trials)
    sc.trials = *cmd.trials;
  return sc;
}

SystemConfig resolve_config(const Command& cmd) {
  // Scenario files are accepted too; their scenario keys are checked and
  // the config part returned.
  Scenario sc = parse_scenario(read_text_file(cmd.target));
  for (auto const& [k, v] : cmd.overrides)
    apply_scenario_setting(sc, k, v);
  if (cmd.seed)
    sc.base.rng_seed = *cmd.seed;
  return sc.base;
}

void print_summary(const ResultTable& table, const Scenario& sc, std::ostream& out) {
  std::string last;
  for (auto const& s : summarize(table.rows)) {
    const auto header = "# " + sc.sweep.param + "=" + format_double(s.sweep_value);
    if (header != last) {
      out << header << '\n';
      last = header;
    }
    out << s.scheme << ' ' << format_double(s.mean_ee) << ' ' << format_double(s.ci95_lo) << ' '
        << format_double(s.ci95_hi) << ' ' << s.trials << '\n';
  }
}

int do_run(const Command& cmd, std::ostream& out, std::ostream& err) {
  const Scenario sc = resolve_scenario(cmd);
  sc.validate();
  const auto table = run_scenario(sc, cmd.threads.value_or(0));
  if (!cmd.out.empty())
    emit_csv(table, cmd.out);
  if (!cmd.solver_out.empty()) {
    std::ostringstream s;
    write_solver_csv(s, table.solver);
    write_text_file(cmd.solver_out, s.str());
  }
  if (!cmd.trajectory_out.empty()) {
    std::ostringstream s;
    write_trajectory_csv(s, table.trajectory);
    write_text_file(cmd.trajectory_out, s.str());
  }
  print_summary(table, sc, out);
  if (table.infeasible > 0) {
    err << "noma_lab: " << table.infeasible << " of " << table.rows.size()
        << " rows could not meet the QoS floor R_min\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int do_validate(const Command& cmd, std::ostream& out) {
  Scenario sc = parse_scenario(read_text_file(cmd.target));
  for (auto const& [k, v] : cmd.overrides)
    apply_scenario_setting(sc, k, v);
  sc.base.validate();
  if (!sc.sweep.values.empty() || !sc.schemes.empty())
    sc.validate();
  out << "ok " << cmd.target << '\n';
  return kExitOk;
}

double rel_delta(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? (a - b) / scale : 0.0;
}

int do_oracle(const Command& cmd, std::ostream& out) {
  const SystemConfig cfg = resolve_config(cmd);
  cfg.validate();
  Rng rng(cfg.rng_seed);
  const auto topo = generate_topology(cfg, rng);
  const auto ch = sample_channels(topo, cfg, rng);
  Rng init_rng(derive_seed(cfg.rng_seed, {1}));
  const auto mr = scas2(ch, cfg, random_assignment(cfg, init_rng));
  const auto ex = exhaustive_best(ch, cfg);
  const double scas_ee = Evaluator(ch, cfg).evaluate(mr.matching).ee.ee;
  out << std::setprecision(17);
  out << "scas2_ee " << format_double(scas_ee) << '\n';
  out << "exhaustive_ee " << format_double(ex.ee) << " (" << ex.enumerated << " matchings)\n";
  out << "scas2_vs_exhaustive_rel_delta " << format_double(rel_delta(scas_ee, ex.ee)) << '\n';

  const auto pr = dinkelbach_allocate(mr.matching, ch, cfg);
  const auto grid = grid_oracle(mr.matching, ch, cfg, 50);
  out << "dinkelbach_ee " << format_double(pr.eval.ee.ee) << " (" << pr.report.iterations << " iterations)\n";
  out << "grid_ee " << format_double(grid.ee) << " (" << grid.points << " points)\n";
  out << "dinkelbach_vs_grid_rel_delta " << format_double(rel_delta(pr.eval.ee.ee, grid.ee)) << '\n';
  return pr.report.infeasible ? kExitInfeasible : kExitOk;
}

int do_list(std::ostream& out) {
  for (auto const& name : builtin_scenario_names()) {
    const auto sc = builtin_scenario(name);
    std::string schemes;
    for (auto s : sc.schemes)
      schemes += (schemes.empty() ? "" : ",") + std::string(scheme_name(s));
    out << name << " sweep=" << sc.sweep.param << ':' << join(sc.sweep.values) << " schemes=" << schemes
        << " cj=" << (sc.base.cj_enabled ? "on" : "off") << " trials=" << sc.trials << '\n';
  }
  return kExitOk;
}

} // namespace

int run_command(const Command& cmd, std::ostream& out, std::ostream& err) {
  switch (cmd.verb) {
  case Verb::run:
    return do_run(cmd, out, err);
  case Verb::validate:
    return do_validate(cmd, out);
  case Verb::oracle:
    return do_oracle(cmd, out);
  case Verb::list_scenarios:
    return do_list(out);
  }
  return kExitInvalid;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  try {
    return run_command(parse_args(args), out, err);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const InfeasibleError& e) {
    err << "noma_lab: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "noma_lab: " << e.what() << '\n';
    return kExitInvalid;
  }
}

} // namespace noma
