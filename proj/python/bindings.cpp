#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noma_lab/harness.hpp"

namespace py = pybind11;
using namespace noma;

namespace {

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["scheme"] = r.scheme;
  d["sweep_param"] = r.sweep_param;
  d["sweep_value"] = r.sweep_value;
  d["trial"] = r.trial;
  d["seed"] = r.seed;
  d["total_r_sec_bps"] = r.total_r_sec;
  d["ee_bps_per_w"] = r.ee;
  d["match_ops"] = r.match_ops;
  d["solver_iters"] = r.solver_iters;
  d["converged"] = r.converged;
  return d;
}

SystemConfig config_with(const py::dict& overrides) {
  SystemConfig c;
  for (auto [k, v] : overrides)
    apply_setting(c, py::str(k).cast<std::string>(), py::str(v).cast<std::string>());
  c.validate();
  return c;
}

} // namespace

PYBIND11_MODULE(_noma_lab, m) {
  m.doc() = "Secure NOMA two-way relay resource allocation (C++ core)";

  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def("builtin_scenarios", &builtin_scenario_names, "Names of the compiled-in scenarios.");

  m.def(
      "run",
      [](const std::string& scenario, std::optional<int> trials, std::optional<std::uint64_t> seed,
         const py::dict& overrides, unsigned threads) {
        Scenario sc = scenario.find('=') == std::string::npos ? builtin_scenario(scenario) : parse_scenario(scenario);
        for (auto [k, v] : overrides)
          apply_scenario_setting(sc, py::str(k).cast<std::string>(), py::str(v).cast<std::string>());
        if (trials)
          sc.trials = *trials;
        if (seed)
          sc.base.rng_seed = *seed;
        sc.validate();
        ResultTable t;
        {
          py::gil_scoped_release nogil;
          t = run_scenario(sc, threads);
        }
        py::list rows;
        for (auto const& r : t.rows)
          rows.append(row_dict(r));
        return rows;
      },
      py::arg("scenario"), py::arg("trials") = py::none(), py::arg("seed") = py::none(),
      py::arg("overrides") = py::dict(), py::arg("threads") = 0u,
      "Run a built-in scenario (or scenario-file text) and return one dict per result row.");

  m.def(
      "config",
      [](const py::dict& overrides) { return format_config(config_with(overrides)); },
      py::arg("overrides") = py::dict(), "Validated configuration in config-file form.");

  m.def(
      "path_loss_db", [](double d, const py::dict& overrides) { return path_loss_db(d, config_with(overrides)); },
      py::arg("distance_m"), py::arg("overrides") = py::dict());

  m.def(
      "oracle",
      [](const py::dict& overrides) {
        const SystemConfig cfg = config_with(overrides);
        Rng rng(cfg.rng_seed);
        const auto topo = generate_topology(cfg, rng);
        const auto ch = sample_channels(topo, cfg, rng);
        Rng init(derive_seed(cfg.rng_seed, {1}));
        const auto mr = scas2(ch, cfg, random_assignment(cfg, init));
        const auto ex = exhaustive_best(ch, cfg);
        const auto pr = dinkelbach_allocate(mr.matching, ch, cfg);
        const auto grid = grid_oracle(mr.matching, ch, cfg, 50);
        py::dict d;
        d["scas2_ee"] = Evaluator(ch, cfg).evaluate(mr.matching).ee.ee;
        d["exhaustive_ee"] = ex.ee;
        d["dinkelbach_ee"] = pr.eval.ee.ee;
        d["dinkelbach_iterations"] = pr.report.iterations;
        d["grid_ee"] = grid.ee;
        return d;
      },
      py::arg("overrides") = py::dict(), "Heuristics against the exhaustive and grid oracles on one instance.");

  m.def("cdf", &cdf, py::arg("values"), "Empirical CDF as (value, fraction) pairs, ties merged.");

  m.attr("CSV_HEADER") = std::string(kCsvHeader);
}
