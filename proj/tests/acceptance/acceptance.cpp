// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "noma_lab/cli.hpp"
#include "noma_lab/harness.hpp"
#include "noma_lab/power.hpp"

using namespace noma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
  std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass)
    ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Instance {
  ChannelState ch;
  SystemConfig cfg;
};

Instance draw(SystemConfig cfg, std::uint64_t seed) {
  Rng rng(seed);
  const auto topo = generate_topology(cfg, rng);
  auto ch = sample_channels(topo, cfg, rng);
  return {std::move(ch), cfg};
}

// ---------------------------------------------------------------------------

Verdict model_reduction() {
  const double tol = 1e-12;
  double worst = 0.0;
  long compared = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng pick(derive_seed(seed, {77}));
    std::uniform_int_distribution<int> dm(1, 8), dn(1, 6), dh(1, 3);
    SystemConfig cfg;
    cfg.M = dm(pick);
    cfg.N = dn(pick);
    cfg.H = dh(pick);
    cfg.V = dh(pick);
    auto in = draw(cfg, seed);
    Rng r2(derive_seed(seed, {1}));
    const auto mt = random_assignment(cfg, r2);
    Evaluator ev(in.ch, cfg);
    std::uniform_real_distribution<double> up(0.0, cfg.P_s);
    const RateModel plain{false, 0.0, 0.0, false};
    const RateModel jam{true, 0.0, 0.0, false};
    for (std::size_t k = 0; k < mt.units(); ++k) {
      if (mt.pairs_on(k).empty())
        continue;
      const auto al = ev.allocation(mt, k, up(pick));
      for (auto m : al.members) {
        const auto a = sinr_pair_nocj(al, in.ch, m);
        const auto b = sinr_pair_cj(al, in.ch, m, 0.0, 0.0);
        const auto ea = eve_channel(al, in.ch, m, plain);
        const auto eb = eve_channel(al, in.ch, m, jam);
        const auto ra = secrecy_rate(al, in.ch, m, plain, cfg.bandwidth_sc());
        const auto rb = secrecy_rate(al, in.ch, m, jam, cfg.bandwidth_sc());
        for (double d : {rel(a.a, b.a), rel(a.b, b.b), rel(ea.et, eb.et), rel(ea.er, eb.er), rel(ra.r_a, rb.r_a),
                         rel(ra.r_b, rb.r_b), rel(ra.r_e, rb.r_e), rel(ra.r_sec, rb.r_sec)})
          worst = std::max(worst, d);
        ++compared;
      }
    }
  }
  return {worst <= tol, fmt("1000 instances, %ld pair evaluations, max rel diff %.3g (tol 1e-12)", compared, worst)};
}

Verdict matching_oracle() {
  const auto t0 = Clock::now();
  SystemConfig cfg;
  cfg.M = 2;
  cfg.N = 2;
  cfg.H = 1;
  cfg.V = 1;
  int agree = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto in = draw(cfg, trial_seed(seed, 0));
    Rng init(derive_seed(seed, {1}));
    const auto r = scas2(in.ch, cfg, random_assignment(cfg, init));
    const auto ex = exhaustive_best(in.ch, cfg);
    const double d = rel(Evaluator(in.ch, cfg).evaluate(r.matching).ee.ee, ex.ee);
    worst = std::max(worst, d);
    agree += d <= 1e-9;
  }
  const double secs = seconds_since(t0);
  return {agree == 500 && secs < 60.0,
          fmt("%d/500 seeds within 1e-9 (max rel diff %.3g), %.2f s (limit 60 s)", agree, worst, secs)};
}

Verdict power_oracle() {
  const auto t0 = Clock::now();
  SystemConfig cfg;
  cfg.M = 2;
  cfg.N = 4;
  cfg.H = 2;
  cfg.V = 2;
  int ok = 0;
  double worst = 1e300;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto in = draw(cfg, trial_seed(seed, 0));
    const auto mt = scas1(in.ch, cfg).matching;
    const auto pr = dinkelbach_allocate(mt, in.ch, cfg);
    const auto g = grid_oracle(mt, in.ch, cfg, 50);
    const double ratio = pr.eval.ee.ee / g.ee;
    worst = std::min(worst, ratio);
    ok += ratio >= 0.99;
  }
  const double secs = seconds_since(t0);
  return {ok == 100 && secs < 300.0,
          fmt("%d/100 instances with Dinkelbach >= 0.99 x grid(50); min ratio %.4f, %.1f s (limit 300 s)", ok, worst,
              secs)};
}

Verdict convergence_counts(const ResultTable& t) {
  int n = 0, in_range = 0, fast = 0;
  for (auto const& r : t.rows) {
    if (r.scheme != "SSPA-1")
      continue;
    ++n;
    in_range += r.match_ops >= 2 && r.match_ops <= 10;
    fast += r.converged && r.solver_iters <= 10;
  }
  const double a = n ? double(in_range) / n : 0.0;
  const double b = n ? double(fast) / n : 0.0;
  return {n == 200 && a >= 0.80 && b >= 0.95,
          fmt("(a) SCAS-1 swaps in [2,10]: %.1f%% of %d (need 80%%); (b) Dinkelbach <= 10 iterations: %.1f%% (need "
              "95%%)",
              100 * a, n, 100 * b)};
}

// Paired one-sided test that `hi` beats `lo` on the same trials.
bool beats(const std::vector<ResultRow>& rows, const std::string& s_hi, double v_hi, const std::string& s_lo,
           double v_lo, std::string& log) {
  const auto d = paired_difference(ee_series(rows, s_hi, v_hi), ee_series(rows, s_lo, v_lo));
  log += fmt(" %.3g", d.lower95);
  return d.n >= 200 && d.lower95 > 0.0;
}

struct Trend {
  std::string label;
  bool pass = true;
  std::string log;
};

Trend monotone(const ResultTable& t, const Scenario& sc, bool increasing) {
  Trend tr{sc.name, true, ""};
  for (auto s : sc.schemes) {
    const std::string name(scheme_name(s));
    tr.log += " " + name + ":";
    for (std::size_t k = 0; k + 1 < sc.sweep.values.size(); ++k) {
      const double a = sc.sweep.values[k], b = sc.sweep.values[k + 1];
      tr.pass = (increasing ? beats(t.rows, name, b, name, a, tr.log) : beats(t.rows, name, a, name, b, tr.log)) &&
                tr.pass;
    }
  }
  return tr;
}

Trend dominance(const ResultTable& t, const Scenario& sc) {
  Trend tr{sc.name, true, ""};
  for (double v : sc.sweep.values) {
    tr.log += fmt(" @%g:", v);
    tr.pass = beats(t.rows, "SSPA-2", v, "SSPA-1", v, tr.log) && tr.pass;
    tr.pass = beats(t.rows, "SSPA-1", v, "RA-NOMA", v, tr.log) && tr.pass;
  }
  return tr;
}

Verdict trends(const std::vector<ResultRow>& fig7_rows) {
  std::vector<Trend> all;
  {
    const auto sc = builtin_scenario("fig5");
    all.push_back(dominance(run_scenario(sc), sc));
  }
  {
    const auto sc = builtin_scenario("fig6");
    all.push_back(monotone(run_scenario(sc), sc, false));
  }
  {
    auto sc = builtin_scenario("fig7");
    ResultTable t;
    t.rows = fig7_rows;
    all.push_back(monotone(t, sc, false));
  }
  {
    const auto sc = builtin_scenario("fig8");
    all.push_back(monotone(run_scenario(sc), sc, true));
  }
  {
    const auto sc = builtin_scenario("fig9");
    all.push_back(monotone(run_scenario(sc), sc, true));
  }
  Verdict v{true, "paired one-sided 95% lower bounds, 200 trials;"};
  for (auto const& tr : all) {
    v.pass = v.pass && tr.pass;
    v.detail += " " + tr.label + (tr.pass ? " ok" : " NOT MET") + " [" + tr.log + " ]";
  }
  return v;
}

// Reported only: the same noise sweep over the range around -90 dBm.
void noise_sweep_note() {
  auto sc = builtin_scenario("fig7");
  sc.sweep.values = {-110, -100, -90, -80, -70};
  const auto t = run_scenario(sc);
  std::string line = "[INFO] noise sweep over -110..-70 dBm (not a criterion), mean EE:";
  for (auto const& s : summarize(t.rows))
    line += fmt(" %s@%g=%.4g", s.scheme.c_str(), s.sweep_value, s.mean_ee);
  std::printf("%s\n", line.c_str());
}

Verdict invariants() {
  std::vector<std::string> broken;
  auto need = [&](bool ok, const char* what) {
    if (!ok && std::find(broken.begin(), broken.end(), what) == broken.end())
      broken.emplace_back(what);
  };
  long swaps = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SystemConfig cfg;
    cfg.M = 4 + static_cast<int>(seed % 5);
    cfg.N = 6;
    cfg.cj_enabled = seed % 2 == 1;
    auto in = draw(cfg, trial_seed(seed, 0));
    auto observe = [&](const Matching& mt, const SwapProposal&, double) {
      ++swaps;
      need(mt.consistent(), "matching consistency after swap");
      for (std::size_t k = 0; k < mt.units(); ++k)
        need(mt.pairs_on(k).size() <= static_cast<std::size_t>(cfg.H), "H capacity after swap");
      for (std::size_t m = 0; m < mt.pairs(); ++m)
        need(mt.scs_of(m).size() <= static_cast<std::size_t>(cfg.V), "V capacity after swap");
    };
    const auto m1 = scas1(in.ch, cfg, observe).matching;
    Rng init(derive_seed(seed, {1}));
    const auto m2 = scas2(in.ch, cfg, random_assignment(cfg, init), observe).matching;
    for (auto const* mt : {&m1, &m2}) {
      const auto pr = dinkelbach_allocate(*mt, in.ch, cfg);
      const auto& u = pr.report.ee_trajectory;
      for (std::size_t t = 1; t < u.size(); ++t)
        need(u[t] >= u[t - 1] * (1 - 1e-12), "Dinkelbach u monotone");
      double sum = 0.0;
      for (double p : pr.alloc.relay) {
        need(p >= 0.0, "relay power nonnegative");
        sum += p;
      }
      need(rel(sum, cfg.P_s) <= 1e-9, "budget equality 1e-9");
      Evaluator ev(in.ch, cfg);
      for (std::size_t k = 0; k < mt->units(); ++k) {
        if (mt->pairs_on(k).empty())
          continue;
        const auto al = ev.allocation(*mt, k, pr.alloc.relay[k]);
        const double a = alpha_normalizer(al, in.ch);
        const double beta = std::sqrt(al.relay_power) / a;
        need(rel(beta * beta * a * a, al.relay_power) <= 1e-12, "beta^2 alpha^2 = P_R");
        for (auto const& r : pr.eval.per_unit[k]) {
          need(r.r_sec >= 0.0 && r.r_a >= 0.0 && r.r_b >= 0.0 && r.r_e >= 0.0, "rates nonnegative");
          need(r.r_sec == std::max(0.0, r.r_a + r.r_b - r.r_e), "secrecy hinge");
        }
      }
    }
  }

  // Rayleigh mean power.
  {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 1;
    Rng rng(2024);
    const auto topo = generate_topology(cfg, rng);
    double s_ar = 0.0, s_e = 0.0;
    const int draws = 100000;
    for (int n = 0; n < draws; ++n) {
      const auto ch = sample_channels(topo, cfg, rng);
      s_ar += std::norm(ch.h_AR(0, 0));
      s_e += std::norm(ch.g_E[0]);
    }
    need(std::abs(s_ar / draws / attenuation(distance(topo.pairs[0].a, topo.rs), cfg) - 1.0) < 0.02,
         "Rayleigh mean power 2%");
    need(std::abs(s_e / draws / attenuation(cfg.eve_distance, cfg) - 1.0) < 0.02, "Rayleigh mean power 2%");
  }

  // CSV round-trip.
  {
    Scenario sc;
    sc.name = "roundtrip";
    sc.sweep = {"M", {4, 6}};
    sc.schemes = {Scheme::sspa1, Scheme::sspa2, Scheme::ra_noma};
    sc.trials = 5;
    const auto t = run_scenario(sc);
    std::stringstream s;
    write_csv(s, t.rows);
    need(read_csv(s) == t.rows, "CSV round-trip");
  }

  std::string detail = fmt("%ld observed swaps, 120 power solves, 1e5 fading draws, CSV round-trip", swaps);
  for (auto const& b : broken)
    detail += "; violated: " + b;
  return {broken.empty(), detail};
}

Verdict determinism(std::vector<ResultRow>& rows_out) {
  const auto dir = std::filesystem::temp_directory_path() / "noma_lab_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = (dir / "fig7_a.csv").string();
  const auto b = (dir / "fig7_b.csv").string();
  std::ostringstream sink;
  auto run = [&](const std::string& path) {
    const char* argv[] = {"noma_lab", "run", "fig7", "--seed", "42", "--out", path.c_str()};
    return cli_main(7, argv, sink, sink);
  };
  const int ca = run(a);
  const int cb = run(b);
  if (ca != 0 || cb != 0)
    return {false, fmt("run fig7 exited with %d / %d", ca, cb)};
  const auto ta = read_text_file(a);
  const auto tb = read_text_file(b);
  rows_out = read_csv_file(a);
  std::filesystem::remove_all(dir);
  return {ta == tb && !ta.empty(), fmt("two runs of `run fig7 --seed 42`: %zu bytes each, %s", ta.size(),
                                       ta == tb ? "identical" : "DIFFERENT")};
}

} // namespace

int main() {
  try {
    const auto t0 = Clock::now();
    report(1, "model reduction (CJ with zero jamming fractions = plain model)", model_reduction());
    report(2, "matching oracle (SCAS-2 vs exhaustive, M=N=2, H=V=1)", matching_oracle());
    report(3, "power oracle band (Dinkelbach vs 50-level grid)", power_oracle());
    {
      auto sc = builtin_scenario("fig4");
      sc.schemes = {Scheme::sspa1};
      report(4, "convergence counts at defaults (200 trials)", convergence_counts(run_scenario(sc)));
    }
    std::vector<ResultRow> fig7;
    const auto det = determinism(fig7);
    report(5, "trend reproduction (fig5 dominance, fig6/fig7 decreasing, fig8/fig9 increasing)", trends(fig7));
    noise_sweep_note();
    report(6, "invariant suite", invariants());
    report(7, "determinism", det);
    std::printf("%d of 7 criteria met, %.1f s\n", 7 - failures, seconds_since(t0));
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
