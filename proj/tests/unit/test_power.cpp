#include <doctest.h>

#include <cmath>
#include <numeric>

#include "noma_lab/harness.hpp"
#include "noma_lab/power.hpp"

using namespace noma;

namespace {

struct Instance {
  SystemConfig cfg;
  ChannelState ch;
  Matching mt;
};

Instance instance(std::uint64_t seed, int M = 2, int N = 4, int H = 2, int V = 2) {
  Instance in;
  in.cfg.M = M;
  in.cfg.N = N;
  in.cfg.H = H;
  in.cfg.V = V;
  Rng rng(seed);
  const auto topo = generate_topology(in.cfg, rng);
  in.ch = sample_channels(topo, in.cfg, rng);
  in.mt = scas1(in.ch, in.cfg).matching;
  return in;
}

double relay_sum(const PowerAllocation& a) { return std::accumulate(a.relay.begin(), a.relay.end(), 0.0); }

} // namespace

TEST_CASE("barrier solver recovers a concave quadratic optimum") {
  // max -sum a_k (y_k - c_k)^2 on the simplex; KKT gives y_k = c_k - nu / (2 a_k).
  const double a[3] = {1.0, 2.0, 4.0};
  const double c[3] = {0.5, 0.4, 0.3};
  SimplexProblem prob;
  prob.dim = 3;
  prob.term = [&](std::size_t k, double y) { return -a[k] * (y - c[k]) * (y - c[k]); };
  prob.value = [&](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      s += prob.term(k, y[k]);
    return s;
  };
  auto r = maximize_on_simplex(prob, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const double nu = 2.0 * (1.2 - 1.0) / 1.75;
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(std::abs(r.y[k] - (c[k] - nu / (2 * a[k]))) < 1e-4);
  CHECK(std::accumulate(r.y.begin(), r.y.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  // With a 0.35 cap the first two coordinates sit on it.
  prob.cap = 0.35;
  r = maximize_on_simplex(prob, {0.34, 0.33, 0.33});
  CHECK(std::abs(r.y[0] - 0.35) < 1e-4);
  CHECK(std::abs(r.y[1] - 0.35) < 1e-4);
  CHECK(std::abs(r.y[2] - 0.30) < 1e-4);

  // Infeasible start is returned untouched.
  auto bad = maximize_on_simplex(prob, {0.9, 0.05, 0.05});
  CHECK_FALSE(bad.interior);
  CHECK(bad.y[0] == 0.9);
}

TEST_CASE("numerical gradient is Richardson-consistent") {
  auto in = instance(11);
  Evaluator ev(in.ch, in.cfg);
  const auto units = in.mt.active_units();
  REQUIRE(units >= 2);
  std::vector<std::size_t> act;
  for (std::size_t k = 0; k < in.mt.units(); ++k)
    if (!in.mt.pairs_on(k).empty())
      act.push_back(k);
  auto rate = [&](std::span<const double> y) {
    std::vector<double> relay(in.mt.units(), 0.0);
    for (std::size_t a = 0; a < act.size(); ++a)
      relay[act[a]] = in.cfg.P_s * y[a];
    return ev.evaluate(in.mt, relay).ee.r_total / in.cfg.bandwidth_total;
  };
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> y(act.size());
    for (auto& x : y)
      x = u(rng);
    const double s = std::accumulate(y.begin(), y.end(), 0.0);
    for (auto& x : y)
      x /= s;
    auto g1 = numerical_gradient(rate, y, 1e-5);
    auto g2 = numerical_gradient(rate, y, 0.5e-5);
    for (std::size_t k = 0; k < y.size(); ++k)
      CHECK(std::abs(g1[k] - g2[k]) <= 1e-3 * std::max(std::abs(g2[k]), 1e-9));
  }
}

TEST_CASE("Dinkelbach invariants on random instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto in = instance(seed);
    auto r = dinkelbach_allocate(in.mt, in.ch, in.cfg);
    CAPTURE(seed);
    const auto& u = r.report.ee_trajectory;
    for (std::size_t t = 1; t < u.size(); ++t)
      CHECK(u[t] >= u[t - 1] * (1 - 1e-12));
    CHECK(r.report.converged);
    CHECK(r.report.residual <= in.cfg.epsilon);
    CHECK(relay_sum(r.alloc) == doctest::Approx(in.cfg.P_s).epsilon(1e-9));
    double fsum = 0.0, psum = 0.0;
    for (std::size_t k = 0; k < in.mt.units(); ++k) {
      CHECK(r.alloc.relay[k] >= 0.0);
      fsum += r.alloc.fractions[k];
      for (std::size_t m = 0; m < in.mt.pairs(); ++m) {
        CHECK(r.alloc.p(m, k) >= 0.0);
        psum += r.alloc.p(m, k);
      }
    }
    CHECK(fsum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(psum == doctest::Approx(in.cfg.P_s).epsilon(1e-9));
    CHECK(r.eval.ee.ee == doctest::Approx(u.back()).epsilon(1e-12));
    CHECK(r.report.iterations <= 10);
  }
}

TEST_CASE("parametric step never loses to the equal split") {
  auto in = instance(21);
  Evaluator ev(in.ch, in.cfg);
  const auto eq = ev.evaluate(in.mt).ee;
  auto a = inner_solve(in.mt, in.ch, 0.0, in.cfg);
  CHECK(ev.evaluate(in.mt, a.relay).ee.r_total >= eq.r_total);
  CHECK(relay_sum(a) == doctest::Approx(in.cfg.P_s).epsilon(1e-9));
  CHECK_THROWS_AS(inner_solve(in.mt, in.ch, -1.0, in.cfg), Error);
}

TEST_CASE("single unit takes the whole budget") {
  auto in = instance(5, 1, 1, 1, 1);
  auto r = dinkelbach_allocate(in.mt, in.ch, in.cfg);
  CHECK(r.alloc.relay[0] == doctest::Approx(in.cfg.P_s).epsilon(1e-12));
  CHECK(r.alloc.u == doctest::Approx(Evaluator(in.ch, in.cfg).evaluate(in.mt).ee.ee).epsilon(1e-12));
}

TEST_CASE("huge tolerance stops after one iteration") {
  auto in = instance(8);
  in.cfg.epsilon = 1e9;
  auto r = dinkelbach_allocate(in.mt, in.ch, in.cfg);
  CHECK(r.report.iterations == 1);
  CHECK(r.report.converged);
}

TEST_CASE("grid oracle") {
  auto in = instance(13);
  auto g25 = grid_oracle(in.mt, in.ch, in.cfg, 25);
  auto g50 = grid_oracle(in.mt, in.ch, in.cfg, 50);
  CHECK(g50.ee >= g25.ee);
  CHECK(relay_sum(g50.alloc) == doctest::Approx(in.cfg.P_s).epsilon(1e-12));
  auto r = dinkelbach_allocate(in.mt, in.ch, in.cfg);
  CHECK(r.eval.ee.ee >= 0.99 * g50.ee);
  CHECK_THROWS_AS(grid_oracle(in.mt, in.ch, in.cfg, 0), Error);

  auto big = instance(2, 6, 6, 2, 2);
  CHECK_THROWS_AS(grid_oracle(big.mt, big.ch, big.cfg, 10), Error);

  // One active unit: the grid has a single point.
  auto one = instance(5, 1, 1, 1, 1);
  auto g1 = grid_oracle(one.mt, one.ch, one.cfg, 50);
  CHECK(g1.ee == doctest::Approx(Evaluator(one.ch, one.cfg).evaluate(one.mt).ee.ee).epsilon(1e-12));
}

TEST_CASE("per-SC cap mode") {
  auto in = instance(4);
  auto r = per_sc_cap_mode(in.mt, in.ch, in.cfg);
  for (double p : r.alloc.relay)
    CHECK(p <= in.cfg.P_s / in.cfg.N + 1e-9);
  SystemConfig capped = in.cfg;
  capped.power_mode = PowerMode::per_sc_cap;
  auto g = grid_oracle(in.mt, in.ch, capped, 50);
  CHECK(r.eval.ee.ee == doctest::Approx(g.ee).epsilon(1e-9));

  auto single = instance(6, 2, 1, 2, 1);
  auto a = dinkelbach_allocate(single.mt, single.ch, single.cfg);
  auto b = per_sc_cap_mode(single.mt, single.ch, single.cfg);
  CHECK(a.alloc.relay == b.alloc.relay);
  CHECK(a.eval.ee.ee == b.eval.ee.ee);
}

TEST_CASE("QoS floor") {
  auto in = instance(9);
  in.cfg.R_min = 1e12;
  auto r = dinkelbach_allocate(in.mt, in.ch, in.cfg);
  CHECK(r.report.infeasible);

  // An instance whose equal split already serves every pair.
  std::uint64_t seed = 0;
  for (;; ++seed) {
    in = instance(seed);
    auto e = Evaluator(in.ch, in.cfg).evaluate(in.mt);
    bool all = true;
    for (std::size_t m = 0; m < in.mt.pairs(); ++m)
      all = all && (in.mt.scs_of(m).empty() || e.pair_rate[m] > 1e4);
    if (all)
      break;
  }
  CAPTURE(seed);
  in.cfg.R_min = 1e4;
  auto ok = dinkelbach_allocate(in.mt, in.ch, in.cfg);
  CHECK_FALSE(ok.report.infeasible);
  for (std::size_t m = 0; m < in.mt.pairs(); ++m)
    if (!in.mt.scs_of(m).empty())
      CHECK(ok.eval.pair_rate[m] > 1e4);
  CHECK(ok.eval.ee.ee >= Evaluator(in.ch, in.cfg).evaluate(in.mt).ee.ee);
}
