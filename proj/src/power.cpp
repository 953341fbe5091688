#include "noma_lab/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace noma {

double PowerAllocation::total() const { return std::accumulate(relay.begin(), relay.end(), 0.0); }

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> y, double rel_step) {
  std::vector<double> x(y.begin(), y.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(std::abs(y[k]), 1e-12);
    x[k] = y[k] + h;
    const double fp = f(x);
    x[k] = y[k] - h;
    const double fm = f(x);
    x[k] = y[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Barrier solver

namespace {

class BarrierState {
public:
  BarrierState(const SimplexProblem& prob, const BarrierOptions& opt) : prob_(prob), opt_(opt) {}

  [[nodiscard]] bool strictly_feasible(std::span<const double> y) const {
    for (double v : y)
      if (!(v > 0.0) || !(v < prob_.cap))
        return false;
    for (auto const& c : prob_.constraints)
      if (!(c(y) > 0.0))
        return false;
    return true;
  }

  // t * f(y) + barrier terms; -inf outside the interior.
  [[nodiscard]] double phi(std::span<const double> y, double t) const {
    if (!strictly_feasible(y))
      return -std::numeric_limits<double>::infinity();
    double s = t * prob_.value(y);
    for (double v : y) {
      s += std::log(v);
      if (std::isfinite(prob_.cap))
        s += std::log(prob_.cap - v);
    }
    for (auto const& c : prob_.constraints)
      s += std::log(c(y));
    return s;
  }

  // First and (non-positive) second derivative of f along coordinate k.
  void derivatives(std::vector<double>& y, std::size_t k, double& g, double& c) const {
    const double yk = y[k];
    const double h = opt_.grad_step * std::max(yk, 1e-12);
    const double hc = opt_.curv_step * std::max(yk, 1e-12);
    auto at = [&](double v) {
      if (prob_.term)
        return prob_.term(k, v);
      y[k] = v;
      const double r = prob_.value(y);
      y[k] = yk;
      return r;
    };
    g = (at(yk + h) - at(yk - h)) / (2.0 * h);
    c = (at(yk + hc) - 2.0 * at(yk) + at(yk - hc)) / (hc * hc);
  }

  std::size_t inequality_count() const {
    return prob_.dim * (std::isfinite(prob_.cap) ? 2 : 1) + prob_.constraints.size();
  }

private:
  const SimplexProblem& prob_;
  const BarrierOptions& opt_;
};

} // namespace

BarrierResult maximize_on_simplex(const SimplexProblem& prob, std::vector<double> y0, const BarrierOptions& opt) {
  if (y0.size() != prob.dim || !prob.value)
    throw Error("maximize_on_simplex: malformed problem");
  BarrierResult res;
  res.y = std::move(y0);
  auto& y = res.y;
  const std::size_t d = prob.dim;
  BarrierState st(prob, opt);

  if (d == 1 || !st.strictly_feasible(y)) {
    res.interior = d == 1 && st.strictly_feasible(y);
    res.value = prob.value(y);
    return res;
  }

  std::vector<double> grad(d), hess(d), delta(d), trial(d);
  std::vector<std::vector<double>> cgrad(prob.constraints.size());
  const double m = static_cast<double>(st.inequality_count());

  for (double t = opt.t0;; t *= opt.mu) {
    ++res.rounds;
    for (int it = 0; it < opt.max_newton; ++it) {
      std::vector<double> cval(prob.constraints.size());
      for (std::size_t i = 0; i < prob.constraints.size(); ++i) {
        cval[i] = prob.constraints[i](y);
        cgrad[i] = numerical_gradient(prob.constraints[i], y, opt.grad_step);
      }
      for (std::size_t k = 0; k < d; ++k) {
        double g = 0.0, c = 0.0;
        st.derivatives(y, k, g, c);
        grad[k] = t * g + 1.0 / y[k];
        hess[k] = t * std::min(c, 0.0) - 1.0 / (y[k] * y[k]);
        if (std::isfinite(prob.cap)) {
          const double s = prob.cap - y[k];
          grad[k] -= 1.0 / s;
          hess[k] -= 1.0 / (s * s);
        }
        for (std::size_t i = 0; i < cval.size(); ++i) {
          const double q = cgrad[i][k] / cval[i];
          grad[k] += q;
          hess[k] -= q * q;
        }
      }
      // Newton step restricted to sum(delta) = 0.
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        num += grad[k] / hess[k];
        den += 1.0 / hess[k];
      }
      const double nu = num / den;
      double decrement = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        delta[k] = -(grad[k] - nu) / hess[k];
        decrement += (grad[k] - nu) * delta[k];
      }
      if (!(decrement > 2.0 * opt.newton_tol))
        break;

      double s = 1.0;
      for (std::size_t k = 0; k < d; ++k) {
        if (delta[k] < 0.0)
          s = std::min(s, 0.99 * y[k] / -delta[k]);
        else if (delta[k] > 0.0 && std::isfinite(prob.cap))
          s = std::min(s, 0.99 * (prob.cap - y[k]) / delta[k]);
      }
      const double phi0 = st.phi(y, t);
      double phi1 = phi0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
        for (std::size_t k = 0; k < d; ++k)
          trial[k] = y[k] + s * delta[k];
        phi1 = st.phi(trial, t);
        if (phi1 >= phi0 + 0.25 * s * decrement) {
          moved = true;
          break;
        }
      }
      if (!moved)
        break;
      // Progress below the rounding level of phi: derivative noise dominates.
      const bool stalled = phi1 - phi0 <= 1e-12 * std::max(1.0, std::abs(phi0));
      const double sum = std::accumulate(trial.begin(), trial.end(), 0.0);
      for (std::size_t k = 0; k < d; ++k)
        y[k] = trial[k] / sum;
      ++res.newton_steps;
      if (stalled)
        break;
    }
    if (m / t < opt.gap)
      break;
  }
  res.value = prob.value(y);
  return res;
}

// ---------------------------------------------------------------------------
// Relay power for a matching

double power_budget(const Matching& mt, const SystemConfig& cfg) {
  const auto active = static_cast<double>(mt.active_units());
  if (cfg.power_mode == PowerMode::per_sc_cap)
    return std::min(cfg.P_s, active * cfg.P_s / cfg.N);
  return cfg.P_s;
}

PowerAllocation make_allocation(const Matching& mt, const Evaluator& ev, std::vector<double> relay) {
  if (relay.size() != mt.units())
    throw Error("make_allocation: relay vector has wrong length");
  PowerAllocation a;
  a.p = Table<double>(mt.pairs(), mt.units(), 0.0);
  a.relay = std::move(relay);
  const double total = a.total();
  a.fractions.assign(mt.units(), 0.0);
  for (std::size_t k = 0; k < mt.units(); ++k) {
    const auto& members = mt.pairs_on(k);
    if (total > 0.0)
      a.fractions[k] = a.relay[k] / total;
    if (members.empty())
      continue;
    const auto split =
        ftpa_power(members, ev.channels(), ev.units()[k].bc, a.relay[k], ev.config().lambda_ftpa);
    for (std::size_t s = 0; s < members.size(); ++s)
      a.p(members[s], k) = split[s];
  }
  return a;
}

PowerAllocation equal_allocation(const Matching& mt, const Evaluator& ev) {
  return make_allocation(mt, ev, ev.equal_relay_powers(mt));
}

namespace {

// Rates of the active units as functions of their relay power.
class UnitRates {
public:
  UnitRates(const Matching& mt, const Evaluator& ev) : ev_(ev) {
    for (std::size_t k = 0; k < mt.units(); ++k) {
      if (mt.pairs_on(k).empty())
        continue;
      active_.push_back(k);
      alloc_.push_back(ev.allocation(mt, k, 0.0));
    }
  }

  [[nodiscard]] const std::vector<std::size_t>& active() const { return active_; }

  double rate(std::size_t a, double relay) {
    alloc_[a].relay_power = relay;
    return ev_.unit_rate(alloc_[a]);
  }

  std::vector<PairRates> pair_rates(std::size_t a, double relay) {
    alloc_[a].relay_power = relay;
    return sc_rates(alloc_[a], ev_.channels(), ev_.model(), ev_.config().bandwidth_sc());
  }

  [[nodiscard]] const std::vector<std::size_t>& members(std::size_t a) const { return alloc_[a].members; }

private:
  const Evaluator& ev_;
  std::vector<std::size_t> active_;
  std::vector<ScAllocation> alloc_;
};

// Per-pair secrecy rates summed over units, for relay totals on active units.
std::vector<double> pair_totals(UnitRates& ur, std::size_t pairs, std::span<const double> relay) {
  std::vector<double> r(pairs, 0.0);
  for (std::size_t a = 0; a < ur.active().size(); ++a) {
    const auto rates = ur.pair_rates(a, relay[a]);
    for (std::size_t s = 0; s < rates.size(); ++s)
      r[ur.members(a)[s]] += rates[s].r_sec;
  }
  return r;
}

bool meets_floor(const Matching& mt, const std::vector<double>& pair_rate, double r_min) {
  if (r_min <= 0.0)
    return true;
  for (std::size_t m = 0; m < mt.pairs(); ++m)
    if (!mt.scs_of(m).empty() && !(pair_rate[m] > r_min))
      return false;
  return true;
}

} // namespace

PowerAllocation inner_solve(const Matching& mt, const ChannelState& ch, double u, const SystemConfig& cfg,
                            const PowerAllocation* start, SolveReport* report) {
  if (!(u >= 0.0))
    throw Error("inner_solve: level u must be nonnegative");
  Evaluator ev(ch, cfg);
  PowerAllocation from = start ? *start : equal_allocation(mt, ev);
  from.u = u;
  UnitRates ur(mt, ev);
  const auto& act = ur.active();
  const std::size_t d = act.size();
  if (d <= 1)
    return from;

  const double B = power_budget(mt, cfg);
  const double bw = cfg.bandwidth_total;
  std::vector<double> y0(d);
  for (std::size_t a = 0; a < d; ++a)
    y0[a] = from.relay[act[a]] / B;

  SimplexProblem prob;
  prob.dim = d;
  prob.term = [&](std::size_t a, double y) { return (ur.rate(a, B * y) - u * B * y) / bw; };
  prob.value = [&](std::span<const double> y) {
    double s = -u * cfg.P_c / bw;
    for (std::size_t a = 0; a < d; ++a)
      s += prob.term(a, y[a]);
    return s;
  };
  if (cfg.power_mode == PowerMode::per_sc_cap)
    prob.cap = (cfg.P_s / cfg.N) / B;
  if (cfg.R_min > 0.0) {
    for (std::size_t m = 0; m < mt.pairs(); ++m) {
      if (mt.scs_of(m).empty())
        continue;
      prob.constraints.push_back([&, m](std::span<const double> y) {
        std::vector<double> relay(d);
        for (std::size_t a = 0; a < d; ++a)
          relay[a] = B * y[a];
        return (pair_totals(ur, mt.pairs(), relay)[m] - cfg.R_min) / bw;
      });
    }
  }

  // A cap that leaves no slack means the feasible set is a single point.
  if (std::isfinite(prob.cap) && prob.cap * static_cast<double>(d) <= 1.0 + 1e-12) {
    if (report)
      report->fallback = true;
    return from;
  }

  const double f0 = prob.value(y0);
  auto res = maximize_on_simplex(prob, y0);
  if (report) {
    report->newton_steps += res.newton_steps;
    if (!res.interior)
      report->fallback = true;
  }
  // The objective is not concave: the optimum parks most of the budget on
  // one unit and leaves the rest near their small individual optima, and
  // which unit takes the bulk is a basin choice. Score every such start and
  // climb from the two best.
  if (res.interior && !std::isfinite(prob.cap)) {
    const double rest = std::min(5e-4, 0.5 / static_cast<double>(d - 1));
    std::vector<std::pair<double, std::size_t>> scored;
    auto start_on = [&](std::size_t a) {
      std::vector<double> y(d, rest);
      y[a] = 1.0 - rest * static_cast<double>(d - 1);
      return y;
    };
    for (std::size_t a = 0; a < d; ++a) {
      const auto y = start_on(a);
      const bool ok = std::all_of(prob.constraints.begin(), prob.constraints.end(),
                                  [&](auto const& c) { return c(y) > 0.0; });
      if (ok)
        scored.emplace_back(-prob.value(y), a);
    }
    std::sort(scored.begin(), scored.end());
    // A small t would pull the iterate back to the centre and erase the
    // choice of basin.
    BarrierOptions late;
    late.t0 = 1e4;
    for (std::size_t s = 0; s < std::min<std::size_t>(2, scored.size()); ++s) {
      auto alt = maximize_on_simplex(prob, start_on(scored[s].second), late);
      if (report)
        report->newton_steps += alt.newton_steps;
      if (alt.interior && alt.value > res.value)
        res = std::move(alt);
    }
  }
  if (!res.interior || !(res.value >= f0))
    return from;

  std::vector<double> relay(mt.units(), 0.0);
  for (std::size_t a = 0; a < d; ++a)
    relay[act[a]] = B * res.y[a];
  auto out = make_allocation(mt, ev, std::move(relay));
  out.u = u;
  return out;
}

PowerResult dinkelbach_allocate(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg) {
  cfg.validate();
  mt.check();
  Evaluator ev(ch, cfg);
  PowerResult res;
  auto& rep = res.report;
  res.alloc = equal_allocation(mt, ev);
  res.eval = ev.evaluate(mt, res.alloc.relay);
  double u = res.eval.ee.ee;
  res.alloc.u = u;
  rep.ee_trajectory.push_back(u);

  if (mt.active_units() == 0) {
    rep.converged = true;
    return res;
  }
  if (!meets_floor(mt, res.eval.pair_rate, cfg.R_min)) {
    rep.infeasible = true;
    return res;
  }

  const double bw = cfg.bandwidth_total;
  for (int l = 1; l <= cfg.L_m; ++l) {
    auto next = inner_solve(mt, ch, u, cfg, &res.alloc, &rep);
    auto e = ev.evaluate(mt, next.relay);
    rep.residual = std::abs(e.ee.r_total - u * e.ee.p_total) / bw;
    u = e.ee.ee;
    rep.ee_trajectory.push_back(u);
    rep.iterations = l;
    res.alloc = std::move(next);
    res.alloc.u = u;
    res.eval = std::move(e);
    if (rep.residual <= cfg.epsilon) {
      rep.converged = true;
      break;
    }
  }
  return res;
}

PowerResult per_sc_cap_mode(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg) {
  SystemConfig capped = cfg;
  capped.power_mode = PowerMode::per_sc_cap;
  return dinkelbach_allocate(mt, ch, capped);
}

// ---------------------------------------------------------------------------
// Grid oracle

GridResult grid_oracle(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg, int grid_points) {
  cfg.validate();
  if (grid_points < 1)
    throw Error("grid_oracle: grid_points must be >= 1");
  Evaluator ev(ch, cfg);
  UnitRates ur(mt, ev);
  const auto& act = ur.active();
  const std::size_t d = act.size();
  if (d > kGridMaxDims)
    throw Error("grid_oracle: " + std::to_string(d) + " active SC pairs exceed the " +
                std::to_string(kGridMaxDims) + "-dimension limit");
  GridResult best;
  if (d == 0) {
    best.alloc = equal_allocation(mt, ev);
    best.ee = ev.evaluate(mt).ee.ee;
    best.points = 1;
    return best;
  }

  const double B = power_budget(mt, cfg);
  const double cap = cfg.power_mode == PowerMode::per_sc_cap ? cfg.P_s / cfg.N : B;
  if (cap * static_cast<double>(d) <= B * (1.0 + 1e-12)) {
    // Caps leave a single feasible point.
    best.alloc = equal_allocation(mt, ev);
    best.ee = ev.evaluate(mt, best.alloc.relay).ee.ee;
    best.alloc.u = best.ee;
    best.points = 1;
    return best;
  }
  const auto G = static_cast<std::size_t>(grid_points);
  // Rates of every unit at every grid level, computed once.
  std::vector<std::vector<std::vector<PairRates>>> table(d, std::vector<std::vector<PairRates>>(G + 1));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t n = 0; n <= G; ++n)
      table[a][n] = ur.pair_rates(a, B * static_cast<double>(n) / static_cast<double>(G));

  std::vector<std::size_t> level(d, 0), best_level;
  bool have = false;
  auto visit = [&] {
    ++best.points;
    std::vector<double> pair_rate(mt.pairs(), 0.0);
    double r = 0.0, p = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double x = B * static_cast<double>(level[a]) / static_cast<double>(G);
      if (x > cap * (1.0 + 1e-12))
        return;
      p += x;
      for (std::size_t s = 0; s < table[a][level[a]].size(); ++s) {
        r += table[a][level[a]][s].r_sec;
        pair_rate[ur.members(a)[s]] += table[a][level[a]][s].r_sec;
      }
    }
    if (!meets_floor(mt, pair_rate, cfg.R_min))
      return;
    const double ee = r / (cfg.P_c + p);
    if (!have || ee > best.ee) {
      best.ee = ee;
      best_level = level;
      have = true;
    }
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t a, std::size_t left) {
    if (a + 1 == d) {
      level[a] = left;
      visit();
      return;
    }
    for (std::size_t n = 0; n <= left; ++n) {
      level[a] = n;
      rec(a + 1, left - n);
    }
  };
  rec(0, G);
  if (!have)
    throw InfeasibleError("grid_oracle: no grid point satisfies the constraints");

  std::vector<double> relay(mt.units(), 0.0);
  for (std::size_t a = 0; a < d; ++a)
    relay[act[a]] = B * static_cast<double>(best_level[a]) / static_cast<double>(G);
  best.alloc = make_allocation(mt, ev, std::move(relay));
  best.alloc.u = best.ee;
  return best;
}

} // namespace noma
