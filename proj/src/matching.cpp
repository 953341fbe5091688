#include "noma_lab/matching.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace noma {

std::vector<ScPairUnit> sc_pair_units(const SystemConfig& cfg) {
  const auto N = static_cast<std::size_t>(cfg.N);
  std::vector<ScPairUnit> u(N);
  for (std::size_t k = 0; k < N; ++k)
    u[k] = {k, (k + static_cast<std::size_t>(cfg.sc_pair_offset)) % N};
  return u;
}

// ---------------------------------------------------------------------------
// Matching

Matching::Matching(std::size_t pairs, std::size_t units, int H, int V)
    : pair_to_scs_(pairs), sc_to_pairs_(units), H_(H), V_(V) {
  if (H < 1 || V < 1)
    throw Error("Matching: H and V must be >= 1");
}

bool Matching::contains(std::size_t m, std::size_t k) const {
  auto const& s = pair_to_scs_.at(m);
  return std::binary_search(s.begin(), s.end(), k);
}

bool Matching::c(std::size_t m, std::size_t i, std::size_t j, std::span<const ScPairUnit> units) const {
  for (auto k : pair_to_scs_.at(m))
    if (units[k].ma == i && units[k].bc == j)
      return true;
  return false;
}

std::size_t Matching::assignments() const {
  std::size_t n = 0;
  for (auto const& s : pair_to_scs_)
    n += s.size();
  return n;
}

std::size_t Matching::active_units() const {
  return static_cast<std::size_t>(
      std::count_if(sc_to_pairs_.begin(), sc_to_pairs_.end(), [](auto const& s) { return !s.empty(); }));
}

namespace {

void insert_sorted(std::vector<std::size_t>& v, std::size_t x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }

void erase_sorted(std::vector<std::size_t>& v, std::size_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x)
    v.erase(it);
}

} // namespace

void Matching::add(std::size_t m, std::size_t k) {
  if (m >= pairs() || k >= units())
    throw Error("Matching::add: index out of range");
  if (contains(m, k))
    throw Error("Matching::add: pair " + std::to_string(m) + " already holds SC pair " + std::to_string(k));
  if (static_cast<int>(sc_to_pairs_[k].size()) >= H_)
    throw Error("Matching::add: SC pair " + std::to_string(k) + " is full");
  if (static_cast<int>(pair_to_scs_[m].size()) >= V_)
    throw Error("Matching::add: user pair " + std::to_string(m) + " is full");
  insert_sorted(pair_to_scs_[m], k);
  insert_sorted(sc_to_pairs_[k], m);
}

void Matching::remove(std::size_t m, std::size_t k) {
  if (!contains(m, k))
    throw Error("Matching::remove: pair " + std::to_string(m) + " does not hold SC pair " + std::to_string(k));
  erase_sorted(pair_to_scs_[m], k);
  erase_sorted(sc_to_pairs_[k], m);
}

bool Matching::is_valid_swap(const SwapProposal& p) const {
  if (p.m == p.n || p.sc_i == p.sc_j || p.m >= pairs() || p.n >= pairs() || p.sc_i >= units() ||
      p.sc_j >= units())
    return false;
  return contains(p.m, p.sc_i) && contains(p.n, p.sc_j) && !contains(p.n, p.sc_i) && !contains(p.m, p.sc_j);
}

void Matching::apply_swap(const SwapProposal& p) {
  if (!is_valid_swap(p))
    throw Error("Matching::apply_swap: proposal violates the membership conditions");
  erase_sorted(pair_to_scs_[p.m], p.sc_i);
  erase_sorted(sc_to_pairs_[p.sc_i], p.m);
  erase_sorted(pair_to_scs_[p.n], p.sc_j);
  erase_sorted(sc_to_pairs_[p.sc_j], p.n);
  insert_sorted(pair_to_scs_[p.m], p.sc_j);
  insert_sorted(sc_to_pairs_[p.sc_j], p.m);
  insert_sorted(pair_to_scs_[p.n], p.sc_i);
  insert_sorted(sc_to_pairs_[p.sc_i], p.n);
}

bool Matching::consistent() const noexcept {
  for (std::size_t m = 0; m < pairs(); ++m) {
    auto const& s = pair_to_scs_[m];
    if (static_cast<int>(s.size()) > V_ || !std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end())
      return false;
    for (auto k : s) {
      if (k >= units())
        return false;
      auto const& t = sc_to_pairs_[k];
      if (!std::binary_search(t.begin(), t.end(), m))
        return false;
    }
  }
  std::size_t total = 0;
  for (auto const& t : sc_to_pairs_) {
    if (static_cast<int>(t.size()) > H_ || !std::is_sorted(t.begin(), t.end()) ||
        std::adjacent_find(t.begin(), t.end()) != t.end())
      return false;
    total += t.size();
  }
  return total == assignments();
}

void Matching::check() const {
  if (!consistent())
    throw Error("matching violates capacity or mutual consistency");
}

std::string Matching::to_text() const {
  std::string out;
  for (std::size_t k = 0; k < units(); ++k) {
    out += std::to_string(k) + ":";
    bool first = true;
    for (auto m : sc_to_pairs_[k]) {
      out += first ? " " : ",";
      out += std::to_string(m);
      first = false;
    }
    out += "\n";
  }
  return out;
}

Matching Matching::from_text(std::string_view text, std::size_t pairs, int H, int V) {
  std::vector<std::vector<std::size_t>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw Error("matching text: missing ':' in '" + line + "'");
    std::size_t k = 0;
    auto head = line.substr(0, colon);
    auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), k);
    if (ec != std::errc{} || k != rows.size())
      throw Error("matching text: SC pair indices must be 0,1,2,... in order");
    rows.emplace_back();
    std::string rest = line.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream items(rest);
    std::size_t m = 0;
    while (items >> m)
      rows.back().push_back(m);
    if (!items.eof())
      throw Error("matching text: malformed member list in '" + line + "'");
  }
  Matching mt(pairs, rows.size(), H, V);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (auto m : rows[k])
      mt.add(m, k);
  return mt;
}

std::vector<unsigned char> Matching::encoding() const {
  std::vector<unsigned char> e(units() * pairs(), 0);
  for (std::size_t k = 0; k < units(); ++k)
    for (auto m : sc_to_pairs_[k])
      e[k * pairs() + m] = 1;
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

Evaluator::Evaluator(const ChannelState& ch, const SystemConfig& cfg)
    : ch_(&ch), cfg_(&cfg), model_(RateModel::from(cfg)), units_(sc_pair_units(cfg)) {
  if (ch.subcarriers() != static_cast<std::size_t>(cfg.N) || ch.pairs() != static_cast<std::size_t>(cfg.M))
    throw Error("Evaluator: channel dimensions do not match the configuration");
}

double Evaluator::pair_crnn(std::size_t m, std::size_t k) const {
  const auto j = units_[k].bc;
  return std::min(ch_->crnn_a(m, j), ch_->crnn_b(m, j));
}

std::vector<double> Evaluator::equal_relay_powers(const Matching& mt) const {
  std::vector<double> p(mt.units(), 0.0);
  const auto active = mt.active_units();
  if (active == 0)
    return p;
  double share = cfg_->P_s / static_cast<double>(active);
  if (cfg_->power_mode == PowerMode::per_sc_cap)
    share = std::min(share, cfg_->P_s / cfg_->N);
  for (std::size_t k = 0; k < mt.units(); ++k)
    if (!mt.pairs_on(k).empty())
      p[k] = share;
  return p;
}

ScAllocation Evaluator::allocation(const Matching& mt, std::size_t k, double relay_power) const {
  return allocation(mt, k, mt.pairs_on(k), relay_power);
}

ScAllocation Evaluator::allocation(const Matching& mt, std::size_t k, std::vector<std::size_t> members,
                                   double relay_power) const {
  ScAllocation al;
  al.sc_ma = units_[k].ma;
  al.sc_bc = units_[k].bc;
  std::sort(members.begin(), members.end());
  al.members = std::move(members);
  al.relay_power = relay_power;
  al.p_a.reserve(al.members.size());
  al.p_b.reserve(al.members.size());
  for (auto m : al.members) {
    const double share = static_cast<double>(std::max<std::size_t>(1, mt.scs_of(m).size()));
    al.p_a.push_back(cfg_->P_Am / share);
    al.p_b.push_back(cfg_->P_Bm / share);
  }
  return al;
}

double Evaluator::unit_rate(const ScAllocation& al) const {
  if (al.members.empty())
    return 0.0;
  double s = 0.0;
  for (auto const& r : sc_rates(al, *ch_, model_, cfg_->bandwidth_sc()))
    s += r.r_sec;
  return s;
}

SystemEvaluation Evaluator::evaluate(const Matching& mt, std::span<const double> relay_powers) const {
  if (relay_powers.size() != mt.units())
    throw Error("Evaluator::evaluate: relay power vector has wrong length");
  SystemEvaluation out;
  out.per_unit.resize(mt.units());
  out.unit_rate.assign(mt.units(), 0.0);
  out.pair_rate.assign(mt.pairs(), 0.0);
  std::vector<PairRates> all;
  for (std::size_t k = 0; k < mt.units(); ++k) {
    if (mt.pairs_on(k).empty())
      continue;
    auto al = allocation(mt, k, relay_powers[k]);
    out.per_unit[k] = sc_rates(al, *ch_, model_, cfg_->bandwidth_sc());
    for (std::size_t s = 0; s < al.members.size(); ++s) {
      out.unit_rate[k] += out.per_unit[k][s].r_sec;
      out.pair_rate[al.members[s]] += out.per_unit[k][s].r_sec;
      all.push_back(out.per_unit[k][s]);
    }
    out.transmit_power += relay_powers[k];
  }
  out.ee = system_ee(all, out.transmit_power, *cfg_);
  return out;
}

SystemEvaluation Evaluator::evaluate(const Matching& mt) const { return evaluate(mt, equal_relay_powers(mt)); }

std::vector<double> ftpa_power(std::span<const std::size_t> members, const ChannelState& ch, std::size_t bc_sc,
                               double budget, double lambda) {
  if (members.empty())
    throw Error("ftpa_power: no members");
  if (budget < 0.0)
    throw Error("ftpa_power: negative budget");
  std::vector<double> w(members.size());
  for (std::size_t s = 0; s < members.size(); ++s) {
    const double g = std::min(ch.crnn_a(members[s], bc_sc), ch.crnn_b(members[s], bc_sc));
    if (lambda > 0.0 && !(g > 0.0))
      throw Error("ftpa_power: zero CRNN for pair " + std::to_string(members[s]) + " with lambda > 0");
    w[s] = lambda == 0.0 ? 1.0 : std::pow(g, -lambda);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w)
    x = budget * x / total;
  return w;
}

// ---------------------------------------------------------------------------
// Swap engine

namespace {

enum class SwapRule {
  two_sided, ///< both SC pairs keep or improve their utility, total strictly improves
  global,    ///< total EE strictly improves
};

enum class Pivot {
  first, ///< apply the first acceptable proposal in scan order
  best,  ///< apply the acceptable proposal with the largest total EE
};

SwapStats run_swaps(Matching& mt, const Evaluator& ev, SwapRule rule, Pivot pivot, int max_sweeps,
                    int max_accepts, const SwapObserver& observer) {
  const auto relay = ev.equal_relay_powers(mt);
  const double p_den = ev.config().P_c + std::accumulate(relay.begin(), relay.end(), 0.0);
  const auto& cfg = ev.config();
  auto rates_of = [&](const ScAllocation& al) {
    return al.members.empty() ? std::vector<PairRates>{}
                              : sc_rates(al, ev.channels(), ev.model(), cfg.bandwidth_sc());
  };
  auto sum_of = [](const std::vector<PairRates>& r) {
    double s = 0.0;
    for (auto const& x : r)
      s += x.r_sec;
    return s;
  };
  auto member_rate = [](const std::vector<std::size_t>& mem, const std::vector<PairRates>& r, std::size_t m) {
    const auto it = std::find(mem.begin(), mem.end(), m);
    return r.at(static_cast<std::size_t>(it - mem.begin())).r_sec;
  };
  std::vector<double> unit_rate(mt.units(), 0.0);
  std::vector<std::vector<PairRates>> rates(mt.units());
  std::vector<std::vector<std::size_t>> members(mt.units());
  for (std::size_t k = 0; k < mt.units(); ++k) {
    const auto al = ev.allocation(mt, k, relay[k]);
    rates[k] = rates_of(al);
    members[k] = al.members;
    unit_rate[k] = sum_of(rates[k]);
  }

  // Summed in fixed unit order so that equal states give equal totals.
  auto total_with = [&](std::size_t i, double ri, std::size_t j, double rj) {
    double s = 0.0;
    for (std::size_t k = 0; k < unit_rate.size(); ++k)
      s += k == i ? ri : (k == j ? rj : unit_rate[k]);
    return s / p_den;
  };
  auto current_total = [&] {
    double s = 0.0;
    for (auto r : unit_rate)
      s += r;
    return s / p_den;
  };

  SwapStats st;
  double ee_max = current_total();
  st.ee_trajectory.push_back(ee_max);

  struct Candidate {
    SwapProposal p;
    double ee = 0.0;
    double ri = 0.0, rj = 0.0;
    ScAllocation al_i, al_j;
    std::vector<PairRates> new_i, new_j;
  };

  while (st.sweeps < max_sweeps && st.accepted < max_accepts) {
    ++st.sweeps;
    long evaluated = 0;
    std::optional<Candidate> pick;
    for (std::size_t m = 0; m < mt.pairs(); ++m) {
      for (std::size_t n = m + 1; n < mt.pairs(); ++n) {
        for (auto sc_i : mt.scs_of(m)) {
          if (mt.contains(n, sc_i))
            continue;
          for (auto sc_j : mt.scs_of(n)) {
            if (mt.contains(m, sc_j))
              continue;
            ++evaluated;
            auto on_i = mt.pairs_on(sc_i);
            std::replace(on_i.begin(), on_i.end(), m, n);
            auto on_j = mt.pairs_on(sc_j);
            std::replace(on_j.begin(), on_j.end(), n, m);
            Candidate c;
            c.p = {m, n, sc_i, sc_j};
            c.al_i = ev.allocation(mt, sc_i, std::move(on_i), relay[sc_i]);
            c.al_j = ev.allocation(mt, sc_j, std::move(on_j), relay[sc_j]);
            c.new_i = rates_of(c.al_i);
            c.new_j = rates_of(c.al_j);
            c.ri = sum_of(c.new_i);
            c.rj = sum_of(c.new_j);
            c.ee = total_with(sc_i, c.ri, sc_j, c.rj);
            bool ok = c.ee > ee_max;
            if (ok && rule == SwapRule::two_sided) {
              // No involved player loses: both SC pairs and both user pairs.
              const double m_old = member_rate(members[sc_i], rates[sc_i], m);
              const double n_old = member_rate(members[sc_j], rates[sc_j], n);
              const double m_new = member_rate(c.al_j.members, c.new_j, m);
              const double n_new = member_rate(c.al_i.members, c.new_i, n);
              ok = c.ri >= unit_rate[sc_i] && c.rj >= unit_rate[sc_j] && m_new >= m_old && n_new >= n_old;
            }
            if (ok && (!pick || c.ee > pick->ee))
              pick = std::move(c);
            if (pick && pivot == Pivot::first)
              break;
          }
          if (pick && pivot == Pivot::first)
            break;
        }
        if (pick && pivot == Pivot::first)
          break;
      }
      if (pick && pivot == Pivot::first)
        break;
    }
    st.evaluated += evaluated;
    st.evaluated_per_sweep.push_back(evaluated);
    if (!pick) {
      st.stable = true;
      break;
    }
    const auto& p = pick->p;
    mt.apply_swap(p);
    unit_rate[p.sc_i] = pick->ri;
    unit_rate[p.sc_j] = pick->rj;
    members[p.sc_i] = pick->al_i.members;
    members[p.sc_j] = pick->al_j.members;
    rates[p.sc_i] = std::move(pick->new_i);
    rates[p.sc_j] = std::move(pick->new_j);
    ee_max = pick->ee;
    ++st.accepted;
    st.ee_trajectory.push_back(ee_max);
    if (observer)
      observer(mt, p, ee_max);
  }
  return st;
}

} // namespace

MatchResult scas1(const ChannelState& ch, const SystemConfig& cfg, const SwapObserver& observer) {
  cfg.validate();
  if (cfg.M * std::min(cfg.V, cfg.N) == 0)
    throw InfeasibleError("scas1: no capacity for any assignment");
  Evaluator ev(ch, cfg);
  const auto M = static_cast<std::size_t>(cfg.M);
  const auto U = ev.units().size();
  MatchResult res{Matching(M, U, cfg.H, cfg.V), {}};
  auto& mt = res.matching;

  // SC pairs with the strongest best-pair CRNN choose first.
  std::vector<double> best(U, 0.0);
  for (std::size_t k = 0; k < U; ++k)
    for (std::size_t m = 0; m < M; ++m)
      best[k] = std::max(best[k], ev.pair_crnn(m, k));
  std::vector<std::size_t> order(U);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return best[a] > best[b]; });

  for (auto k : order) {
    while (static_cast<int>(mt.pairs_on(k).size()) < cfg.H) {
      std::size_t pick = M;
      for (std::size_t m = 0; m < M; ++m) {
        if (mt.contains(m, k) || static_cast<int>(mt.scs_of(m).size()) >= cfg.V)
          continue;
        if (pick == M || ev.pair_crnn(m, k) > ev.pair_crnn(pick, k))
          pick = m;
      }
      if (pick == M)
        break;
      mt.add(pick, k);
    }
  }

  res.stats = run_swaps(mt, ev, SwapRule::two_sided, Pivot::best, cfg.L_m, INT_MAX, observer);
  mt.check();
  return res;
}

MatchResult scas2(const ChannelState& ch, const SystemConfig& cfg, const Matching& init,
                  const SwapObserver& observer) {
  cfg.validate();
  Evaluator ev(ch, cfg);
  if (init.pairs() != static_cast<std::size_t>(cfg.M) || init.units() != ev.units().size() ||
      init.H() != cfg.H || init.V() != cfg.V)
    throw Error("scas2: initial matching does not match the configuration");
  init.check();
  MatchResult res{init, {}};
  res.stats = run_swaps(res.matching, ev, SwapRule::global, Pivot::first, INT_MAX, cfg.L_m, observer);
  res.matching.check();
  return res;
}

// ---------------------------------------------------------------------------
// Counting and uniform sampling of capacity-bounded assignments.
//
// Assignments are built one "line" at a time (a unit or a pair). Lines pick
// between need_min and need_max distinct "slots" from the other side, each
// slot having a residual capacity. Slots are exchangeable, so the number of
// completions depends only on the histogram of residual capacities.

namespace {

long double binom(int n, int k) {
  if (k < 0 || k > n)
    return 0.0L;
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

class LineDp {
public:
  LineDp(int cap, int need_min, int need_max) : cap_(cap), need_min_(need_min), need_max_(need_max) {}

  // hist[r] = number of slots with residual capacity r, r = 0..cap.
  long double count(int lines_left, const std::vector<int>& hist) {
    if (lines_left == 0)
      return 1.0L;
    auto key = std::make_pair(lines_left, hist);
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    long double total = 0.0L;
    for_each_choice(hist, [&](const std::vector<int>& h, long double ways) {
      total += ways * count(lines_left - 1, advance(hist, h));
    });
    memo_.emplace(std::move(key), total);
    return total;
  }

  // Calls f(h, ways) for every per-class pick vector h (h[r] slots taken from
  // residual class r >= 1) with need_min <= sum(h) <= need_max.
  template <class F>
  void for_each_choice(const std::vector<int>& hist, F&& f) const {
    std::vector<int> h(hist.size(), 0);
    recurse(hist, h, 1, 0, 1.0L, f);
  }

  std::vector<int> advance(const std::vector<int>& hist, const std::vector<int>& h) const {
    auto next = hist;
    for (int r = 1; r <= cap_; ++r) {
      next[r] -= h[r];
      next[r - 1] += h[r];
    }
    return next;
  }

private:
  template <class F>
  void recurse(const std::vector<int>& hist, std::vector<int>& h, int r, int taken, long double ways, F& f) const {
    if (r > cap_) {
      if (taken >= need_min_)
        f(h, ways);
      return;
    }
    for (int t = 0; t <= hist[r] && taken + t <= need_max_; ++t) {
      h[r] = t;
      recurse(hist, h, r + 1, taken + t, ways * binom(hist[r], t), f);
    }
    h[r] = 0;
  }

  int cap_;
  int need_min_;
  int need_max_;
  std::map<std::pair<int, std::vector<int>>, long double> memo_;
};

struct Shape {
  bool lines_are_units; // otherwise lines are pairs
  int lines;
  int slots;
  int need;
  int cap;
};

// Maximum cardinality is min(M * V', U * H'): either every unit is filled to
// H' or every pair holds exactly V'.
Shape maximum_shape(std::size_t pairs, std::size_t units, int H, int V) {
  const int M = static_cast<int>(pairs);
  const int U = static_cast<int>(units);
  const int Hc = std::min(H, M);
  const int Vc = std::min(V, U);
  if (static_cast<long>(U) * Hc <= static_cast<long>(M) * Vc)
    return {true, U, M, Hc, Vc};
  return {false, M, U, Vc, Hc};
}

} // namespace

long double count_maximum_matchings(std::size_t pairs, std::size_t units, int H, int V) {
  const auto s = maximum_shape(pairs, units, H, V);
  LineDp dp(s.cap, s.need, s.need);
  std::vector<int> hist(s.cap + 1, 0);
  hist[s.cap] = s.slots;
  return dp.count(s.lines, hist);
}

long double count_feasible_matchings(std::size_t pairs, std::size_t units, int H, int V) {
  const int M = static_cast<int>(pairs);
  const int Vc = std::min(V, static_cast<int>(units));
  LineDp dp(Vc, 0, std::min(H, M));
  std::vector<int> hist(Vc + 1, 0);
  hist[Vc] = M;
  return dp.count(static_cast<int>(units), hist);
}

Matching random_assignment(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto M = static_cast<std::size_t>(cfg.M);
  const auto U = static_cast<std::size_t>(cfg.N);
  const auto s = maximum_shape(M, U, cfg.H, cfg.V);
  LineDp dp(s.cap, s.need, s.need);
  std::vector<int> residual(static_cast<std::size_t>(s.slots), s.cap);
  Matching mt(M, U, cfg.H, cfg.V);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int line = 0; line < s.lines; ++line) {
    std::vector<int> hist(s.cap + 1, 0);
    for (auto r : residual)
      ++hist[r];
    const int left = s.lines - line - 1;
    std::vector<std::pair<std::vector<int>, long double>> choices;
    long double total = 0.0L;
    dp.for_each_choice(hist, [&](const std::vector<int>& h, long double ways) {
      const long double w = ways * dp.count(left, dp.advance(hist, h));
      if (w > 0.0L) {
        choices.emplace_back(h, w);
        total += w;
      }
    });
    long double x = static_cast<long double>(unif(rng)) * total;
    std::size_t c = 0;
    while (c + 1 < choices.size() && x >= choices[c].second) {
      x -= choices[c].second;
      ++c;
    }
    const auto& h = choices.at(c).first;
    // Within each residual class the concrete slots are chosen uniformly.
    std::vector<std::size_t> picked;
    for (int r = 1; r <= s.cap; ++r) {
      if (h[r] == 0)
        continue;
      std::vector<std::size_t> cls;
      for (std::size_t q = 0; q < residual.size(); ++q)
        if (residual[q] == r)
          cls.push_back(q);
      for (int t = 0; t < h[r]; ++t) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(t), cls.size() - 1);
        std::swap(cls[static_cast<std::size_t>(t)], cls[pick(rng)]);
        picked.push_back(cls[static_cast<std::size_t>(t)]);
      }
    }
    for (auto q : picked) {
      --residual[q];
      if (s.lines_are_units)
        mt.add(q, static_cast<std::size_t>(line));
      else
        mt.add(static_cast<std::size_t>(line), q);
    }
  }
  mt.check();
  return mt;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

void for_each_feasible_matching(std::size_t pairs, std::size_t units, int H, int V,
                                const std::function<void(const Matching&)>& visit) {
  Matching mt(pairs, units, H, V);
  std::function<void(std::size_t, std::size_t)> unit_step;
  // Chooses members of unit k among pairs >= from, then moves on.
  unit_step = [&](std::size_t k, std::size_t from) {
    if (k == units) {
      visit(mt);
      return;
    }
    unit_step(k + 1, 0);
    if (static_cast<int>(mt.pairs_on(k).size()) >= H)
      return;
    for (std::size_t m = from; m < pairs; ++m) {
      if (static_cast<int>(mt.scs_of(m).size()) >= V)
        continue;
      mt.add(m, k);
      unit_step(k, m + 1);
      mt.remove(m, k);
    }
  };
  unit_step(0, 0);
}

ExhaustiveResult exhaustive_best(const ChannelState& ch, const SystemConfig& cfg) {
  cfg.validate();
  const auto M = static_cast<std::size_t>(cfg.M);
  const auto U = static_cast<std::size_t>(cfg.N);
  const auto n = count_feasible_matchings(M, U, cfg.H, cfg.V);
  if (n > kExhaustiveLimit)
    throw Error("exhaustive_best: " + std::to_string(static_cast<double>(n)) +
                " feasible matchings exceed the enumeration limit");
  Evaluator ev(ch, cfg);
  ExhaustiveResult best;
  bool have = false;
  std::vector<unsigned char> best_code;
  for_each_feasible_matching(M, U, cfg.H, cfg.V, [&](const Matching& mt) {
    ++best.enumerated;
    const double ee = ev.evaluate(mt).ee.ee;
    if (!have || ee > best.ee || (ee == best.ee && mt.encoding() < best_code)) {
      best.matching = mt;
      best.ee = ee;
      best_code = mt.encoding();
      have = true;
    }
  });
  return best;
}

} // namespace noma
