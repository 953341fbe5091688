#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noma_lab/channel.hpp"
#include "noma_lab/config.hpp"
#include "noma_lab/rates.hpp"

namespace noma {

/// An allocation unit: MA-phase subcarrier `ma` and BC-phase subcarrier `bc`.
struct ScPairUnit {
  std::size_t ma = 0;
  std::size_t bc = 0;
};

/// The N SC pairs of a configuration: unit k = (k, (k + sc_pair_offset) mod N).
std::vector<ScPairUnit> sc_pair_units(const SystemConfig& cfg);

struct SwapProposal {
  std::size_t m = 0;    ///< pair currently holding sc_i
  std::size_t n = 0;    ///< pair currently holding sc_j
  std::size_t sc_i = 0; ///< moves from m to n
  std::size_t sc_j = 0; ///< moves from n to m
};

/// Many-to-many assignment between user pairs and SC pairs. Both adjacency
/// lists are kept sorted and mutually consistent; every mutation enforces
/// the H (per SC pair) and V (per user pair) caps.
class Matching {
public:
  Matching() = default;
  Matching(std::size_t pairs, std::size_t units, int H, int V);

  [[nodiscard]] std::size_t pairs() const { return pair_to_scs_.size(); }
  [[nodiscard]] std::size_t units() const { return sc_to_pairs_.size(); }
  [[nodiscard]] int H() const { return H_; }
  [[nodiscard]] int V() const { return V_; }

  [[nodiscard]] const std::vector<std::size_t>& scs_of(std::size_t m) const { return pair_to_scs_.at(m); }
  [[nodiscard]] const std::vector<std::size_t>& pairs_on(std::size_t k) const { return sc_to_pairs_.at(k); }
  [[nodiscard]] bool contains(std::size_t m, std::size_t k) const;
  /// Binary assignment variable c_{m,i,j}; true iff pair m holds the unit (i, j).
  [[nodiscard]] bool c(std::size_t m, std::size_t i, std::size_t j, std::span<const ScPairUnit> units) const;
  [[nodiscard]] std::size_t assignments() const;
  [[nodiscard]] std::size_t active_units() const;

  void add(std::size_t m, std::size_t k);
  void remove(std::size_t m, std::size_t k);

  /// Checks the four membership conditions of a swap.
  [[nodiscard]] bool is_valid_swap(const SwapProposal& p) const;
  void apply_swap(const SwapProposal& p);

  /// Capacity and mutual consistency; throws Error on violation.
  void check() const;
  [[nodiscard]] bool consistent() const noexcept;

  /// One line per SC pair: `k: m1,m2,...`.
  [[nodiscard]] std::string to_text() const;
  static Matching from_text(std::string_view text, std::size_t pairs, int H, int V);

  /// Row-major (unit, pair) indicator vector; used for ordering ties.
  [[nodiscard]] std::vector<unsigned char> encoding() const;

  bool operator==(const Matching&) const = default;

private:
  std::vector<std::vector<std::size_t>> pair_to_scs_;
  std::vector<std::vector<std::size_t>> sc_to_pairs_;
  int H_ = 1;
  int V_ = 1;
};

/// Per-SC-pair and system rates of a matching under given relay powers.
struct SystemEvaluation {
  std::vector<std::vector<PairRates>> per_unit; ///< members order of each unit
  std::vector<double> unit_rate;                ///< sum of r_sec per unit
  std::vector<double> pair_rate;                ///< sum of r_sec per user pair
  double transmit_power = 0.0;
  EnergyEfficiency ee;
};

/// Binds channels and configuration for repeated evaluation of matchings.
/// Uplink power of a pair is split equally over the SC pairs it holds.
class Evaluator {
public:
  Evaluator(const ChannelState& ch, const SystemConfig& cfg);

  [[nodiscard]] const ChannelState& channels() const { return *ch_; }
  [[nodiscard]] const SystemConfig& config() const { return *cfg_; }
  [[nodiscard]] const RateModel& model() const { return model_; }
  [[nodiscard]] const std::vector<ScPairUnit>& units() const { return units_; }

  /// Pair CRNN on a unit: the weaker of the two RS -> user links.
  [[nodiscard]] double pair_crnn(std::size_t m, std::size_t k) const;

  /// Relay powers used before power optimization: P_s split equally over
  /// active units (capped at P_s / N per unit in per-SC-cap mode).
  [[nodiscard]] std::vector<double> equal_relay_powers(const Matching& mt) const;

  [[nodiscard]] ScAllocation allocation(const Matching& mt, std::size_t k, double relay_power) const;
  /// Allocation of unit k with an explicit member list (uplink splits taken
  /// from `mt`, which must have the same per-pair counts).
  [[nodiscard]] ScAllocation allocation(const Matching& mt, std::size_t k, std::vector<std::size_t> members,
                                        double relay_power) const;

  [[nodiscard]] double unit_rate(const ScAllocation& al) const;
  [[nodiscard]] SystemEvaluation evaluate(const Matching& mt, std::span<const double> relay_powers) const;
  [[nodiscard]] SystemEvaluation evaluate(const Matching& mt) const;

private:
  const ChannelState* ch_;
  const SystemConfig* cfg_;
  RateModel model_;
  std::vector<ScPairUnit> units_;
};

/// Fractional transmit power split of `budget` across `members` of unit
/// `bc_sc`: weight proportional to CRNN^-lambda. Throws Error when lambda > 0
/// and a member has zero CRNN, or when members is empty.
std::vector<double> ftpa_power(std::span<const std::size_t> members, const ChannelState& ch, std::size_t bc_sc,
                               double budget, double lambda);

using SwapObserver = std::function<void(const Matching&, const SwapProposal&, double ee_after)>;

struct SwapStats {
  int accepted = 0;
  int sweeps = 0;
  long evaluated = 0;
  std::vector<long> evaluated_per_sweep;
  std::vector<double> ee_trajectory; ///< total EE before the first swap and after each accepted swap
  bool stable = false;               ///< last sweep found no acceptable swap
};

struct MatchResult {
  Matching matching;
  SwapStats stats;
};

/// CRNN-greedy admission followed by two-sided exchange swaps.
MatchResult scas1(const ChannelState& ch, const SystemConfig& cfg, const SwapObserver& observer = {});

/// Global-EE swap search from an arbitrary feasible matching.
MatchResult scas2(const ChannelState& ch, const SystemConfig& cfg, const Matching& init,
                  const SwapObserver& observer = {});

/// Uniformly random maximum-cardinality feasible matching.
Matching random_assignment(const SystemConfig& cfg, Rng& rng);

/// Number of maximum-cardinality feasible matchings (the support of
/// random_assignment).
long double count_maximum_matchings(std::size_t pairs, std::size_t units, int H, int V);
/// Number of feasible matchings of any cardinality, including the empty one.
long double count_feasible_matchings(std::size_t pairs, std::size_t units, int H, int V);

struct ExhaustiveResult {
  Matching matching;
  double ee = 0.0;
  long enumerated = 0;
};

inline constexpr long double kExhaustiveLimit = 1e6L;

/// Best feasible matching under equal per-unit relay powers. Refuses with
/// Error when more than kExhaustiveLimit matchings exist.
ExhaustiveResult exhaustive_best(const ChannelState& ch, const SystemConfig& cfg);

/// Calls `visit` on every feasible matching (tests and the oracle).
void for_each_feasible_matching(std::size_t pairs, std::size_t units, int H, int V,
                                const std::function<void(const Matching&)>& visit);

} // namespace noma
