#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "noma_lab/channel.hpp"
#include "noma_lab/config.hpp"
#include "noma_lab/matching.hpp"

namespace noma {

/// Relay power of a fixed matching. `relay[k]` is P_R of SC pair k and
/// p(m, k) the share of it attributed to pair m (FTPA split; reporting only,
/// rates depend on the per-unit totals).
struct PowerAllocation {
  Table<double> p;               ///< pairs x units, W
  std::vector<double> relay;     ///< per unit, W
  std::vector<double> fractions; ///< relay[k] / sum(relay)
  double u = 0.0;                ///< Dinkelbach level, bit/s/W

  [[nodiscard]] double total() const;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;             ///< |R - u P| / bandwidth_total at the last iteration
  std::vector<double> ee_trajectory; ///< u before the first and after every iteration
  bool infeasible = false;           ///< the QoS floor cannot be met
  bool fallback = false;             ///< no strictly feasible interior; equal split used
  long newton_steps = 0;
};

// ---------------------------------------------------------------------------
// Generic barrier solver on a scaled simplex {y >= 0, sum y = 1, y <= cap}.

struct SimplexProblem {
  std::size_t dim = 0;
  /// Objective to maximize.
  std::function<double(std::span<const double>)> value;
  /// Optional separable form: value(y) = constant + sum_k term(k, y_k).
  /// When set, derivatives only re-evaluate the affected coordinate.
  std::function<double(std::size_t, double)> term;
  /// Upper bound on every coordinate; infinity for none.
  double cap = std::numeric_limits<double>::infinity();
  /// Inequalities c(y) > 0 enforced through log barriers.
  std::vector<std::function<double(std::span<const double>)>> constraints;
};

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 10.0;
  double gap = 1e-6;
  double newton_tol = 1e-6; ///< on half the Newton decrement of the barrier objective
  int max_newton = 200;
  double grad_step = 1e-6; ///< relative central-difference step
  double curv_step = 1e-3; ///< relative step for curvature estimates
};

struct BarrierResult {
  std::vector<double> y;
  double value = 0.0;
  long newton_steps = 0;
  int rounds = 0;
  bool interior = true; ///< false when the start was not strictly feasible
};

/// Central differences with step rel_step * max(|y_k|, 1e-12).
std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> y, double rel_step);

/// Log-barrier maximization with projected diagonal Newton steps; y0 must be
/// strictly feasible (otherwise returned unchanged with interior = false).
BarrierResult maximize_on_simplex(const SimplexProblem& prob, std::vector<double> y0,
                                  const BarrierOptions& opt = {});

// ---------------------------------------------------------------------------
// Relay power allocation for a matching.

/// Total relay budget: P_s, or (active units) * P_s / N in per-SC-cap mode.
double power_budget(const Matching& mt, const SystemConfig& cfg);

/// Builds the allocation from per-unit totals, splitting each across its
/// members with FTPA.
PowerAllocation make_allocation(const Matching& mt, const Evaluator& ev, std::vector<double> relay);

/// Budget split equally over active units.
PowerAllocation equal_allocation(const Matching& mt, const Evaluator& ev);

/// One parametric subproblem: locally maximizes R(p) - u (P_c + sum p) from
/// `start` (equal split when null). Never returns a point worse than start.
PowerAllocation inner_solve(const Matching& mt, const ChannelState& ch, double u, const SystemConfig& cfg,
                            const PowerAllocation* start = nullptr, SolveReport* report = nullptr);

struct PowerResult {
  PowerAllocation alloc;
  SolveReport report;
  SystemEvaluation eval;
};

/// Parametric outer loop; uses cfg.power_mode for the constraint set.
PowerResult dinkelbach_allocate(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg);

/// Same pipeline with the per-SC cap P_s / N replacing the global coupling.
PowerResult per_sc_cap_mode(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg);

struct GridResult {
  PowerAllocation alloc;
  double ee = 0.0;
  long points = 0;
};

inline constexpr std::size_t kGridMaxDims = 4;

/// Exhaustive search over relay totals k * budget / grid_points on the
/// simplex of active units. Refuses with Error above kGridMaxDims units.
GridResult grid_oracle(const Matching& mt, const ChannelState& ch, const SystemConfig& cfg, int grid_points);

} // namespace noma
