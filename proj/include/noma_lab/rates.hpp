#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "noma_lab/channel.hpp"
#include "noma_lab/config.hpp"

namespace noma {

/// One SC pair (MA subcarrier sc_ma, BC subcarrier sc_bc) and the user pairs
/// multiplexed on it. p_a / p_b are the uplink powers of each member on
/// sc_ma, parallel to `members`.
struct ScAllocation {
  std::size_t sc_ma = 0;
  std::size_t sc_bc = 0;
  std::vector<std::size_t> members;
  double relay_power = 0.0;
  std::vector<double> p_a;
  std::vector<double> p_b;

  /// Throws Error on empty/duplicate members, negative powers or
  /// mismatched vector lengths.
  void validate() const;
  /// Position of pair `m` inside `members`; throws Error if absent.
  [[nodiscard]] std::size_t slot_of(std::size_t m) const;
};

/// Cooperative-jamming switches shared by every rate evaluation.
struct RateModel {
  bool cj = false;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool strict_paper_cov = false;

  static RateModel from(const SystemConfig& cfg);
};

struct Interference {
  double a = 0.0; ///< cochannel interference seen by A_m
  double b = 0.0; ///< cochannel interference seen by B_m
};

struct Sinr {
  double a = 0.0;
  double b = 0.0;
};

/// Equivalent 2x2 MIMO channel of the eavesdropper for one pair.
/// h is row-major: row 0 = MA phase, row 1 = BC phase; column 0 = A_m,
/// column 1 = B_m. Noise covariance is diag(et, er).
struct EveChannel2x2 {
  std::array<cplx, 4> h{};
  double et = 0.0;
  double er = 0.0;
};

struct PairRates {
  double r_a = 0.0;
  double r_b = 0.0;
  double r_e = 0.0;
  double r_sec = 0.0;
};

double alpha_normalizer(const ScAllocation& alloc, const ChannelState& ch);
double gamma_normalizer(const ScAllocation& alloc, const ChannelState& ch, double alpha1, double alpha2);

Interference interference_terms(const ScAllocation& alloc, const ChannelState& ch, std::size_t m);
Interference interference_terms_cj(const ScAllocation& alloc, const ChannelState& ch, std::size_t m,
                                   double alpha1, double alpha2);

Sinr sinr_pair_nocj(const ScAllocation& alloc, const ChannelState& ch, std::size_t m);
Sinr sinr_pair_cj(const ScAllocation& alloc, const ChannelState& ch, std::size_t m, double alpha1,
                  double alpha2);

EveChannel2x2 eve_channel(const ScAllocation& alloc, const ChannelState& ch, std::size_t m,
                          const RateModel& model);

/// (B/2) log2 det(I + H H^H Q^-1) via the closed-form 2x2 determinant.
double eve_rate(const EveChannel2x2& evec, double bandwidth_sc);

PairRates secrecy_rate(const ScAllocation& alloc, const ChannelState& ch, std::size_t m,
                       const RateModel& model, double bandwidth_sc);

/// Rates of every member of the SC pair, in `members` order.
std::vector<PairRates> sc_rates(const ScAllocation& alloc, const ChannelState& ch, const RateModel& model,
                                double bandwidth_sc);

struct EnergyEfficiency {
  double ee = 0.0;      ///< bit/s/W
  double r_total = 0.0; ///< bit/s
  double p_total = 0.0; ///< W, circuit plus transmit
};

/// Sum of secrecy rates over (P_c + transmit_power).
EnergyEfficiency system_ee(std::span<const PairRates> rates, double transmit_power, const SystemConfig& cfg);

} // namespace noma
