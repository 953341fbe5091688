#include "noma_lab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace noma {

void ScAllocation::validate() const {
  if (members.empty())
    throw Error("ScAllocation: no members");
  if (p_a.size() != members.size() || p_b.size() != members.size())
    throw Error("ScAllocation: uplink power vectors do not match members");
  if (!(relay_power >= 0.0))
    throw Error("ScAllocation: negative relay power");
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!(p_a[k] >= 0.0) || !(p_b[k] >= 0.0))
      throw Error("ScAllocation: negative uplink power");
    for (std::size_t l = k + 1; l < members.size(); ++l)
      if (members[k] == members[l])
        throw Error("ScAllocation: duplicate member " + std::to_string(members[k]));
  }
}

std::size_t ScAllocation::slot_of(std::size_t m) const {
  auto it = std::find(members.begin(), members.end(), m);
  if (it == members.end())
    throw Error("pair " + std::to_string(m) + " is not a member of this SC pair");
  return static_cast<std::size_t>(it - members.begin());
}

RateModel RateModel::from(const SystemConfig& cfg) {
  return {cfg.cj_enabled, cfg.alpha1, cfg.alpha2, cfg.eve_cov_strict_paper};
}

namespace {

// Uplink power of member k received at the RS, optionally scaled by the
// message fractions (1 - alpha).
double rs_power(const ScAllocation& al, const ChannelState& ch, std::size_t k, double fa, double fb) {
  const auto m = al.members[k];
  return fa * al.p_a[k] * std::norm(ch.h_AR(m, al.sc_ma)) + fb * al.p_b[k] * std::norm(ch.h_BR(m, al.sc_ma));
}

double eve_power(const ScAllocation& al, const ChannelState& ch, std::size_t k, double fa, double fb) {
  const auto m = al.members[k];
  return fa * al.p_a[k] * std::norm(ch.h_AE(m, al.sc_ma)) + fb * al.p_b[k] * std::norm(ch.h_BE(m, al.sc_ma));
}

// Full sum over members minus the own-pair term, as written in the model.
template <class Term>
double sum_minus_own(const ScAllocation& al, std::size_t own, Term term) {
  double full = 0.0;
  for (std::size_t k = 0; k < al.members.size(); ++k)
    full += term(k);
  return std::max(0.0, full - term(own));
}

double log2p1(double x) { return std::log2(1.0 + x); }

} // namespace

double alpha_normalizer(const ScAllocation& al, const ChannelState& ch) {
  double s = ch.sigma2;
  for (std::size_t k = 0; k < al.members.size(); ++k)
    s += rs_power(al, ch, k, 1.0, 1.0);
  return std::sqrt(s);
}

double gamma_normalizer(const ScAllocation& al, const ChannelState& ch, double alpha1, double alpha2) {
  double s = ch.sigma2;
  for (std::size_t k = 0; k < al.members.size(); ++k)
    s += rs_power(al, ch, k, 1.0 - alpha1, 1.0 - alpha2);
  return std::sqrt(s);
}

namespace {

Interference interference_impl(const ScAllocation& al, const ChannelState& ch, std::size_t m, double fa,
                               double fb, double norm2) {
  const auto own = al.slot_of(m);
  const double ga = al.relay_power * std::norm(ch.g_A(m, al.sc_bc)) / norm2;
  const double gb = al.relay_power * std::norm(ch.g_B(m, al.sc_bc)) / norm2;
  auto fwd = [&](std::size_t k) { return rs_power(al, ch, k, fa, fb); };
  return {sum_minus_own(al, own, [&](std::size_t k) { return ga * fwd(k); }),
          sum_minus_own(al, own, [&](std::size_t k) { return gb * fwd(k); })};
}

Sinr sinr_impl(const ScAllocation& al, const ChannelState& ch, std::size_t m, double fa, double fb,
               double norm2) {
  const auto own = al.slot_of(m);
  const auto I = interference_impl(al, ch, m, fa, fb, norm2);
  const double sig2 = ch.sigma2;
  const double ga = al.relay_power * std::norm(ch.g_A(m, al.sc_bc)) / norm2;
  const double gb = al.relay_power * std::norm(ch.g_B(m, al.sc_bc)) / norm2;
  // A_m decodes B_m's message and vice versa.
  const double sa = ga * fb * al.p_b[own] * std::norm(ch.h_BR(m, al.sc_ma));
  const double sb = gb * fa * al.p_a[own] * std::norm(ch.h_AR(m, al.sc_ma));
  return {sa / (I.a + (ga + 1.0) * sig2), sb / (I.b + (gb + 1.0) * sig2)};
}

} // namespace

Interference interference_terms(const ScAllocation& al, const ChannelState& ch, std::size_t m) {
  const double a = alpha_normalizer(al, ch);
  return interference_impl(al, ch, m, 1.0, 1.0, a * a);
}

Interference interference_terms_cj(const ScAllocation& al, const ChannelState& ch, std::size_t m,
                                   double alpha1, double alpha2) {
  const double g = gamma_normalizer(al, ch, alpha1, alpha2);
  return interference_impl(al, ch, m, 1.0 - alpha1, 1.0 - alpha2, g * g);
}

Sinr sinr_pair_nocj(const ScAllocation& al, const ChannelState& ch, std::size_t m) {
  const double a = alpha_normalizer(al, ch);
  return sinr_impl(al, ch, m, 1.0, 1.0, a * a);
}

Sinr sinr_pair_cj(const ScAllocation& al, const ChannelState& ch, std::size_t m, double alpha1,
                  double alpha2) {
  const double g = gamma_normalizer(al, ch, alpha1, alpha2);
  return sinr_impl(al, ch, m, 1.0 - alpha1, 1.0 - alpha2, g * g);
}

EveChannel2x2 eve_channel(const ScAllocation& al, const ChannelState& ch, std::size_t m, const RateModel& model) {
  const auto own = al.slot_of(m);
  const double fa = model.cj ? 1.0 - model.alpha1 : 1.0;
  const double fb = model.cj ? 1.0 - model.alpha2 : 1.0;
  const double norm = model.cj ? gamma_normalizer(al, ch, model.alpha1, model.alpha2) : alpha_normalizer(al, ch);
  const double norm2 = norm * norm;
  const double sig2 = ch.sigma2;
  const auto i = al.sc_ma;
  const auto j = al.sc_bc;
  const cplx gE = ch.g_E[j];
  const double gE2 = std::norm(gE);
  const double pr = al.relay_power;

  EveChannel2x2 e;
  const double sa = std::sqrt(fa * al.p_a[own]);
  const double sb = std::sqrt(fb * al.p_b[own]);
  e.h[0] = sa * ch.h_AE(m, i);
  e.h[1] = sb * ch.h_BE(m, i);
  e.h[2] = std::sqrt(pr) * gE * sa * ch.h_AR(m, i) / norm;
  e.h[3] = std::sqrt(pr) * gE * sb * ch.h_BR(m, i) / norm;

  // MA phase: cochannel messages of the other pairs plus receiver noise.
  e.et = sum_minus_own(al, own, [&](std::size_t k) { return eve_power(al, ch, k, fa, fb); }) + sig2;
  // BC phase: forwarded cochannel messages, amplified RS noise, receiver noise.
  const double wa = (model.cj && model.strict_paper_cov) ? 1.0 : fa;
  const double wb = (model.cj && model.strict_paper_cov) ? 1.0 : fb;
  e.er = sum_minus_own(al, own, [&](std::size_t k) { return pr * gE2 * rs_power(al, ch, k, wa, wb) / norm2; }) +
         pr * gE2 * sig2 / norm2 + sig2;

  if (model.cj) {
    // Artificial noise of every pair on the SC, including pair m, is
    // unknown to the eavesdropper.
    for (std::size_t k = 0; k < al.members.size(); ++k)
      e.et += eve_power(al, ch, k, model.alpha1, model.alpha2);
    if (model.strict_paper_cov) {
      for (std::size_t k = 0; k < al.members.size(); ++k)
        e.et += rs_power(al, ch, k, fa, fb);
    }
  }
  return e;
}

double eve_rate(const EveChannel2x2& e, double bandwidth_sc) {
  // det(I + H H^H Q^-1) with Q = diag(et, er).
  const auto& h = e.h;
  const double m11 = std::norm(h[0]) + std::norm(h[1]);
  const double m22 = std::norm(h[2]) + std::norm(h[3]);
  const cplx m12 = h[0] * std::conj(h[2]) + h[1] * std::conj(h[3]);
  const double det = (1.0 + m11 / e.et) * (1.0 + m22 / e.er) - std::norm(m12) / (e.et * e.er);
  return std::max(0.0, 0.5 * bandwidth_sc * std::log2(det));
}

PairRates secrecy_rate(const ScAllocation& al, const ChannelState& ch, std::size_t m, const RateModel& model,
                       double bandwidth_sc) {
  const Sinr s = model.cj ? sinr_pair_cj(al, ch, m, model.alpha1, model.alpha2) : sinr_pair_nocj(al, ch, m);
  PairRates r;
  r.r_a = 0.5 * bandwidth_sc * log2p1(s.a);
  r.r_b = 0.5 * bandwidth_sc * log2p1(s.b);
  r.r_e = eve_rate(eve_channel(al, ch, m, model), bandwidth_sc);
  r.r_sec = std::max(0.0, r.r_a + r.r_b - r.r_e);
  return r;
}

std::vector<PairRates> sc_rates(const ScAllocation& al, const ChannelState& ch, const RateModel& model,
                                double bandwidth_sc) {
  std::vector<PairRates> out;
  out.reserve(al.members.size());
  for (auto m : al.members)
    out.push_back(secrecy_rate(al, ch, m, model, bandwidth_sc));
  return out;
}

EnergyEfficiency system_ee(std::span<const PairRates> rates, double transmit_power, const SystemConfig& cfg) {
  EnergyEfficiency e;
  for (auto const& r : rates)
    e.r_total += r.r_sec;
  e.p_total = cfg.P_c + transmit_power;
  e.ee = e.r_total / e.p_total;
  return e;
}

} // namespace noma
