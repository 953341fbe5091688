#include "noma_lab/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace noma {

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s = mix(base);
  for (auto i : indices)
    s = mix(s ^ mix(i + 0x632be59bd9b4e019ULL));
  return s;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_loss_db(double d, const SystemConfig& cfg) {
  if (!(d > 0.0))
    throw std::invalid_argument("path_loss_db: distance must be positive, got " + std::to_string(d));
  const double lf = std::log10(cfg.carrier_freq);
  const double lhb = std::log10(cfg.h_base);
  const double a_hm = (1.1 * lf - 0.7) * cfg.h_mobile - (1.56 * lf - 0.8);
  return 69.55 + 26.16 * lf - 13.82 * lhb - a_hm + (44.9 - 6.55 * lhb) * std::log10(d / 1000.0);
}

double attenuation(double d, const SystemConfig& cfg) {
  return std::pow(10.0, -path_loss_db(std::max(d, cfg.min_distance), cfg) / 10.0);
}

namespace {

Point uniform_in_disk(Point centre, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double th = 2.0 * std::numbers::pi * u(rng);
  return {centre.x + r * std::cos(th), centre.y + r * std::sin(th)};
}

} // namespace

Topology generate_topology(const SystemConfig& cfg, Rng& rng) {
  Topology topo;
  topo.pairs.reserve(static_cast<std::size_t>(cfg.M));
  for (int m = 0; m < cfg.M; ++m) {
    UserPair up;
    up.a = uniform_in_disk(topo.rs, cfg.cell_radius, rng);
    // B_m is drawn near A_m; resample until it also lies in the cell.
    do {
      up.b = uniform_in_disk(up.a, cfg.pair_radius, rng);
    } while (distance(up.b, topo.rs) > cfg.cell_radius);
    topo.pairs.push_back(up);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double th = 2.0 * std::numbers::pi * u(rng);
  topo.eve = {cfg.eve_distance * std::cos(th), cfg.eve_distance * std::sin(th)};
  check_topology(topo, cfg);
  return topo;
}

void check_topology(const Topology& topo, const SystemConfig& cfg) {
  const double tol = 1e-9;
  for (std::size_t m = 0; m < topo.pairs.size(); ++m) {
    for (auto p : {topo.pairs[m].a, topo.pairs[m].b}) {
      if (distance(p, topo.rs) > cfg.cell_radius + tol)
        throw Error("user of pair " + std::to_string(m) + " lies outside the cell");
    }
  }
  if (std::abs(distance(topo.eve, topo.rs) - cfg.eve_distance) > tol)
    throw Error("eavesdropper is not at the configured distance");
}

cplx sample_cn(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

ChannelState sample_channels(const Topology& topo, const SystemConfig& cfg, Rng& rng) {
  const auto M = topo.pairs.size();
  const auto N = static_cast<std::size_t>(cfg.N);
  ChannelState ch;
  ch.h_AR = Table<cplx>(M, N);
  ch.h_BR = Table<cplx>(M, N);
  ch.h_AE = Table<cplx>(M, N);
  ch.h_BE = Table<cplx>(M, N);
  ch.g_A = Table<cplx>(M, N);
  ch.g_B = Table<cplx>(M, N);
  ch.g_E.resize(N);
  ch.sigma2 = cfg.sigma2();

  for (std::size_t m = 0; m < M; ++m) {
    const auto& up = topo.pairs[m];
    const double amp_ar = std::sqrt(attenuation(distance(up.a, topo.rs), cfg));
    const double amp_br = std::sqrt(attenuation(distance(up.b, topo.rs), cfg));
    const double amp_ae = std::sqrt(attenuation(distance(up.a, topo.eve), cfg));
    const double amp_be = std::sqrt(attenuation(distance(up.b, topo.eve), cfg));
    for (std::size_t i = 0; i < N; ++i) {
      ch.h_AR(m, i) = amp_ar * sample_cn(rng);
      ch.h_BR(m, i) = amp_br * sample_cn(rng);
      ch.h_AE(m, i) = amp_ae * sample_cn(rng);
      ch.h_BE(m, i) = amp_be * sample_cn(rng);
      ch.g_A(m, i) = amp_ar * sample_cn(rng);
      ch.g_B(m, i) = amp_br * sample_cn(rng);
    }
  }
  const double amp_re = std::sqrt(attenuation(distance(topo.rs, topo.eve), cfg));
  for (std::size_t j = 0; j < N; ++j)
    ch.g_E[j] = amp_re * sample_cn(rng);
  return ch;
}

} // namespace noma
