#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "noma_lab/config.hpp"

namespace noma {

using Rng = std::mt19937_64;
using cplx = std::complex<double>;

/// SplitMix64 finalizer; mixes a base seed with a list of indices into an
/// independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

/// Dense row-major table indexed by (pair or SC, subcarrier).
template <class T>
class Table {
public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, T init = T{}) : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  [[nodiscard]] const std::vector<T>& data() const { return data_; }

  bool operator==(const Table&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct UserPair {
  Point a;
  Point b;
  bool operator==(const UserPair&) const = default;
};

struct Topology {
  Point rs{};
  std::vector<UserPair> pairs;
  Point eve{};
  bool operator==(const Topology&) const = default;
};

/// Complex gains of every link on every subcarrier for one block-fading
/// realization. Row index is the pair, column index the subcarrier.
struct ChannelState {
  Table<cplx> h_AR; ///< A_m -> RS (MA phase)
  Table<cplx> h_BR; ///< B_m -> RS (MA phase)
  Table<cplx> h_AE; ///< A_m -> eavesdropper
  Table<cplx> h_BE; ///< B_m -> eavesdropper
  Table<cplx> g_A;  ///< RS -> A_m (BC phase)
  Table<cplx> g_B;  ///< RS -> B_m (BC phase)
  std::vector<cplx> g_E; ///< RS -> eavesdropper, per subcarrier
  double sigma2 = 0.0;   ///< noise power per subcarrier, W

  [[nodiscard]] std::size_t pairs() const { return h_AR.rows(); }
  [[nodiscard]] std::size_t subcarriers() const { return h_AR.cols(); }

  /// Channel response normalized by noise of the RS -> A_m / B_m links.
  [[nodiscard]] double crnn_a(std::size_t m, std::size_t j) const { return std::norm(g_A(m, j)) / sigma2; }
  [[nodiscard]] double crnn_b(std::size_t m, std::size_t j) const { return std::norm(g_B(m, j)) / sigma2; }

  bool operator==(const ChannelState&) const = default;
};

/// Hata urban median path loss in dB with the small/medium-city mobile
/// antenna correction. Throws std::invalid_argument for distance <= 0.
double path_loss_db(double distance_m, const SystemConfig& cfg);

/// Linear power attenuation 10^(-L/10) at max(distance, cfg.min_distance).
double attenuation(double distance_m, const SystemConfig& cfg);

Topology generate_topology(const SystemConfig& cfg, Rng& rng);

/// Throws Error when a position violates the cell or eavesdropper geometry.
void check_topology(const Topology& topo, const SystemConfig& cfg);

ChannelState sample_channels(const Topology& topo, const SystemConfig& cfg, Rng& rng);

/// Unit-variance circularly symmetric complex Gaussian sample.
cplx sample_cn(Rng& rng);

} // namespace noma
