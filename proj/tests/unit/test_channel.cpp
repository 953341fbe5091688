#include <doctest.h>

#include <cmath>

#include "noma_lab/channel.hpp"

using namespace noma;

TEST_CASE("Hata urban loss at 1 km, 900 MHz, 30 m / 1.5 m antennas") {
  SystemConfig c;
  // Independent python evaluation of the small/medium-city formula.
  CHECK(path_loss_db(1000.0, c) == doctest::Approx(126.40328648085746).epsilon(1e-13));
  CHECK(path_loss_db(500.0, c) == doctest::Approx(115.7995482976622).epsilon(1e-13));
  CHECK(path_loss_db(30.0, c) == doctest::Approx(72.76010230551461).epsilon(1e-13));
  CHECK_THROWS_AS(path_loss_db(0.0, c), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_db(-3.0, c), std::invalid_argument);
}

TEST_CASE("attenuation floors the distance") {
  SystemConfig c;
  CHECK(attenuation(0.0, c) == attenuation(c.min_distance, c));
  CHECK(attenuation(0.2, c) == attenuation(c.min_distance, c));
  CHECK(attenuation(40.0, c) < attenuation(20.0, c));
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, {0}) != derive_seed(1, {1}));
  CHECK(derive_seed(1, {0}) != derive_seed(2, {0}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
  CHECK(derive_seed(9, {4}) == derive_seed(9, {4}));
}

TEST_CASE("topology respects the geometry") {
  SystemConfig c;
  c.M = 40;
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto t = generate_topology(c, rng);
    REQUIRE(t.pairs.size() == 40);
    for (auto const& p : t.pairs) {
      CHECK(distance(p.a, t.rs) <= c.cell_radius + 1e-9);
      CHECK(distance(p.b, t.rs) <= c.cell_radius + 1e-9);
      CHECK(distance(p.a, p.b) <= c.pair_radius + 1e-9);
    }
    CHECK(distance(t.eve, t.rs) == doctest::Approx(c.eve_distance).epsilon(1e-12));
  }
  Topology bad = generate_topology(c, rng);
  bad.pairs[0].a = {100.0, 0.0};
  CHECK_THROWS_AS(check_topology(bad, c), Error);
}

TEST_CASE("same seed gives the same realization") {
  SystemConfig c;
  Rng r1(77), r2(77);
  auto t1 = generate_topology(c, r1);
  auto t2 = generate_topology(c, r2);
  CHECK(t1 == t2);
  CHECK(sample_channels(t1, c, r1) == sample_channels(t2, c, r2));
}

TEST_CASE("Rayleigh gains have the path-loss mean power") {
  SystemConfig c;
  c.M = 1;
  c.N = 1;
  Rng rng(2024);
  const auto topo = generate_topology(c, rng);
  const int draws = 100000;
  double s[7] = {};
  for (int n = 0; n < draws; ++n) {
    const auto ch = sample_channels(topo, c, rng);
    s[0] += std::norm(ch.h_AR(0, 0));
    s[1] += std::norm(ch.h_BR(0, 0));
    s[2] += std::norm(ch.h_AE(0, 0));
    s[3] += std::norm(ch.h_BE(0, 0));
    s[4] += std::norm(ch.g_A(0, 0));
    s[5] += std::norm(ch.g_B(0, 0));
    s[6] += std::norm(ch.g_E[0]);
  }
  const auto& p = topo.pairs[0];
  const double expect[7] = {
      attenuation(distance(p.a, topo.rs), c),  attenuation(distance(p.b, topo.rs), c),
      attenuation(distance(p.a, topo.eve), c), attenuation(distance(p.b, topo.eve), c),
      attenuation(distance(p.a, topo.rs), c),  attenuation(distance(p.b, topo.rs), c),
      attenuation(c.eve_distance, c)};
  for (int k = 0; k < 7; ++k) {
    CAPTURE(k);
    CHECK(std::abs(s[k] / draws / expect[k] - 1.0) < 0.02);
  }
}

TEST_CASE("CRNN is gain over noise") {
  SystemConfig c;
  c.M = 2;
  c.N = 3;
  Rng rng(3);
  auto ch = sample_channels(generate_topology(c, rng), c, rng);
  CHECK(ch.crnn_a(1, 2) == doctest::Approx(std::norm(ch.g_A(1, 2)) / c.sigma2()));
  CHECK(ch.sigma2 == c.sigma2());
}
