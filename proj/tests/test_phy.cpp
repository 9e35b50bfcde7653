#include <doctest.h>

#include "d2d/phy.hpp"

#include <cmath>
#include <numeric>

using namespace d2d;
using namespace d2d::phy;

namespace {
constexpr double kNoise = 5.971607558302478e-16;  // W per 15 kHz subcarrier at -174 dBm/Hz, NF 10 dB
}

TEST_CASE("nominal gains") {
  PhyConfig c;
  CHECK(nominal_gain(LinkKind::I2D, 50, c) == doctest::Approx(1.9803881869708865e-08).epsilon(1e-10));
  CHECK(nominal_gain(LinkKind::I2D, 200, c) == doctest::Approx(2.693793830800774e-10).epsilon(1e-10));
  CHECK(nominal_gain(LinkKind::D2D, 30, c) == doctest::Approx(1.5185150075375273e-08).epsilon(1e-10));
  // Continuous at the breakpoint, clamped below the reference distance.
  CHECK(nominal_gain(LinkKind::I2D, 100 - 1e-9, c) == doctest::Approx(nominal_gain(LinkKind::I2D, 100 + 1e-9, c)));
  CHECK(nominal_gain(LinkKind::D2D, 0, c) == nominal_gain(LinkKind::D2D, 1, c));
  CHECK_THROWS(nominal_gain(LinkKind::D2D, -1, c));
}

TEST_CASE("power control and PRB count") {
  PhyConfig c;
  CHECK(subcarrier_noise_power(c) == doctest::Approx(kNoise).epsilon(1e-12));
  CHECK(prbs_required(c) == 8000);
  for (double g : {1e-7, 3.3e-9, 2e-12})
    for (double m : {10.0, 13.0}) {
      const double pc = tx_power_per_subcarrier(g, m, c);
      CHECK(pc * g / kNoise == doctest::Approx(std::pow(10.0, m / 10) * 63.0).epsilon(1e-12));
    }
  CHECK(transmission_energy(LinkKind::I2D, 50, c) == doctest::Approx(0.0009118485645951878).epsilon(1e-10));
  CHECK(transmission_energy(LinkKind::D2D, 30, c) == doctest::Approx(0.0023727607925009653).epsilon(1e-10));
}

TEST_CASE("grid dimensions") {
  PhyConfig c;
  CHECK(c.prbs_per_slot() == 60);
  CHECK(c.slots_per_interval(1.0) == 2000);
  CHECK(i2d_distance(0, 10, 10) == doctest::Approx(std::sqrt(125.0)));
}

TEST_CASE("prb usage folds the grid onto frequency") {
  auto u = prb_usage(0, 8000, 60);
  CHECK(std::accumulate(u.begin(), u.end(), 0) == 8000);
  // 8000 = 133 * 60 + 20
  CHECK(u[0] == 134);
  CHECK(u[19] == 134);
  CHECK(u[20] == 133);
  auto v = prb_usage(50, 15, 60);
  CHECK(v[50] == 1);
  CHECK(v[59] == 1);
  CHECK(v[0] == 1);
  CHECK(v[4] == 1);
  CHECK(v[5] == 0);
  auto none = prb_usage(7, 0, 60);
  CHECK(std::accumulate(none.begin(), none.end(), 0) == 0);
}

TEST_CASE("achievable information") {
  PhyConfig c;
  const int n = c.prbs_per_slot() * c.subcarriers_per_prb;
  const double g = 1e-9;
  std::vector<double> gains(static_cast<std::size_t>(n), g);
  auto usage = prb_usage(0, 8000, c.prbs_per_slot());

  SUBCASE("saturates at the modulation ceiling") {
    const double p = 1e3 * kNoise / g;
    const double bits = achievable_information(gains, p, {}, usage, c);
    CHECK(bits == doctest::Approx(8000 * 12 * 6 * 15e3 * 5e-4).epsilon(1e-12));
    CHECK(transmission_success(bits * c.fec_rate, c));
  }
  SUBCASE("Shannon below the ceiling") {
    const double p = 3 * kNoise / g;  // log2(1 + 3) = 2
    CHECK(achievable_information(gains, p, {}, usage, c) == doctest::Approx(8000 * 12 * 2 * 15e3 * 5e-4).epsilon(1e-12));
  }
  SUBCASE("interference adds to the noise floor") {
    const double p = 7 * kNoise / g;  // SINR 7 alone, 3.5 with an equal-power interferer
    std::vector<double> ig(static_cast<std::size_t>(n), g);
    Interferer it{kNoise / g, &ig};
    const double bits = achievable_information(gains, p, {it}, usage, c);
    CHECK(bits == doctest::Approx(8000 * 12 * std::log2(4.5) * 15e3 * 5e-4).epsilon(1e-12));
  }
}

TEST_CASE("payload decodes exactly at the margin-free operating point") {
  PhyConfig c;
  // Margin-free power gives SNR = 2^e - 1 on a flat channel: every PRB carries e bits/symbol.
  const int n = c.prbs_per_slot() * c.subcarriers_per_prb;
  std::vector<double> gains(static_cast<std::size_t>(n), 1e-9);
  const double p = tx_power_per_subcarrier(1e-9, 0.0, c);
  const double bits = achievable_information(gains, p, {}, prb_usage(0, prbs_required(c), 60), c);
  CHECK(bits >= c.payload_bits / c.fec_rate * (1 - 1e-9));
}

TEST_CASE("shadowing field statistics") {
  Rng rng(5);
  double s1 = 0, s2 = 0, c25 = 0;
  int m = 0;
  for (int rep = 0; rep < 40; ++rep) {
    ShadowingField f(3000, 1.0, 4.0, 25.0, rng);
    for (double x = 0; x + 25 <= 3000; x += 5) {
      const double a = f.at(x), b = f.at(x + 25);
      s1 += a;
      s2 += a * a;
      c25 += a * b;
      ++m;
    }
  }
  const double mean = s1 / m, var = s2 / m - mean * mean;
  CHECK(std::abs(mean) < 0.3);
  CHECK(std::sqrt(var) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(c25 / m / var == doctest::Approx(std::exp(-1.0)).epsilon(0.1));
}

TEST_CASE("shadowing map is reproducible and symmetric") {
  AppConfig cfg;
  ShadowingMap a(cfg.scenario, cfg.phy, 9), b(cfg.scenario, cfg.phy, 9);
  CHECK(a.i2d_db(2, Lane::Forward, 1234.5) == b.i2d_db(2, Lane::Forward, 1234.5));
  CHECK(a.d2d_db(Lane::Forward, 100, Lane::Backward, 180) == a.d2d_db(Lane::Backward, 180, Lane::Forward, 100));
}

TEST_CASE("fading profile") {
  PhyConfig c;
  FadingProfile f(c);
  CHECK(f.subcarriers() == 720);
  const auto& p = f.tap_powers();
  const auto& d = f.tap_delays();
  REQUIRE(p.size() == 6);
  const double pw = std::accumulate(p.begin(), p.end(), 0.0);
  CHECK(pw == doctest::Approx(1.0));
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m1 += p[i] * d[i];
    m2 += p[i] * d[i] * d[i];
  }
  CHECK(std::sqrt(m2 - m1 * m1) == doctest::Approx(100e-9).epsilon(1e-6));

  Rng rng(1);
  double s = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    auto h = f.draw(rng);
    s += std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
  }
  CHECK(s / reps == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("channel realizations are keyed, not sequenced") {
  PhyConfig c;
  FadingProfile f(c);
  auto a = realize_channel({true, 2}, {false, 17}, 40, 1e-9, 3.0, f, 99);
  auto b = realize_channel({true, 2}, {false, 17}, 40, 1e-9, 3.0, f, 99);
  auto other = realize_channel({true, 2}, {false, 17}, 41, 1e-9, 3.0, f, 99);
  CHECK(a.gains == b.gains);
  CHECK(a.gains != other.gains);
  CHECK(a.shadowing_db == 3.0);
}
