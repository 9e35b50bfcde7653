#include <doctest.h>

#include "d2d/config.hpp"
#include "d2d/speed_law.hpp"
#include "d2d/zipf.hpp"

#include <cmath>
#include <map>

using namespace d2d;

TEST_CASE("defaults validate") {
  AppConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.scenario.enb_positions.size() == 6);
  CHECK(cfg.phy.reference_loss() == doctest::Approx(39.65515663363148).epsilon(1e-12));
}

TEST_CASE("unknown key reports its line") {
  const std::string text = "{\n  \"scenario\": {\n    \"speed_range\": [6, 16],\n    \"sped_max\": 16\n  }\n}\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("sped_max") != std::string::npos);
  }
}

TEST_CASE("type mismatch and bad section") {
  CHECK_THROWS_AS(parse_config(R"({"scenario": {"lane_offset": "wide"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"radio": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_config(R"({"scenario": {"speed_range": [20, 10]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": {"sharing_timeout": 10, "content_timeout": 20}})"), ConfigError);
}

TEST_CASE("parsed values land in their sections") {
  auto cfg = parse_config(R"({"scenario": {"speed_range": [6, 16], "content_timeout": 60},
                              "rrrm": {"pruning": false}, "sim": {"policy": "benchmark"}})");
  CHECK(cfg.scenario.speed_min == 6);
  CHECK(cfg.scenario.speed_max == 16);
  CHECK(cfg.scenario.content_timeout == 60);
  CHECK_FALSE(cfg.rrrm.pruning);
  CHECK(cfg.sim.policy == PolicyKind::Benchmark);
}

TEST_CASE("single-key overrides") {
  AppConfig cfg;
  set_config_value(cfg, "content_timeout", "90");
  set_config_value(cfg, "phy.shadowing_sigma_db", "0");
  CHECK(cfg.scenario.content_timeout == 90);
  CHECK(cfg.phy.shadowing_sigma_db == 0);
  CHECK_THROWS_AS(set_config_value(cfg, "no_such_key", "1"), ConfigError);
  CHECK(config_section("d2d_max_range") == "scenario");
  CHECK(config_section("inr_threshold_db") == "rrrm");
  CHECK(config_section("phy.fec_rate") == "phy");
  CHECK_THROWS_AS(config_section("phy.speed_range"), ConfigError);
}

TEST_CASE("policy names round-trip") {
  for (auto p : {PolicyKind::Optimal, PolicyKind::Benchmark, PolicyKind::Cellular})
    CHECK(parse_policy(policy_name(p)) == p);
  CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}

TEST_CASE("zipf pmf") {
  TruncatedZipf z(1.1, 10000);
  double sum = 0, h = 0;
  for (int i = 1; i <= 10000; ++i) {
    sum += z.pmf(i);
    h += std::pow(i, -1.1);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.pmf(1) == doctest::Approx(1.0 / h).epsilon(1e-12));
  CHECK(z.pmf(2) / z.pmf(1) == doctest::Approx(std::pow(2.0, -1.1)).epsilon(1e-12));

  Rng rng(7);
  int ones = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const int s = z.sample(rng);
    REQUIRE(s >= 1);
    REQUIRE(s <= 10000);
    ones += s == 1;
  }
  const double p = z.pmf(1);
  CHECK(std::abs(ones / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("speed law moments") {
  auto law = SpeedLaw::uniform(9, 24);
  CHECK(law.pdf(10) == doctest::Approx(0.5 / 15));
  CHECK(law.pdf(-10) == doctest::Approx(0.5 / 15));
  CHECK(law.pdf(5) == 0);
  CHECK(law.inverse_speed_mean() == doctest::Approx(std::log(24.0 / 9.0) / 15).epsilon(1e-12));

  Rng rng(3);
  double mean = 0, inv = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    mean += law.sample_magnitude(rng);
    inv += 1.0 / law.sample_stationary_magnitude(rng);
  }
  CHECK(mean / n == doctest::Approx(16.5).epsilon(5e-3));
  // Length-biased law: E[1/V] under p(v)/v normalization equals E[1/V^2]/E[1/V] of the base law.
  const double e1 = std::log(24.0 / 9.0) / 15, e2 = (1.0 / 9 - 1.0 / 24) / 15;
  CHECK(inv / n == doctest::Approx(e2 / e1).epsilon(5e-3));
}
