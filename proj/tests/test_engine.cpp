#include <doctest.h>

#include "d2d/engine.hpp"

using namespace d2d;

namespace {
AppConfig small() {
  AppConfig cfg;
  cfg.sim.warmup = 300;
  return cfg;
}
}  // namespace

TEST_CASE("same seed, same metrics") {
  const auto cfg = small();
  for (auto p : {PolicyKind::Optimal, PolicyKind::Benchmark, PolicyKind::Cellular}) {
    auto a = sim::run(cfg, p, 120, 42);
    auto b = sim::run(cfg, p, 120, 42);
    CHECK(a == b);
    CHECK(a.requests > 0);
  }
  CHECK_FALSE(sim::run(cfg, PolicyKind::Optimal, 120, 42) == sim::run(cfg, PolicyKind::Optimal, 120, 43));
}

TEST_CASE("every non-repeated request resolves once") {
  const auto cfg = small();
  for (auto p : {PolicyKind::Optimal, PolicyKind::Benchmark, PolicyKind::Cellular}) {
    auto m = sim::run(cfg, p, 180, 7);
    CHECK(m.unresolved == 0);
    CHECK(m.multiply_resolved == 0);
    CHECK(m.deliveries() + m.dropped == m.non_repeated);
    CHECK(m.requests == m.repeated + m.non_repeated);
  }
}

TEST_CASE("cellular never offloads") {
  auto m = sim::run(small(), PolicyKind::Cellular, 120, 3);
  CHECK(m.deliveries_d2d == 0);
  CHECK(m.offloading_efficiency() == 0);
  CHECK(m.energy_d2d == 0);
}

TEST_CASE("D2D distances stay in range") {
  const auto cfg = small();
  auto m = sim::run(cfg, PolicyKind::Optimal, 180, 5);
  CHECK(m.deliveries_d2d > 0);
  CHECK(static_cast<long>(m.d2d_distances.size()) == m.deliveries_d2d);
  for (double d : m.d2d_distances) {
    CHECK(d >= cfg.scenario.lane_offset * 0);
    CHECK(d <= cfg.scenario.d2d_max_range + 1e-9);
  }
}

TEST_CASE("replication is thread-count invariant") {
  const auto cfg = small();
  auto one = sim::replicate(cfg, PolicyKind::Benchmark, 3, 100, 1);
  auto many = sim::replicate(cfg, PolicyKind::Benchmark, 3, 100, 3);
  REQUIRE(one.runs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(one.runs[i] == many.runs[i]);
  CHECK(one.runs[1] == sim::run(cfg, PolicyKind::Benchmark, cfg.sim.duration, 101));
}

TEST_CASE("observer sees allocations within capacity") {
  auto cfg = small();
  long seen = 0;
  bool within = true;
  sim::Observer obs;
  obs.on_alloc = [&](long, const std::vector<rrrm::LinkIntent>& links, const rrrm::Allocation& a) {
    seen += static_cast<long>(links.size());
    within = within && a.used <= 120000;
  };
  sim::run(cfg, PolicyKind::Cellular, 60, 1, &obs);
  CHECK(seen > 0);
  CHECK(within);
}

TEST_CASE("summary rows") {
  auto rows = sim::summarize({sim::Metrics{}, sim::Metrics{}});
  REQUIRE_FALSE(rows.empty());
  CHECK(rows[0].name == "offloading_efficiency");
  CHECK(rows[0].summary.n == 2);
}
