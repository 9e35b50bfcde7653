#include <doctest.h>

#include "d2d/rrrm.hpp"

#include <cmath>

using namespace d2d;
using namespace d2d::rrrm;
using phy::LinkKind;

namespace {

const std::vector<double> kEnb{0, 600, 1200, 1800, 2400, 3000};

LinkIntent i2d(int id, int enb, double rx_x, int n = 8000) {
  LinkIntent l;
  l.id = id;
  l.kind = LinkKind::I2D;
  l.tx = {true, enb};
  l.rx = 100 + id;
  l.tx_pos = {kEnb[static_cast<std::size_t>(enb)], 0, 10};
  l.rx_pos = {rx_x, -5, 0};
  l.n_prbs = n;
  l.rx_enb = enb;
  finalize_link(l, PhyConfig{});
  return l;
}

LinkIntent sidelink(int id, double tx_x, double rx_x, int enb, int n = 8000) {
  LinkIntent l;
  l.id = id;
  l.kind = LinkKind::D2D;
  l.tx = {false, 200 + id};
  l.rx = 100 + id;
  l.tx_pos = {tx_x, 5, 0};
  l.rx_pos = {rx_x, -5, 0};
  l.n_prbs = n;
  l.rx_enb = enb;
  finalize_link(l, PhyConfig{});
  return l;
}

}  // namespace

TEST_CASE("capacity") { CHECK(grid_capacity(PhyConfig{}, 1.0) == 120000); }

TEST_CASE("priority order") {
  std::vector<LinkIntent> ls{sidelink(0, 0, 10, 0), sidelink(1, 0, 10, 0), i2d(2, 0, 50), sidelink(3, 0, 10, 0), i2d(4, 1, 650)};
  ls[0].deadline_interval = 30;
  ls[1].deadline_interval = 25;
  ls[3].deadline_interval = 25;
  ls[1].request_interval = 7;
  ls[3].request_interval = 5;
  ls[2].deadline_interval = 40;
  ls[4].deadline_interval = 40;
  ls[2].request_interval = ls[4].request_interval = 3;
  auto o = priority_order(ls, 20);
  CHECK(o == std::vector<std::size_t>{2, 4, 3, 1, 0});
}

TEST_CASE("compatibility rules") {
  PhyConfig phy;
  RrrmConfig cfg;
  std::vector<LinkIntent> ls{i2d(0, 0, 50), i2d(1, 0, 80), i2d(2, 1, 640), i2d(3, 3, 1790), sidelink(4, 60, 70, 0),
                             sidelink(5, 2390, 2400, 4)};
  auto m = interference_matrix(ls, phy);
  CHECK(compatible(ls[0], 0, ls[1], 1, m, phy, cfg));   // same eNB: disjoint slices
  CHECK_FALSE(compatible(ls[0], 0, ls[2], 2, m, phy, cfg));  // same region, different eNB
  CHECK(compatible(ls[0], 0, ls[3], 3, m, phy, cfg));   // distant regions
  CHECK_FALSE(compatible(ls[0], 0, ls[4], 4, m, phy, cfg));  // D2D next to the I2D receiver
  CHECK(compatible(ls[4], 4, ls[5], 5, m, phy, cfg));
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = 0; j < ls.size(); ++j)
      if (i != j) CHECK(compatible(ls[i], i, ls[j], j, m, phy, cfg) == compatible(ls[j], j, ls[i], i, m, phy, cfg));

  // INR test by hand for the distant pair.
  const double inr = ls[3].tx_power * phy::nominal_gain(LinkKind::I2D, point_distance(ls[3].tx_pos, ls[0].rx_pos), phy) /
                     phy::subcarrier_noise_power(phy);
  CHECK(10 * std::log10(inr) < cfg.inr_threshold_db);
}

TEST_CASE("partition, pools and layout") {
  PhyConfig phy;
  RrrmConfig cfg;
  std::vector<LinkIntent> ls{i2d(0, 0, 50, 8000), i2d(1, 0, 80, 8000), i2d(2, 1, 640, 8000), sidelink(3, 2900, 2910, 4, 8000),
                             i2d(4, 3, 1790, 5000)};
  const auto order = priority_order(ls, 0);
  const auto m = interference_matrix(ls, phy);
  auto sets = partition_rrr_sets(ls, order, m, phy, cfg);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].members == std::vector<std::size_t>{0, 1, 4, 3});
  CHECK(sets[1].members == std::vector<std::size_t>{2});

  auto a = allocate_prbs(ls, sets, order, 120000);
  // Set 0 pool: max(eNB0 16000, eNB3 5000, D2D 8000)
  CHECK(a.sets[0].pool.start == 0);
  CHECK(a.sets[0].pool.count == 16000);
  CHECK(a.sets[1].pool.start == 16000);
  CHECK(a.used == 24000);
  CHECK(a.range[0].start == 0);
  CHECK(a.range[1].start == 8000);
  CHECK(a.range[4].start == 0);
  CHECK(a.range[3].start == 0);
  CHECK(a.range[2].start == 16000);
  CHECK(a.pruned.empty());

  // Drop the lowest-priority links until the pools fit.
  auto tight = allocate_prbs(ls, sets, order, 12000);
  CHECK(tight.used <= 12000);
  CHECK(tight.pruned == std::vector<std::size_t>{3, 4, 2, 1});
  CHECK(tight.set_of[2] == -1);
  CHECK(tight.range[1].count == 0);
  CHECK(tight.range[0].count == 8000);
}

TEST_CASE("pruning can be disabled") {
  PhyConfig phy;
  RrrmConfig cfg;
  cfg.pruning = false;
  std::vector<LinkIntent> ls;
  for (int i = 0; i < 20; ++i) ls.push_back(i2d(i, 0, 50 + i));
  auto a = schedule(ls, 0, phy, cfg, 120000);
  CHECK(a.used == 160000);
  CHECK(a.pruned.empty());
  cfg.pruning = true;
  CHECK(schedule(ls, 0, phy, cfg, 120000).pruned.size() == 5);
}

TEST_CASE("spectrum occupancy") {
  RrrmConfig cfg;
  std::vector<LinkIntent> ls{i2d(0, 0, 50), i2d(1, 1, 640), i2d(2, 4, 2450)};
  Allocation a;
  a.range = {{0, 30000}, {20000, 30000}, {0, 12000}};
  a.set_of = {0, 0, 1};
  // region 0: union [0, 50000) ; region 1: 12000
  CHECK(spectrum_occupancy(ls, a, 6, cfg, 120000) == doctest::Approx((50000.0 + 12000.0) / 2 / 120000));
  CHECK(spectrum_occupancy({}, {}, 6, cfg, 120000) == 0.0);
}
