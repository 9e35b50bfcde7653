#pragma once

#include "d2d/config.hpp"
#include "d2d/phy.hpp"

#include <vector>

namespace d2d::rrrm {

struct Point {
  double x, y, z;
};

struct LinkIntent {
  int id = 0;
  phy::LinkKind kind = phy::LinkKind::D2D;
  phy::Endpoint tx{false, 0};
  int rx = 0;  // receiving vehicle
  Point tx_pos{0, 0, 0};
  Point rx_pos{0, 0, 0};
  double distance = 0;
  int n_prbs = 0;
  long deadline_interval = 0;
  long request_interval = 0;
  int request_ref = 0;
  int rx_enb = 0;  // serving eNB of the receiver (also the transmitter for I2D)
  double tx_power = 0;  // per subcarrier, from the link's own nominal gain
};

/// Builds tx power and distance from positions.
void finalize_link(LinkIntent& link, const PhyConfig& phy);
double point_distance(const Point& a, const Point& b);

/// Nominal cross gains: entry (i, j) = g(distance(tx_i, rx_j)), i ≠ j; diagonal holds the own-link gain.
class InterferenceMatrix {
 public:
  InterferenceMatrix() = default;
  InterferenceMatrix(std::size_t n) : n_(n), g_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return g_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> g_;
};

InterferenceMatrix interference_matrix(const std::vector<LinkIntent>& links, const PhyConfig& phy);

struct PrbRange {
  long start = 0;
  long count = 0;
  long end() const { return start + count; }
};

struct RrrSet {
  std::vector<std::size_t> members;  // indices into the link list
  PrbRange pool;
};

struct Allocation {
  std::vector<RrrSet> sets;
  std::vector<PrbRange> range;          // per link; count 0 when pruned
  std::vector<int> set_of;              // per link; -1 when pruned
  std::vector<std::size_t> pruned;      // indices into the link list
  long used = 0;                        // Σ pool sizes
};

/// Scheduling order: I2D first, then fewer remaining intervals, then older request, then id.
std::vector<std::size_t> priority_order(const std::vector<LinkIntent>& links, long interval);

int region_of_enb(int enb, const RrrmConfig& cfg);
bool compatible(const LinkIntent& a, std::size_t ia, const LinkIntent& b, std::size_t ib,
                const InterferenceMatrix& m, const PhyConfig& phy, const RrrmConfig& cfg);

/// Greedy first-fit partition in the given order.
std::vector<RrrSet> partition_rrr_sets(const std::vector<LinkIntent>& links, const std::vector<std::size_t>& order,
                                       const InterferenceMatrix& m, const PhyConfig& phy, const RrrmConfig& cfg);

/// Pool sizing, left-to-right layout and pruning by reverse priority until Σ pools ≤ capacity.
Allocation allocate_prbs(const std::vector<LinkIntent>& links, std::vector<RrrSet> sets,
                         const std::vector<std::size_t>& order, long capacity);

/// Full per-interval pipeline.
Allocation schedule(const std::vector<LinkIntent>& links, long interval, const PhyConfig& phy, const RrrmConfig& cfg,
                    long capacity);

long grid_capacity(const PhyConfig& phy, double control_interval);

/// Mean over reuse regions of |∪ PRB ranges of links received in the region| / capacity.
double spectrum_occupancy(const std::vector<LinkIntent>& links, const Allocation& alloc, int n_enbs,
                          const RrrmConfig& cfg, long capacity);

}  // namespace d2d::rrrm
