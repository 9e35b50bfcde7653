#pragma once

#include "d2d/cdms.hpp"
#include "d2d/config.hpp"
#include "d2d/rrrm.hpp"
#include "d2d/stats.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace d2d::sim {

/// Counters cover requests issued during the measurement window, followed to resolution.
struct Metrics {
  long requests = 0;        // all requests issued in the window
  long repeated = 0;        // already cached or already pending at the requester
  long non_repeated = 0;
  long deliveries_d2d = 0;
  long deliveries_i2d = 0;
  long dropped = 0;         // requester left the corridor first
  long unresolved = 0;      // still open when the run stopped
  long multiply_resolved = 0;
  long late_resolutions = 0;  // resolved after deadline + 1 interval
  long d2d_failures = 0;
  long i2d_failures = 0;
  long pruned_links = 0;
  double energy_d2d = 0;
  double energy_i2d = 0;
  double occupancy_sum = 0;
  long occupancy_samples = 0;
  std::vector<double> d2d_distances;

  long deliveries() const { return deliveries_d2d + deliveries_i2d; }
  double offloading_efficiency() const;
  double energy_per_delivery() const;
  double d2d_energy_per_offload() const;
  double i2d_energy_per_delivery() const;
  double occupancy() const;
  bool operator==(const Metrics&) const = default;
};

struct Observer {
  std::function<void(long interval, const std::vector<rrrm::LinkIntent>&, const rrrm::Allocation&)> on_alloc;
  std::function<void(long interval, const rrrm::LinkIntent&, double shadowing_db, double bits, bool success)>
      on_channel;
};

/// One run: warm-up, `duration` seconds of measurement, then drain until every measured
/// request is resolved.
Metrics run(const AppConfig& cfg, PolicyKind policy, double duration, std::uint64_t seed,
            const Observer* observer = nullptr);

struct MetricRow {
  std::string name;
  stats::Summary summary;
};

struct Replication {
  std::vector<Metrics> runs;  // seed order
  std::vector<MetricRow> rows;
  std::vector<double> pooled_distances() const;
};

/// Runs seeds base_seed + i in parallel; merge is seed-ordered.
Replication replicate(const AppConfig& cfg, PolicyKind policy, int n_runs, std::uint64_t base_seed,
                      int threads = 0);

std::vector<MetricRow> summarize(const std::vector<Metrics>& runs);

}  // namespace d2d::sim
