#pragma once

#include "d2d/config.hpp"
#include "d2d/phy.hpp"
#include "d2d/scenario.hpp"

#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace d2d::cdms {

/// Minimizer of |x0 + v t| over t in [0, phi]; earliest when several.
struct Encounter {
  double t;
  double separation;  // |x0 + v t|
};
Encounter optimal_encounter(double x0, double v, double phi);

struct Provider {
  bool is_enb = false;
  int id = 0;
};

struct ScheduledDelivery {
  int request_ref = 0;
  Provider provider;
  long planned_interval = 0;
  double expected_distance = 0;
  double best_candidate_distance = std::numeric_limits<double>::infinity();
};

struct PcpCandidate {
  int device = 0;
  double expiry = 0;     // sharing-timeout expiry of the cached copy
  long optimal_tick = 0;
  double optimal_distance = 0;
};

/// Transmission the engine should attempt this interval.
struct Intent {
  int request_ref = 0;
  phy::LinkKind kind = phy::LinkKind::I2D;
  int provider = 0;  // device id (D2D) or eNB index (I2D)
};

/// Serving eNB: nearest by longitudinal position, lower index on ties.
int serving_enb(double x, const ScenarioConfig& cfg);

/// Ticks k with k T inside the vehicle's activity window.
long first_active_tick(const Vehicle& v, const ScenarioConfig& cfg);
long last_active_tick(const Vehicle& v, const ScenarioConfig& cfg);
/// Last tick at which a cache entry with the given expiry is still valid.
long last_valid_tick(double expiry, double control_interval);

/// Best encounter tick of a candidate with the requester over ticks [from, until]; none if the
/// window is empty.
std::optional<PcpCandidate> evaluate_candidate(const Vehicle& requester, const Vehicle& candidate, int content,
                                               long from, long until, const ScenarioConfig& cfg);

/// Policy state for all open requests. One instance per run; the engine drives it once per tick
/// in the order on_request, monitor, due, on_outcome.
class Cdms {
 public:
  Cdms(PolicyKind kind, const ScenarioConfig& cfg);

  PolicyKind kind() const { return kind_; }
  void on_request(const ContentRequest& r, const World& w, long tick);
  /// new_holders: (device, content) pairs cached since the previous call.
  void monitor(const std::vector<std::pair<int, int>>& new_holders, const World& w, long tick);
  std::vector<Intent> due(const World& w, long tick) const;
  /// success false covers both PHY failure and RRRM pruning.
  void on_outcome(const Intent& intent, bool success, const World& w, long tick);
  /// Drops every open request of a vehicle that left the corridor; returns their ids.
  std::vector<int> on_exit(int vehicle);

  bool open(int request) const { return open_.count(request) != 0; }
  bool pending(int device, int content) const;
  std::size_t open_count() const { return open_.size(); }
  const ContentRequest& request(int id) const { return open_.at(id).request; }
  std::optional<ScheduledDelivery> schedule(int request) const;

 private:
  struct Entry {
    ContentRequest request;
    long deadline_tick = 0;
    std::optional<ScheduledDelivery> plan;
  };
  std::optional<ScheduledDelivery> select_optimal(const Entry& e, const World& w, long from) const;
  std::optional<ScheduledDelivery> select_benchmark(const Entry& e, const World& w, long tick) const;
  long ticks(double seconds) const;

  PolicyKind kind_;
  ScenarioConfig cfg_;
  std::map<int, Entry> open_;
  std::multimap<std::pair<int, int>, int> by_device_content_;  // (device, content) -> request
};

}  // namespace d2d::cdms
