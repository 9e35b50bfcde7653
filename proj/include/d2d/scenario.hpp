#pragma once

#include "d2d/config.hpp"
#include "d2d/rng.hpp"
#include "d2d/speed_law.hpp"
#include "d2d/zipf.hpp"

#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace d2d {

enum class Lane { Forward, Backward };

/// Lateral coordinate of a lane's median axis; eNBs sit on y = 0.
double lane_y(Lane lane, double lane_offset);

struct CacheEntry {
  int content;
  double expiry_time;
};

struct Vehicle {
  int id = 0;
  double entry_time = 0;
  double speed = 0;  // signed; > 0 travels toward increasing x
  Lane lane = Lane::Forward;
  std::map<int, double> cache;  // content -> expiry time

  double entry_point(double street_length) const { return speed > 0 ? 0.0 : street_length; }
  double exit_time(double street_length) const { return entry_time + street_length / std::abs(speed); }
  /// Trajectory extrapolation, valid or not.
  double x_at(double t, double street_length) const {
    return entry_point(street_length) + speed * (t - entry_time);
  }
  bool active(double t, double street_length) const;
  bool holds(int content, double t) const;
};

enum class RequestState { Pending, Scheduled, DeliveredD2D, DeliveredI2D, Dropped };

struct ContentRequest {
  int id = 0;
  int requester = 0;
  int content = 0;
  double request_time = 0;
  double deadline = 0;
  RequestState state = RequestState::Pending;
  bool served = false;
  bool repeated = false;
};

/// Arrivals with entry times in (t0, t1]; each end receives half the rate.
std::vector<Vehicle> spawn_vehicles(double t0, double t1, const ScenarioConfig& cfg, const SpeedLaw& law,
                                    Rng& rng, int& next_id);

/// Poisson(ρL) vehicles at uniform positions with the length-biased speed law, active at time t.
std::vector<Vehicle> initial_vehicles(double t, const ScenarioConfig& cfg, const SpeedLaw& law, Rng& rng,
                                      int& next_id);

/// Poisson(λ_Z Δt) requests per active vehicle, stamped at t1; requests for cached content are
/// marked repeated.
std::vector<ContentRequest> spawn_requests(double t0, double t1, const std::vector<const Vehicle*>& active,
                                           const ScenarioConfig& cfg, const TruncatedZipf& zipf, Rng& rng,
                                           int& next_id);

/// Throws std::logic_error if the vehicle is not active at t.
double position(const Vehicle& v, double t, const ScenarioConfig& cfg);
double distance(const Vehicle& a, const Vehicle& b, double t, const ScenarioConfig& cfg);
/// Distance between two points on lanes, given longitudinal separation.
double lane_distance(double dx, Lane a, Lane b, double lane_offset);

/// Vehicles and cache index.
class World {
 public:
  explicit World(ScenarioConfig cfg);

  const ScenarioConfig& config() const { return cfg_; }
  void add(Vehicle v);
  /// Removes vehicles that are inactive at t; returns their ids.
  std::vector<int> remove_exited(double t);
  void expire_caches(double t);
  void cache_insert(int id, int content, double expiry);

  bool contains(int id) const { return vehicles_.count(id) != 0; }
  const Vehicle& vehicle(int id) const;
  const std::map<int, Vehicle>& vehicles() const { return vehicles_; }
  /// Ids of vehicles caching z (ascending). Entries are valid until their expiry.
  const std::set<int>& holders(int content) const;
  std::vector<const Vehicle*> active(double t) const;

 private:
  ScenarioConfig cfg_;
  std::map<int, Vehicle> vehicles_;
  std::map<int, std::set<int>> holders_;
  std::multimap<double, std::pair<int, int>> expiry_queue_;  // expiry -> (vehicle, content)
};

}  // namespace d2d
