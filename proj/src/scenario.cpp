#include "d2d/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace d2d {

namespace {
constexpr double kTimeEps = 1e-9;
}

double lane_y(Lane lane, double lane_offset) {
  return lane == Lane::Forward ? -0.5 * lane_offset : 0.5 * lane_offset;
}

bool Vehicle::active(double t, double street_length) const {
  return t >= entry_time - kTimeEps && t <= exit_time(street_length) + kTimeEps;
}

bool Vehicle::holds(int content, double t) const {
  auto it = cache.find(content);
  return it != cache.end() && it->second > t;
}

std::vector<Vehicle> spawn_vehicles(double t0, double t1, const ScenarioConfig& cfg, const SpeedLaw& law,
                                    Rng& rng, int& next_id) {
  if (!(t1 > t0)) throw std::invalid_argument("spawn interval must be non-degenerate");
  std::vector<Vehicle> out;
  const double mean = cfg.vehicle_arrival_rate * (t1 - t0);
  if (mean <= 0) return out;
  const int n = std::poisson_distribution<int>(mean)(rng);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<double, bool>> arrivals;
  for (int i = 0; i < n; ++i) {
    const double t = t1 - (t1 - t0) * U(rng);  // (t0, t1]
    arrivals.emplace_back(t, U(rng) < 0.5);
  }
  std::sort(arrivals.begin(), arrivals.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto [t, forward] : arrivals) {
    Vehicle v;
    v.id = next_id++;
    v.entry_time = t;
    const double s = law.sample_magnitude(rng);
    v.speed = forward ? s : -s;
    v.lane = forward ? Lane::Forward : Lane::Backward;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vehicle> initial_vehicles(double t, const ScenarioConfig& cfg, const SpeedLaw& law, Rng& rng,
                                      int& next_id) {
  const double rho = cfg.vehicle_arrival_rate * law.inverse_speed_mean();
  const int n = std::poisson_distribution<int>(rho * cfg.street_length)(rng);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vehicle> out;
  for (int i = 0; i < n; ++i) {
    Vehicle v;
    v.id = next_id++;
    const bool forward = U(rng) < 0.5;
    const double s = law.sample_stationary_magnitude(rng);
    const double x = cfg.street_length * U(rng);
    v.speed = forward ? s : -s;
    v.lane = forward ? Lane::Forward : Lane::Backward;
    v.entry_time = t - (x - v.entry_point(cfg.street_length)) / v.speed;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ContentRequest> spawn_requests(double t0, double t1, const std::vector<const Vehicle*>& active,
                                           const ScenarioConfig& cfg, const TruncatedZipf& zipf, Rng& rng,
                                           int& next_id) {
  if (!(t1 > t0)) throw std::invalid_argument("request interval must be non-degenerate");
  std::vector<ContentRequest> out;
  std::poisson_distribution<int> count(cfg.request_rate * (t1 - t0));
  for (const Vehicle* v : active) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      ContentRequest r;
      r.id = next_id++;
      r.requester = v->id;
      r.content = zipf.sample(rng);
      r.request_time = t1;
      r.deadline = t1 + cfg.content_timeout;
      r.repeated = v->holds(r.content, t1);
      out.push_back(r);
    }
  }
  return out;
}

double position(const Vehicle& v, double t, const ScenarioConfig& cfg) {
  if (!v.active(t, cfg.street_length))
    throw std::logic_error("vehicle " + std::to_string(v.id) + " is not active at t=" + std::to_string(t));
  return v.x_at(t, cfg.street_length);
}

double lane_distance(double dx, Lane a, Lane b, double lane_offset) {
  const double dy = lane_y(a, lane_offset) - lane_y(b, lane_offset);
  return std::hypot(dx, dy);
}

double distance(const Vehicle& a, const Vehicle& b, double t, const ScenarioConfig& cfg) {
  return lane_distance(position(a, t, cfg) - position(b, t, cfg), a.lane, b.lane, cfg.lane_offset);
}

World::World(ScenarioConfig cfg) : cfg_(std::move(cfg)) {}

void World::add(Vehicle v) {
  const int id = v.id;
  for (const auto& [z, e] : v.cache) {
    holders_[z].insert(id);
    expiry_queue_.emplace(e, std::make_pair(id, z));
  }
  vehicles_.emplace(id, std::move(v));
}

std::vector<int> World::remove_exited(double t) {
  std::vector<int> gone;
  for (auto it = vehicles_.begin(); it != vehicles_.end();) {
    if (it->second.exit_time(cfg_.street_length) < t - kTimeEps) {
      for (const auto& [z, e] : it->second.cache) {
        auto h = holders_.find(z);
        if (h != holders_.end()) {
          h->second.erase(it->first);
          if (h->second.empty()) holders_.erase(h);
        }
      }
      gone.push_back(it->first);
      it = vehicles_.erase(it);
    } else {
      ++it;
    }
  }
  return gone;
}

void World::expire_caches(double t) {
  while (!expiry_queue_.empty() && expiry_queue_.begin()->first <= t) {
    auto [id, z] = expiry_queue_.begin()->second;
    const double when = expiry_queue_.begin()->first;
    expiry_queue_.erase(expiry_queue_.begin());
    auto v = vehicles_.find(id);
    if (v == vehicles_.end()) continue;
    auto c = v->second.cache.find(z);
    if (c == v->second.cache.end() || c->second != when) continue;
    v->second.cache.erase(c);
    auto h = holders_.find(z);
    if (h != holders_.end()) {
      h->second.erase(id);
      if (h->second.empty()) holders_.erase(h);
    }
  }
}

void World::cache_insert(int id, int content, double expiry) {
  auto v = vehicles_.find(id);
  if (v == vehicles_.end()) throw std::logic_error("cache insert for unknown vehicle");
  v->second.cache[content] = expiry;
  holders_[content].insert(id);
  expiry_queue_.emplace(expiry, std::make_pair(id, content));
}

const Vehicle& World::vehicle(int id) const {
  auto it = vehicles_.find(id);
  if (it == vehicles_.end()) throw std::logic_error("unknown vehicle " + std::to_string(id));
  return it->second;
}

const std::set<int>& World::holders(int content) const {
  static const std::set<int> none;
  auto it = holders_.find(content);
  return it == holders_.end() ? none : it->second;
}

std::vector<const Vehicle*> World::active(double t) const {
  std::vector<const Vehicle*> out;
  for (const auto& [id, v] : vehicles_)
    if (v.active(t, cfg_.street_length)) out.push_back(&v);
  return out;
}

}  // namespace d2d
