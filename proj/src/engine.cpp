#include "d2d/engine.hpp"

#include "d2d/phy.hpp"
#include "d2d/scenario.hpp"
#include "d2d/speed_law.hpp"
#include "d2d/zipf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace d2d::sim {

double Metrics::offloading_efficiency() const {
  return deliveries() ? static_cast<double>(deliveries_d2d) / static_cast<double>(deliveries()) : 0.0;
}
double Metrics::energy_per_delivery() const {
  return deliveries() ? (energy_d2d + energy_i2d) / static_cast<double>(deliveries()) : 0.0;
}
double Metrics::d2d_energy_per_offload() const {
  return deliveries_d2d ? energy_d2d / static_cast<double>(deliveries_d2d) : 0.0;
}
double Metrics::i2d_energy_per_delivery() const {
  return deliveries_i2d ? energy_i2d / static_cast<double>(deliveries_i2d) : 0.0;
}
double Metrics::occupancy() const {
  return occupancy_samples ? occupancy_sum / static_cast<double>(occupancy_samples) : 0.0;
}

namespace {

struct MeasuredRequest {
  long deadline_tick;
  int resolutions = 0;
};

class Runner {
 public:
  Runner(const AppConfig& cfg, PolicyKind policy, double duration, std::uint64_t seed, const Observer* obs)
      : cfg_(cfg),
        sc_(cfg.scenario),
        law_(SpeedLaw::uniform(sc_.speed_min, sc_.speed_max)),
        zipf_(sc_.zipf_alpha, sc_.library_size),
        world_(sc_),
        cdms_(policy, sc_),
        shadow_(sc_, cfg.phy, seed),
        fading_(cfg.phy),
        mobility_rng_(make_rng({seed, 1})),
        request_rng_(make_rng({seed, 2})),
        seed_(seed),
        obs_(obs) {
    T_ = sc_.control_interval;
    warm_ = std::llround(cfg.sim.warmup / T_);
    measure_ = std::llround(duration / T_);
    capacity_ = rrrm::grid_capacity(cfg.phy, T_);
    n_prbs_ = phy::prbs_required(cfg.phy);
    for (auto& v : initial_vehicles(0.0, sc_, law_, mobility_rng_, next_vehicle_)) world_.add(std::move(v));
  }

  Metrics go() {
    const long horizon = warm_ + measure_;
    const long hard_stop = horizon + 4 * std::llround(sc_.content_timeout / T_) + 1000;
    long k = 1;
    for (; k <= horizon || (open_measured_ > 0 && k <= hard_stop); ++k) tick(k);
    for (const auto& [id, m] : measured_) {
      if (m.resolutions == 0) ++metrics_.unresolved;
      if (m.resolutions > 1) ++metrics_.multiply_resolved;
    }
    return std::move(metrics_);
  }

 private:
  bool in_window(long k) const { return k > warm_ && k <= warm_ + measure_; }

  void resolve(int request, long k) {
    auto it = measured_.find(request);
    if (it == measured_.end()) return;
    if (++it->second.resolutions == 1) --open_measured_;
    if (k > it->second.deadline_tick + 1) ++metrics_.late_resolutions;
  }

  void tick(long k) {
    const double t = static_cast<double>(k) * T_, t_prev = t - T_;

    for (auto& v : spawn_vehicles(t_prev, t, sc_, law_, mobility_rng_, next_vehicle_)) world_.add(std::move(v));
    for (int id : world_.remove_exited(t))
      for (int r : cdms_.on_exit(id))
        if (measured_.count(r)) {
          ++metrics_.dropped;
          resolve(r, k);
        }
    world_.expire_caches(t);

    const auto active = world_.active(t);
    for (auto& r : spawn_requests(t_prev, t, active, sc_, zipf_, request_rng_, next_request_)) {
      r.repeated = r.repeated || cdms_.pending(r.requester, r.content);
      const bool measured = in_window(k);
      if (measured) {
        ++metrics_.requests;
        ++(r.repeated ? metrics_.repeated : metrics_.non_repeated);
      }
      if (r.repeated) continue;
      if (measured) {
        measured_.emplace(r.id, MeasuredRequest{k + std::llround(sc_.content_timeout / T_)});
        ++open_measured_;
      }
      cdms_.on_request(r, world_, k);
    }

    cdms_.monitor(new_holders_, world_, k);
    new_holders_.clear();

    const auto intents = cdms_.due(world_, k);
    std::vector<rrrm::LinkIntent> links;
    links.reserve(intents.size());
    for (std::size_t i = 0; i < intents.size(); ++i) links.push_back(make_link(intents[i], static_cast<int>(i), k));
    const auto alloc = rrrm::schedule(links, k, cfg_.phy, cfg_.rrrm, capacity_);
    if (obs_ && obs_->on_alloc) obs_->on_alloc(k, links, alloc);

    std::vector<char> ok(links.size(), 0);
    channels_.clear();
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (alloc.range.empty() || alloc.range[i].count <= 0) continue;
      ok[i] = transmit(links, alloc, i, k);
    }

    for (std::size_t i = 0; i < intents.size(); ++i) {
      const auto& in = intents[i];
      const auto& req = cdms_.request(in.request_ref);
      const bool measured = measured_.count(in.request_ref) != 0;
      const bool pruned = alloc.range.empty() || alloc.range[i].count <= 0;
      if (measured && pruned) ++metrics_.pruned_links;
      if (ok[i]) {
        world_.cache_insert(req.requester, req.content, t + sc_.sharing_timeout);
        new_holders_.emplace_back(req.requester, req.content);
        if (measured) {
          const double e = phy::transmission_energy(in.kind, links[i].distance, cfg_.phy);
          if (in.kind == phy::LinkKind::D2D) {
            ++metrics_.deliveries_d2d;
            metrics_.energy_d2d += e;
            metrics_.d2d_distances.push_back(links[i].distance);
          } else {
            ++metrics_.deliveries_i2d;
            metrics_.energy_i2d += e;
          }
          resolve(in.request_ref, k);
        }
      } else if (measured && !pruned) {
        ++(in.kind == phy::LinkKind::D2D ? metrics_.d2d_failures : metrics_.i2d_failures);
      }
      cdms_.on_outcome(in, ok[i] != 0, world_, k);
    }

    if (in_window(k)) {
      const double occ = links.empty() ? 0.0
                                       : rrrm::spectrum_occupancy(links, alloc,
                                                                  static_cast<int>(sc_.enb_positions.size()),
                                                                  cfg_.rrrm, capacity_);
      metrics_.occupancy_sum += occ;
      ++metrics_.occupancy_samples;
    }
  }

  rrrm::LinkIntent make_link(const cdms::Intent& in, int id, long k) const {
    const double t = static_cast<double>(k) * T_;
    const auto& req = cdms_.request(in.request_ref);
    const Vehicle& rx = world_.vehicle(req.requester);
    rrrm::LinkIntent l;
    l.id = id;
    l.kind = in.kind;
    l.rx = rx.id;
    l.rx_pos = {rx.x_at(t, sc_.street_length), lane_y(rx.lane, sc_.lane_offset), 0.0};
    if (in.kind == phy::LinkKind::I2D) {
      l.tx = {true, in.provider};
      l.tx_pos = {sc_.enb_positions.at(static_cast<std::size_t>(in.provider)), 0.0, sc_.enb_antenna_height};
    } else {
      const Vehicle& tx = world_.vehicle(in.provider);
      l.tx = {false, tx.id};
      l.tx_pos = {tx.x_at(t, sc_.street_length), lane_y(tx.lane, sc_.lane_offset), 0.0};
    }
    l.n_prbs = n_prbs_;
    l.request_interval = std::llround(req.request_time / T_);
    l.deadline_interval = l.request_interval + std::llround(sc_.content_timeout / T_);
    l.request_ref = in.request_ref;
    l.rx_enb = cdms::serving_enb(l.rx_pos.x, sc_);
    rrrm::finalize_link(l, cfg_.phy);
    return l;
  }

  const phy::ChannelRealization& channel(const rrrm::LinkIntent& from, const rrrm::LinkIntent& to, long k) {
    const auto key = std::make_tuple(from.tx.is_enb, from.tx.id, to.rx);
    auto it = channels_.find(key);
    if (it != channels_.end()) return it->second;
    const double t = static_cast<double>(k) * T_;
    const Vehicle& rx = world_.vehicle(to.rx);
    const double xr = to.rx_pos.x;
    const auto kind = from.tx.is_enb ? phy::LinkKind::I2D : phy::LinkKind::D2D;
    const double g = phy::nominal_gain(kind, rrrm::point_distance(from.tx_pos, to.rx_pos), cfg_.phy);
    double s;
    if (from.tx.is_enb) {
      s = shadow_.i2d_db(from.tx.id, rx.lane, xr);
    } else {
      const Vehicle& tx = world_.vehicle(from.tx.id);
      s = shadow_.d2d_db(tx.lane, tx.x_at(t, sc_.street_length), rx.lane, xr);
    }
    auto c = phy::realize_channel(from.tx, {false, to.rx}, k, g, s, fading_, seed_);
    return channels_.emplace(key, std::move(c)).first->second;
  }

  bool transmit(const std::vector<rrrm::LinkIntent>& links, const rrrm::Allocation& alloc, std::size_t i, long k) {
    const auto& me = links[i];
    const auto r = alloc.range[i];
    std::vector<std::size_t> others;
    std::vector<long> cuts{r.start, r.end()};
    for (std::size_t j = 0; j < links.size(); ++j) {
      if (j == i || alloc.range[j].count <= 0) continue;
      const auto q = alloc.range[j];
      if (q.end() <= r.start || q.start >= r.end()) continue;
      others.push_back(j);
      cuts.push_back(std::max(q.start, r.start));
      cuts.push_back(std::min(q.end(), r.end()));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto& own = channel(me, me, k);
    double bits = 0;
    const int per_slot = cfg_.phy.prbs_per_slot();
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const long a = cuts[c], b = cuts[c + 1];
      std::vector<phy::Interferer> intf;
      for (std::size_t j : others) {
        const auto q = alloc.range[j];
        if (q.start <= a && q.end() >= b) intf.push_back({links[j].tx_power, &channel(links[j], me, k).gains});
      }
      bits += phy::achievable_information(own.gains, me.tx_power, intf, phy::prb_usage(a, b - a, per_slot), cfg_.phy);
    }
    const bool success = phy::transmission_success(bits, cfg_.phy);
    if (obs_ && obs_->on_channel) obs_->on_channel(k, me, own.shadowing_db, bits, success);
    return success;
  }

  AppConfig cfg_;
  ScenarioConfig sc_;
  SpeedLaw law_;
  TruncatedZipf zipf_;
  World world_;
  cdms::Cdms cdms_;
  phy::ShadowingMap shadow_;
  phy::FadingProfile fading_;
  Rng mobility_rng_, request_rng_;
  std::uint64_t seed_;
  const Observer* obs_;

  double T_ = 1;
  long warm_ = 0, measure_ = 0, capacity_ = 0;
  int n_prbs_ = 0;
  int next_vehicle_ = 0, next_request_ = 0;
  Metrics metrics_;
  std::unordered_map<int, MeasuredRequest> measured_;
  long open_measured_ = 0;
  std::vector<std::pair<int, int>> new_holders_;
  std::map<std::tuple<bool, int, int>, phy::ChannelRealization> channels_;
};

}  // namespace

Metrics run(const AppConfig& cfg, PolicyKind policy, double duration, std::uint64_t seed, const Observer* observer) {
  cfg.validate();
  if (!(duration > 0)) throw ConfigError("duration must be > 0");
  Runner r(cfg, policy, duration, seed, observer);
  return r.go();
}

std::vector<double> Replication::pooled_distances() const {
  std::vector<double> out;
  for (const auto& m : runs) out.insert(out.end(), m.d2d_distances.begin(), m.d2d_distances.end());
  return out;
}

std::vector<MetricRow> summarize(const std::vector<Metrics>& runs) {
  const std::vector<std::pair<std::string, double (Metrics::*)() const>> metrics{
      {"offloading_efficiency", &Metrics::offloading_efficiency},
      {"energy_per_delivery", &Metrics::energy_per_delivery},
      {"d2d_energy_per_offload", &Metrics::d2d_energy_per_offload},
      {"i2d_energy_per_delivery", &Metrics::i2d_energy_per_delivery},
      {"spectrum_occupancy", &Metrics::occupancy},
  };
  std::vector<MetricRow> rows;
  for (const auto& [name, f] : metrics) {
    std::vector<double> xs;
    for (const auto& m : runs) xs.push_back((m.*f)());
    rows.push_back({name, stats::summarize(xs)});
  }
  std::vector<double> d;
  for (const auto& m : runs) {
    double s = 0;
    for (double x : m.d2d_distances) s += x;
    d.push_back(m.d2d_distances.empty() ? 0.0 : s / static_cast<double>(m.d2d_distances.size()));
  }
  rows.push_back({"mean_d2d_distance", stats::summarize(d)});
  return rows;
}

Replication replicate(const AppConfig& cfg, PolicyKind policy, int n_runs, std::uint64_t base_seed, int threads) {
  if (n_runs < 1) throw ConfigError("replications must be >= 1");
  cfg.validate();
  Replication out;
  out.runs.resize(static_cast<std::size_t>(n_runs));
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_runs);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_runs));
  auto work = [&] {
    for (int i; (i = next++) < n_runs;) {
      try {
        out.runs[static_cast<std::size_t>(i)] =
            run(cfg, policy, cfg.sim.duration, base_seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.rows = summarize(out.runs);
  return out;
}

}  // namespace d2d::sim
