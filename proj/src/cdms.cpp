#include "d2d/cdms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace d2d::cdms {

namespace {
constexpr double kEps = 1e-9;
}

Encounter optimal_encounter(double x0, double v, double phi) {
  if (phi < 0 || std::isnan(phi)) throw std::invalid_argument("time limit must be >= 0");
  double t = 0;
  if (v != 0 && x0 * v < 0) t = std::min(phi, -x0 / v);
  return {t, std::abs(x0 + v * t)};
}

int serving_enb(double x, const ScenarioConfig& cfg) {
  const auto& e = cfg.enb_positions;
  int best = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (std::abs(e[i] - x) < std::abs(e[static_cast<std::size_t>(best)] - x)) best = static_cast<int>(i);
  return best;
}

long first_active_tick(const Vehicle& v, const ScenarioConfig& cfg) {
  return static_cast<long>(std::ceil(v.entry_time / cfg.control_interval - kEps));
}

long last_active_tick(const Vehicle& v, const ScenarioConfig& cfg) {
  return static_cast<long>(std::floor(v.exit_time(cfg.street_length) / cfg.control_interval + kEps));
}

long last_valid_tick(double expiry, double control_interval) {
  return static_cast<long>(std::ceil(expiry / control_interval - kEps)) - 1;
}

std::optional<PcpCandidate> evaluate_candidate(const Vehicle& requester, const Vehicle& candidate, int content,
                                               long from, long until, const ScenarioConfig& cfg) {
  auto it = candidate.cache.find(content);
  if (it == candidate.cache.end()) return std::nullopt;
  const double T = cfg.control_interval;
  until = std::min({until, last_active_tick(requester, cfg), last_active_tick(candidate, cfg),
                    last_valid_tick(it->second, T)});
  from = std::max({from, first_active_tick(requester, cfg), first_active_tick(candidate, cfg)});
  if (until < from) return std::nullopt;

  const double L = cfg.street_length;
  const double t0 = static_cast<double>(from) * T;
  const double x0 = candidate.x_at(t0, L) - requester.x_at(t0, L);
  const double v = candidate.speed - requester.speed;
  const auto enc = optimal_encounter(x0, v, static_cast<double>(until - from) * T);

  const double s = enc.t / T;
  long best = 0;
  double best_sep = std::numeric_limits<double>::infinity();
  for (long k : {static_cast<long>(std::floor(s + kEps)), static_cast<long>(std::ceil(s - kEps))}) {
    k = std::clamp(k, 0L, until - from);
    const double sep = std::abs(x0 + v * static_cast<double>(k) * T);
    if (sep < best_sep || (sep == best_sep && k < best)) {
      best_sep = sep;
      best = k;
    }
  }
  PcpCandidate c;
  c.device = candidate.id;
  c.expiry = it->second;
  c.optimal_tick = from + best;
  c.optimal_distance = lane_distance(best_sep, requester.lane, candidate.lane, cfg.lane_offset);
  return c;
}

Cdms::Cdms(PolicyKind kind, const ScenarioConfig& cfg) : kind_(kind), cfg_(cfg) {}

long Cdms::ticks(double seconds) const {
  return static_cast<long>(std::llround(seconds / cfg_.control_interval));
}

bool Cdms::pending(int device, int content) const { return by_device_content_.count({device, content}) != 0; }

std::optional<ScheduledDelivery> Cdms::schedule(int request) const {
  auto it = open_.find(request);
  if (it == open_.end()) return std::nullopt;
  return it->second.plan;
}

std::optional<ScheduledDelivery> Cdms::select_optimal(const Entry& e, const World& w, long from) const {
  if (from > e.deadline_tick || !w.contains(e.request.requester)) return std::nullopt;
  const Vehicle& req = w.vehicle(e.request.requester);
  std::optional<PcpCandidate> best;
  for (int id : w.holders(e.request.content)) {
    if (id == req.id) continue;
    auto c = evaluate_candidate(req, w.vehicle(id), e.request.content, from, e.deadline_tick, cfg_);
    if (!c || c->optimal_distance > cfg_.d2d_max_range) continue;
    if (!best || std::tie(c->optimal_distance, c->optimal_tick, c->device) <
                     std::tie(best->optimal_distance, best->optimal_tick, best->device))
      best = c;
  }
  if (!best) return std::nullopt;
  return ScheduledDelivery{e.request.id, {false, best->device}, best->optimal_tick, best->optimal_distance,
                           best->optimal_distance};
}

std::optional<ScheduledDelivery> Cdms::select_benchmark(const Entry& e, const World& w, long tick) const {
  if (tick > e.deadline_tick || !w.contains(e.request.requester)) return std::nullopt;
  const Vehicle& req = w.vehicle(e.request.requester);
  const double t = static_cast<double>(tick) * cfg_.control_interval;
  std::optional<ScheduledDelivery> best;
  for (int id : w.holders(e.request.content)) {
    if (id == req.id) continue;
    const Vehicle& c = w.vehicle(id);
    if (!c.holds(e.request.content, t) || !c.active(t, cfg_.street_length)) continue;
    const double d = distance(req, c, t, cfg_);
    if (d > cfg_.d2d_max_range) continue;
    if (!best || d < best->expected_distance) best = ScheduledDelivery{e.request.id, {false, id}, tick, d, d};
  }
  return best;
}

void Cdms::on_request(const ContentRequest& r, const World& w, long tick) {
  if (open_.count(r.id)) throw std::logic_error("duplicate request id");
  Entry e;
  e.request = r;
  e.request.state = RequestState::Pending;
  e.deadline_tick = tick + ticks(cfg_.content_timeout);
  if (kind_ == PolicyKind::Optimal) e.plan = select_optimal(e, w, tick);
  if (kind_ == PolicyKind::Benchmark) e.plan = select_benchmark(e, w, tick);
  if (e.plan) e.request.state = RequestState::Scheduled;
  by_device_content_.emplace(std::make_pair(r.requester, r.content), r.id);
  open_.emplace(r.id, std::move(e));
}

void Cdms::monitor(const std::vector<std::pair<int, int>>& new_holders, const World& w, long tick) {
  for (auto& [id, e] : open_)
    if (e.plan && e.plan->planned_interval < tick) {
      e.plan.reset();
      e.request.state = RequestState::Pending;
    }
  if (kind_ == PolicyKind::Optimal) {
    for (const auto& [device, content] : new_holders) {
      if (!w.contains(device)) continue;
      for (auto& [id, e] : open_) {
        if (e.request.content != content || e.request.requester == device || tick > e.deadline_tick) continue;
        if (!w.contains(e.request.requester)) continue;
        auto c = evaluate_candidate(w.vehicle(e.request.requester), w.vehicle(device), content, tick,
                                    e.deadline_tick, cfg_);
        if (!c || c->optimal_distance > cfg_.d2d_max_range) continue;
        const double current = e.plan ? e.plan->expected_distance : std::numeric_limits<double>::infinity();
        if (c->optimal_distance < current) {
          e.plan = ScheduledDelivery{id, {false, device}, c->optimal_tick, c->optimal_distance, c->optimal_distance};
          e.request.state = RequestState::Scheduled;
        }
      }
    }
  } else if (kind_ == PolicyKind::Benchmark) {
    for (auto& [id, e] : open_) {
      if (e.plan) continue;
      e.plan = select_benchmark(e, w, tick);
      if (e.plan) e.request.state = RequestState::Scheduled;
    }
  }
}

std::vector<Intent> Cdms::due(const World& w, long tick) const {
  std::vector<Intent> out;
  const double t = static_cast<double>(tick) * cfg_.control_interval;
  for (const auto& [id, e] : open_) {
    if (e.plan) {
      if (e.plan->planned_interval == tick) out.push_back({id, phy::LinkKind::D2D, e.plan->provider.id});
    } else if (kind_ == PolicyKind::Cellular || tick >= e.deadline_tick) {
      if (!w.contains(e.request.requester)) continue;
      const double x = w.vehicle(e.request.requester).x_at(t, cfg_.street_length);
      out.push_back({id, phy::LinkKind::I2D, serving_enb(x, cfg_)});
    }
  }
  return out;
}

void Cdms::on_outcome(const Intent& intent, bool success, const World& w, long tick) {
  auto it = open_.find(intent.request_ref);
  if (it == open_.end()) throw std::logic_error("outcome for unknown request");
  Entry& e = it->second;
  if (success) {
    auto range = by_device_content_.equal_range({e.request.requester, e.request.content});
    for (auto j = range.first; j != range.second; ++j)
      if (j->second == e.request.id) {
        by_device_content_.erase(j);
        break;
      }
    open_.erase(it);
    return;
  }
  if (intent.kind == phy::LinkKind::D2D) {
    e.plan.reset();
    e.request.state = RequestState::Pending;
    if (kind_ == PolicyKind::Optimal) e.plan = select_optimal(e, w, tick + 1);
    if (e.plan) e.request.state = RequestState::Scheduled;
  }
}

std::vector<int> Cdms::on_exit(int vehicle) {
  std::vector<int> dropped;
  for (auto it = open_.begin(); it != open_.end();) {
    if (it->second.request.requester == vehicle) {
      dropped.push_back(it->first);
      it = open_.erase(it);
      continue;
    }
    if (it->second.plan && it->second.plan->provider.id == vehicle) {
      it->second.plan.reset();
      it->second.request.state = RequestState::Pending;
    }
    ++it;
  }
  for (auto it = by_device_content_.begin(); it != by_device_content_.end();)
    it = it->first.first == vehicle ? by_device_content_.erase(it) : std::next(it);
  return dropped;
}

}  // namespace d2d::cdms
