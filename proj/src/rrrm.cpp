#include "d2d/rrrm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <limits>

namespace d2d::rrrm {

double point_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void finalize_link(LinkIntent& link, const PhyConfig& phy) {
  link.distance = point_distance(link.tx_pos, link.rx_pos);
  const double g = phy::nominal_gain(link.kind, link.distance, phy);
  link.tx_power = phy::tx_power_per_subcarrier(g, phy::link_margin_db(link.kind, phy), phy);
}

InterferenceMatrix interference_matrix(const std::vector<LinkIntent>& links, const PhyConfig& phy) {
  InterferenceMatrix m(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto kind = links[i].tx.is_enb ? phy::LinkKind::I2D : phy::LinkKind::D2D;
    for (std::size_t j = 0; j < links.size(); ++j)
      m(i, j) = phy::nominal_gain(kind, point_distance(links[i].tx_pos, links[j].rx_pos), phy);
  }
  return m;
}

std::vector<std::size_t> priority_order(const std::vector<LinkIntent>& links, long interval) {
  std::vector<std::size_t> idx(links.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = links[a];
    const auto& y = links[b];
    const bool xi = x.kind == phy::LinkKind::I2D, yi = y.kind == phy::LinkKind::I2D;
    if (xi != yi) return xi;
    const long rx = x.deadline_interval - interval, ry = y.deadline_interval - interval;
    if (rx != ry) return rx < ry;
    if (x.request_interval != y.request_interval) return x.request_interval < y.request_interval;
    return x.id < y.id;
  });
  return idx;
}

int region_of_enb(int enb, const RrrmConfig& cfg) { return enb / cfg.reuse_region_size; }

bool compatible(const LinkIntent& a, std::size_t ia, const LinkIntent& b, std::size_t ib, const InterferenceMatrix& m,
                const PhyConfig& phy, const RrrmConfig& cfg) {
  if (a.tx.is_enb && b.tx.is_enb) {
    if (a.tx.id == b.tx.id) return true;  // exclusive slices of one eNB
    if (region_of_enb(a.tx.id, cfg) == region_of_enb(b.tx.id, cfg)) return false;
  }
  const double noise = phy::subcarrier_noise_power(phy);
  const double gamma = std::pow(10.0, cfg.inr_threshold_db / 10.0);
  return b.tx_power * m(ib, ia) / noise <= gamma && a.tx_power * m(ia, ib) / noise <= gamma;
}

std::vector<RrrSet> partition_rrr_sets(const std::vector<LinkIntent>& links, const std::vector<std::size_t>& order,
                                       const InterferenceMatrix& m, const PhyConfig& phy, const RrrmConfig& cfg) {
  std::vector<RrrSet> sets;
  for (std::size_t i : order) {
    bool placed = false;
    for (auto& s : sets) {
      bool ok = true;
      for (std::size_t j : s.members)
        if (!compatible(links[i], i, links[j], j, m, phy, cfg)) {
          ok = false;
          break;
        }
      if (ok) {
        s.members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) sets.push_back({{i}, {}});
  }
  return sets;
}

namespace {

long pool_size(const std::vector<LinkIntent>& links, const std::vector<std::size_t>& members) {
  long d2d = 0;
  std::map<int, long> per_enb;
  for (std::size_t i : members) {
    if (links[i].tx.is_enb)
      per_enb[links[i].tx.id] += links[i].n_prbs;
    else
      d2d = std::max<long>(d2d, links[i].n_prbs);
  }
  long pool = d2d;
  for (const auto& [e, n] : per_enb) pool = std::max(pool, n);
  return pool;
}

}  // namespace

Allocation allocate_prbs(const std::vector<LinkIntent>& links, std::vector<RrrSet> sets,
                         const std::vector<std::size_t>& order, long capacity) {
  Allocation a;
  a.range.assign(links.size(), {});
  a.set_of.assign(links.size(), -1);

  auto total = [&] {
    long t = 0;
    for (const auto& s : sets) t += pool_size(links, s.members);
    return t;
  };
  for (auto it = order.rbegin(); it != order.rend() && total() > capacity; ++it) {
    for (auto& s : sets) {
      auto pos = std::find(s.members.begin(), s.members.end(), *it);
      if (pos != s.members.end()) {
        s.members.erase(pos);
        a.pruned.push_back(*it);
        break;
      }
    }
  }
  sets.erase(std::remove_if(sets.begin(), sets.end(), [](const RrrSet& s) { return s.members.empty(); }), sets.end());

  long cursor = 0;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    auto& s = sets[si];
    s.pool = {cursor, pool_size(links, s.members)};
    std::map<int, long> slice;  // eNB -> next offset
    for (std::size_t i : s.members) {
      const auto& l = links[i];
      if (l.tx.is_enb) {
        long& off = slice[l.tx.id];
        a.range[i] = {cursor + off, l.n_prbs};
        off += l.n_prbs;
      } else {
        a.range[i] = {cursor, l.n_prbs};
      }
      a.set_of[i] = static_cast<int>(si);
    }
    cursor += s.pool.count;
  }
  a.used = cursor;
  a.sets = std::move(sets);
  return a;
}

Allocation schedule(const std::vector<LinkIntent>& links, long interval, const PhyConfig& phy, const RrrmConfig& cfg,
                    long capacity) {
  if (links.empty()) return {};
  const auto order = priority_order(links, interval);
  const auto m = interference_matrix(links, phy);
  auto sets = partition_rrr_sets(links, order, m, phy, cfg);
  return allocate_prbs(links, std::move(sets), order, cfg.pruning ? capacity : std::numeric_limits<long>::max());
}

long grid_capacity(const PhyConfig& phy, double control_interval) {
  return static_cast<long>(phy.prbs_per_slot()) * phy.slots_per_interval(control_interval);
}

double spectrum_occupancy(const std::vector<LinkIntent>& links, const Allocation& alloc, int n_enbs,
                          const RrrmConfig& cfg, long capacity) {
  const int regions = std::max(1, (n_enbs + cfg.reuse_region_size - 1) / cfg.reuse_region_size);
  if (links.empty() || alloc.range.empty()) return 0.0;
  std::vector<std::vector<PrbRange>> per(static_cast<std::size_t>(regions));
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (alloc.range[i].count <= 0) continue;
    const int r = std::min(regions - 1, region_of_enb(links[i].rx_enb, cfg));
    per[static_cast<std::size_t>(r)].push_back(alloc.range[i]);
  }
  double occ = 0;
  for (auto& v : per) {
    std::sort(v.begin(), v.end(), [](const PrbRange& a, const PrbRange& b) { return a.start < b.start; });
    long used = 0, end = std::numeric_limits<long>::min();
    for (const auto& r : v) {
      const long s = std::max(r.start, end);
      if (r.end() > s) used += r.end() - s;
      end = std::max(end, r.end());
    }
    occ += std::min(1.0, static_cast<double>(used) / static_cast<double>(capacity));
  }
  return occ / regions;
}

}  // namespace d2d::rrrm
