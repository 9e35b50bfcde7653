#include "d2d/speed_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d {

SpeedLaw::SpeedLaw(std::vector<Bin> bins) : bins_(std::move(bins)) {
  if (bins_.empty()) throw std::invalid_argument("speed law needs at least one bin");
  double total = 0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const auto& b = bins_[i];
    if (!(b.lo > 0)) throw std::invalid_argument("speed law must be bounded away from 0");
    if (b.hi < b.lo || b.mass < 0) throw std::invalid_argument("malformed speed bin");
    if (i > 0 && b.lo < bins_[i - 1].hi) throw std::invalid_argument("speed bins overlap");
    total += b.mass;
  }
  if (!(total > 0)) throw std::invalid_argument("speed law has no mass");
  for (auto& b : bins_) b.mass /= total;

  // A degenerate bin (lo == hi) is widened by a hair so densities stay finite.
  for (auto& b : bins_)
    if (b.hi == b.lo) b.hi = b.lo * (1 + 1e-9);

  for (auto it = bins_.rbegin(); it != bins_.rend(); ++it)
    segments_.push_back({-it->hi, -it->lo, it->mass / (2 * (it->hi - it->lo))});
  for (const auto& b : bins_) segments_.push_back({b.lo, b.hi, b.mass / (2 * (b.hi - b.lo))});

  double cm = 0, ci = 0;
  for (const auto& b : bins_) {
    cm += b.mass;
    ci += b.mass * std::log(b.hi / b.lo) / (b.hi - b.lo);
    cum_mass_.push_back(cm);
    cum_inv_.push_back(ci);
  }
}

SpeedLaw SpeedLaw::uniform(double vmin, double vmax) {
  if (!(vmin > 0)) throw std::invalid_argument("speed law must be bounded away from 0");
  if (vmax < vmin) throw std::invalid_argument("v_max < v_min");
  return SpeedLaw({{vmin, vmax, 1.0}});
}

double SpeedLaw::pdf(double v) const {
  for (const auto& s : segments_)
    if (v >= s.lo && v <= s.hi) return s.density;
  return 0.0;
}

double SpeedLaw::inverse_speed_mean() const { return cum_inv_.back(); }

namespace {
std::size_t pick(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u * cum.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}
}  // namespace

double SpeedLaw::sample_magnitude(Rng& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto& b = bins_[pick(cum_mass_, U(rng))];
  return b.lo + (b.hi - b.lo) * U(rng);
}

double SpeedLaw::sample_stationary_magnitude(Rng& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto& b = bins_[pick(cum_inv_, U(rng))];
  return b.lo * std::pow(b.hi / b.lo, U(rng));
}

}  // namespace d2d
