#pragma once

#include "d2d/rng.hpp"

#include <vector>

namespace d2d {

/// Symmetric signed-speed law with a piecewise-constant magnitude density.
/// Direction is + or - with probability 1/2 each.
class SpeedLaw {
 public:
  struct Bin {
    double lo;
    double hi;
    double mass;
  };
  /// A constant-density piece of the signed density.
  struct Segment {
    double lo;
    double hi;
    double density;
  };

  explicit SpeedLaw(std::vector<Bin> magnitude_bins);
  static SpeedLaw uniform(double vmin, double vmax);

  double min_speed() const { return bins_.front().lo; }
  double max_speed() const { return bins_.back().hi; }
  const std::vector<Bin>& bins() const { return bins_; }
  /// Signed pieces sorted by lo; negative half first.
  const std::vector<Segment>& segments() const { return segments_; }

  double pdf(double v) const;
  /// E[1/|V|]
  double inverse_speed_mean() const;
  double sample_magnitude(Rng& rng) const;
  /// Magnitude law of vehicles present on the road at a given instant (∝ p(v)/v).
  double sample_stationary_magnitude(Rng& rng) const;

 private:
  std::vector<Bin> bins_;
  std::vector<Segment> segments_;
  std::vector<double> cum_mass_;
  std::vector<double> cum_inv_;
};

}  // namespace d2d
