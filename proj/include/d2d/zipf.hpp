#pragma once

#include "d2d/rng.hpp"

#include <vector>

namespace d2d {

/// P(z) ∝ z^-alpha on {1..n}.
class TruncatedZipf {
 public:
  TruncatedZipf(double alpha, int n);

  int size() const { return static_cast<int>(pmf_.size()); }
  /// z is 1-based.
  double pmf(int z) const { return pmf_.at(static_cast<std::size_t>(z - 1)); }
  const std::vector<double>& pmf() const { return pmf_; }
  int sample(Rng& rng) const;

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

}  // namespace d2d
