#include "d2d/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d {

TruncatedZipf::TruncatedZipf(double alpha, int n) {
  if (n < 1) throw std::invalid_argument("library size must be >= 1");
  pmf_.resize(static_cast<std::size_t>(n));
  double norm = 0;
  for (int z = 1; z <= n; ++z) norm += std::pow(static_cast<double>(z), -alpha);
  double c = 0;
  cdf_.resize(pmf_.size());
  for (int z = 1; z <= n; ++z) {
    pmf_[static_cast<std::size_t>(z - 1)] = std::pow(static_cast<double>(z), -alpha) / norm;
    c += pmf_[static_cast<std::size_t>(z - 1)];
    cdf_[static_cast<std::size_t>(z - 1)] = c;
  }
  cdf_.back() = 1.0;
}

int TruncatedZipf::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), size() - 1)) + 1;
}

}  // namespace d2d
