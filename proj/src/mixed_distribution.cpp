#include "d2d/mixed_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d {

MixedDistribution::MixedDistribution(std::vector<Atom> atoms, std::vector<double> grid,
                                     std::vector<double> density)
    : atoms_(std::move(atoms)), grid_(std::move(grid)), density_(std::move(density)) {
  if (grid_.size() != density_.size()) throw std::invalid_argument("grid/density size mismatch");
  if (grid_.size() == 1) throw std::invalid_argument("a density grid needs at least two nodes");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
  for (double d : density_)
    if (!(d >= 0) || !std::isfinite(d)) throw std::invalid_argument("density must be finite and >= 0");
  for (const auto& a : atoms_)
    if (!(a.mass >= 0)) throw std::invalid_argument("atom masses must be >= 0");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  cum_.assign(grid_.size(), 0.0);
  for (std::size_t i = 1; i < grid_.size(); ++i)
    cum_[i] = cum_[i - 1] + 0.5 * (density_[i] + density_[i - 1]) * (grid_[i] - grid_[i - 1]);
}

MixedDistribution MixedDistribution::point_mass(double at) { return MixedDistribution({{at, 1.0}}, {}, {}); }

double MixedDistribution::atom_mass() const {
  double m = 0;
  for (const auto& a : atoms_) m += a.mass;
  return m;
}

double MixedDistribution::atom_mass_at(double location, double tol) const {
  double m = 0;
  for (const auto& a : atoms_)
    if (std::abs(a.location - location) <= tol) m += a.mass;
  return m;
}

double MixedDistribution::continuous_mass() const { return cum_.empty() ? 0.0 : cum_.back(); }

double MixedDistribution::density_at(double x) const {
  if (grid_.empty() || x < grid_.front() || x > grid_.back()) return 0.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return density_.back();
  const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double w = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return density_[i] + w * (density_[i + 1] - density_[i]);
}

double MixedDistribution::continuous_cdf(double x) const {
  if (grid_.empty() || x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return cum_.back();
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double s = x - grid_[i];
  const double slope = (density_[i + 1] - density_[i]) / h;
  return cum_[i] + density_[i] * s + 0.5 * slope * s * s;
}

double MixedDistribution::cdf(double x) const {
  double m = continuous_cdf(x);
  for (const auto& a : atoms_)
    if (a.location <= x) m += a.mass;
  return m;
}

double MixedDistribution::expectation(const std::function<double(double)>& f) const {
  double e = 0;
  for (const auto& a : atoms_) e += a.mass * f(a.location);
  for (std::size_t i = 1; i < grid_.size(); ++i)
    e += 0.5 * (density_[i] * f(grid_[i]) + density_[i - 1] * f(grid_[i - 1])) * (grid_[i] - grid_[i - 1]);
  return e;
}

double MixedDistribution::mean() const {
  return expectation([](double x) { return x; });
}

}  // namespace d2d
