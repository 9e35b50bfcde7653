#pragma once

#include <functional>
#include <vector>

namespace d2d {

struct Atom {
  double location;
  double mass;
};

/// Probability law made of point masses plus a density tabulated on a grid.
/// The density is piecewise linear between grid nodes and zero outside the grid.
class MixedDistribution {
 public:
  MixedDistribution() = default;
  MixedDistribution(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density);
  static MixedDistribution point_mass(double at);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }

  double atom_mass() const;
  double atom_mass_at(double location, double tol = 1e-9) const;
  double continuous_mass() const;
  double total_mass() const { return atom_mass() + continuous_mass(); }

  double density_at(double x) const;
  /// Sub-distribution CDF of the continuous part.
  double continuous_cdf(double x) const;
  /// P(X <= x), atoms included.
  double cdf(double x) const;
  /// E[f(X)], trapezoid on the continuous part.
  double expectation(const std::function<double(double)>& f) const;
  double mean() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cum_;  // continuous mass up to each node
};

}  // namespace d2d
