#pragma once

#include "d2d/config.hpp"
#include "d2d/mixed_distribution.hpp"
#include "d2d/rng.hpp"
#include "d2d/speed_law.hpp"

#include <functional>
#include <vector>

namespace d2d::analytic {

// ---- densities and request statistics ----

/// ∫ λ p(v)/|v| dv
double node_density(double arrival_rate, const SpeedLaw& law);
/// Closed form for the uniform magnitude law.
double node_density_uniform(double arrival_rate, double vmin, double vmax);
double content_density(double rho, double pz, double request_rate, double tau_s, double tau_c);
/// Per-content probability that a device does not hold z.
std::vector<double> not_cached_probability(const std::vector<double>& pz, double request_rate, double tau_s,
                                           CacheModel model);
std::vector<double> non_repeated_pmf(const std::vector<double>& pz, const std::vector<double>& not_cached);

// ---- time limit and relative speed ----

/// Φ = min(remaining content timeout, remaining sharing timeout). τc = 0 gives a unit atom at 0.
MixedDistribution time_limit_law(double tau_c, double tau_s, double dphi = 0.01);
double time_limit_mean(double tau_c, double tau_s);

/// f(v | va) = p_V*(v + va)
double relative_speed_density(double v, double va, const SpeedLaw& law);

/// Relative speed law V = V_B* − va, kept as constant pieces.
class RelativeSpeed {
 public:
  RelativeSpeed(const SpeedLaw& law, double va);
  double pdf(double v) const;
  /// ∫ f over [lo, hi]
  double mass(double lo, double hi) const;
  /// P(V <= w)
  double cdf(double w) const;
  const std::vector<SpeedLaw::Segment>& segments() const { return seg_; }

 private:
  const SpeedLaw* law_;
  double va_;
  std::vector<SpeedLaw::Segment> seg_;
};

/// Law of the closing speed U of a PCP approaching from one side, with closing-time
/// functionals under Φ. H(d) = P(U Φ >= d, U > 0) and K(D) = ∫_0^D H.
class ClosingLaw {
 public:
  /// ahead: PCP in front (x0 > 0), closing when V < 0.
  ClosingLaw(const RelativeSpeed& rel, bool ahead, double tau_c, double tau_s);
  double total() const;                 // P(U > 0)
  double density(double u) const;      // g(u)
  double inverse_tail(double u) const;  // ∫_{u'>u} g(u')/u' du'
  double H(double d) const;
  double K(double D) const;

 private:
  struct Piece {
    double a, b, c;
  };
  std::vector<Piece> pieces_;
  const RelativeSpeed* rel_;
  bool ahead_;
  double tau_c_, tau_s_;
};

/// Law of the distance reached by a single PCP initially at signed offset x0.
MixedDistribution single_pcp_distance_law(double x0, double va, const SpeedLaw& law, double tau_c,
                                          double tau_s, double dr);
/// Same law assembled from the displacement law of the optimal relative position.
MixedDistribution single_pcp_distance_law_from_displacement(double x0, double va, const SpeedLaw& law,
                                                            double tau_c, double tau_s, double dr);
/// Direct draws of the same law: sample V_B* and Φ, then minimize |x0 + v t| over [0, Φ].
std::vector<double> single_pcp_distance_samples(double x0, double va, const SpeedLaw& law, double tau_c,
                                                double tau_s, std::size_t n, Rng& rng);

// ---- PCP population, offload and effective distance ----

struct EnergyModel {
  std::function<double(double)> i2d;  // joules per content vs eNB-to-vehicle longitudinal distance
  std::function<double(double)> d2d;  // joules per content vs D2D distance
};

struct AnalyticParams {
  ScenarioConfig scenario;
  AnalyticConfig numerics;
  EnergyModel energy;

  static AnalyticParams from(const AppConfig& cfg);
};

/// N_max = ceil(N̄ + 10 sqrt(N̄) + 20)
int poisson_truncation(double nbar);

class Model {
 public:
  explicit Model(AnalyticParams params);

  const AnalyticParams& params() const { return p_; }
  const SpeedLaw& speed_law() const { return law_; }
  double rho() const { return rho_; }
  double rho_z(int z) const { return rho_z_.at(static_cast<std::size_t>(z - 1)); }
  /// p_Z(z | non-repeated)
  const std::vector<double>& request_pmf() const { return q_; }

  double halfwidth(double va) const;
  double mean_count(int z, double va) const;
  double offload_probability(int z, double va) const;
  double marginal_offload_probability() const;

  /// Law of the distance reached by one PCP uniform on the region, given va, on [0, r_max].
  struct Conditional {
    std::vector<double> r, F, p;  // CDF and density on the grid; F[0] is the atom at 0
  };
  Conditional conditional(double va) const;

  /// Given va and the number n of PCPs mixture weights w_n (n >= 1, index n-1), the law of the
  /// effective distance truncated to [0, r_max].
  MixedDistribution mixture_law(const Conditional& c, const std::vector<double>& weights) const;
  MixedDistribution effective_distance_law(int z, double va) const;

  struct Unconditional {
    MixedDistribution law;       // longitudinal
    MixedDistribution lane_law;  // with lane offset
    double offload_probability;  // marginal P(off)
  };
  Unconditional unconditional(OffloadWeighting weighting) const;
  MixedDistribution unconditional_effective_distance_law() const;

 private:
  std::vector<double> poisson_weights(double va, OffloadWeighting weighting, double& total) const;
  AnalyticParams p_;
  SpeedLaw law_;
  double rho_;
  std::vector<double> pz_, q_, rho_z_;
};

/// Splits atoms by lane and maps the opposite-lane share through r ↦ sqrt(r² + r_y²).
MixedDistribution lane_offset_transform(const MixedDistribution& law, double r_y, double p_same_lane);

struct SurfacePoint {
  double r_max, tau_c, v_min, v_max;
  double atom_at_zero;    // P(R_eff = 0)
  double within_offset;   // P(R_eff <= r_y)
};
struct SurfaceSweep {
  std::vector<double> r_max{80, 100, 120, 140};
  std::vector<double> tau_c{20, 40, 60, 90, 120};
  std::vector<std::pair<double, double>> speed_ranges{{6, 16}, {9, 24}, {12, 32}};
};
std::vector<SurfacePoint> short_range_probability_surface(const AnalyticParams& base, const SurfaceSweep& sweep);

struct Energies {
  double e_i2d, e_d2d, e_total, p_nonoff;
};
Energies average_energies(const AnalyticParams& params);
Energies average_energies(const Model& model, const Model::Unconditional& offload_weighted);

}  // namespace d2d::analytic
