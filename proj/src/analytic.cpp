#include "d2d/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d::analytic {

double node_density(double arrival_rate, const SpeedLaw& law) {
  if (arrival_rate < 0) throw std::invalid_argument("arrival rate must be >= 0");
  return arrival_rate * law.inverse_speed_mean();
}

double node_density_uniform(double arrival_rate, double vmin, double vmax) {
  if (!(vmin > 0)) throw std::invalid_argument("v_min must be > 0");
  if (vmax == vmin) return arrival_rate / vmin;
  return arrival_rate * std::log(vmax / vmin) / (vmax - vmin);
}

double content_density(double rho, double pz, double request_rate, double tau_s, double tau_c) {
  if (!(tau_s > tau_c)) throw std::invalid_argument("content density requires tau_s > tau_c");
  return rho * -std::expm1(-pz * request_rate * (tau_s - tau_c));
}

std::vector<double> not_cached_probability(const std::vector<double>& pz, double request_rate, double tau_s,
                                           CacheModel model) {
  std::vector<double> out(pz.size(), 1.0);
  if (model == CacheModel::SharingWindow)
    for (std::size_t i = 0; i < pz.size(); ++i) out[i] = std::exp(-pz[i] * request_rate * tau_s);
  return out;
}

std::vector<double> non_repeated_pmf(const std::vector<double>& pz, const std::vector<double>& not_cached) {
  if (pz.size() != not_cached.size()) throw std::invalid_argument("size mismatch");
  std::vector<double> q(pz.size());
  double norm = 0;
  for (std::size_t i = 0; i < pz.size(); ++i) {
    q[i] = pz[i] * not_cached[i];
    norm += q[i];
  }
  if (!(norm > 0)) throw std::invalid_argument("every content is cached: non-repeated law undefined");
  for (double& x : q) x /= norm;
  return q;
}

int poisson_truncation(double nbar) {
  if (nbar < 0) throw std::invalid_argument("Poisson mean must be >= 0");
  return static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar) + 20.0));
}

MixedDistribution lane_offset_transform(const MixedDistribution& law, double r_y, double p_same) {
  if (p_same < 0 || p_same > 1) throw std::invalid_argument("p_same_lane must be in [0, 1]");
  if (r_y < 0) throw std::invalid_argument("lane offset must be >= 0");

  std::vector<Atom> atoms;
  auto add_atom = [&](double at, double m) {
    if (m <= 0) return;
    for (auto& a : atoms)
      if (std::abs(a.location - at) <= 1e-12) {
        a.mass += m;
        return;
      }
    atoms.push_back({at, m});
  };
  for (const auto& a : law.atoms()) {
    add_atom(a.location, p_same * a.mass);
    add_atom(std::hypot(a.location, r_y), (1 - p_same) * a.mass);
  }
  const auto& g = law.grid();
  if (g.empty() || p_same == 1 || r_y == 0) {
    return MixedDistribution(std::move(atoms), g, law.density());
  }
  if (g.front() < 0) throw std::invalid_argument("lane transform expects a law on r >= 0");

  // Output grid: input nodes, a node pair at r_y, and an extension up to the mapped maximum.
  const double rmax = g.back();
  const double smax = std::hypot(rmax, r_y);
  const double step = (g.size() > 1) ? (g.back() - g.front()) / static_cast<double>(g.size() - 1) : 1.0;
  const double eps = std::max(1e-9, 1e-7 * step);
  std::vector<double> s(g.begin(), g.end());
  auto snap = [&](double x) {
    for (double& v : s)
      if (std::abs(v - x) <= 1e-9 * std::max(1.0, x)) v = x;
  };
  snap(r_y);
  s.push_back(r_y);
  s.push_back(r_y - eps);
  s.push_back(rmax + eps);  // same-lane share ends at r_max
  for (int k = 1; rmax + k * step < smax; ++k) s.push_back(rmax + k * step);
  s.push_back(smax);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [](double a, double b) { return b - a <= 1e-12; }), s.end());
  s.erase(std::remove_if(s.begin(), s.end(), [](double x) { return x < 0; }), s.end());

  const std::size_t m = s.size();
  std::vector<double> same(m, 0.0), opp(m, 0.0);
  std::size_t iy = m;
  for (std::size_t i = 0; i < m; ++i) {
    if (s[i] <= rmax) same[i] = p_same * law.density_at(s[i]);
    if (s[i] == r_y) iy = i;
    if (s[i] > r_y) {
      const double r = std::sqrt(s[i] * s[i] - r_y * r_y);
      opp[i] = (1 - p_same) * law.density_at(std::min(r, rmax)) * s[i] / r;
    }
  }
  // Singular node at r_y: set so the opposite share carries exactly its continuous mass.
  const double target = (1 - p_same) * law.continuous_mass();
  double rest = 0;
  for (std::size_t i = iy + 2; i < m; ++i) rest += 0.5 * (opp[i] + opp[i - 1]) * (s[i] - s[i - 1]);
  const double h1 = s[iy + 1] - s[iy];
  const double h0 = iy > 0 ? s[iy] - s[iy - 1] : 0.0;
  opp[iy] = std::max(0.0, (2.0 * (target - rest) - opp[iy + 1] * h1) / (h1 + h0));

  std::vector<double> dens(m);
  for (std::size_t i = 0; i < m; ++i) dens[i] = same[i] + opp[i];
  return MixedDistribution(std::move(atoms), std::move(s), std::move(dens));
}

std::vector<SurfacePoint> short_range_probability_surface(const AnalyticParams& base, const SurfaceSweep& sweep) {
  std::vector<SurfacePoint> out;
  for (double rmax : sweep.r_max)
    for (auto [vmin, vmax] : sweep.speed_ranges)
      for (double tc : sweep.tau_c) {
        AnalyticParams p = base;
        p.scenario.d2d_max_range = rmax;
        p.scenario.content_timeout = tc;
        p.scenario.speed_min = vmin;
        p.scenario.speed_max = vmax;
        const Model model(p);
        const auto u = model.unconditional(p.numerics.weighting);
        out.push_back({rmax, tc, vmin, vmax, u.law.atom_mass_at(0.0), u.law.cdf(p.scenario.lane_offset)});
      }
  return out;
}

namespace {
// I2D distance uniform on [0, r_max^(I2D)]
double mean_i2d_energy(const AnalyticParams& p) {
  if (!p.energy.i2d) throw std::invalid_argument("missing I2D energy model");
  const double rI = p.scenario.i2d_max_range;
  const int n = std::max(1, static_cast<int>(std::ceil(rI / p.numerics.dr)));
  double e = 0;
  for (int i = 0; i <= n; ++i) e += (i == 0 || i == n ? 0.5 : 1.0) * p.energy.i2d(rI * i / n);
  return e / n;
}
}  // namespace

Energies average_energies(const AnalyticParams& params) {
  const Model model(params);
  if (model.marginal_offload_probability() <= 0) {
    const double e = mean_i2d_energy(params);
    return {e, 0.0, e, 1.0};
  }
  return average_energies(model, model.unconditional(OffloadWeighting::Offload));
}

Energies average_energies(const Model& model, const Model::Unconditional& u) {
  const auto& p = model.params();
  if (!p.energy.i2d || !p.energy.d2d) throw std::invalid_argument("missing energy model");
  Energies e{};
  e.e_i2d = mean_i2d_energy(p);
  e.e_d2d = u.lane_law.expectation(p.energy.d2d) / u.lane_law.total_mass();
  e.p_nonoff = 1.0 - u.offload_probability;
  e.e_total = e.p_nonoff * e.e_i2d + (1.0 - e.p_nonoff) * e.e_d2d;
  return e;
}

}  // namespace d2d::analytic
