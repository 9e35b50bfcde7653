#include "d2d/analytic.hpp"
#include "d2d/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d::analytic {

AnalyticParams AnalyticParams::from(const AppConfig& cfg) {
  AnalyticParams p;
  p.scenario = cfg.scenario;
  p.numerics = cfg.analytic;
  return p;
}

namespace {

struct Node {
  double va;
  double weight;
};

/// Trapezoid nodes for p⁺(va) = 2 p_V*(va) on va > 0, exact for constant pieces.
std::vector<Node> speed_nodes(const SpeedLaw& law, double dv) {
  std::vector<Node> nodes;
  for (const auto& b : law.bins()) {
    const int n = std::max(1, static_cast<int>(std::ceil((b.hi - b.lo) / dv - 1e-9)));
    const double h = (b.hi - b.lo) / n;
    const double dens = b.mass / (b.hi - b.lo);
    for (int i = 0; i <= n; ++i)
      nodes.push_back({b.lo + h * i, dens * h * ((i == 0 || i == n) ? 0.5 : 1.0)});
  }
  return nodes;
}

}  // namespace

Model::Model(AnalyticParams params)
    : p_(std::move(params)), law_(SpeedLaw::uniform(p_.scenario.speed_min, p_.scenario.speed_max)) {
  const auto& s = p_.scenario;
  if (!(p_.numerics.dr > 0) || !(p_.numerics.dv > 0)) throw std::invalid_argument("grid resolutions must be > 0");
  if (s.content_timeout < 0 || s.content_timeout >= s.sharing_timeout)
    throw std::invalid_argument("requires 0 <= tau_c < tau_s");
  rho_ = node_density(s.vehicle_arrival_rate, law_);
  pz_ = TruncatedZipf(s.zipf_alpha, s.library_size).pmf();
  q_ = non_repeated_pmf(pz_, not_cached_probability(pz_, s.request_rate, s.sharing_timeout, p_.numerics.cache_model));
  rho_z_.resize(pz_.size());
  for (std::size_t i = 0; i < pz_.size(); ++i)
    rho_z_[i] = content_density(rho_, pz_[i], s.request_rate, s.sharing_timeout, s.content_timeout);
}

double Model::halfwidth(double va) const {
  const auto& s = p_.scenario;
  return s.d2d_max_range + (s.speed_max - va) * s.content_timeout;
}

double Model::mean_count(int z, double va) const {
  const auto& s = p_.scenario;
  if (p_.numerics.pcp_mean_form == PcpMeanForm::ClosedForm)
    return rho_z(z) * (2 * s.d2d_max_range + (s.speed_max + s.speed_min - 2 * va) * s.content_timeout);
  return rho_z(z) * 2 * halfwidth(va);
}

double Model::offload_probability(int z, double va) const { return -std::expm1(-mean_count(z, va)); }

double Model::marginal_offload_probability() const {
  double p = 0;
  for (const auto& nd : speed_nodes(law_, p_.numerics.dv)) {
    double s = 0;
    for (int z = 1; z <= static_cast<int>(q_.size()); ++z) s += q_[static_cast<std::size_t>(z - 1)] * offload_probability(z, nd.va);
    p += nd.weight * s;
  }
  return p;
}

Model::Conditional Model::conditional(double va) const {
  const auto& s = p_.scenario;
  const double X = halfwidth(va);
  const double rmax = s.d2d_max_range;
  const RelativeSpeed rel(law_, va);
  const ClosingLaw ahead(rel, true, s.content_timeout, s.sharing_timeout);
  const ClosingLaw behind(rel, false, s.content_timeout, s.sharing_timeout);
  const int n = std::max(1, static_cast<int>(std::ceil(rmax / p_.numerics.dr - 1e-9)));
  Conditional c;
  c.r.resize(static_cast<std::size_t>(n) + 1);
  c.F.resize(c.r.size());
  c.p.resize(c.r.size());
  for (int i = 0; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double r = (i == n) ? rmax : rmax * i / n;
    const double D = X - r;
    c.r[k] = r;
    c.F[k] = std::min(1.0, (2 * r + ahead.K(D) + behind.K(D)) / (2 * X));
    c.p[k] = std::max(0.0, (2 - ahead.H(D) - behind.H(D)) / (2 * X));
  }
  return c;
}

namespace {

/// Adds Σ_n w_n · law_n into (atom, dens), law_n the min over n PCPs truncated to [0, r_max].
void accumulate_mixture(const Model::Conditional& c, const std::vector<double>& w, double scale, double& atom,
                        std::vector<double>& dens) {
  const std::size_t K = c.r.size();
  const double FK = c.F.back();
  const double log_sK = std::log1p(-std::min(FK, 1.0 - 1e-300));
  const double log_s0 = std::log1p(-std::min(c.F.front(), 1.0 - 1e-300));
  std::vector<double> s(K), pw(K, 1.0), acc(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) s[k] = 1.0 - c.F[k];
  double a = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double wn = w[i];
    if (wn != 0) {
      const double fmin = -std::expm1(n * log_sK);
      const double coef = wn / fmin;
      a += coef * -std::expm1(n * log_s0);
      const double cn = coef * n;
      for (std::size_t k = 0; k < K; ++k) acc[k] += cn * pw[k];
    }
    for (std::size_t k = 0; k < K; ++k) pw[k] *= s[k];
  }
  atom += scale * a;
  for (std::size_t k = 0; k < K; ++k) dens[k] += scale * acc[k] * c.p[k];
}

}  // namespace

MixedDistribution Model::mixture_law(const Conditional& c, const std::vector<double>& weights) const {
  double atom = 0;
  std::vector<double> dens(c.r.size(), 0.0);
  accumulate_mixture(c, weights, 1.0, atom, dens);
  return MixedDistribution({{0.0, atom}}, c.r, std::move(dens));
}

MixedDistribution Model::effective_distance_law(int z, double va) const {
  const double nbar = mean_count(z, va);
  if (!(nbar > 0)) throw std::invalid_argument("offload probability is zero: conditional law undefined");
  const int nmax = poisson_truncation(nbar);
  std::vector<double> w(static_cast<std::size_t>(nmax));
  const double norm = -std::expm1(-nbar);
  for (int n = 1; n <= nmax; ++n)
    w[static_cast<std::size_t>(n - 1)] = std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0)) / norm;
  return mixture_law(conditional(va), w);
}

std::vector<double> Model::poisson_weights(double va, OffloadWeighting weighting, double& total) const {
  std::vector<double> c;
  total = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const double nbar = mean_count(static_cast<int>(i + 1), va);
    if (!(nbar > 0) || q_[i] == 0) continue;
    const double off = -std::expm1(-nbar);
    const double factor = weighting == OffloadWeighting::Offload ? q_[i] : q_[i] / off;
    total += weighting == OffloadWeighting::Offload ? q_[i] * off : q_[i];
    const int nmax = poisson_truncation(nbar);
    if (c.size() < static_cast<std::size_t>(nmax)) c.resize(static_cast<std::size_t>(nmax), 0.0);
    const bool direct = nbar > 600;  // e^{-N̄} would underflow
    double t = direct ? 0.0 : std::exp(-nbar);
    const double log_nbar = std::log(nbar);
    for (int n = 1; n <= nmax; ++n) {
      t = direct ? std::exp(-nbar + n * log_nbar - std::lgamma(n + 1.0)) : t * nbar / n;
      c[static_cast<std::size_t>(n - 1)] += factor * t;
      if (n > nbar && t < 1e-18) break;
    }
  }
  return c;
}

Model::Unconditional Model::unconditional(OffloadWeighting weighting) const {
  double atom = 0, norm = 0;
  std::vector<double> dens;
  std::vector<double> r;
  for (const auto& nd : speed_nodes(law_, p_.numerics.dv)) {
    double total = 0;
    const auto w = poisson_weights(nd.va, weighting, total);
    if (total <= 0) continue;
    const auto c = conditional(nd.va);
    if (dens.empty()) {
      dens.assign(c.r.size(), 0.0);
      r = c.r;
    }
    accumulate_mixture(c, w, nd.weight, atom, dens);
    norm += nd.weight * total;
  }
  if (!(norm > 0)) throw std::invalid_argument("offload probability is zero: conditional law undefined");
  atom /= norm;
  for (double& x : dens) x /= norm;
  Unconditional u{MixedDistribution({{0.0, atom}}, r, std::move(dens)), {}, 0.0};
  u.offload_probability =
      weighting == OffloadWeighting::Offload ? norm : marginal_offload_probability();
  u.lane_law = lane_offset_transform(u.law, p_.scenario.lane_offset, p_.numerics.same_lane_probability);
  return u;
}

MixedDistribution Model::unconditional_effective_distance_law() const {
  return unconditional(p_.numerics.weighting).law;
}

}  // namespace d2d::analytic
