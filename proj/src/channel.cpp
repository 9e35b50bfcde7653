#include "d2d/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2d::phy {

ShadowingField::ShadowingField(double length, double step, double sigma_db, double decorrelation, Rng& rng)
    : step_(step) {
  if (!(step > 0) || !(decorrelation > 0) || length < 0) throw std::invalid_argument("bad shadowing field");
  const auto n = static_cast<std::size_t>(std::ceil(length / step)) + 1;
  const double a = std::exp(-step / decorrelation);
  const double b = std::sqrt(1 - a * a);
  std::normal_distribution<double> N(0.0, 1.0);
  v_.resize(n);
  v_[0] = sigma_db * N(rng);
  for (std::size_t i = 1; i < n; ++i) v_[i] = a * v_[i - 1] + b * sigma_db * N(rng);
}

double ShadowingField::at(double x) const {
  const double u = std::clamp(x / step_, 0.0, static_cast<double>(v_.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(u), v_.size() - 1);
  if (i + 1 >= v_.size()) return v_.back();
  const double w = u - static_cast<double>(i);
  return v_[i] + w * (v_[i + 1] - v_[i]);
}

ShadowingMap::ShadowingMap(const ScenarioConfig& sc, const PhyConfig& phy, std::uint64_t seed)
    : decorrelation_(phy.shadowing_decorrelation) {
  Rng rng = make_rng({seed, 0x5ad0ULL});
  const double step = 1.0;
  for (std::size_t e = 0; e < sc.enb_positions.size(); ++e)
    for (int lane = 0; lane < 2; ++lane)
      i2d_.emplace_back(sc.street_length, step, phy.shadowing_sigma_db, phy.shadowing_decorrelation, rng);
  for (int lane = 0; lane < 2; ++lane)
    d2d_.emplace_back(sc.street_length, step, phy.shadowing_sigma_db, phy.shadowing_decorrelation, rng);
}

double ShadowingMap::i2d_db(int enb, Lane lane, double x) const {
  return i2d_.at(static_cast<std::size_t>(enb) * 2 + (lane == Lane::Forward ? 0 : 1)).at(x);
}

double ShadowingMap::d2d_db(Lane la, double xa, Lane lb, double xb) const {
  const double rho = la == lb ? std::exp(-std::abs(xa - xb) / decorrelation_) : 0.0;
  const auto& fa = d2d_[la == Lane::Forward ? 0 : 1];
  const auto& fb = d2d_[lb == Lane::Forward ? 0 : 1];
  return (fa.at(xa) + fb.at(xb)) / std::sqrt(2.0 * (1.0 + rho));
}

FadingProfile::FadingProfile(const PhyConfig& cfg) {
  n_sc_ = cfg.prbs_per_slot() * cfg.subcarriers_per_prb;
  const int L = cfg.fading_taps;
  double total = 0;
  for (int l = 0; l < L; ++l) {
    power_.push_back(std::exp(-static_cast<double>(l)));
    total += power_.back();
  }
  double m1 = 0, m2 = 0;
  for (int l = 0; l < L; ++l) {
    power_[static_cast<std::size_t>(l)] /= total;
    m1 += power_[static_cast<std::size_t>(l)] * l;
    m2 += power_[static_cast<std::size_t>(l)] * l * l;
  }
  const double rms_index = std::sqrt(std::max(0.0, m2 - m1 * m1));
  const double spacing = rms_index > 0 ? cfg.delay_spread / rms_index : 0.0;
  for (int l = 0; l < L; ++l) delay_.push_back(spacing * l);
  phasor_.resize(static_cast<std::size_t>(n_sc_) * static_cast<std::size_t>(L));
  for (int k = 0; k < n_sc_; ++k)
    for (int l = 0; l < L; ++l) {
      const double phase = -2.0 * std::numbers::pi * k * cfg.subcarrier_bandwidth * delay_[static_cast<std::size_t>(l)];
      phasor_[static_cast<std::size_t>(k * L + l)] = std::polar(1.0, phase);
    }
}

std::vector<double> FadingProfile::draw(Rng& rng) const {
  std::normal_distribution<double> N(0.0, 1.0);
  const std::size_t L = power_.size();
  std::vector<std::complex<double>> h(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double s = std::sqrt(power_[l] / 2.0);
    const double re = N(rng);
    const double im = N(rng);
    h[l] = {s * re, s * im};
  }
  std::vector<double> g(static_cast<std::size_t>(n_sc_));
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::complex<double> H = 0;
    for (std::size_t l = 0; l < L; ++l) H += h[l] * phasor_[k * L + l];
    g[k] = std::norm(H);
  }
  return g;
}

ChannelRealization realize_channel(Endpoint tx, Endpoint rx, long interval, double nominal, double shadowing_db,
                                   const FadingProfile& fading, std::uint64_t seed) {
  Rng rng = make_rng({seed, tx.is_enb ? 1ULL : 2ULL, static_cast<std::uint64_t>(tx.id),
                      static_cast<std::uint64_t>(rx.id), static_cast<std::uint64_t>(interval)});
  ChannelRealization c;
  c.shadowing_db = shadowing_db;
  c.gains = fading.draw(rng);
  const double scale = nominal * std::pow(10.0, shadowing_db / 10.0);
  for (double& g : c.gains) g *= scale;
  return c;
}

}  // namespace d2d::phy
