#include "d2d/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d::phy {

namespace {
double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
}  // namespace

double nominal_gain(LinkKind kind, double r, const PhyConfig& cfg) {
  if (r < 0 || std::isnan(r)) throw std::invalid_argument("distance must be >= 0");
  const double r0 = cfg.reference_distance;
  const double d = std::max(r, r0);
  double pl = cfg.reference_loss();
  if (kind == LinkKind::I2D) {
    const double bp = cfg.i2d_breakpoint;
    if (d <= bp) {
      pl += 10 * cfg.i2d_pathloss_exponent * std::log10(d / r0);
    } else {
      pl += 10 * cfg.i2d_pathloss_exponent * std::log10(bp / r0) + 10 * cfg.i2d_far_exponent * std::log10(d / bp);
    }
  } else {
    pl += cfg.d2d_excess_loss_db + 10 * cfg.d2d_pathloss_exponent * std::log10(d / r0);
  }
  return db_to_lin(-pl);
}

double link_margin_db(LinkKind kind, const PhyConfig& cfg) {
  return kind == LinkKind::I2D ? cfg.link_margin_i2d_db : cfg.link_margin_d2d_db;
}

double subcarrier_noise_power(const PhyConfig& cfg) {
  return db_to_lin(cfg.noise_psd_dbm_hz + cfg.noise_figure_db - 30.0) * cfg.subcarrier_bandwidth;
}

double tx_power_per_subcarrier(double gain, double margin_db, const PhyConfig& cfg) {
  if (!(gain > 0)) throw std::invalid_argument("gain must be > 0");
  return db_to_lin(margin_db) * subcarrier_noise_power(cfg) / gain * (std::exp2(cfg.spectral_efficiency) - 1.0);
}

int prbs_required(const PhyConfig& cfg) {
  const double bits_per_prb = cfg.spectral_efficiency * cfg.prb_duration * cfg.prb_bandwidth;
  return static_cast<int>(std::ceil(cfg.payload_bits / cfg.fec_rate / bits_per_prb - 1e-9));
}

double transmission_energy(LinkKind kind, double r, const PhyConfig& cfg) {
  const double pc = tx_power_per_subcarrier(nominal_gain(kind, r, cfg), link_margin_db(kind, cfg), cfg);
  return prbs_required(cfg) * cfg.subcarriers_per_prb * pc * cfg.prb_duration;
}

bool transmission_success(double bits, const PhyConfig& cfg) { return bits >= cfg.payload_bits; }

double i2d_distance(double dx, double lane_offset, double antenna_height) {
  return std::sqrt(dx * dx + 0.25 * lane_offset * lane_offset + antenna_height * antenna_height);
}

analytic::EnergyModel energy_model(const AppConfig& cfg) {
  const PhyConfig phy = cfg.phy;
  const double ry = cfg.scenario.lane_offset, h = cfg.scenario.enb_antenna_height;
  analytic::EnergyModel m;
  m.i2d = [phy, ry, h](double r) { return transmission_energy(LinkKind::I2D, i2d_distance(r, ry, h), phy); };
  m.d2d = [phy](double r) { return transmission_energy(LinkKind::D2D, r, phy); };
  return m;
}

std::vector<int> prb_usage(long start, long count, int prbs_per_slot) {
  if (prbs_per_slot <= 0) throw std::invalid_argument("prbs_per_slot must be > 0");
  std::vector<int> u(static_cast<std::size_t>(prbs_per_slot), 0);
  if (count <= 0) return u;
  const long full = count / prbs_per_slot;
  for (auto& x : u) x = static_cast<int>(full);
  const long rem = count % prbs_per_slot;
  for (long i = 0; i < rem; ++i) ++u[static_cast<std::size_t>((start + full * prbs_per_slot + i) % prbs_per_slot)];
  return u;
}

double achievable_information(const std::vector<double>& gains, double power, const std::vector<Interferer>& interferers,
                              const std::vector<int>& usage, const PhyConfig& cfg) {
  const int K = cfg.subcarriers_per_prb;
  if (gains.size() < usage.size() * static_cast<std::size_t>(K))
    throw std::invalid_argument("gain vector shorter than the PRB usage map");
  const double noise = subcarrier_noise_power(cfg);
  const double e = cfg.spectral_efficiency;
  double sum = 0;
  for (std::size_t m = 0; m < usage.size(); ++m) {
    if (usage[m] == 0) continue;
    double prb = 0;
    for (int k = 0; k < K; ++k) {
      const std::size_t i = m * static_cast<std::size_t>(K) + static_cast<std::size_t>(k);
      double interference = 0;
      for (const auto& it : interferers) interference += it.power * (*it.gains)[i];
      const double sinr = power * gains[i] / (noise + interference);
      prb += std::min(e, std::log2(1.0 + sinr));
    }
    sum += usage[m] * prb;
  }
  return cfg.prb_duration * cfg.subcarrier_bandwidth * sum;
}

}  // namespace d2d::phy
