#pragma once

#include "d2d/analytic.hpp"
#include "d2d/config.hpp"
#include "d2d/rng.hpp"
#include "d2d/scenario.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace d2d::phy {

enum class LinkKind { I2D, D2D };

double nominal_gain(LinkKind kind, double r, const PhyConfig& cfg);
double link_margin_db(LinkKind kind, const PhyConfig& cfg);
double subcarrier_noise_power(const PhyConfig& cfg);
/// P_c = M σ_c²/g (2^e − 1), margin in dB.
double tx_power_per_subcarrier(double gain, double margin_db, const PhyConfig& cfg);
int prbs_required(const PhyConfig& cfg);
/// Radiated energy of one content transmission: N_PRB K_sc P_c τ.
double transmission_energy(LinkKind kind, double r, const PhyConfig& cfg);
bool transmission_success(double bits, const PhyConfig& cfg);

/// Slant distance between an eNB and a vehicle on a lane.
double i2d_distance(double dx, double lane_offset, double antenna_height);
/// Energy handles for the analytic model; I2D takes the longitudinal distance.
analytic::EnergyModel energy_model(const AppConfig& cfg);

// ---- shadowing ----

/// Zero-mean Gaussian field in dB along a line, exponential autocorrelation (first-order
/// autoregressive on a fixed step), linearly interpolated between nodes.
class ShadowingField {
 public:
  ShadowingField(double length, double step, double sigma_db, double decorrelation, Rng& rng);
  double at(double x) const;

 private:
  double step_;
  std::vector<double> v_;
};

class ShadowingMap {
 public:
  ShadowingMap(const ScenarioConfig& sc, const PhyConfig& phy, std::uint64_t seed);
  double i2d_db(int enb, Lane lane, double x) const;
  /// Symmetric in its endpoints; unit-variance normalization of the two lane samples.
  double d2d_db(Lane la, double xa, Lane lb, double xb) const;

 private:
  double decorrelation_;
  std::vector<ShadowingField> i2d_;  // [enb * 2 + lane]
  std::vector<ShadowingField> d2d_;  // [lane]
};

// ---- small-scale fading ----

/// Tapped-delay Rayleigh profile with exponentially decaying tap powers; tap spacing is
/// chosen so the profile's RMS delay spread equals the configured value.
class FadingProfile {
 public:
  FadingProfile(const PhyConfig& cfg);
  int subcarriers() const { return n_sc_; }
  const std::vector<double>& tap_powers() const { return power_; }
  const std::vector<double>& tap_delays() const { return delay_; }
  /// |h_k|² for every modeled subcarrier, E|h_k|² = 1.
  std::vector<double> draw(Rng& rng) const;

 private:
  int n_sc_;
  std::vector<double> power_, delay_;
  std::vector<std::complex<double>> phasor_;  // [k * taps + l]
};

struct Endpoint {
  bool is_enb;
  int id;
};

struct ChannelRealization {
  std::vector<double> gains;  // per-subcarrier power gain g(r) S |h_k|²
  double shadowing_db = 0;
};

ChannelRealization realize_channel(Endpoint tx, Endpoint rx, long interval, double nominal, double shadowing_db,
                                   const FadingProfile& fading, std::uint64_t seed);

struct Interferer {
  double power;                        // per subcarrier, W
  const std::vector<double>* gains;    // per subcarrier, toward the victim receiver
};

/// Usage count per frequency PRB for a contiguous range of grid PRBs [start, start + count).
/// Grid PRB p occupies frequency PRB p mod prbs_per_slot.
std::vector<int> prb_usage(long start, long count, int prbs_per_slot);

/// Bits delivered: τ w_c Σ_m Σ_k min(e, log2(1 + SINR)).
double achievable_information(const std::vector<double>& gains, double power, const std::vector<Interferer>& interferers,
                              const std::vector<int>& usage, const PhyConfig& cfg);

}  // namespace d2d::phy
