#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2d {

/// Raised for invalid or unparsable configuration. `line()` is 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct ScenarioConfig {
  double street_length = 3000.0;
  double lane_offset = 10.0;
  std::vector<double> enb_positions{0.0, 600.0, 1200.0, 1800.0, 2400.0, 3000.0};
  double enb_antenna_height = 10.0;
  double vehicle_arrival_rate = 1.0 / 3.0;
  double speed_min = 9.0;
  double speed_max = 24.0;
  double request_rate = 0.1;
  double zipf_alpha = 1.1;
  int library_size = 10000;
  double content_timeout = 20.0;
  double sharing_timeout = 600.0;
  double d2d_max_range = 100.0;
  double i2d_max_range = 300.0;
  double control_interval = 1.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct PhyConfig {
  double center_frequency = 2.3e9;
  double subcarrier_bandwidth = 15e3;
  int subcarriers_per_prb = 12;
  double prb_bandwidth = 180e3;
  double prb_duration = 5e-4;
  double system_bandwidth = 10.8e6;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 10.0;
  double spectral_efficiency = 6.0;
  double fec_rate = 0.8;
  double link_margin_i2d_db = 10.0;
  double link_margin_d2d_db = 13.0;
  double payload_bits = 432e3 * 8.0;

  // Nominal gain model. A negative reference loss selects 46.4 + 20 log10(f0 / 5 GHz).
  double reference_distance = 1.0;
  double reference_loss_db = -1.0;
  double i2d_pathloss_exponent = 2.2;
  double i2d_breakpoint = 100.0;
  double i2d_far_exponent = 4.0;
  double d2d_pathloss_exponent = 2.27;
  double d2d_excess_loss_db = 5.0;

  double shadowing_sigma_db = 4.0;
  double shadowing_decorrelation = 25.0;
  double delay_spread = 100e-9;
  int fading_taps = 6;

  void validate() const;
  double reference_loss() const;
  int prbs_per_slot() const;
  int slots_per_interval(double control_interval) const;
};

struct RrrmConfig {
  double inr_threshold_db = -6.0;
  int reuse_region_size = 3;
  bool pruning = true;

  void validate() const;
};

enum class CacheModel { SharingWindow, Empty };
enum class PcpMeanForm { Region, ClosedForm };
enum class OffloadWeighting { Offload, Request };

struct AnalyticConfig {
  double dr = 0.1;
  double dv = 0.01;
  double same_lane_probability = 0.5;
  CacheModel cache_model = CacheModel::SharingWindow;
  PcpMeanForm pcp_mean_form = PcpMeanForm::Region;
  OffloadWeighting weighting = OffloadWeighting::Offload;

  void validate() const;
};

enum class PolicyKind { Optimal, Benchmark, Cellular };

struct SimConfig {
  PolicyKind policy = PolicyKind::Optimal;
  double duration = 600.0;
  double warmup = 600.0;
  int replications = 3;
  int threads = 0;  // 0: hardware concurrency
  double histogram_bin = 1.0;

  void validate() const;
};

struct AppConfig {
  ScenarioConfig scenario;
  PhyConfig phy;
  RrrmConfig rrrm;
  AnalyticConfig analytic;
  SimConfig sim;

  void validate() const;
};

PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind p);

/// Parses a JSON document with optional sections scenario/phy/rrrm/analytic/sim.
/// Unknown keys and type mismatches raise ConfigError carrying the source line.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::string& path);

/// Sets a single key (bare or "section.key") from a JSON-encoded value.
void set_config_value(AppConfig& cfg, const std::string& key, const std::string& json_value);
/// Section owning a bare or qualified key; throws ConfigError when unknown or ambiguous.
std::string config_section(const std::string& key);

}  // namespace d2d
