#include "d2d/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace d2d {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(street_length > 0, "street_length must be > 0");
  require(lane_offset >= 0, "lane_offset must be >= 0");
  require(!enb_positions.empty(), "enb_positions must not be empty");
  for (std::size_t i = 1; i < enb_positions.size(); ++i)
    require(enb_positions[i] > enb_positions[i - 1], "enb_positions must be sorted ascending");
  require(enb_antenna_height >= 0, "enb_antenna_height must be >= 0");
  require(vehicle_arrival_rate > 0, "vehicle_arrival_rate must be > 0");
  require(speed_min > 0 && speed_min <= speed_max, "speed_range requires 0 < v_min <= v_max");
  require(request_rate > 0, "request_rate must be > 0");
  require(zipf_alpha >= 0, "zipf_alpha must be >= 0");
  require(library_size >= 1, "library_size must be >= 1");
  require(content_timeout > 0 && content_timeout < sharing_timeout,
          "timeouts require 0 < content_timeout < sharing_timeout");
  require(d2d_max_range > lane_offset, "d2d_max_range must exceed lane_offset");
  require(i2d_max_range > 0, "i2d_max_range must be > 0");
  require(control_interval > 0, "control_interval must be > 0");
}

void PhyConfig::validate() const {
  require(center_frequency > 0, "center_frequency must be > 0");
  require(subcarrier_bandwidth > 0 && subcarriers_per_prb > 0, "subcarrier layout must be positive");
  require(std::abs(subcarriers_per_prb * subcarrier_bandwidth - prb_bandwidth) <= 1e-9 * prb_bandwidth,
          "subcarriers_per_prb * subcarrier_bandwidth must equal prb_bandwidth");
  require(prb_duration > 0, "prb_duration must be > 0");
  require(system_bandwidth >= prb_bandwidth, "system_bandwidth must hold at least one PRB");
  require(spectral_efficiency > 0, "spectral_efficiency must be > 0");
  require(fec_rate > 0 && fec_rate <= 1, "fec_rate must be in (0, 1]");
  require(link_margin_i2d_db > 0 && link_margin_d2d_db > 0, "link margins must be > 0 dB");
  require(payload_bits > 0, "payload_bits must be > 0");
  require(reference_distance > 0, "reference_distance must be > 0");
  require(i2d_pathloss_exponent > 0 && i2d_far_exponent > 0 && d2d_pathloss_exponent > 0,
          "path-loss exponents must be > 0");
  require(i2d_breakpoint >= reference_distance, "i2d_breakpoint must be >= reference_distance");
  require(shadowing_sigma_db >= 0, "shadowing_sigma_db must be >= 0");
  require(shadowing_decorrelation > 0, "shadowing_decorrelation must be > 0");
  require(delay_spread >= 0, "delay_spread must be >= 0");
  require(fading_taps >= 1, "fading_taps must be >= 1");
}

double PhyConfig::reference_loss() const {
  if (reference_loss_db >= 0) return reference_loss_db;
  return 46.4 + 20.0 * std::log10(center_frequency / 5e9);
}

int PhyConfig::prbs_per_slot() const {
  return static_cast<int>(std::floor(system_bandwidth / prb_bandwidth + 1e-9));
}

int PhyConfig::slots_per_interval(double control_interval) const {
  return static_cast<int>(std::floor(control_interval / prb_duration + 1e-9));
}

void RrrmConfig::validate() const {
  require(reuse_region_size >= 1, "reuse_region_size must be >= 1");
}

void AnalyticConfig::validate() const {
  require(dr > 0 && dv > 0, "grid resolutions must be > 0");
  require(same_lane_probability >= 0 && same_lane_probability <= 1,
          "same_lane_probability must be in [0, 1]");
}

void SimConfig::validate() const {
  require(duration > 0, "duration must be > 0");
  require(warmup >= 0, "warmup must be >= 0");
  require(replications >= 1, "replications must be >= 1");
  require(threads >= 0, "threads must be >= 0");
  require(histogram_bin > 0, "histogram_bin must be > 0");
}

void AppConfig::validate() const {
  scenario.validate();
  phy.validate();
  rrrm.validate();
  analytic.validate();
  sim.validate();
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "optimal") return PolicyKind::Optimal;
  if (name == "benchmark") return PolicyKind::Benchmark;
  if (name == "cellular") return PolicyKind::Cellular;
  throw ConfigError("unknown policy '" + name + "' (expected optimal|benchmark|cellular)");
}

std::string policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::Optimal: return "optimal";
    case PolicyKind::Benchmark: return "benchmark";
    case PolicyKind::Cellular: return "cellular";
  }
  return "?";
}

namespace {

using Setter = std::function<void(AppConfig&, const json&)>;

template <class T>
Setter field(T AppConfig::*section, double T::*member) {
  return [=](AppConfig& c, const json& v) {
    if (!v.is_number()) throw ConfigError("expected a number");
    (c.*section).*member = v.get<double>();
  };
}

template <class T>
Setter field(T AppConfig::*section, int T::*member) {
  return [=](AppConfig& c, const json& v) {
    if (!v.is_number_integer()) throw ConfigError("expected an integer");
    (c.*section).*member = v.get<int>();
  };
}

template <class T>
Setter field(T AppConfig::*section, bool T::*member) {
  return [=](AppConfig& c, const json& v) {
    if (!v.is_boolean()) throw ConfigError("expected a boolean");
    (c.*section).*member = v.get<bool>();
  };
}

template <class E>
Setter choice(std::function<E&(AppConfig&)> slot, std::map<std::string, E> options) {
  return [=](AppConfig& c, const json& v) {
    if (!v.is_string()) throw ConfigError("expected a string");
    auto it = options.find(v.get<std::string>());
    if (it == options.end()) throw ConfigError("unknown option '" + v.get<std::string>() + "'");
    slot(c) = it->second;
  };
}

using Table = std::map<std::string, std::map<std::string, Setter>>;

const Table& setters() {
  static const Table table = [] {
    Table t;
    using A = AppConfig;
    using S = ScenarioConfig;
    auto& s = t["scenario"];
    s["street_length"] = field(&A::scenario, &S::street_length);
    s["lane_offset"] = field(&A::scenario, &S::lane_offset);
    s["enb_antenna_height"] = field(&A::scenario, &S::enb_antenna_height);
    s["vehicle_arrival_rate"] = field(&A::scenario, &S::vehicle_arrival_rate);
    s["request_rate"] = field(&A::scenario, &S::request_rate);
    s["zipf_alpha"] = field(&A::scenario, &S::zipf_alpha);
    s["library_size"] = field(&A::scenario, &S::library_size);
    s["content_timeout"] = field(&A::scenario, &S::content_timeout);
    s["sharing_timeout"] = field(&A::scenario, &S::sharing_timeout);
    s["d2d_max_range"] = field(&A::scenario, &S::d2d_max_range);
    s["i2d_max_range"] = field(&A::scenario, &S::i2d_max_range);
    s["control_interval"] = field(&A::scenario, &S::control_interval);
    s["enb_positions"] = [](A& c, const json& v) {
      if (!v.is_array()) throw ConfigError("expected an array of numbers");
      std::vector<double> out;
      for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("expected an array of numbers");
        out.push_back(x.get<double>());
      }
      c.scenario.enb_positions = out;
    };
    s["speed_range"] = [](A& c, const json& v) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("expected [v_min, v_max]");
      c.scenario.speed_min = v[0].get<double>();
      c.scenario.speed_max = v[1].get<double>();
    };
    s["rng_seed"] = [](A& c, const json& v) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("expected a non-negative integer");
      c.scenario.rng_seed = v.get<std::uint64_t>();
    };

    using P = PhyConfig;
    auto& p = t["phy"];
    p["center_frequency"] = field(&A::phy, &P::center_frequency);
    p["subcarrier_bandwidth"] = field(&A::phy, &P::subcarrier_bandwidth);
    p["subcarriers_per_prb"] = field(&A::phy, &P::subcarriers_per_prb);
    p["prb_bandwidth"] = field(&A::phy, &P::prb_bandwidth);
    p["prb_duration"] = field(&A::phy, &P::prb_duration);
    p["system_bandwidth"] = field(&A::phy, &P::system_bandwidth);
    p["noise_psd_dbm_hz"] = field(&A::phy, &P::noise_psd_dbm_hz);
    p["noise_figure_db"] = field(&A::phy, &P::noise_figure_db);
    p["spectral_efficiency"] = field(&A::phy, &P::spectral_efficiency);
    p["fec_rate"] = field(&A::phy, &P::fec_rate);
    p["link_margin_i2d_db"] = field(&A::phy, &P::link_margin_i2d_db);
    p["link_margin_d2d_db"] = field(&A::phy, &P::link_margin_d2d_db);
    p["payload_bits"] = field(&A::phy, &P::payload_bits);
    p["reference_distance"] = field(&A::phy, &P::reference_distance);
    p["reference_loss_db"] = field(&A::phy, &P::reference_loss_db);
    p["i2d_pathloss_exponent"] = field(&A::phy, &P::i2d_pathloss_exponent);
    p["i2d_breakpoint"] = field(&A::phy, &P::i2d_breakpoint);
    p["i2d_far_exponent"] = field(&A::phy, &P::i2d_far_exponent);
    p["d2d_pathloss_exponent"] = field(&A::phy, &P::d2d_pathloss_exponent);
    p["d2d_excess_loss_db"] = field(&A::phy, &P::d2d_excess_loss_db);
    p["shadowing_sigma_db"] = field(&A::phy, &P::shadowing_sigma_db);
    p["shadowing_decorrelation"] = field(&A::phy, &P::shadowing_decorrelation);
    p["delay_spread"] = field(&A::phy, &P::delay_spread);
    p["fading_taps"] = field(&A::phy, &P::fading_taps);

    using R = RrrmConfig;
    auto& r = t["rrrm"];
    r["inr_threshold_db"] = field(&A::rrrm, &R::inr_threshold_db);
    r["reuse_region_size"] = field(&A::rrrm, &R::reuse_region_size);
    r["pruning"] = field(&A::rrrm, &R::pruning);

    using N = AnalyticConfig;
    auto& n = t["analytic"];
    n["dr"] = field(&A::analytic, &N::dr);
    n["dv"] = field(&A::analytic, &N::dv);
    n["same_lane_probability"] = field(&A::analytic, &N::same_lane_probability);
    n["cache_model"] = choice<CacheModel>([](A& c) -> CacheModel& { return c.analytic.cache_model; },
                                          {{"sharing_window", CacheModel::SharingWindow},
                                           {"empty", CacheModel::Empty}});
    n["pcp_mean_form"] = choice<PcpMeanForm>(
        [](A& c) -> PcpMeanForm& { return c.analytic.pcp_mean_form; },
        {{"region", PcpMeanForm::Region}, {"closed_form", PcpMeanForm::ClosedForm}});
    n["weighting"] = choice<OffloadWeighting>(
        [](A& c) -> OffloadWeighting& { return c.analytic.weighting; },
        {{"offload", OffloadWeighting::Offload}, {"request", OffloadWeighting::Request}});

    using M = SimConfig;
    auto& m = t["sim"];
    m["policy"] = [](A& c, const json& v) {
      if (!v.is_string()) throw ConfigError("expected a string");
      c.sim.policy = parse_policy(v.get<std::string>());
    };
    m["duration"] = field(&A::sim, &M::duration);
    m["warmup"] = field(&A::sim, &M::warmup);
    m["replications"] = field(&A::sim, &M::replications);
    m["threads"] = field(&A::sim, &M::threads);
    m["histogram_bin"] = field(&A::sim, &M::histogram_bin);
    return t;
  }();
  return table;
}

int line_of(const std::string& text, const std::string& key, std::size_t from = 0) {
  const auto pos = text.find("\"" + key + "\"", from);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

std::size_t offset_of_line(const std::string& text, int line) {
  std::size_t off = 0;
  for (int l = 1; l < line && off != std::string::npos; ++l) {
    off = text.find('\n', off);
    if (off != std::string::npos) ++off;
  }
  return off == std::string::npos ? 0 : off;
}

}  // namespace

AppConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset → line
    std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!doc.is_object()) throw ConfigError("top-level value must be an object", 1);

  AppConfig cfg;
  const auto& table = setters();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto sec = table.find(it.key());
    if (sec == table.end()) throw ConfigError("unknown section '" + it.key() + "'", line_of(text, it.key()));
    if (!it.value().is_object())
      throw ConfigError("section '" + it.key() + "' must be an object", line_of(text, it.key()));
    const int sec_line = line_of(text, it.key());
    const std::size_t sec_off = offset_of_line(text, sec_line);
    for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
      const int line = line_of(text, kv.key(), sec_off);
      auto setter = sec->second.find(kv.key());
      if (setter == sec->second.end())
        throw ConfigError("unknown key '" + it.key() + "." + kv.key() + "'", line);
      try {
        setter->second(cfg, kv.value());
      } catch (const ConfigError& e) {
        throw ConfigError("key '" + it.key() + "." + kv.key() + "': " + e.what(), line);
      } catch (const json::exception& e) {
        throw ConfigError("key '" + it.key() + "." + kv.key() + "': " + e.what(), line);
      }
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void set_config_value(AppConfig& cfg, const std::string& key, const std::string& json_value) {
  json v;
  try {
    v = json::parse(json_value);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
  const auto& table = setters();
  const auto dot = key.find('.');
  const Setter* found = nullptr;
  if (dot != std::string::npos) {
    auto sec = table.find(key.substr(0, dot));
    if (sec != table.end()) {
      auto s = sec->second.find(key.substr(dot + 1));
      if (s != sec->second.end()) found = &s->second;
    }
  } else {
    for (const auto& [name, sec] : table) {
      auto s = sec.find(key);
      if (s == sec.end()) continue;
      if (found) throw ConfigError("ambiguous key '" + key + "'");
      found = &s->second;
    }
  }
  if (!found) throw ConfigError("unknown key '" + key + "'");
  try {
    (*found)(cfg, v);
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

std::string config_section(const std::string& key) {
  const auto& table = setters();
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    auto sec = table.find(key.substr(0, dot));
    if (sec == table.end() || !sec->second.count(key.substr(dot + 1))) throw ConfigError("unknown key '" + key + "'");
    return sec->first;
  }
  std::string found;
  for (const auto& [name, sec] : table) {
    if (!sec.count(key)) continue;
    if (!found.empty()) throw ConfigError("ambiguous key '" + key + "'");
    found = name;
  }
  if (found.empty()) throw ConfigError("unknown key '" + key + "'");
  return found;
}

}  // namespace d2d
