#pragma once

#include "d2d/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace d2d::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kConfigError = 2, kValidationFailed = 3 };

struct GlobalOptions {
  std::string config_path;  // empty: built-in defaults
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<double> duration;
  std::optional<int> replications;
  std::optional<int> threads;
  std::string dump_channel;
  std::string dump_alloc;
};

/// Defaults or file, then command-line overrides.
AppConfig resolve_config(const GlobalOptions& g);

struct SweepSpec {
  std::string name = "sweep";
  std::string parameter;
  std::vector<std::string> values;  // JSON-encoded
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<PolicyKind> policies{PolicyKind::Cellular, PolicyKind::Benchmark, PolicyKind::Optimal};
  std::vector<std::string> metrics{"offloading_efficiency", "energy_per_delivery", "d2d_energy_per_offload",
                                   "spectrum_occupancy"};
};
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);
/// Point seed derived from the base seed and the value text, independent of list position.
std::uint64_t sweep_point_seed(std::uint64_t base, const std::string& value);

int cmd_simulate(const GlobalOptions& g, std::ostream& out);
int cmd_sweep(const GlobalOptions& g, const std::string& spec_path, std::ostream& out);
int cmd_analytic(const GlobalOptions& g, std::ostream& out);
int cmd_validate(const GlobalOptions& g, long n_samples, double ks_threshold, std::ostream& out);

/// Full command-line entry point; never throws.
int main(int argc, char** argv);

}  // namespace d2d::cli
