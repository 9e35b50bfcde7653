#include <doctest.h>

#include "d2d/cli.hpp"
#include "d2d/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace d2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("d2d_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  std::ofstream(p / "quick.json") << R"({"sim": {"warmup": 120}})";
  return p;
}

int run(std::vector<std::string> args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("sweep spec parsing") {
  auto s = cli::parse_sweep_spec(R"({"name": "tc", "parameter": "content_timeout", "values": [20, 60],
                                     "policies": ["optimal"], "overrides": {"speed_min": 6}})");
  CHECK(s.values == std::vector<std::string>{"20", "60"});
  CHECK(s.policies == std::vector<PolicyKind>{PolicyKind::Optimal});
  REQUIRE(s.overrides.size() == 1);
  CHECK(s.overrides[0].first == "speed_min");
  CHECK_THROWS_AS(cli::parse_sweep_spec(R"({"parameter": "content_timeout", "values": []})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_sweep_spec(R"({"parameter": "inr_threshold_db", "values": [1]})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_sweep_spec(R"({"parameter": "content_timeout", "values": [1], "colour": 1})"),
                  ConfigError);
}

TEST_CASE("sweep point seeds ignore list position and formatting") {
  CHECK(cli::sweep_point_seed(1, "20") == cli::sweep_point_seed(1, " 20"));
  CHECK(cli::sweep_point_seed(1, "20") != cli::sweep_point_seed(1, "60"));
  CHECK(cli::sweep_point_seed(1, "20") != cli::sweep_point_seed(2, "20"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run({"d2dsim", "--config", (dir / "missing.json").string(), "simulate"}) == cli::kConfigError);
  CHECK(run({"d2dsim", "--out", dir.string(), "validate", "--samples", "0"}) == cli::kConfigError);
  {
    std::ofstream(dir / "bad.json") << "{\n \"scenario\": {\"bogus\": 1}\n}\n";
  }
  CHECK(run({"d2dsim", "--config", (dir / "bad.json").string(), "simulate"}) == cli::kConfigError);
  CHECK(run({"d2dsim"}) == cli::kConfigError);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes its tables") {
  const auto dir = scratch("sim");
  const auto alloc = (dir / "alloc.csv").string();
  REQUIRE(run({"d2dsim", "--out", dir.string(), "--duration", "60", "--replications", "2", "--seed", "4",
               "--dump-alloc", alloc, "--config", (dir / "quick.json").string(), "simulate"}) == cli::kOk);
  auto m = csv::read_file((dir / "metrics.csv").string());
  CHECK(m.header == std::vector<std::string>{"metric", "value", "ci_low", "ci_high", "n"});
  CHECK(m.rows.size() >= 5);
  CHECK(csv::read_file((dir / "runs.csv").string()).rows.size() == 2);
  CHECK(fs::exists(dir / "histogram.csv"));
  CHECK(csv::read_file(alloc).rows.size() > 0);
  fs::remove_all(dir);
}

TEST_CASE("sweep output does not depend on value order") {
  const auto dir = scratch("sweep");
  auto write_spec = [&](const std::string& file, const std::string& values) {
    std::ofstream(dir / file) << R"({"name": "s", "parameter": "content_timeout", "values": )" << values
                              << R"(, "policies": ["cellular", "benchmark"], "metrics": ["energy_per_delivery"]})";
  };
  write_spec("a.json", "[20, 40]");
  write_spec("b.json", "[40, 20]");
  REQUIRE(run({"d2dsim", "--out", (dir / "a").string(), "--duration", "60", "--replications", "2", "--config",
               (dir / "quick.json").string(), "sweep", (dir / "a.json").string()}) == cli::kOk);
  REQUIRE(run({"d2dsim", "--out", (dir / "b").string(), "--duration", "60", "--replications", "2", "--config",
               (dir / "quick.json").string(), "sweep", (dir / "b.json").string()}) == cli::kOk);
  for (const char* f : {"s_energy_per_delivery_benchmark.csv", "s_energy_per_delivery_reduction_benchmark_vs_cellular.csv"}) {
    auto a = csv::read_file((dir / "a" / f).string());
    auto b = csv::read_file((dir / "b" / f).string());
    CHECK(a.rows == b.rows);
    CHECK(a.rows.size() == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("analytic command") {
  const auto dir = scratch("analytic");
  std::ostringstream out;
  cli::GlobalOptions g;
  g.out_dir = dir.string();
  REQUIRE(cli::cmd_analytic(g, out) == cli::kOk);
  auto atoms = csv::read_file((dir / "distance_atoms.csv").string());
  CHECK(atoms.rows.size() == 2);
  auto law = csv::read_file((dir / "distance_law.csv").string());
  CHECK(law.number(law.rows.size() - 1, "cdf") == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(fs::exists(dir / "surface.csv"));
  fs::remove_all(dir);
}
