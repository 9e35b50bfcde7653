#include <doctest.h>

#include "d2d/csv.hpp"
#include "d2d/stats.hpp"
#include "d2d/svg.hpp"

#include <cmath>
#include <filesystem>

using namespace d2d;

TEST_CASE("t interval") {
  auto s = stats::summarize({1, 2, 3});
  CHECK(s.mean == 2);
  CHECK(s.has_ci);
  // t_{0.975, 2} = 4.302652729911275, sd = 1
  CHECK(s.ci_high - s.mean == doctest::Approx(4.302652729911275 / std::sqrt(3.0)).epsilon(1e-9));
  auto one = stats::summarize({5});
  CHECK_FALSE(one.has_ci);
  CHECK(one.ci_low == 5);
  CHECK(stats::overlaps({0, 1, 2, 3, true}, {0, 2, 4, 3, true}));
  CHECK_FALSE(stats::overlaps({0, 1, 2, 3, true}, {0, 2.5, 4, 3, true}));
}

TEST_CASE("ks distance") {
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back((i + 0.5) / 1000);
  CHECK(stats::ks_distance(xs, [](double x) { return x; }) == doctest::Approx(0.0005));
  CHECK(stats::ks_distance({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  // Sub-distribution with half the draws elsewhere.
  std::vector<double> half(xs.begin(), xs.end());
  CHECK(stats::sub_ks_distance(half, 2000, [](double x) { return 0.5 * x; }) == doctest::Approx(0.00025));
  CHECK_THROWS(stats::ks_distance({}, [](double) { return 0.0; }));
}

TEST_CASE("histogram") {
  auto h = stats::make_histogram(0, 10, 2.5);
  REQUIRE(h.counts.size() == 4);
  for (double x : {0.0, 2.4, 2.5, 9.99, 10.0, -1.0}) h.add(x);
  CHECK(h.counts == std::vector<long>{2, 1, 0, 1});
  CHECK(h.total == 6);
  auto pdf = stats::sample_pdf(h);
  CHECK(pdf[0].r == 1.25);
  CHECK(pdf[0].mass == doctest::Approx(2.0 / 6));
  CHECK(pdf[0].density == doctest::Approx(2.0 / 6 / 2.5));
}

TEST_CASE("csv round trip") {
  csv::Table t{{"name", "value"}, {}};
  t.add_row({"plain", csv::format_number(0.1)});
  t.add_row({"with, comma", csv::format_number(1.0 / 3)});
  t.add_row({"quote \"q\"", csv::format_number(-2.5e-12)});
  auto back = csv::parse(csv::to_string(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.number(1, "value") == 1.0 / 3);
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK_THROWS(t.add_row({"short"}));

  const auto dir = std::filesystem::temp_directory_path() / "d2d_io_test";
  std::filesystem::remove_all(dir);
  const auto path = (dir / "nested" / "t.csv").string();
  csv::write_file(path, t);
  CHECK(csv::read_file(path).rows == t.rows);
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("svg output") {
  svg::Plot p{"energy", "tau_c", "J", {{"optimal", {20, 40, 60}, {1, 2, 3}, {0.5, 1.5, 2.5}, {1.5, 2.5, 3.5}}}};
  const auto s = svg::render(p);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("optimal") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
}
