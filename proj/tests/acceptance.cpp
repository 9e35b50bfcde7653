// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 once every criterion has
// been evaluated; pass --strict to make any FAIL fatal.

#include "d2d/analytic.hpp"
#include "d2d/engine.hpp"
#include "d2d/phy.hpp"
#include "d2d/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <random>
#include <string>
#include <vector>

using namespace d2d;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
double worst_norm = 0;  // max |total mass - 1| over every law built here

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void note_mass(const MixedDistribution& m) { worst_norm = std::max(worst_norm, std::abs(m.total_mass() - 1.0)); }

// ---- criteria 1 and 2 ----

struct Tuple {
  double x0, va, tau_c, vmin, vmax;
};

std::vector<Tuple> random_tuples(int n, std::uint64_t seed) {
  const std::pair<double, double> ranges[] = {{6, 16}, {9, 24}, {12, 32}};
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Tuple> out;
  for (int i = 0; i < n; ++i) {
    auto [lo, hi] = ranges[g() % 3];
    Tuple t;
    t.vmin = lo;
    t.vmax = hi;
    t.tau_c = 10 + 110 * U(g);
    t.va = lo + (hi - lo) * U(g);
    const double reach = 100 + (hi + t.va) * t.tau_c;
    t.x0 = (2 * U(g) - 1) * reach;
    out.push_back(t);
  }
  return out;
}

// Draws the distance reached by one PCP: uniform magnitude with a random direction, time limit
// min(τc, U τs), closest point of the straight relative path over [0, Φ].
struct Draws {
  std::vector<double> cont;
  long zero = 0, start = 0;
};

Draws oracle(const Tuple& t, double tau_s, long n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0, 1);
  Draws d;
  const double a = std::abs(t.x0);
  for (long i = 0; i < n; ++i) {
    const double s = t.vmin + (t.vmax - t.vmin) * U(g);
    const double v = (U(g) < 0.5 ? s : -s) - t.va;
    const double phi = std::min(t.tau_c, tau_s * U(g));
    const double end = t.x0 + v * phi;
    double r;
    if ((t.x0 > 0 && end <= 0) || (t.x0 < 0 && end >= 0))
      r = 0;
    else
      r = std::min(a, std::abs(end));
    if (r <= 1e-9)
      ++d.zero;
    else if (r >= a - 1e-9)
      ++d.start;
    else
      d.cont.push_back(r);
  }
  return d;
}

void criteria_1_and_2() {
  const double tau_s = 600, dr = 0.1;
  const long n = 1000000;
  const auto tuples = random_tuples(20, 20240611);
  std::mt19937_64 g(77);
  const auto t0 = Clock::now();
  double worst_ks = 0, worst_atom = 0, worst_route = 0;
  for (const auto& t : tuples) {
    const auto law = SpeedLaw::uniform(t.vmin, t.vmax);
    const auto an = analytic::single_pcp_distance_law(t.x0, t.va, law, t.tau_c, tau_s, dr);
    note_mass(an);
    const auto d = oracle(t, tau_s, n, g);
    const double N = static_cast<double>(n);
    const double ks = d.cont.empty() ? an.continuous_mass()
                                     : stats::sub_ks_distance(d.cont, N, [&](double r) { return an.continuous_cdf(r); });
    worst_ks = std::max(worst_ks, ks);
    worst_atom = std::max({worst_atom, std::abs(d.zero / N - an.atom_mass_at(0.0)),
                           std::abs(d.start / N - an.atom_mass_at(std::abs(t.x0), 1e-6))});

    const auto alt = analytic::single_pcp_distance_law_from_displacement(t.x0, t.va, law, t.tau_c, tau_s, dr);
    note_mass(alt);
    double diff = 0;
    if (alt.grid() != an.grid()) diff = 1;
    for (std::size_t i = 0; i < an.density().size() && i < alt.density().size(); ++i)
      diff = std::max(diff, std::abs(an.density()[i] - alt.density()[i]));
    for (double r : an.grid()) diff = std::max(diff, std::abs(an.cdf(r) - alt.cdf(r)));
    diff = std::max(diff, std::abs(an.atom_mass_at(0.0) - alt.atom_mass_at(0.0)));
    diff = std::max(diff, std::abs(an.atom_mass_at(std::abs(t.x0), 1e-6) - alt.atom_mass_at(std::abs(t.x0), 1e-6)));
    worst_route = std::max(worst_route, diff);
  }
  const double secs = seconds_since(t0);
  report(1, worst_ks < 0.01 && worst_atom <= 0.005 && secs < 300,
         fmt("20 tuples x 1e6 draws: max KS(continuous) %.5f (< 0.01), max atom error %.5f (<= 0.005), %.1f s (< 300)",
             worst_ks, worst_atom, secs));
  report(2, worst_route <= 1e-8, fmt("displacement vs direct tabulation: max difference %.3g (<= 1e-8)", worst_route));
}

// ---- criterion 3 ----

void criterion_3() {
  double nd = 0, tl = 0;
  for (auto [lo, hi] : {std::pair{9.0, 24.0}, {6.0, 16.0}, {12.0, 32.0}}) {
    const double closed = (1.0 / 3.0) * std::log(hi / lo) / (hi - lo);
    nd = std::max(nd, std::abs(analytic::node_density(1.0 / 3.0, SpeedLaw::uniform(lo, hi)) - closed));
  }
  for (double tc : {20.0, 40.0, 60.0, 90.0, 120.0}) {
    tl = std::max(tl, std::abs(analytic::time_limit_mean(tc, 600) - (tc - tc * tc / 1200.0)));
    note_mass(analytic::time_limit_law(tc, 600));
  }
  PhyConfig phy;
  const int prbs = phy::prbs_required(phy);
  const double noise = phy::subcarrier_noise_power(phy);
  double pc = 0;
  for (double g : {1e-6, 1e-8, 1e-10, 1e-12})
    for (double m : {10.0, 13.0}) {
      const double lhs = phy::tx_power_per_subcarrier(g, m, phy) * g / noise;
      const double rhs = std::pow(10.0, m / 10) * (std::exp2(phy.spectral_efficiency) - 1);
      pc = std::max(pc, std::abs(lhs / rhs - 1));
    }
  report(3, nd <= 1e-9 && tl <= 1e-9 && prbs == 8000 && pc <= 1e-12,
         fmt("node density err %.2g, time-limit mean err %.2g, PRBs %d, power-control rel err %.2g", nd, tl, prbs, pc));
}

// ---- simulation criteria ----

AppConfig base_config() {
  AppConfig cfg;
  cfg.sim.replications = 3;
  cfg.sim.threads = 0;
  return cfg;
}

long unresolved_total = 0, multiple_total = 0;

sim::Replication replicate(const AppConfig& cfg, PolicyKind p) {
  auto r = sim::replicate(cfg, p, cfg.sim.replications, cfg.scenario.rng_seed, cfg.sim.threads);
  for (const auto& m : r.runs) {
    unresolved_total += m.unresolved;
    multiple_total += m.multiply_resolved;
  }
  return r;
}

stats::Summary metric(const sim::Replication& r, double (sim::Metrics::*f)() const) {
  std::vector<double> xs;
  for (const auto& m : r.runs) xs.push_back((m.*f)());
  return stats::summarize(xs);
}

void criterion_4() {
  auto cfg = base_config();
  cfg.scenario.content_timeout = 20;
  cfg.scenario.d2d_max_range = 180;
  cfg.scenario.speed_min = 6;
  cfg.scenario.speed_max = 16;
  cfg.sim.duration = 600;
  const auto rep = replicate(cfg, PolicyKind::Optimal);
  const auto d = rep.pooled_distances();

  auto params = analytic::AnalyticParams::from(cfg);
  const analytic::Model model(params);
  const auto u = model.unconditional(cfg.analytic.weighting);
  note_mass(u.law);
  note_mass(u.lane_law);

  const double cut = 20;
  std::vector<double> tail;
  for (double x : d)
    if (x > cut) tail.push_back(x);
  const double fc = u.lane_law.cdf(cut);
  const double ks = tail.empty() ? 1.0
                                 : stats::ks_distance(tail, [&](double r) { return (u.lane_law.cdf(r) - fc) / (1 - fc); });
  const double short_mass = d.empty() ? 0.0 : 1.0 - static_cast<double>(tail.size()) / static_cast<double>(d.size());
  const double atoms = u.lane_law.atom_mass();
  report(4, ks < 0.05 && std::abs(short_mass - atoms) <= 0.1,
         fmt("%zu D2D deliveries: tail KS %.4f (< 0.05), mass at r<=20 %.4f vs atoms %.4f (|diff| %.4f <= 0.1)",
             d.size(), ks, short_mass, atoms, std::abs(short_mass - atoms)));
}

void criteria_5_and_6() {
  bool ok5 = true, ok6 = true;
  std::string d5, d6;
  for (double tc : {20.0, 60.0}) {
    auto cfg = base_config();
    cfg.scenario.content_timeout = tc;
    const auto t0 = Clock::now();
    const auto opt = replicate(cfg, PolicyKind::Optimal);
    const auto cell = replicate(cfg, PolicyKind::Cellular);
    const auto bench = replicate(cfg, PolicyKind::Benchmark);
    const double secs = seconds_since(t0);
    const double eo = metric(opt, &sim::Metrics::energy_per_delivery).mean;
    const double ec = metric(cell, &sim::Metrics::energy_per_delivery).mean;
    const double red = 100 * (1 - eo / ec);
    ok5 = ok5 && red >= 25 && secs < 600;
    d5 += fmt("tau_c=%g: %.1f%% below cellular in %.0f s; ", tc, red, secs);
    const double po = metric(opt, &sim::Metrics::d2d_energy_per_offload).mean;
    const double pb = metric(bench, &sim::Metrics::d2d_energy_per_offload).mean;
    const double red6 = 100 * (1 - po / pb);
    ok6 = ok6 && red6 >= 70;
    d6 += fmt("tau_c=%g: %.1f%% below benchmark; ", tc, red6);
  }
  report(5, ok5, d5 + "need >= 25% and < 600 s per point");
  report(6, ok6, d6 + "need >= 70%");
}

void criterion_7() {
  std::vector<stats::Summary> eff;
  std::string detail;
  for (double tc : {20.0, 40.0, 60.0, 90.0, 120.0}) {
    auto cfg = base_config();
    cfg.scenario.content_timeout = tc;
    const auto s = metric(replicate(cfg, PolicyKind::Optimal), &sim::Metrics::offloading_efficiency);
    eff.push_back(s);
    detail += fmt("%g:%.3f[%.3f,%.3f] ", tc, s.mean, s.ci_low, s.ci_high);
  }
  bool ok = true;
  for (std::size_t i = 1; i < eff.size(); ++i)
    ok = ok && (eff[i].mean >= eff[i - 1].mean || stats::overlaps(eff[i], eff[i - 1]));
  report(7, ok, "efficiency vs tau_c " + detail);
}

void criterion_8() {
  auto cfg = base_config();
  cfg.scenario.speed_min = 6;
  cfg.scenario.speed_max = 16;
  const double oc = metric(replicate(cfg, PolicyKind::Cellular), &sim::Metrics::occupancy).mean;
  const double oo = metric(replicate(cfg, PolicyKind::Optimal), &sim::Metrics::occupancy).mean;
  report(8, std::abs(oc - 0.26) <= 0.05 && oo <= 0.75 * oc,
         fmt("cellular occupancy %.1f%% (26 +- 5), optimal %.1f%% = %.2f x cellular (<= 0.75)", 100 * oc, 100 * oo,
             oo / oc));
}

void criterion_9() {
  auto cfg = base_config();
  cfg.sim.duration = 300;
  bool same = true;
  for (auto p : {PolicyKind::Optimal, PolicyKind::Benchmark, PolicyKind::Cellular}) {
    const auto a = sim::run(cfg, p, cfg.sim.duration, 9);
    const auto b = sim::run(cfg, p, cfg.sim.duration, 9);
    same = same && a == b;
    unresolved_total += a.unresolved;
    multiple_total += a.multiply_resolved;
  }
  report(9, same && unresolved_total == 0 && multiple_total == 0 && worst_norm <= 1e-5,
         fmt("repeat runs identical: %s; unresolved %ld, multiply resolved %ld; max |mass - 1| %.2g (<= 1e-5)",
             same ? "yes" : "no", unresolved_total, multiple_total, worst_norm));
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
  const auto t0 = Clock::now();
  criteria_1_and_2();
  criterion_3();
  criterion_4();
  criteria_5_and_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("acceptance: %d of 9 criteria failed (%.0f s)\n", failures, seconds_since(t0));
  return strict && failures > 0 ? 1 : 0;
}
