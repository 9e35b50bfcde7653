#include "d2d/cli.hpp"

#include "d2d/analytic.hpp"
#include "d2d/csv.hpp"
#include "d2d/engine.hpp"
#include "d2d/phy.hpp"
#include "d2d/rng.hpp"
#include "d2d/speed_law.hpp"
#include "d2d/stats.hpp"
#include "d2d/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace d2d::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;
using csv::format_number;

namespace {

std::string path_in(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

std::string kind_name(phy::LinkKind k) { return k == phy::LinkKind::I2D ? "i2d" : "d2d"; }

csv::Table metrics_table(const std::vector<sim::MetricRow>& rows) {
  csv::Table t{{"metric", "value", "ci_low", "ci_high", "n"}, {}};
  for (const auto& r : rows)
    t.add_row({r.name, format_number(r.summary.mean), r.summary.has_ci ? format_number(r.summary.ci_low) : "",
               r.summary.has_ci ? format_number(r.summary.ci_high) : "", std::to_string(r.summary.n)});
  return t;
}

csv::Table runs_table(const std::vector<sim::Metrics>& runs, std::uint64_t base_seed) {
  csv::Table t{{"seed", "requests", "repeated", "non_repeated", "deliveries_d2d", "deliveries_i2d", "dropped",
                "unresolved", "late_resolutions", "d2d_failures", "i2d_failures", "pruned_links", "energy_d2d",
                "energy_i2d", "offloading_efficiency", "energy_per_delivery", "d2d_energy_per_offload",
                "spectrum_occupancy"},
               {}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& m = runs[i];
    t.add_row({std::to_string(base_seed + i), std::to_string(m.requests), std::to_string(m.repeated),
               std::to_string(m.non_repeated), std::to_string(m.deliveries_d2d), std::to_string(m.deliveries_i2d),
               std::to_string(m.dropped), std::to_string(m.unresolved), std::to_string(m.late_resolutions),
               std::to_string(m.d2d_failures), std::to_string(m.i2d_failures), std::to_string(m.pruned_links),
               format_number(m.energy_d2d), format_number(m.energy_i2d), format_number(m.offloading_efficiency()),
               format_number(m.energy_per_delivery()), format_number(m.d2d_energy_per_offload()),
               format_number(m.occupancy())});
  }
  return t;
}

stats::Histogram distance_histogram(const std::vector<double>& d, const AppConfig& cfg) {
  auto h = stats::make_histogram(0.0, cfg.scenario.d2d_max_range, cfg.sim.histogram_bin);
  for (double x : d) h.add(x);
  return h;
}

csv::Table histogram_table(const stats::Histogram& h) {
  csv::Table t{{"r_low", "r_high", "count", "mass", "density"}, {}};
  const auto pdf = stats::sample_pdf(h);
  for (std::size_t i = 0; i < pdf.size(); ++i)
    t.add_row({format_number(h.lo + h.width * static_cast<double>(i)),
               format_number(h.lo + h.width * static_cast<double>(i + 1)), std::to_string(h.counts[i]),
               format_number(pdf[i].mass), format_number(pdf[i].density)});
  return t;
}

double value_as_number(const std::string& v, std::size_t index) {
  auto j = json::parse(v);
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && !j.empty() && j[0].is_number()) return j[0].get<double>();
  return static_cast<double>(index);
}

}  // namespace

AppConfig resolve_config(const GlobalOptions& g) {
  AppConfig cfg = g.config_path.empty() ? AppConfig{} : load_config(g.config_path);
  if (g.seed) cfg.scenario.rng_seed = *g.seed;
  if (g.policy) cfg.sim.policy = parse_policy(*g.policy);
  if (g.duration) cfg.sim.duration = *g.duration;
  if (g.replications) cfg.sim.replications = *g.replications;
  if (g.threads) cfg.sim.threads = *g.threads;
  cfg.validate();
  return cfg;
}

SweepSpec parse_sweep_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed sweep spec: ") + e.what());
  }
  SweepSpec s;
  if (!j.is_object()) throw ConfigError("sweep spec must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "name") {
      s.name = v.get<std::string>();
    } else if (k == "parameter") {
      s.parameter = v.get<std::string>();
    } else if (k == "values") {
      if (!v.is_array()) throw ConfigError("values must be an array");
      for (const auto& x : v) s.values.push_back(x.dump());
    } else if (k == "overrides") {
      if (!v.is_object()) throw ConfigError("overrides must be an object");
      for (auto o = v.begin(); o != v.end(); ++o) s.overrides.emplace_back(o.key(), o.value().dump());
    } else if (k == "policies") {
      s.policies.clear();
      for (const auto& p : v) s.policies.push_back(parse_policy(p.get<std::string>()));
    } else if (k == "metrics") {
      s.metrics = v.get<std::vector<std::string>>();
    } else {
      throw ConfigError("unknown sweep spec key '" + k + "'");
    }
  }
  if (s.parameter.empty()) throw ConfigError("sweep spec needs a parameter");
  const auto section = config_section(s.parameter);
  if (section != "scenario" && section != "phy")
    throw ConfigError("swept parameter must be a scenario or phy key: " + s.parameter);
  if (s.values.empty()) throw ConfigError("sweep value list is empty");
  if (s.policies.empty()) throw ConfigError("sweep needs at least one policy");
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("sweep spec not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sweep_spec(ss.str());
}

std::uint64_t sweep_point_seed(std::uint64_t base, const std::string& value) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : json::parse(value).dump()) h = (h ^ c) * 1099511628211ULL;
  return hash_seed({base, h}) >> 16;
}

int cmd_simulate(const GlobalOptions& g, std::ostream& out) {
  const AppConfig cfg = resolve_config(g);
  const auto base = cfg.scenario.rng_seed;
  const int n = cfg.sim.replications;
  std::vector<sim::Metrics> runs;

  if (!g.dump_alloc.empty() || !g.dump_channel.empty()) {
    csv::Table alloc{{"interval", "link_id", "request", "kind", "set_id", "prb_start", "prb_count"}, {}};
    csv::Table chan{{"interval", "link_id", "kind", "tx", "rx", "distance", "shadowing_db", "bits", "success"}, {}};
    sim::Observer obs;
    if (!g.dump_alloc.empty())
      obs.on_alloc = [&](long k, const std::vector<rrrm::LinkIntent>& links, const rrrm::Allocation& a) {
        for (std::size_t i = 0; i < links.size(); ++i) {
          const bool live = !a.range.empty() && a.range[i].count > 0;
          alloc.add_row({std::to_string(k), std::to_string(links[i].id), std::to_string(links[i].request_ref),
                         kind_name(links[i].kind), live ? std::to_string(a.set_of[i]) : "-1",
                         live ? std::to_string(a.range[i].start) : "", live ? std::to_string(a.range[i].count) : "0"});
        }
      };
    if (!g.dump_channel.empty())
      obs.on_channel = [&](long k, const rrrm::LinkIntent& l, double s, double bits, bool ok) {
        chan.add_row({std::to_string(k), std::to_string(l.id), kind_name(l.kind),
                      (l.tx.is_enb ? "enb" : "dev") + std::to_string(l.tx.id), std::to_string(l.rx),
                      format_number(l.distance), format_number(s), format_number(bits), ok ? "1" : "0"});
      };
    runs.push_back(sim::run(cfg, cfg.sim.policy, cfg.sim.duration, base, &obs));
    for (int i = 1; i < n; ++i) runs.push_back(sim::run(cfg, cfg.sim.policy, cfg.sim.duration, base + i));
    if (!g.dump_alloc.empty()) csv::write_file(g.dump_alloc, alloc);
    if (!g.dump_channel.empty()) csv::write_file(g.dump_channel, chan);
  } else {
    runs = sim::replicate(cfg, cfg.sim.policy, n, base, cfg.sim.threads).runs;
  }

  const auto rows = sim::summarize(runs);
  fs::create_directories(g.out_dir);
  csv::write_file(path_in(g.out_dir, "metrics.csv"), metrics_table(rows));
  csv::write_file(path_in(g.out_dir, "runs.csv"), runs_table(runs, base));
  std::vector<double> d;
  for (const auto& m : runs) d.insert(d.end(), m.d2d_distances.begin(), m.d2d_distances.end());
  const auto h = distance_histogram(d, cfg);
  csv::write_file(path_in(g.out_dir, "histogram.csv"), histogram_table(h));
  svg::Series s{"sample PDF", {}, {}, {}, {}};
  for (const auto& p : stats::sample_pdf(h)) {
    s.x.push_back(p.r);
    s.y.push_back(p.density);
  }
  svg::write_file(path_in(g.out_dir, "histogram.svg"),
                  {"D2D transmission distance (" + policy_name(cfg.sim.policy) + ")", "r [m]", "density", {s}});

  out << "policy " << policy_name(cfg.sim.policy) << ", " << n << " run(s)\n";
  for (const auto& r : rows) {
    out << "  " << r.name << " = " << r.summary.mean;
    if (r.summary.has_ci) out << "  [" << r.summary.ci_low << ", " << r.summary.ci_high << "]";
    out << '\n';
  }
  return kOk;
}

int cmd_sweep(const GlobalOptions& g, const std::string& spec_path, std::ostream& out) {
  const SweepSpec spec = load_sweep_spec(spec_path);
  AppConfig base_cfg = resolve_config(g);
  for (const auto& [k, v] : spec.overrides) set_config_value(base_cfg, k, v);

  // value → policy → runs
  std::map<std::string, std::map<PolicyKind, std::vector<sim::Metrics>>> results;
  std::vector<std::string> values = spec.values;
  for (const auto& v : values) {
    AppConfig cfg = base_cfg;
    set_config_value(cfg, spec.parameter, v);
    cfg.validate();
    const auto seed = sweep_point_seed(base_cfg.scenario.rng_seed, v);
    for (PolicyKind p : spec.policies) {
      auto rep = sim::replicate(cfg, p, cfg.sim.replications, seed, cfg.sim.threads);
      csv::write_file(path_in(g.out_dir, spec.name + "_points/" + spec.parameter + "=" + json::parse(v).dump() +
                                             "_" + policy_name(p) + ".csv"),
                      runs_table(rep.runs, seed));
      results[v][p] = std::move(rep.runs);
      out << spec.parameter << "=" << v << " " << policy_name(p) << " done\n";
    }
  }

  const bool numeric = std::all_of(values.begin(), values.end(), [](const std::string& v) {
    return json::parse(v).is_number();
  });
  std::sort(values.begin(), values.end(), [&](const std::string& a, const std::string& b) {
    return numeric ? json::parse(a).get<double>() < json::parse(b).get<double>() : a < b;
  });

  auto metric_of = [](const sim::Metrics& m, const std::string& name) {
    if (name == "offloading_efficiency") return m.offloading_efficiency();
    if (name == "energy_per_delivery") return m.energy_per_delivery();
    if (name == "d2d_energy_per_offload") return m.d2d_energy_per_offload();
    if (name == "i2d_energy_per_delivery") return m.i2d_energy_per_delivery();
    if (name == "spectrum_occupancy") return m.occupancy();
    throw ConfigError("unknown metric " + name);
  };

  for (const auto& metric : spec.metrics) {
    svg::Plot plot{spec.name + ": " + metric, spec.parameter, metric, {}};
    for (PolicyKind p : spec.policies) {
      csv::Table t{{"param", "mean", "ci_low", "ci_high"}, {}};
      svg::Series series{policy_name(p), {}, {}, {}, {}};
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<double> xs;
        for (const auto& m : results[values[i]][p]) xs.push_back(metric_of(m, metric));
        const auto s = stats::summarize(xs);
        t.add_row({values[i], format_number(s.mean), format_number(s.ci_low), format_number(s.ci_high)});
        series.x.push_back(value_as_number(values[i], i));
        series.y.push_back(s.mean);
        series.y_low.push_back(s.ci_low);
        series.y_high.push_back(s.ci_high);
      }
      csv::write_file(path_in(g.out_dir, spec.name + "_" + metric + "_" + policy_name(p) + ".csv"), t);
      plot.series.push_back(std::move(series));
    }
    svg::write_file(path_in(g.out_dir, spec.name + "_" + metric + ".svg"), plot);
  }

  // Paired (same-seed) reductions against the baselines.
  auto has = [&](PolicyKind p) { return std::count(spec.policies.begin(), spec.policies.end(), p) > 0; };
  std::vector<std::tuple<std::string, PolicyKind, PolicyKind>> pairs;
  for (const char* m : {"energy_per_delivery", "spectrum_occupancy"})
    for (PolicyKind p : {PolicyKind::Benchmark, PolicyKind::Optimal})
      if (has(p) && has(PolicyKind::Cellular)) pairs.emplace_back(m, p, PolicyKind::Cellular);
  if (has(PolicyKind::Optimal) && has(PolicyKind::Benchmark)) {
    pairs.emplace_back("energy_per_delivery", PolicyKind::Optimal, PolicyKind::Benchmark);
    pairs.emplace_back("d2d_energy_per_offload", PolicyKind::Optimal, PolicyKind::Benchmark);
  }
  for (const auto& [metric, p, b] : pairs) {
    csv::Table t{{"param", "mean", "ci_low", "ci_high"}, {}};
    for (const auto& v : values) {
      const auto& rp = results[v][p];
      const auto& rb = results[v][b];
      std::vector<double> xs;
      for (std::size_t i = 0; i < rp.size() && i < rb.size(); ++i) {
        const double base = metric_of(rb[i], metric);
        if (base > 0) xs.push_back(100.0 * (1.0 - metric_of(rp[i], metric) / base));
      }
      const auto s = stats::summarize(xs);
      t.add_row({v, format_number(s.mean), format_number(s.ci_low), format_number(s.ci_high)});
    }
    csv::write_file(path_in(g.out_dir, spec.name + "_" + metric + "_reduction_" + policy_name(p) + "_vs_" +
                                           policy_name(b) + ".csv"),
                    t);
  }
  return kOk;
}

int cmd_analytic(const GlobalOptions& g, std::ostream& out) {
  const AppConfig cfg = resolve_config(g);
  auto params = analytic::AnalyticParams::from(cfg);
  params.energy = phy::energy_model(cfg);
  analytic::Model model(params);
  const auto u = model.unconditional(cfg.analytic.weighting);
  fs::create_directories(g.out_dir);

  for (const auto& [file, law] : {std::pair{"distance_law.csv", &u.lane_law}, std::pair{"distance_law_1d.csv", &u.law}}) {
    csv::Table t{{"r", "density", "cdf"}, {}};
    for (double r : law->grid()) t.add_row({format_number(r), format_number(law->density_at(r)), format_number(law->cdf(r))});
    csv::write_file(path_in(g.out_dir, file), t);
  }
  csv::Table atoms{{"location", "mass"}, {}};
  for (const auto& a : u.lane_law.atoms()) atoms.add_row({format_number(a.location), format_number(a.mass)});
  csv::write_file(path_in(g.out_dir, "distance_atoms.csv"), atoms);

  const auto e = analytic::average_energies(model, u);
  csv::Table en{{"quantity", "value"}, {}};
  en.add_row({"offload_probability", format_number(u.offload_probability)});
  en.add_row({"e_i2d", format_number(e.e_i2d)});
  en.add_row({"e_d2d", format_number(e.e_d2d)});
  en.add_row({"e_total", format_number(e.e_total)});
  en.add_row({"p_non_offloaded", format_number(e.p_nonoff)});
  csv::write_file(path_in(g.out_dir, "energies.csv"), en);

  const auto surface = analytic::short_range_probability_surface(params, analytic::SurfaceSweep{});
  csv::Table sf{{"r_max", "tau_c", "v_min", "v_max", "p_zero", "p_within_offset"}, {}};
  for (const auto& p : surface)
    sf.add_row({format_number(p.r_max), format_number(p.tau_c), format_number(p.v_min), format_number(p.v_max),
                format_number(p.atom_at_zero), format_number(p.within_offset)});
  csv::write_file(path_in(g.out_dir, "surface.csv"), sf);

  svg::Series s{"density", {}, {}, {}, {}};
  for (double r : u.lane_law.grid()) {
    s.x.push_back(r);
    s.y.push_back(u.lane_law.density_at(r));
  }
  svg::write_file(path_in(g.out_dir, "distance_law.svg"), {"Effective D2D distance", "r [m]", "density", {s}});

  out << "P(off) = " << u.offload_probability << "\n";
  for (const auto& a : u.lane_law.atoms()) out << "atom at " << a.location << " m: " << a.mass << "\n";
  out << "E_I2D = " << e.e_i2d << " J, E_D2D = " << e.e_d2d << " J, E_total = " << e.e_total << " J\n";
  return kOk;
}

int cmd_validate(const GlobalOptions& g, long n_samples, double ks_threshold, std::ostream& out) {
  if (n_samples <= 0) throw ConfigError("n_samples must be > 0");
  const AppConfig cfg = resolve_config(g);
  const auto& sc = cfg.scenario;
  const auto law = SpeedLaw::uniform(sc.speed_min, sc.speed_max);
  Rng rng = make_rng({sc.rng_seed, 0x7a11ULL});
  std::uniform_real_distribution<double> U(0.0, 1.0);

  csv::Table report{{"check", "value", "threshold", "pass"}, {}};
  bool ok = true;
  const int tuples = 5;
  for (int i = 0; i < tuples; ++i) {
    const double va = law.sample_magnitude(rng);  // mirror symmetry covers negative speeds
    const double reach = sc.d2d_max_range + (sc.speed_max + std::abs(va)) * sc.content_timeout;
    const double x0 = (2 * U(rng) - 1) * reach;
    const auto an = analytic::single_pcp_distance_law(x0, va, law, sc.content_timeout, sc.sharing_timeout,
                                                      cfg.analytic.dr);
    const auto xs = analytic::single_pcp_distance_samples(x0, va, law, sc.content_timeout, sc.sharing_timeout,
                                                          static_cast<std::size_t>(n_samples), rng);
    const double d = std::abs(x0);
    long at0 = 0, atd = 0;
    std::vector<double> cont;
    for (double x : xs) {
      if (x <= 1e-9) ++at0;
      else if (x >= d - 1e-9) ++atd;
      else cont.push_back(x);
    }
    const double n = static_cast<double>(xs.size());
    const double ks = cont.empty() ? an.continuous_mass()
                                   : stats::sub_ks_distance(cont, n, [&](double r) { return an.continuous_cdf(r); });
    const double e0 = std::abs(at0 / n - an.atom_mass_at(0.0));
    const double ed = std::abs(atd / n - an.atom_mass_at(d, 1e-6));
    const std::string tag = "tuple" + std::to_string(i) + "(x0=" + format_number(x0) + ",va=" + format_number(va) + ")";
    report.add_row({tag + " ks", format_number(ks), format_number(ks_threshold), ks < ks_threshold ? "1" : "0"});
    report.add_row({tag + " atom0_err", format_number(e0), "0.005", e0 <= 0.005 ? "1" : "0"});
    report.add_row({tag + " atomd_err", format_number(ed), "0.005", ed <= 0.005 ? "1" : "0"});
    ok = ok && ks < ks_threshold;
    out << tag << ": KS " << ks << ", atom errors " << e0 << ", " << ed << "\n";
  }

  auto params = analytic::AnalyticParams::from(cfg);
  params.energy = phy::energy_model(cfg);
  analytic::Model model(params);
  const auto u = model.unconditional(cfg.analytic.weighting);
  for (const auto& a : u.lane_law.atoms()) {
    report.add_row({"analytic_atom@" + format_number(a.location), format_number(a.mass), "", ""});
    out << "analytic atom at " << a.location << " m: " << a.mass << "\n";
  }

  const auto rep = sim::replicate(cfg, PolicyKind::Optimal, cfg.sim.replications, sc.rng_seed, cfg.sim.threads);
  const auto d = rep.pooled_distances();
  if (!d.empty()) {
    const double cut = 2 * sc.lane_offset;
    std::vector<double> tail;
    for (double x : d)
      if (x > cut) tail.push_back(x);
    const double fc = u.lane_law.cdf(cut);
    const double short_mass = 1.0 - static_cast<double>(tail.size()) / static_cast<double>(d.size());
    report.add_row({"sim_short_mass(r<=" + format_number(cut) + ")", format_number(short_mass), "", ""});
    report.add_row({"analytic_atom_total", format_number(u.lane_law.atom_mass()), "", ""});
    if (!tail.empty() && fc < 1) {
      const double ks = stats::ks_distance(tail, [&](double r) { return (u.lane_law.cdf(r) - fc) / (1 - fc); });
      report.add_row({"sim_tail_ks", format_number(ks), "", ""});
      out << "simulated tail KS " << ks << ", short-range mass " << short_mass << " vs atoms "
          << u.lane_law.atom_mass() << "\n";
    }
    csv::write_file(path_in(g.out_dir, "validate_histogram.csv"), histogram_table(distance_histogram(d, cfg)));
  }
  csv::write_file(path_in(g.out_dir, "validate.csv"), report);
  out << (ok ? "oracle check passed\n" : "oracle check FAILED\n");
  return ok ? kOk : kValidationFailed;
}

int main(int argc, char** argv) {
  CLI::App app{"Delay-tolerant D2D content delivery simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--policy", g.policy, "optimal | benchmark | cellular");
  app.add_option("--duration", g.duration, "Measured seconds per run");
  app.add_option("--replications", g.replications, "Independent runs");
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");
  app.add_option("--dump-channel", g.dump_channel, "CSV trace of per-link channel outcomes (first run)");
  app.add_option("--dump-alloc", g.dump_alloc, "CSV trace of per-interval PRB allocation (first run)");

  auto* sim = app.add_subcommand("simulate", "Run replications and write metrics/histogram CSVs");
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter across policies");
  std::string spec;
  sweep->add_option("spec", spec, "Sweep spec JSON")->required();
  auto* an = app.add_subcommand("analytic", "Tabulate the distance law, surface and energies");
  auto* val = app.add_subcommand("validate", "Analytic vs Monte-Carlo and simulation checks");
  long samples = 1000000;
  double ks = 0.01;
  val->add_option("--samples", samples, "Monte-Carlo draws per tuple")->capture_default_str();
  val->add_option("--ks-threshold", ks, "Oracle KS threshold")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }
  try {
    if (*sim) return cmd_simulate(g, std::cout);
    if (*sweep) return cmd_sweep(g, spec, std::cout);
    if (*an) return cmd_analytic(g, std::cout);
    if (*val) return cmd_validate(g, samples, ks, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace d2d::cli
