// Command-line driver: single runs, parameter sweeps, oracle gap studies and ZOA traces.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crnoma/config.hpp"
#include "crnoma/csv.hpp"
#include "crnoma/errors.hpp"
#include "crnoma/harness.hpp"
#include "crnoma/oracle.hpp"
#include "crnoma/pairing.hpp"
#include "crnoma/power_alloc.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> jobs;
  std::vector<std::string> sets;
};

crnoma::KeyValueConfig load_config(const GlobalOptions& g) {
  crnoma::KeyValueConfig cfg;
  if (!g.config.empty()) cfg = crnoma::KeyValueConfig::load(g.config);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw crnoma::ConfigError("--set", "expected key=value, got '" + kv + "'");
    auto key = kv.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    cfg.set(key, kv.substr(eq + 1));
  }
  if (g.seed) cfg.set("rng_seed", std::to_string(*g.seed));
  if (g.reps) cfg.set("replications", std::to_string(*g.reps));
  if (g.jobs) cfg.set("jobs", std::to_string(*g.jobs));
  return cfg;
}

std::filesystem::path output_dir(const GlobalOptions& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("CRNOMA_OUT_DIR"); env && *env) return env;
  return "crnoma_out";
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw crnoma::ConfigError("out", "cannot write '" + path.string() + "'");
  return out;
}

int cmd_run(const GlobalOptions& g, bool export_csv) {
  const auto spec = crnoma::experiment_from_config(load_config(g));
  std::cout << "scheme,ee,feasible,violations,wall_ms,note\n";
  crnoma::ReplicationDetail detail;
  const auto rows = crnoma::run_replication(spec.base, spec.schemes, spec.base_seed, spec.algo, &detail);
  for (const auto& r : rows) {
    crnoma::csv::write_row(std::cout, {crnoma::to_string(r.scheme), crnoma::csv::format_sig6(r.ee),
                                       r.feasible ? "1" : "0", std::to_string(r.violations),
                                       crnoma::csv::format_sig6(r.wall_ms), r.note});
  }
  if (export_csv) {
    const auto dir = output_dir(g);
    const auto topo = crnoma::generate_topology(spec.base, spec.base_seed);
    const auto avail = crnoma::generate_availability(spec.base, spec.base_seed);
    auto tout = open_output(dir / "topology.csv");
    crnoma::write_topology_csv(tout, topo, avail);
    crnoma::ZoupOptions zo;
    zo.zoa = spec.algo.zoa(crnoma::derive_seed(spec.base_seed, crnoma::streams::zoup));
    zo.rule = crnoma::DeltaRule::bpa_rule(spec.base.beta2);
    zo.penalty = spec.algo.penalty;
    const auto up = crnoma::zoup(spec.base, topo, avail, zo);
    crnoma::ZouppaOptions po;
    po.zoa = spec.algo.zoa(crnoma::derive_seed(spec.base_seed, crnoma::streams::zouppa));
    po.penalty = spec.algo.penalty;
    po.optimize_power = spec.algo.optimize_power;
    const auto pa = crnoma::zouppa(up.pairing, spec.base, topo, po);
    auto pout = open_output(dir / "pairing.csv");
    crnoma::write_pairing_csv(pout, up.pairing, pa.evals);
    std::cerr << "wrote " << (dir / "topology.csv").string() << " and " << (dir / "pairing.csv").string() << "\n";
  }
  return 0;
}

int cmd_sweep(const GlobalOptions& g, const std::string& axis, const std::string& values, const std::string& schemes,
              const std::string& seed_mode) {
  auto cfg = load_config(g);
  if (!axis.empty()) cfg.set("axis", axis);
  if (!values.empty()) cfg.set("values", values);
  if (!schemes.empty()) cfg.set("schemes", schemes);
  if (!seed_mode.empty()) cfg.set("seed_mode", seed_mode);
  const auto spec = crnoma::experiment_from_config(cfg);
  const auto dir = output_dir(g);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::size_t last_percent = 101;
  const auto res = crnoma::run_sweep(spec, dir, &g_stop, [&](std::size_t done, std::size_t total) {
    const std::size_t percent = done * 100 / total;
    if (percent / 10 != last_percent / 10) {
      std::cerr << "sweep: " << done << "/" << total << " items\n";
      last_percent = percent;
    }
  });
  if (res.resumed_items) std::cerr << "sweep: resumed " << res.resumed_items << " completed items\n";
  crnoma::write_summary(std::cout, spec.axis, res.summary);
  if (res.interrupted) {
    std::cerr << "sweep: interrupted; partial results in " << dir.string() << ", rerun to resume\n";
    return 130;
  }
  return 0;
}

int cmd_oracle(const GlobalOptions& g, std::size_t n, std::size_t m, double q, std::size_t instances, double gap) {
  auto cfg = load_config(g);
  cfg.set("n_users", std::to_string(n));
  cfg.set("m_channels", std::to_string(m));
  cfg.set("availability_prob", crnoma::csv::format_exact(q));
  const auto spec = crnoma::experiment_from_config(cfg);
  const auto dir = output_dir(g);
  auto out = open_output(dir / "oracle.csv");
  crnoma::csv::write_row(out, {"instance", "seed", "oracle_ee", "zoup_ee", "gap", "enumerated"});
  const auto rule = crnoma::DeltaRule::bpa_rule(spec.base.beta2);
  std::size_t within = 0;
  std::size_t above = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t seed = crnoma::replication_seed(spec.base_seed, 0.0, i, crnoma::SeedMode::common);
    const auto topo = crnoma::generate_topology(spec.base, seed);
    const auto avail = crnoma::generate_availability(spec.base, seed);
    const auto oracle = crnoma::exhaustive_pairing(spec.base, topo, avail, rule);
    crnoma::ZoupOptions zo;
    zo.zoa = spec.algo.zoa(crnoma::derive_seed(seed, crnoma::streams::zoup));
    zo.rule = rule;
    zo.penalty = spec.algo.penalty;
    std::string zoup_text = "";
    std::string gap_text = "";
    if (oracle.feasible) {
      const auto up = crnoma::zoup(spec.base, topo, avail, zo);
      const double rel = oracle.best_ee > 0.0 ? (oracle.best_ee - up.ee) / oracle.best_ee : 0.0;
      if (rel <= gap) ++within;
      if (up.ee > oracle.best_ee + 1e-9) ++above;
      zoup_text = crnoma::csv::format_sig6(up.ee);
      gap_text = crnoma::csv::format_sig6(rel);
    }
    crnoma::csv::write_row(out, {std::to_string(i), std::to_string(seed),
                                 oracle.feasible ? crnoma::csv::format_sig6(oracle.best_ee) : "",
                                 zoup_text, gap_text, std::to_string(oracle.enumerated_count)});
  }
  std::cout << "instances within " << gap * 100 << "% of the optimum: " << within << "/" << instances << "\n";
  std::cout << "instances above the optimum: " << above << "\n";
  std::cerr << "wrote " << (dir / "oracle.csv").string() << "\n";
  return 0;
}

int cmd_trace(const GlobalOptions& g, const std::string& target) {
  const auto spec = crnoma::experiment_from_config(load_config(g));
  const auto topo = crnoma::generate_topology(spec.base, spec.base_seed);
  const auto avail = crnoma::generate_availability(spec.base, spec.base_seed);
  crnoma::ZoupOptions zo;
  zo.zoa = spec.algo.zoa(crnoma::derive_seed(spec.base_seed, crnoma::streams::zoup));
  zo.rule = crnoma::DeltaRule::bpa_rule(spec.base.beta2);
  zo.penalty = spec.algo.penalty;
  const auto up = crnoma::zoup(spec.base, topo, avail, zo);
  std::vector<double> trace = up.run.trace;
  if (target == "zouppa") {
    crnoma::ZouppaOptions po;
    po.zoa = spec.algo.zoa(crnoma::derive_seed(spec.base_seed, crnoma::streams::zouppa));
    po.penalty = spec.algo.penalty;
    po.optimize_power = spec.algo.optimize_power;
    trace = crnoma::zouppa(up.pairing, spec.base, topo, po).run.trace;
  } else if (target != "zoup") {
    throw crnoma::ConfigError("--target", "expected zoup or zouppa, got '" + target + "'");
  }
  const auto dir = output_dir(g);
  auto out = open_output(dir / ("trace_" + target + ".csv"));
  crnoma::csv::write_row(out, {"iteration", "best_fitness"});
  for (std::size_t i = 0; i < trace.size(); ++i) {
    crnoma::csv::write_row(out, {std::to_string(i), crnoma::csv::format_exact(trace[i])});
  }
  std::cout << "iterations: " << trace.size() - 1 << ", final best fitness: " << crnoma::csv::format_sig6(trace.back())
            << "\n";
  std::cerr << "wrote " << (dir / ("trace_" + target + ".csv")).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CR-NOMA energy-efficiency simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("-c,--config", g.config, "key = value configuration file");
  app.add_option("--seed", g.seed, "base seed (overrides rng_seed)");
  app.add_option("-o,--out", g.out, "output directory (default: $CRNOMA_OUT_DIR or ./crnoma_out)");
  app.add_option("--reps", g.reps, "replications per axis value");
  app.add_option("-j,--jobs", g.jobs, "worker threads");
  app.add_option("--set", g.sets, "override a configuration key, e.g. --set snr_db=15")->take_all();

  auto* run = app.add_subcommand("run", "evaluate every scheme on one scenario draw");
  bool export_csv = false;
  run->add_flag("--export", export_csv, "also write topology.csv and pairing.csv");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over one parameter axis");
  std::string axis, values, schemes, seed_mode;
  sweep->add_option("--axis", axis, "snr_db, beta2, path_loss_exp, n_users, m_channels or coverage_radius");
  sweep->add_option("--values", values, "comma list or start:stop:step");
  sweep->add_option("--schemes", schemes, "comma list of schemes");
  sweep->add_option("--seed-mode", seed_mode, "common or independent");

  auto* oracle = app.add_subcommand("oracle", "ZOUP versus exhaustive search on small instances");
  std::size_t on = 6, om = 4, instances = 50;
  double oq = 0.8, gap = 0.02;
  oracle->add_option("--n", on, "users (<= 8)");
  oracle->add_option("--m", om, "channels (<= 6)");
  oracle->add_option("--q", oq, "channel availability probability");
  oracle->add_option("--instances", instances, "number of random instances");
  oracle->add_option("--gap", gap, "relative gap counted as a match");

  auto* trace = app.add_subcommand("trace", "ZOA best-fitness trace as CSV");
  std::string target = "zoup";
  trace->add_option("--target", target, "zoup or zouppa");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(g, export_csv);
    if (*sweep) return cmd_sweep(g, axis, values, schemes, seed_mode);
    if (*oracle) return cmd_oracle(g, on, om, oq, instances, gap);
    if (*trace) return cmd_trace(g, target);
  } catch (const crnoma::ConfigError& e) {
    std::cerr << "error: invalid parameter " << e.what() << "\n";
    return 2;
  } catch (const crnoma::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
