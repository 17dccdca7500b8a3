// Acceptance run: one PASS/FAIL line per criterion, detail lines indented below.
// Optional arguments select criteria by number, e.g. `acceptance 1 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crnoma/errors.hpp"
#include "crnoma/harness.hpp"
#include "crnoma/net_model.hpp"
#include "crnoma/oracle.hpp"
#include "crnoma/pairing.hpp"
#include "crnoma/power_alloc.hpp"
#include "crnoma/power_rules.hpp"
#include "crnoma/rate_engine.hpp"
#include "crnoma/rng.hpp"
#include "crnoma/zoa.hpp"

using namespace crnoma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

bool close(double got, double want) { return std::abs(got - want) <= 1e-12; }

// ---------------------------------------------------------------------------
// Sweeps shared by several criteria.

struct Sweep {
  std::vector<double> values;
  std::vector<Scheme> schemes;
  // mean[v][scheme] over feasible rows
  std::vector<std::map<Scheme, double>> mean;
  std::vector<std::map<Scheme, std::size_t>> feasible;
  std::vector<std::vector<ResultRow>> rows;  // per value, all replications
  std::vector<std::vector<ReplicationDetail>> details;
  double seconds = 0.0;
};

constexpr std::size_t kReps = 100;
constexpr std::uint64_t kBaseSeed = 1;

Sweep run_axis(const Scenario& base, SweepAxis axis, std::vector<double> values, std::vector<Scheme> schemes) {
  Sweep s;
  s.values = std::move(values);
  s.schemes = std::move(schemes);
  const auto t0 = Clock::now();
  for (const double v : s.values) {
    const Scenario sc = apply_axis(base, axis, v);
    std::vector<ResultRow> all;
    std::vector<ReplicationDetail> det;
    for (std::size_t r = 0; r < kReps; ++r) {
      ReplicationDetail d;
      auto rows = run_replication(sc, s.schemes, replication_seed(kBaseSeed, v, r, SeedMode::common), {}, &d);
      for (auto& row : rows) {
        row.axis_value = v;
        row.replication = r;
      }
      all.insert(all.end(), rows.begin(), rows.end());
      det.push_back(d);
    }
    std::map<Scheme, double> sum;
    std::map<Scheme, std::size_t> count;
    for (const auto& row : all) {
      if (!row.feasible) continue;
      sum[row.scheme] += row.ee;
      ++count[row.scheme];
    }
    std::map<Scheme, double> mean;
    for (const Scheme sch : s.schemes) mean[sch] = count[sch] ? sum[sch] / static_cast<double>(count[sch]) : NAN;
    s.mean.push_back(mean);
    s.feasible.push_back(count);
    s.rows.push_back(std::move(all));
    s.details.push_back(std::move(det));
  }
  s.seconds = seconds_since(t0);
  return s;
}

std::size_t index_of(const std::vector<double>& values, double v) {
  return static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
}

// Monotonicity of every scheme's mean along an axis. `direction` is +1 for
// nondecreasing, -1 for nonincreasing. At most one inversion per axis, of
// relative size below 2%.
void check_trend(Report& rep, const std::string& label, const Sweep& s, const std::vector<Scheme>& schemes,
                 int direction) {
  std::size_t inversions = 0;
  double worst = 0.0;
  for (const Scheme sch : schemes) {
    std::string series;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      series += (i ? " " : "") + fmt("%.5g", s.mean[i].at(sch));
      if (i == 0) continue;
      const double prev = s.mean[i - 1].at(sch);
      const double cur = s.mean[i].at(sch);
      const double drop = direction > 0 ? prev - cur : cur - prev;
      if (drop > 0.0) {
        ++inversions;
        const double rel = drop / std::max(std::abs(prev), 1e-300);
        worst = std::max(worst, rel);
        rep.note(label + " inversion: " + to_string(sch) + fmt(" between %g and %g", s.values[i - 1], s.values[i]) +
                 fmt(" (%.3g%%)", 100.0 * rel));
      }
    }
    rep.note(label + " " + to_string(sch) + ": " + series);
  }
  const bool ok = inversions == 0 || (inversions == 1 && worst < 0.02);
  rep.check(ok, label + ": " + std::to_string(inversions) + " inversion(s), largest " + fmt("%.3g%%", 100.0 * worst));
}

// ---------------------------------------------------------------------------

Report criterion_1() {
  Report rep;
  const auto t0 = Clock::now();
  bool ok = true;
  ok &= close(oma_rate(1.0, 1.0), 0.5);
  ok &= close(oma_rate(7.0, 0.0), 0.0);
  ok &= close(oma_rate(1000.0, 0.003), 1.0);
  rep.check(ok, "OMA rate examples");

  ok = true;
  ok &= close(noma_weak_rate(1.0, 0.5, 2.0), 1.0);
  ok &= close(noma_weak_rate(5.0, 0.0, 2.0), 0.0);
  ok &= close(noma_weak_rate(1.0, 1.0, 7.0), 3.0);
  rep.check(ok, "weak-user rate examples");

  ok = true;
  ok &= close(noma_strong_rate(1.0, 0.5, 0.5, 2.0), std::log2(1.5));
  ok &= std::abs(noma_strong_rate(1.0, 0.5, 0.5, 2.0) - 0.58496) < 1e-5;
  ok &= close(noma_strong_rate(1.0, 0.0, 0.5, 2.0), 0.0);
  ok &= close(noma_strong_rate(1.0, 1.0, 0.0, 3.0), 2.0);
  rep.check(ok, "strong-user rate examples");

  ok = true;
  const PowerSplit even = bpa(0.5, 0.5, 0.0, 0.0);
  ok &= close(even.strong, 0.5) && close(even.weak, 0.5);
  const PowerSplit w = bpa(0.0, 1.0, 50.0, 3.0);
  ok &= close(w.strong, 1.0 / 3.0) && close(w.weak, 2.0 / 3.0);
  const PowerSplit f = fpa();
  ok &= f.weak == 0.75 && f.strong == 0.25;
  rep.check(ok, "split rule examples");

  ok = true;
  auto pair = [](double rs, double rw) {
    PairEval e;
    e.rate_strong = rs;
    e.rate_weak = rw;
    e.pair_power = 1.0;
    e.delta_strong = 0.5;
    e.delta_weak = 0.5;
    e.pair_ee = rs + rw;
    return e;
  };
  const std::vector<PairEval> one = {pair(2.0, 1.0)};
  const std::vector<PairEval> two = {pair(2.0, 1.0), pair(2.0, 1.0)};
  ok &= close(network_ee(one), 3.0);
  ok &= close(network_ee(two), 6.0);
  Rng rng(1);
  const LinkModel link{1000.0, 1.0, SicInterference::weak_user, C1Policy::penalty};
  std::vector<PairEval> three;
  double direct = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double gs = rng.exponential() * 1e-2;
    const double gw = gs * rng.uniform();
    const double ds = rng.uniform();
    three.push_back(evaluate_pair(link, gs, gw, ds, 1.0 - ds));
    direct += std::log2(1.0 + ds * 1000.0 * gs / ((1.0 - ds) * 1000.0 * gw + 1.0)) +
              std::log2(1.0 + (1.0 - ds) * 1000.0 * gw);
  }
  ok &= close(network_ee(three), direct);
  rep.check(ok, "network EE examples");

  PairEval q = pair(1.0, 1.0);
  q.oma_rate_strong = 0.5;
  q.oma_rate_weak = 0.5;
  ok = qos_satisfied(q);
  q.rate_strong = 0.4;
  ok = ok && !qos_satisfied(q);
  rep.check(ok, "QoS examples");

  const double secs = seconds_since(t0);
  rep.check(secs < 1.0, fmt("runtime %.3f s < 1 s", secs));
  return rep;
}

Report criterion_2() {
  Report rep;
  const auto t0 = Clock::now();
  Scenario s;
  s.n_users = 6;
  s.m_channels = 4;
  s.availability_prob = 0.8;
  s.beta2 = 1.0;
  const DeltaRule rule = DeltaRule::bpa_rule(1.0);
  std::size_t within = 0, above = 0, instances = 0;
  double worst = 1.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t seed = derive_seed(2000, i);
    const Topology t = generate_topology(s, seed);
    const AvailabilityMatrix avail = generate_availability(s, seed);
    const OracleResult best = exhaustive_pairing(s, t, avail, rule);
    if (!best.feasible) {
      rep.note("instance " + std::to_string(i) + " has no feasible pairing");
      continue;
    }
    ++instances;
    ZoupOptions opt;
    opt.zoa.rng_seed = derive_seed(seed, streams::zoup);
    double ee = 0.0;
    try {
      ee = zoup(s, t, avail, opt).ee;
    } catch (const InfeasibleError& e) {
      rep.note("instance " + std::to_string(i) + ": " + e.what());
    }
    if (ee >= 0.98 * best.best_ee) ++within;
    if (ee > best.best_ee + 1e-9) ++above;
    worst = std::min(worst, ee / best.best_ee);
  }
  rep.check(instances == 50, std::to_string(instances) + "/50 instances feasible");
  rep.check(within * 10 >= 9 * instances,
            std::to_string(within) + "/" + std::to_string(instances) + " within 2% of the optimum (need 90%)");
  rep.check(above == 0, std::to_string(above) + " above the optimum");
  rep.note(fmt("worst ratio %.6f", worst));
  const double secs = seconds_since(t0);
  rep.check(secs < 30.0, fmt("runtime %.2f s < 30 s", secs));
  return rep;
}

Report criterion_3() {
  Report rep;
  const auto t0 = Clock::now();
  Scenario s;
  s.n_users = 2;
  s.m_channels = 1;
  s.snr_db = 30.0;
  std::size_t within = 0;
  double worst = 1.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t seed = derive_seed(3000, i);
    const Topology t = generate_topology(s, seed);
    Pairing p;
    p.pairs = {order_by_gain(0, 1, t.gains)};
    p.channel_of_pair = {0};
    const auto grid = grid_delta_search(t.gains[p.pairs[0].strong], t.gains[p.pairs[0].weak], s.link(), 1e-3);
    if (!grid) {
      rep.note("pair " + std::to_string(i) + ": no feasible grid point");
      continue;
    }
    ZouppaOptions opt;
    opt.zoa.rng_seed = derive_seed(seed, streams::zouppa);
    const ZouppaResult r = zouppa(p, s, t, opt);
    const double ratio = r.ee / grid->ee;
    worst = std::min(worst, ratio);
    if (std::abs(r.ee - grid->ee) <= 0.01 * grid->ee) ++within;
  }
  rep.check(within >= 95, std::to_string(within) + "/100 within 1% of the grid optimum (need 95)");
  rep.note(fmt("worst ratio %.6f", worst));
  const double secs = seconds_since(t0);
  rep.check(secs < 30.0, fmt("runtime %.2f s < 30 s", secs));
  return rep;
}

// Criterion 4 reruns the default point with full validation of every scheme.
Report criterion_4() {
  Report rep;
  const auto t0 = Clock::now();
  const Scenario s;
  const LinkModel link = s.link();
  const DeltaRule rule = DeltaRule::bpa_rule(s.beta2);
  std::size_t dominance_fail = 0, seed_fail = 0, zoup_mismatch = 0;
  std::map<Scheme, std::size_t> violations;
  std::map<Scheme, std::size_t> infeasible;
  for (std::size_t r = 0; r < kReps; ++r) {
    const std::uint64_t seed = replication_seed(kBaseSeed, s.snr_db, r, SeedMode::common);
    ReplicationDetail d;
    const auto rows = run_replication(s, all_schemes(), seed, {}, &d);
    std::map<Scheme, double> ee;
    for (const auto& row : rows) {
      ee[row.scheme] = row.ee;
      violations[row.scheme] += row.violations;
      if (!row.feasible) ++infeasible[row.scheme];
    }
    if (!(ee[Scheme::zouppa] >= ee[Scheme::zoup])) ++dominance_fail;
    if (!(ee[Scheme::zoup] >= d.zouppa_seeded_bpa_ee)) ++seed_fail;
    if (!(ee[Scheme::zouppa] >= d.zouppa_seeded_bpa_ee)) ++seed_fail;

    // Independent recheck of the ZOUP pairing with the validators.
    const Topology t = generate_topology(s, seed);
    const AvailabilityMatrix avail = generate_availability(s, seed);
    ZoupOptions zo;
    zo.zoa.rng_seed = derive_seed(seed, streams::zoup);
    zo.rule = rule;
    const ZoupResult z = zoup(s, t, avail, zo);
    const auto structural = validate_pairing(z.pairing, t, avail);
    const auto power = validate_allocation(z.pairing, allocation_from_rule(z.pairing, t, link, rule), t, s);
    if (!structural.empty() || !power.empty() || std::abs(z.ee - ee[Scheme::zoup]) > 1e-9) ++zoup_mismatch;
  }
  rep.check(dominance_fail == 0, std::to_string(dominance_fail) + " replications with ZOUPPA < ZOUP");
  rep.check(seed_fail == 0, std::to_string(seed_fail) + " breaches of ZOUP/ZOUPPA >= seeded BPA member");
  rep.check(zoup_mismatch == 0, std::to_string(zoup_mismatch) + " replications where the ZOUP recheck disagrees");
  std::size_t total = 0;
  for (const Scheme sch : all_schemes()) {
    total += violations[sch] + infeasible[sch];
    rep.note(to_string(sch) + ": " + std::to_string(violations[sch]) + " constraint violations, " +
             std::to_string(infeasible[sch]) + " infeasible rows");
  }
  rep.check(total == 0, std::to_string(total) + " C1-C5 violations across all schemes and replications");
  const double secs = seconds_since(t0);
  rep.check(secs < 600.0, fmt("runtime %.1f s < 600 s", secs));
  return rep;
}

Report criterion_5(const Sweep& snr) {
  Report rep;
  const auto& at30 = snr.mean[index_of(snr.values, 30.0)];
  const std::vector<Scheme> order = {Scheme::zouppa, Scheme::zoup, Scheme::upwo,
                                     Scheme::adjacent, Scheme::random, Scheme::oma};
  std::string chain;
  for (std::size_t i = 0; i < order.size(); ++i) {
    chain += (i ? " | " : "") + to_string(order[i]) + fmt(" %.6g", at30.at(order[i]));
  }
  rep.note("means at 30 dB: " + chain);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double a = at30.at(order[i]);
    const double b = at30.at(order[i + 1]);
    rep.check(a > b, to_string(order[i]) + " > " + to_string(order[i + 1]) + fmt(" (%.6g vs %.6g)", a, b));
  }
  const auto& at15 = snr.mean[index_of(snr.values, 15.0)];
  const double gain15 = at15.at(Scheme::zouppa) / at15.at(Scheme::upwo) - 1.0;
  rep.check(gain15 >= 0.20, fmt("ZOUPPA over UPWO at 15 dB: %+.3f%% (need >= 20%%)", 100.0 * gain15));
  const double zz15 = at15.at(Scheme::zouppa) / at15.at(Scheme::zoup) - 1.0;
  rep.check(zz15 >= 0.10, fmt("ZOUPPA over ZOUP at 15 dB: %+.3f%% (need >= 10%%)", 100.0 * zz15));
  const auto& at40 = snr.mean[index_of(snr.values, 40.0)];
  const double gain40 = at40.at(Scheme::zoup) / at40.at(Scheme::upwo) - 1.0;
  rep.check(gain40 >= 0.03, fmt("ZOUP over UPWO at 40 dB: %+.3f%% (need >= 3%%)", 100.0 * gain40));
  rep.check(snr.seconds < 900.0, fmt("sweep runtime %.1f s < 900 s", snr.seconds));
  return rep;
}

Report criterion_6(const Sweep& snr) {
  Report rep;
  const auto t0 = Clock::now();
  const Scenario base;
  check_trend(rep, "(a) SNR", snr, all_schemes(), +1);

  const Sweep chi = run_axis(base, SweepAxis::path_loss_exp, {3.0, 3.5, 4.0, 4.5, 5.0, 5.5}, all_schemes());
  check_trend(rep, "(b) path loss exponent", chi, all_schemes(), -1);

  const Sweep rc = run_axis(base, SweepAxis::coverage_radius, {100.0, 200.0, 300.0, 400.0, 500.0}, all_schemes());
  check_trend(rep, "(c) coverage radius", rc, all_schemes(), -1);

  const std::vector<Scheme> bpa_based = {Scheme::random, Scheme::adjacent, Scheme::upwo, Scheme::zoup,
                                         Scheme::zoup_bpa};
  std::vector<double> betas;
  for (int k = 0; k <= 10; ++k) betas.push_back(k / 10.0);
  const Sweep beta = run_axis(base, SweepAxis::beta2, betas, bpa_based);
  check_trend(rep, "(d) beta2", beta, bpa_based, +1);

  Scenario wide = base;
  wide.m_channels = 60;
  const Sweep n = run_axis(wide, SweepAxis::n_users, {40.0, 60.0, 80.0, 100.0, 120.0}, {Scheme::oma});
  std::string series;
  for (std::size_t i = 0; i < n.values.size(); ++i) series += fmt(" N=%g:%.6g", n.values[i], n.mean[i].at(Scheme::oma));
  rep.note("(e) OMA means" + series);
  bool drops = true;
  for (std::size_t i = 1; i < n.values.size(); ++i) {
    if (n.values[i] > 60.0) drops = drops && n.mean[i].at(Scheme::oma) < n.mean[i - 1].at(Scheme::oma);
  }
  rep.check(drops, "(e) OMA mean EE drops strictly at every step past N = M = 60");

  const double secs = seconds_since(t0) + snr.seconds;
  rep.check(secs < 1800.0, fmt("runtime %.1f s < 1800 s (SNR sweep included)", secs));
  return rep;
}

Report criterion_7() {
  Report rep;
  const auto t0 = Clock::now();
  std::size_t runs = 0, bad = 0;
  auto check_trace = [&](const std::vector<double>& trace) {
    ++runs;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i] < trace[i - 1]) {
        ++bad;
        return;
      }
    }
  };
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ZoaConfig cfg = ZoaConfig::box(5, -5.0, 5.0);
    cfg.rng_seed = seed;
    check_trace(optimize([](std::span<const double> x) {
                  double v = 0.0;
                  for (double c : x) v += std::cos(2.0 * c) - 0.05 * c * c;
                  return v;
                }, cfg).trace);
  }
  Scenario s;
  s.n_users = 40;
  s.m_channels = 30;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Topology t = generate_topology(s, seed);
    const AvailabilityMatrix avail = generate_availability(s, seed);
    ZoupOptions zo;
    zo.zoa.rng_seed = seed;
    const ZoupResult z = zoup(s, t, avail, zo);
    check_trace(z.run.trace);
    ZouppaOptions po;
    po.zoa.rng_seed = seed;
    check_trace(zouppa(z.pairing, s, t, po).run.trace);
  }
  rep.check(bad == 0, std::to_string(runs - bad) + "/" + std::to_string(runs) + " traces nondecreasing");

  std::size_t worst_iters = 0;
  bool all_stopped = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ZoaConfig cfg = ZoaConfig::box(4, 0.0, 1.0);
    cfg.rng_seed = seed;
    cfg.stall_limit = 1;
    cfg.max_iterations = 100;
    const ZoaResult r = optimize([](std::span<const double>) { return 1.0; }, cfg);
    all_stopped = all_stopped && r.converged_early;
    worst_iters = std::max(worst_iters, r.iterations);
  }
  rep.check(all_stopped && worst_iters <= 2,
            "constant objective stops after at most " + std::to_string(worst_iters) + " iteration(s) (need <= 2)");
  const double secs = seconds_since(t0);
  rep.check(secs < 5.0, fmt("runtime %.2f s < 5 s", secs));
  return rep;
}

Report criterion_8() {
  Report rep;
  const auto t0 = Clock::now();
  const std::vector<double> ns = {20.0, 40.0, 80.0};
  std::vector<double> per_iter;
  for (const double n : ns) {
    Scenario s;
    s.n_users = static_cast<std::size_t>(n);
    s.m_channels = 60;
    double total = 0.0;
    std::size_t iterations = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Topology t = generate_topology(s, seed);
      const AvailabilityMatrix avail = generate_availability(s, seed);
      ZoupOptions zo;
      zo.zoa.rng_seed = seed;
      const auto start = Clock::now();
      const ZoupResult z = zoup(s, t, avail, zo);
      total += seconds_since(start);
      iterations += z.run.iterations;
    }
    per_iter.push_back(total / static_cast<double>(iterations));
    rep.note(fmt("N=%g: %.4g ms per iteration", n, 1e3 * per_iter.back()));
  }
  // Least-squares slope of log time against log N.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(ns[i]);
    my += std::log(per_iter[i]);
  }
  mx /= ns.size();
  my /= ns.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (std::log(ns[i]) - mx) * (std::log(per_iter[i]) - my);
    sxx += (std::log(ns[i]) - mx) * (std::log(ns[i]) - mx);
  }
  const double slope = sxy / sxx;
  rep.check(slope <= 2.3, fmt("log-log slope %.3f <= 2.3", slope));
  const double secs = seconds_since(t0);
  rep.check(secs < 300.0, fmt("runtime %.1f s < 300 s", secs));
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

  const std::vector<std::string> titles = {"",
                                           "formula exactness",
                                           "pairing oracle equivalence",
                                           "power oracle equivalence",
                                           "dominance and constraint validity",
                                           "scheme ordering",
                                           "trend reproduction",
                                           "convergence",
                                           "complexity"};
  std::map<int, Report> reports;
  auto emit = [&](int c, Report rep) {
    std::printf("CRITERION %d %s: %s\n", c, titles[static_cast<std::size_t>(c)].c_str(), rep.pass ? "PASS" : "FAIL");
    for (const auto& line : rep.lines) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    reports[c] = std::move(rep);
  };

  if (want(1)) emit(1, criterion_1());
  if (want(2)) emit(2, criterion_2());
  if (want(3)) emit(3, criterion_3());
  if (want(4)) emit(4, criterion_4());
  if (want(5) || want(6)) {
    const Sweep snr = run_axis(Scenario{}, SweepAxis::snr_db, {10, 15, 20, 25, 30, 35, 40}, all_schemes());
    if (want(5)) emit(5, criterion_5(snr));
    if (want(6)) emit(6, criterion_6(snr));
  }
  if (want(7)) emit(7, criterion_7());
  if (want(8)) emit(8, criterion_8());

  bool all = true;
  for (const auto& [c, rep] : reports) all = all && rep.pass;
  return all ? 0 : 1;
}
