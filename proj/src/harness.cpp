#include "crnoma/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "crnoma/csv.hpp"
#include "crnoma/errors.hpp"
#include "crnoma/pairing.hpp"
#include "crnoma/power_alloc.hpp"
#include "crnoma/rng.hpp"

namespace crnoma {

namespace {

const std::vector<std::pair<Scheme, std::string>>& scheme_names() {
  static const std::vector<std::pair<Scheme, std::string>> names = {
      {Scheme::oma, "oma"},       {Scheme::random, "random"},     {Scheme::adjacent, "adjacent"},
      {Scheme::upwo, "upwo"},     {Scheme::zoup, "zoup"},         {Scheme::zoup_fpa, "zoup+fpa"},
      {Scheme::zoup_bpa, "zoup+bpa"}, {Scheme::zouppa, "zouppa"}};
  return names;
}

const std::vector<std::pair<SweepAxis, std::string>>& axis_names() {
  static const std::vector<std::pair<SweepAxis, std::string>> names = {
      {SweepAxis::snr_db, "snr_db"},           {SweepAxis::beta2, "beta2"},
      {SweepAxis::path_loss_exp, "path_loss_exp"}, {SweepAxis::n_users, "n_users"},
      {SweepAxis::m_channels, "m_channels"},   {SweepAxis::coverage_radius, "coverage_radius"}};
  return names;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::size_t as_count(const std::string& key, double v) {
  if (v < 0.0 || v != std::floor(v)) throw ConfigError(key, "expected a non-negative integer axis value");
  return static_cast<std::size_t>(v);
}

}  // namespace

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> all = {Scheme::oma,  Scheme::random,   Scheme::adjacent, Scheme::upwo,
                                          Scheme::zoup, Scheme::zoup_fpa, Scheme::zoup_bpa, Scheme::zouppa};
  return all;
}

std::string to_string(Scheme s) {
  for (const auto& [v, name] : scheme_names()) {
    if (v == s) return name;
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  for (const auto& [v, name] : scheme_names()) {
    if (name == text) return v;
  }
  if (text == "zoup_fpa") return Scheme::zoup_fpa;
  if (text == "zoup_bpa") return Scheme::zoup_bpa;
  throw ConfigError("schemes", "unknown scheme '" + std::string(text) + "'");
}

std::string to_string(SweepAxis a) {
  for (const auto& [v, name] : axis_names()) {
    if (v == a) return name;
  }
  return "?";
}

SweepAxis parse_axis(std::string_view text) {
  for (const auto& [v, name] : axis_names()) {
    if (name == text) return v;
  }
  throw ConfigError("axis", "unknown sweep axis '" + std::string(text) + "'");
}

Scenario apply_axis(Scenario s, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::snr_db: s.snr_db = value; break;
    case SweepAxis::beta2: s.beta2 = value; break;
    case SweepAxis::path_loss_exp: s.path_loss_exp = value; break;
    case SweepAxis::n_users: s.n_users = as_count("n_users", value); break;
    case SweepAxis::m_channels: s.m_channels = as_count("m_channels", value); break;
    case SweepAxis::coverage_radius: s.coverage_radius = value; break;
  }
  s.validate();
  return s;
}

std::string to_string(SeedMode m) { return m == SeedMode::common ? "common" : "independent"; }

SeedMode parse_seed_mode(std::string_view text) {
  if (text == "common") return SeedMode::common;
  if (text == "independent") return SeedMode::independent;
  throw ConfigError("seed_mode", "expected common or independent, got '" + std::string(text) + "'");
}

ZoaConfig AlgorithmSettings::zoa(std::uint64_t seed) const {
  ZoaConfig c;
  c.population_size = population;
  c.max_iterations = iterations;
  c.stall_limit = stall_limit;
  c.epsilon = epsilon;
  c.omega = omega;
  c.attack = attack;
  c.rng_seed = seed;
  return c;
}

void ExperimentSpec::validate() const {
  base.validate();
  if (values.empty()) throw ConfigError("values", "at least one axis value is required");
  for (const double v : values) apply_axis(base, axis, v);
  if (schemes.empty()) throw ConfigError("schemes", "at least one scheme is required");
  if (replications < 1) throw ConfigError("replications", "must be at least 1");
  if (jobs < 1) throw ConfigError("jobs", "must be at least 1");
  if (algo.population < 2) throw ConfigError("zoa_population", "must be at least 2");
  if (algo.iterations < 1) throw ConfigError("zoa_iterations", "must be at least 1");
  if (!(algo.epsilon > 0.0)) throw ConfigError("zoa_epsilon", "must be positive");
  if (!(algo.penalty > 0.0)) throw ConfigError("penalty", "must be positive");
  if (algo.bcd_rounds < 1) throw ConfigError("bcd_rounds", "must be at least 1");
}

const std::vector<std::string>& experiment_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = scenario_keys();
    for (const char* extra : {"axis", "values", "schemes", "replications", "seed_mode", "jobs", "zoa_population",
                              "zoa_iterations", "zoa_stall_limit", "zoa_epsilon", "zoa_omega", "zoa_attack",
                              "penalty", "bcd_rounds", "optimize_power"}) {
      k.emplace_back(extra);
    }
    return k;
  }();
  return keys;
}

ExperimentSpec experiment_from_config(const KeyValueConfig& cfg) {
  if (const auto unknown = cfg.unknown_keys(experiment_keys()); !unknown.empty()) {
    throw ConfigError(unknown.front(), "unknown configuration key");
  }
  ExperimentSpec spec;
  spec.base = scenario_from_config(cfg);
  spec.base_seed = spec.base.rng_seed;
  if (const auto v = cfg.get("axis")) spec.axis = parse_axis(*v);
  if (const auto v = cfg.get_double_list("values")) {
    spec.values = *v;
  } else {
    spec.values = {[&] {
      switch (spec.axis) {
        case SweepAxis::snr_db: return spec.base.snr_db;
        case SweepAxis::beta2: return spec.base.beta2;
        case SweepAxis::path_loss_exp: return spec.base.path_loss_exp;
        case SweepAxis::n_users: return static_cast<double>(spec.base.n_users);
        case SweepAxis::m_channels: return static_cast<double>(spec.base.m_channels);
        case SweepAxis::coverage_radius: return spec.base.coverage_radius;
      }
      return 0.0;
    }()};
  }
  if (const auto v = cfg.get_string_list("schemes")) {
    spec.schemes.clear();
    for (const auto& s : *v) spec.schemes.push_back(parse_scheme(s));
  }
  if (const auto v = cfg.get_uint("replications")) spec.replications = *v;
  if (const auto v = cfg.get("seed_mode")) spec.seed_mode = parse_seed_mode(*v);
  if (const auto v = cfg.get_uint("jobs")) spec.jobs = *v;
  if (const auto v = cfg.get_uint("zoa_population")) spec.algo.population = *v;
  if (const auto v = cfg.get_uint("zoa_iterations")) spec.algo.iterations = *v;
  if (const auto v = cfg.get_uint("zoa_stall_limit")) spec.algo.stall_limit = *v;
  if (const auto v = cfg.get_double("zoa_epsilon")) spec.algo.epsilon = *v;
  if (const auto v = cfg.get("zoa_omega")) spec.algo.omega = parse_omega_mode(*v);
  if (const auto v = cfg.get("zoa_attack")) spec.algo.attack = parse_attack_target(*v);
  if (const auto v = cfg.get_double("penalty")) spec.algo.penalty = *v;
  if (const auto v = cfg.get_uint("bcd_rounds")) spec.algo.bcd_rounds = *v;
  if (const auto v = cfg.get_bool("optimize_power")) spec.algo.optimize_power = *v;
  spec.validate();
  return spec;
}

std::uint64_t replication_seed(std::uint64_t base_seed, double axis_value, std::size_t replication, SeedMode mode) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(replication));
  if (mode == SeedMode::independent) h = mix64(h ^ mix64(std::bit_cast<std::uint64_t>(axis_value)));
  return base_seed ^ h;
}

namespace {

std::size_t count_violations(const Pairing& p, const PowerAllocation& a, const Topology& t,
                             const AvailabilityMatrix& avail, const Scenario& s) {
  return validate_pairing(p, t, avail).size() + validate_allocation(p, a, t, s).size();
}

std::size_t oma_violations(const OmaResult& r, const AvailabilityMatrix& avail) {
  std::size_t bad = 0;
  std::vector<int> used(avail.m_channels(), 0);
  for (std::size_t u = 0; u < r.channel_of_user.size(); ++u) {
    const std::size_t m = r.channel_of_user[u];
    if (m == kUnmatched) continue;
    if (m >= avail.m_channels() || !avail.at(u, m) || ++used[m] > 1) ++bad;
  }
  return bad;
}

}  // namespace

std::vector<ResultRow> run_replication(const Scenario& scenario, std::span<const Scheme> schemes, std::uint64_t seed,
                                       const AlgorithmSettings& algo, ReplicationDetail* detail) {
  std::vector<ResultRow> rows;
  rows.reserve(schemes.size());
  for (const Scheme s : schemes) {
    ResultRow r;
    r.scheme = s;
    r.seed = seed;
    rows.push_back(r);
  }

  Topology topo;
  AvailabilityMatrix avail;
  try {
    topo = generate_topology(scenario, seed);
    avail = generate_availability(scenario, seed);
  } catch (const std::exception& e) {
    for (auto& r : rows) r.note = e.what();
    return rows;
  }

  const LinkModel link = scenario.link();
  const DeltaRule bpa = DeltaRule::bpa_rule(scenario.beta2);
  std::optional<ZoupResult> zoup_res;
  std::optional<std::string> zoup_error;
  double zoup_ms = 0.0;
  auto get_zoup = [&]() -> const ZoupResult& {
    if (!zoup_res && !zoup_error) {
      const auto t0 = std::chrono::steady_clock::now();
      ZoupOptions o;
      o.zoa = algo.zoa(derive_seed(seed, streams::zoup));
      o.rule = bpa;
      o.penalty = algo.penalty;
      try {
        zoup_res = zoup(scenario, topo, avail, o);
      } catch (const std::exception& e) {
        zoup_error = e.what();
      }
      zoup_ms = elapsed_ms(t0);
    }
    if (zoup_error) throw InfeasibleError(*zoup_error);
    return *zoup_res;
  };

  auto score_pairing = [&](ResultRow& row, const Pairing& p, const DeltaRule& rule) {
    const PowerAllocation a = allocation_from_rule(p, topo, link, rule);
    row.violations = count_violations(p, a, topo, avail, scenario);
    row.feasible = p.feasible();
    row.ee = pairing_ee(p, topo, link, rule);
    if (!p.feasible()) row.note = std::to_string(p.unpaired.size()) + " users without a channel";
  };

  for (auto& row : rows) {
    const auto t0 = std::chrono::steady_clock::now();
    double extra_ms = 0.0;
    try {
      switch (row.scheme) {
        case Scheme::oma: {
          const OmaResult r = oma_baseline(scenario, topo, avail);
          row.ee = r.ee;
          row.feasible = true;
          row.violations = oma_violations(r, avail);
          break;
        }
        case Scheme::random: {
          Rng rng(derive_seed(seed, streams::random_pairing));
          score_pairing(row, random_pairing(topo, avail, rng), bpa);
          break;
        }
        case Scheme::adjacent: score_pairing(row, adjacent_pairing(topo, avail), bpa); break;
        case Scheme::upwo: score_pairing(row, upwo_pairing(topo, avail), bpa); break;
        case Scheme::zoup:
        case Scheme::zoup_bpa: {
          const bool fresh = !zoup_res && !zoup_error;
          const ZoupResult& z = get_zoup();
          if (!fresh) extra_ms = zoup_ms;
          score_pairing(row, z.pairing, bpa);
          if (detail) detail->zoup_ee = z.ee;
          break;
        }
        case Scheme::zoup_fpa: {
          const bool fresh = !zoup_res && !zoup_error;
          const ZoupResult& z = get_zoup();
          if (!fresh) extra_ms = zoup_ms;
          score_pairing(row, z.pairing, DeltaRule::fpa_rule());
          break;
        }
        case Scheme::zouppa: {
          const bool fresh = !zoup_res && !zoup_error;
          const ZoupResult& z = get_zoup();
          if (!fresh) extra_ms = zoup_ms;
          ZouppaOptions po;
          po.zoa = algo.zoa(derive_seed(seed, streams::zouppa));
          po.penalty = algo.penalty;
          po.optimize_power = algo.optimize_power;
          Pairing pairing;
          PowerAllocation alloc;
          double ee = 0.0;
          if (algo.bcd_rounds <= 1) {
            const ZouppaResult pa = zouppa(z.pairing, scenario, topo, po);
            pairing = z.pairing;
            alloc = pa.allocation;
            ee = pa.ee;
            if (detail) {
              detail->zouppa_seeded_bpa_ee = pa.seeded_bpa_ee;
              detail->zouppa_fallback_pairs = pa.fallback_pairs;
            }
          } else {
            BcdOptions bo;
            bo.zoup.zoa = algo.zoa(derive_seed(seed, streams::zoup));
            bo.zoup.rule = bpa;
            bo.zoup.penalty = algo.penalty;
            bo.zouppa = po;
            bo.rounds = algo.bcd_rounds;
            bo.epsilon = algo.epsilon;
            const BcdResult br = bcd_optimize(scenario, topo, avail, bo);
            pairing = br.pairing;
            alloc = br.allocation;
            ee = br.ee;
          }
          row.ee = ee;
          row.feasible = true;
          row.violations = count_violations(pairing, alloc, topo, avail, scenario);
          if (detail) detail->zouppa_ee = ee;
          break;
        }
      }
    } catch (const std::exception& e) {
      row.feasible = false;
      row.ee = 0.0;
      row.note = e.what();
    }
    row.wall_ms = elapsed_ms(t0) + extra_ms;
  }
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const ResultRow> rows) {
  std::vector<AggregateRow> out;
  std::map<std::pair<double, Scheme>, std::size_t> index;
  std::vector<std::vector<double>> samples;
  std::vector<double> wall;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.axis_value, r.scheme);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.axis_value, r.scheme, 0, 0, 0.0, 0.0, 0.0});
      samples.emplace_back();
      wall.push_back(0.0);
    }
    auto& a = out[it->second];
    ++a.count;
    wall[it->second] += r.wall_ms;
    if (r.feasible) {
      ++a.feasible;
      samples[it->second].push_back(r.ee);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = samples[i];
    out[i].mean_wall_ms = wall[i] / static_cast<double>(out[i].count);
    if (xs.empty()) continue;
    double sum = 0.0;
    for (const double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    out[i].mean_ee = mean;
    out[i].std_ee = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  }
  return out;
}

std::vector<std::string> raw_header() {
  return {"axis", "axis_value", "scheme", "replication", "seed", "ee", "feasible", "violations", "wall_ms", "note"};
}

std::vector<std::string> format_raw_row(SweepAxis axis, const ResultRow& r) {
  std::ostringstream wall;
  wall.imbue(std::locale::classic());
  wall.setf(std::ios::fixed);
  wall.precision(3);
  wall << r.wall_ms;
  return {to_string(axis),
          csv::format_sig6(r.axis_value),
          to_string(r.scheme),
          std::to_string(r.replication),
          std::to_string(r.seed),
          csv::format_sig6(r.ee),
          r.feasible ? "1" : "0",
          std::to_string(r.violations),
          wall.str(),
          r.note};
}

ResultRow parse_raw_row(const std::vector<std::string>& f) {
  if (f.size() != raw_header().size()) throw ConfigError("raw.csv", "row has the wrong number of fields");
  ResultRow r;
  r.axis_value = parse_double("axis_value", f[1]);
  r.scheme = parse_scheme(f[2]);
  r.replication = parse_uint("replication", f[3]);
  r.seed = parse_uint("seed", f[4]);
  r.ee = parse_double("ee", f[5]);
  r.feasible = f[6] == "1";
  r.violations = parse_uint("violations", f[7]);
  r.wall_ms = parse_double("wall_ms", f[8]);
  r.note = f[9];
  return r;
}

void write_summary(std::ostream& out, SweepAxis axis, std::span<const AggregateRow> rows) {
  csv::write_row(out, {"axis", "axis_value", "scheme", "count", "feasible", "mean_ee", "std_ee", "mean_wall_ms"});
  for (const auto& a : rows) {
    csv::write_row(out, {to_string(axis), csv::format_sig6(a.axis_value), to_string(a.scheme),
                         std::to_string(a.count), std::to_string(a.feasible), csv::format_exact(a.mean_ee),
                         csv::format_exact(a.std_ee), csv::format_sig6(a.mean_wall_ms)});
  }
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(csv::parse_row(line));
  }
  return rows;
}

void write_raw(std::ostream& out, SweepAxis axis, std::span<const ResultRow> rows) {
  for (const auto& r : rows) csv::write_row(out, format_raw_row(axis, r));
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir,
                      const std::atomic<bool>* stop,
                      const std::function<void(std::size_t, std::size_t)>& progress) {
  spec.validate();
  const std::size_t reps = spec.replications;
  const std::size_t total = spec.values.size() * reps;
  const std::size_t per_item = spec.schemes.size();
  std::vector<std::vector<ResultRow>> done(total);
  std::vector<bool> complete(total, false);

  // Canonical text of each row lets resumed and fresh items be treated alike.
  auto round_trip = [&](const ResultRow& r) { return parse_raw_row(format_raw_row(spec.axis, r)); };
  auto item_of = [&](double value, std::size_t rep) -> std::optional<std::size_t> {
    if (rep >= reps) return std::nullopt;
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      if (csv::format_sig6(spec.values[v]) == csv::format_sig6(value)) return v * reps + rep;
    }
    return std::nullopt;
  };

  SweepResult result;
  std::filesystem::path raw_path;
  std::ofstream raw;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    raw_path = *out_dir / "raw.csv";
    if (std::filesystem::exists(raw_path)) {
      const auto old = read_csv(raw_path);
      if (!old.empty() && old.front() == raw_header()) {
        std::map<std::size_t, std::vector<ResultRow>> partial;
        for (std::size_t i = 1; i < old.size(); ++i) {
          if (old[i].size() != raw_header().size() || old[i][0] != to_string(spec.axis)) continue;
          ResultRow r;
          try {
            r = parse_raw_row(old[i]);
          } catch (const std::exception&) {
            continue;
          }
          if (const auto item = item_of(r.axis_value, r.replication)) partial[*item].push_back(r);
        }
        for (auto& [item, rows] : partial) {
          bool ok = rows.size() == per_item;
          for (std::size_t k = 0; ok && k < per_item; ++k) ok = rows[k].scheme == spec.schemes[k];
          if (!ok) continue;
          done[item] = std::move(rows);
          complete[item] = true;
          ++result.resumed_items;
        }
      }
    }
    // Rewrite with the complete items only, so a torn last line never survives.
    raw.open(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw) throw ConfigError("out", "cannot write '" + raw_path.string() + "'");
    csv::write_row(raw, raw_header());
    for (std::size_t i = 0; i < total; ++i) {
      if (complete[i]) write_raw(raw, spec.axis, done[i]);
    }
    raw.flush();
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < total; ++i) {
    if (!complete[i]) pending.push_back(i);
  }

  std::mutex mu;
  std::condition_variable cv;
  std::vector<bool> ready(pending.size(), false);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t finished_workers = 0;
  const std::size_t workers = std::min(spec.jobs, std::max<std::size_t>(pending.size(), 1));

  auto work = [&] {
    for (;;) {
      if (stop && stop->load()) break;
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) break;
      const std::size_t item = pending[k];
      const double value = spec.values[item / reps];
      const std::size_t rep = item % reps;
      std::vector<ResultRow> rows;
      try {
        const Scenario s = apply_axis(spec.base, spec.axis, value);
        const std::uint64_t seed = replication_seed(spec.base_seed, value, rep, spec.seed_mode);
        rows = run_replication(s, spec.schemes, seed, spec.algo);
        for (auto& r : rows) {
          r.axis_value = value;
          r.replication = rep;
          r = round_trip(r);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        break;
      }
      std::lock_guard lock(mu);
      done[item] = std::move(rows);
      ready[k] = true;
      cv.notify_all();
    }
    std::lock_guard lock(mu);
    ++finished_workers;
    cv.notify_all();
  };

  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);

  std::size_t written = 0;
  std::size_t completed = result.resumed_items;
  {
    std::unique_lock lock(mu);
    while (written < pending.size()) {
      cv.wait(lock, [&] { return ready[written] || finished_workers == workers; });
      if (!ready[written]) break;
      const std::size_t item = pending[written];
      complete[item] = true;
      if (raw.is_open()) {
        write_raw(raw, spec.axis, done[item]);
        raw.flush();
      }
      ++written;
      ++completed;
      ++result.computed_items;
      if (progress) {
        lock.unlock();
        progress(completed, total);
        lock.lock();
      }
    }
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  // Items finished out of order after an interruption are still worth keeping.
  for (std::size_t k = written; k < pending.size(); ++k) {
    if (!ready[k]) continue;
    complete[pending[k]] = true;
    if (raw.is_open()) write_raw(raw, spec.axis, done[pending[k]]);
    ++result.computed_items;
  }

  for (std::size_t i = 0; i < total; ++i) {
    if (complete[i]) result.rows.insert(result.rows.end(), done[i].begin(), done[i].end());
  }
  result.interrupted = std::find(complete.begin(), complete.end(), false) != complete.end();

  if (raw.is_open()) {
    raw.close();
    // Final rewrite in item order so the file does not depend on scheduling.
    std::ofstream sorted(raw_path, std::ios::binary | std::ios::trunc);
    csv::write_row(sorted, raw_header());
    write_raw(sorted, spec.axis, result.rows);
    sorted.close();
    std::vector<ResultRow> reread;
    const auto text = read_csv(raw_path);
    for (std::size_t i = 1; i < text.size(); ++i) reread.push_back(parse_raw_row(text[i]));
    result.summary = aggregate(reread);
    std::ofstream summary(*out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
    write_summary(summary, spec.axis, result.summary);
  } else {
    result.summary = aggregate(result.rows);
  }
  return result;
}

}  // namespace crnoma
