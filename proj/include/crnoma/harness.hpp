#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crnoma/config.hpp"
#include "crnoma/net_model.hpp"
#include "crnoma/zoa.hpp"

namespace crnoma {

enum class Scheme { oma, random, adjacent, upwo, zoup, zoup_fpa, zoup_bpa, zouppa };

const std::vector<Scheme>& all_schemes();
std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

enum class SweepAxis { snr_db, beta2, path_loss_exp, n_users, m_channels, coverage_radius };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view text);

/// Returns `base` with the axis parameter set to `value`, validated.
Scenario apply_axis(Scenario base, SweepAxis axis, double value);

/// `common`: replication r uses the same seed at every axis value, so points are
/// compared on the same draws. `independent`: the seed also depends on the value.
enum class SeedMode { common, independent };

std::string to_string(SeedMode m);
SeedMode parse_seed_mode(std::string_view text);

/// Optimizer settings shared by the ZOA-based schemes.
struct AlgorithmSettings {
  std::size_t population = 20;
  std::size_t iterations = 100;
  std::size_t stall_limit = 0;
  double epsilon = 1e-9;
  OmegaMode omega = OmegaMode::random;
  AttackTarget attack = AttackTarget::global_best;
  double penalty = 1e6;
  std::size_t bcd_rounds = 1;
  bool optimize_power = false;

  ZoaConfig zoa(std::uint64_t seed) const;
};

struct ExperimentSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::snr_db;
  std::vector<double> values;
  std::vector<Scheme> schemes = all_schemes();
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  SeedMode seed_mode = SeedMode::common;
  AlgorithmSettings algo;
  std::size_t jobs = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Keys accepted in an experiment config file (scenario keys included).
const std::vector<std::string>& experiment_keys();

ExperimentSpec experiment_from_config(const KeyValueConfig& cfg);

struct ResultRow {
  double axis_value = 0.0;
  Scheme scheme = Scheme::oma;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double ee = 0.0;
  bool feasible = false;
  std::size_t violations = 0;
  double wall_ms = 0.0;
  std::string note;
};

/// Extra per-replication values used by dominance checks.
struct ReplicationDetail {
  double zoup_ee = 0.0;
  double zouppa_ee = 0.0;
  double zouppa_seeded_bpa_ee = 0.0;
  std::size_t zouppa_fallback_pairs = 0;
};

/// Draws one topology and availability matrix from `seed` and evaluates every
/// requested scheme on it. Scheme failures are recorded in the row.
std::vector<ResultRow> run_replication(const Scenario& scenario, std::span<const Scheme> schemes, std::uint64_t seed,
                                       const AlgorithmSettings& algo = {}, ReplicationDetail* detail = nullptr);

std::uint64_t replication_seed(std::uint64_t base_seed, double axis_value, std::size_t replication, SeedMode mode);

struct AggregateRow {
  double axis_value = 0.0;
  Scheme scheme = Scheme::oma;
  std::size_t count = 0;
  std::size_t feasible = 0;
  double mean_ee = 0.0;   // over feasible rows
  double std_ee = 0.0;    // sample standard deviation over feasible rows
  double mean_wall_ms = 0.0;
};

/// Groups rows by (axis value, scheme) in first-appearance order.
std::vector<AggregateRow> aggregate(std::span<const ResultRow> rows);

std::vector<std::string> raw_header();
std::vector<std::string> format_raw_row(SweepAxis axis, const ResultRow& row);
ResultRow parse_raw_row(const std::vector<std::string>& fields);
void write_summary(std::ostream& out, SweepAxis axis, std::span<const AggregateRow> rows);

struct SweepResult {
  std::vector<ResultRow> rows;  // as written to raw.csv (EE rounded to 6 significant digits)
  std::vector<AggregateRow> summary;
  std::size_t resumed_items = 0;
  std::size_t computed_items = 0;
  bool interrupted = false;
};

/// Runs every (axis value, replication) item on `spec.jobs` workers. With an
/// output directory, raw.csv rows are appended in item order as items finish and
/// summary.csv is rebuilt from raw.csv at the end; items already complete in an
/// existing raw.csv are skipped. Setting `stop` ends the sweep after in-flight items.
SweepResult run_sweep(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      const std::atomic<bool>* stop = nullptr,
                      const std::function<void(std::size_t done, std::size_t total)>& progress = {});

}  // namespace crnoma
