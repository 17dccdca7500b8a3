#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "crnoma/net_model.hpp"
#include "crnoma/pairing.hpp"
#include "crnoma/power_rules.hpp"
#include "crnoma/rate_engine.hpp"

namespace crnoma {

inline constexpr std::size_t kOracleMaxUsers = 8;
inline constexpr std::size_t kOracleMaxChannels = 6;

struct OracleResult {
  double best_ee = 0.0;
  Pairing best_pairing;
  std::vector<double> best_delta;     // δ_μ per pair of best_pairing
  std::size_t enumerated_count = 0;   // (pairing, feasible channel map) combinations evaluated
  std::size_t pairings_count = 0;     // perfect matchings of the users
  bool feasible = false;
};

/// Enumerates every perfect matching and every injective channel map allowed by
/// the availability matrix, scoring each with `rule`. The first maximum in
/// lexicographic enumeration order wins. Throws ConfigError above N = 8 or M = 6.
OracleResult exhaustive_pairing(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                                const DeltaRule& rule);

struct GridResult {
  double delta_strong = 0.0;
  double ee = 0.0;
  std::size_t points = 0;
  std::size_t feasible_points = 0;
};

/// Scans δ_μ over {0, step, ..., 1} with δ_ν = 1 - δ_μ for one pair and returns the
/// best point whose NOMA rates meet the per-user QoS check (first index on ties),
/// or nullopt when none does. Requires 0 < step <= 0.01.
std::optional<GridResult> grid_delta_search(double gain_strong, double gain_weak, const LinkModel& link,
                                            double step);

}  // namespace crnoma
