#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crnoma/net_model.hpp"
#include "crnoma/pairing.hpp"
#include "crnoma/power_rules.hpp"
#include "crnoma/rate_engine.hpp"
#include "crnoma/zoa.hpp"

namespace crnoma {

struct PairPower {
  double delta_strong = 0.0;
  double delta_weak = 0.0;
  double pair_power = 0.0;  // W
};

struct PowerAllocation {
  std::vector<PairPower> pairs;
};

/// Applies `rule` to every pair of `pairing` with P_j = cluster power.
PowerAllocation allocation_from_rule(const Pairing& pairing, const Topology& topology, const LinkModel& link,
                                     const DeltaRule& rule);

std::vector<PairEval> evaluate_allocation(const Pairing& pairing, const PowerAllocation& allocation,
                                          const Topology& topology, const LinkModel& link);

/// Network EE of an allocation; throws ConstraintViolation on C2/C3 breaches.
double allocation_ee(const Pairing& pairing, const PowerAllocation& allocation, const Topology& topology,
                     const Scenario& scenario);

/// Checks C1 (per user, on the delivered rates), C2 and C3. One message per violation.
std::vector<std::string> validate_allocation(const Pairing& pairing, const PowerAllocation& allocation,
                                             const Topology& topology, const Scenario& scenario);

struct ZouppaOptions {
  ZoaConfig zoa;  // dimension and bounds are set by zouppa()
  double penalty = 1e6;
  bool seed_bpa = true;
  bool seed_fpa = true;
  /// Also search P_j in [min_power_fraction, 1] x cluster power; C3 becomes a penalty.
  bool optimize_power = false;
  double min_power_fraction = 1e-3;
  std::vector<std::vector<double>> extra_seeds;  // decision vectors placed after BPA/FPA
};

struct ZouppaResult {
  PowerAllocation allocation;
  std::vector<PairEval> evals;
  double ee = 0.0;
  double seeded_bpa_ee = 0.0;  // fitness of the BPA member of the initial population
  std::size_t fallback_pairs = 0;
  ZoaResult run;
};

/// Optimizes δ_μ per pair (δ_ν = 1 - δ_μ) with ZOA for a fixed pairing. The
/// BPA split (with the scenario's β2) and the FPA split seed the population.
/// Throws ConstraintViolation("C3") when the fixed pair budgets exceed the total
/// power, and InfeasibleError listing the pairs when the best allocation still
/// breaks C1 under the penalty policy.
ZouppaResult zouppa(const Pairing& pairing, const Scenario& scenario, const Topology& topology,
                    const ZouppaOptions& options);

struct BcdOptions {
  ZoupOptions zoup;
  ZouppaOptions zouppa;
  std::size_t rounds = 1;  // 1 = a single pairing pass followed by one power pass
  double epsilon = 1e-9;
};

struct BcdResult {
  Pairing pairing;
  PowerAllocation allocation;
  double ee = 0.0;
  double zoup_ee = 0.0;  // EE of the first-round pairing under its split rule
  std::size_t rounds_run = 0;
  std::vector<double> ee_trace;  // best EE after each round
};

/// Alternates pairing (ZOUP) and power (ZOUPPA) blocks. Later rounds seed ZOUP
/// with the previous pairing and ZOUPPA with the splits of pairs that survived.
/// Stops when a round improves EE by at most epsilon.
BcdResult bcd_optimize(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                       const BcdOptions& options);

}  // namespace crnoma
