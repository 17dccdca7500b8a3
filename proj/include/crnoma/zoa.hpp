#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crnoma/rng.hpp"

namespace crnoma {

/// How the ω factor of the move rules is chosen.
enum class OmegaMode { random, fixed_one, fixed_two };

/// Target of the defense-phase attack move.
enum class AttackTarget { global_best, random_member };

OmegaMode parse_omega_mode(std::string_view text);
AttackTarget parse_attack_target(std::string_view text);

struct ZoaConfig {
  std::size_t population_size = 20;
  std::size_t max_iterations = 100;
  std::size_t dimension = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  double defense_R = 0.1;
  double epsilon = 1e-9;
  /// Stop after this many consecutive iterations whose best-fitness gain is <= epsilon.
  /// Zero runs all max_iterations.
  std::size_t stall_limit = 0;
  std::uint64_t rng_seed = 1;
  OmegaMode omega = OmegaMode::random;
  AttackTarget attack = AttackTarget::global_best;

  /// Same bounds on every coordinate.
  static ZoaConfig box(std::size_t dimension, double lo, double hi);
  void set_box(std::size_t dimension, double lo, double hi);

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct Candidate {
  std::vector<double> position;
  double fitness = 0.0;
};

// Single-coordinate move rules, before clamping.
double forage_step(double x, double best, double r, double omega);
double defense_perturb(double x, double r, std::size_t iter, std::size_t max_iterations, double R);
double defense_attack(double x, double az, double r, double omega);

/// Foraging move toward `best`; fitness of the result is left unevaluated.
Candidate forage_update(const Candidate& candidate, const Candidate& best, const ZoaConfig& config, Rng& rng);

/// Defense move at iteration `iter` (1-based). A fresh draw r <= 0.5 selects the
/// shrinking random perturbation, otherwise the move toward the attacked zebra `az`.
Candidate defense_update(const Candidate& candidate, const Candidate& az, std::size_t iter,
                         const ZoaConfig& config, Rng& rng);

using Objective = std::function<double(std::span<const double>)>;

struct ZoaResult {
  Candidate best;
  std::vector<double> trace;  // best fitness: initial population, then after each iteration
  std::size_t iterations = 0;
  bool converged_early = false;
  std::size_t evaluations = 0;
  std::vector<Candidate> population;
};

/// Maximizes `objective` over the config box. `seeds` are placed (clamped) at the
/// front of the initial population; the remainder is drawn uniformly.
ZoaResult optimize(const Objective& objective, const ZoaConfig& config,
                   std::span<const std::vector<double>> seeds = {});

}  // namespace crnoma
