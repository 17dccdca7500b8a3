#include "crnoma/zoa.hpp"

#include <algorithm>
#include <cmath>

#include "crnoma/errors.hpp"

namespace crnoma {

OmegaMode parse_omega_mode(std::string_view text) {
  if (text == "random") return OmegaMode::random;
  if (text == "1" || text == "fixed_one") return OmegaMode::fixed_one;
  if (text == "2" || text == "fixed_two") return OmegaMode::fixed_two;
  throw ConfigError("zoa_omega", "expected random, 1 or 2, got '" + std::string(text) + "'");
}

AttackTarget parse_attack_target(std::string_view text) {
  if (text == "best" || text == "global_best") return AttackTarget::global_best;
  if (text == "random" || text == "random_member") return AttackTarget::random_member;
  throw ConfigError("zoa_attack", "expected best or random, got '" + std::string(text) + "'");
}

ZoaConfig ZoaConfig::box(std::size_t dimension, double lo, double hi) {
  ZoaConfig c;
  c.set_box(dimension, lo, hi);
  return c;
}

void ZoaConfig::set_box(std::size_t dim, double lo, double hi) {
  dimension = dim;
  lower.assign(dim, lo);
  upper.assign(dim, hi);
}

void ZoaConfig::validate() const {
  if (population_size < 2) throw ConfigError("population_size", "must be at least 2");
  if (max_iterations < 1) throw ConfigError("max_iterations", "must be at least 1");
  if (dimension < 1) throw ConfigError("dimension", "must be at least 1");
  if (lower.size() != dimension || upper.size() != dimension) {
    throw ConfigError("bounds", "need one lower and one upper bound per dimension");
  }
  for (std::size_t d = 0; d < dimension; ++d) {
    if (!(lower[d] < upper[d])) throw ConfigError("bounds", "lower must be below upper in dimension " + std::to_string(d));
  }
  if (!(defense_R > 0.0)) throw ConfigError("defense_R", "must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
}

double forage_step(double x, double best, double r, double omega) { return x + r * (best - omega * x); }

double defense_perturb(double x, double r, std::size_t iter, std::size_t max_iterations, double R) {
  const double progress = static_cast<double>(iter) / static_cast<double>(max_iterations);
  return x + R * (2.0 * r - 1.0) * (1.0 - progress) * x;
}

double defense_attack(double x, double az, double r, double omega) { return x + r * (az - omega * x); }

namespace {

double draw_omega(OmegaMode mode, Rng& rng) {
  switch (mode) {
    case OmegaMode::fixed_one: return 1.0;
    case OmegaMode::fixed_two: return 2.0;
    case OmegaMode::random: break;
  }
  return rng.coin() ? 2.0 : 1.0;
}

double clamp_to(const ZoaConfig& c, std::size_t d, double v) { return std::clamp(v, c.lower[d], c.upper[d]); }

}  // namespace

Candidate forage_update(const Candidate& candidate, const Candidate& best, const ZoaConfig& config, Rng& rng) {
  Candidate out;
  out.position.resize(candidate.position.size());
  for (std::size_t d = 0; d < candidate.position.size(); ++d) {
    const double r = rng.uniform();
    const double omega = draw_omega(config.omega, rng);
    out.position[d] = clamp_to(config, d, forage_step(candidate.position[d], best.position[d], r, omega));
  }
  return out;
}

Candidate defense_update(const Candidate& candidate, const Candidate& az, std::size_t iter,
                         const ZoaConfig& config, Rng& rng) {
  Candidate out;
  out.position.resize(candidate.position.size());
  const bool perturb = rng.uniform() <= 0.5;
  for (std::size_t d = 0; d < candidate.position.size(); ++d) {
    const double x = candidate.position[d];
    const double r = rng.uniform();
    const double v = perturb ? defense_perturb(x, r, iter, config.max_iterations, config.defense_R)
                             : defense_attack(x, az.position[d], r, draw_omega(config.omega, rng));
    out.position[d] = clamp_to(config, d, v);
  }
  return out;
}

ZoaResult optimize(const Objective& objective, const ZoaConfig& config, std::span<const std::vector<double>> seeds) {
  config.validate();
  Rng rng(config.rng_seed);
  ZoaResult res;
  auto evaluate = [&](Candidate& c) {
    c.fitness = objective(c.position);
    ++res.evaluations;
  };

  std::vector<Candidate> pop(config.population_size);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto& pos = pop[i].position;
    pos.resize(config.dimension);
    if (i < seeds.size()) {
      if (seeds[i].size() != config.dimension) throw ConfigError("seeds", "seed length differs from dimension");
      for (std::size_t d = 0; d < config.dimension; ++d) pos[d] = clamp_to(config, d, seeds[i][d]);
    } else {
      for (std::size_t d = 0; d < config.dimension; ++d) pos[d] = rng.uniform(config.lower[d], config.upper[d]);
    }
    evaluate(pop[i]);
  }

  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].fitness > pop[best_idx].fitness) best_idx = i;
  }
  Candidate best = pop[best_idx];
  res.trace.push_back(best.fitness);

  auto accept = [&](std::size_t i, Candidate&& moved) {
    evaluate(moved);
    if (moved.fitness > pop[i].fitness) {
      pop[i] = std::move(moved);
      if (pop[i].fitness > best.fitness) best = pop[i];
    }
  };

  std::size_t stalled = 0;
  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    const double before = best.fitness;
    for (std::size_t i = 0; i < pop.size(); ++i) accept(i, forage_update(pop[i], best, config, rng));
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const Candidate& az =
          config.attack == AttackTarget::global_best ? best : pop[static_cast<std::size_t>(rng.below(pop.size()))];
      accept(i, defense_update(pop[i], az, t, config, rng));
    }
    res.trace.push_back(best.fitness);
    res.iterations = t;
    if (config.stall_limit > 0) {
      stalled = (best.fitness - before <= config.epsilon) ? stalled + 1 : 0;
      if (stalled >= config.stall_limit) {
        res.converged_early = t < config.max_iterations;
        break;
      }
    }
  }
  res.best = std::move(best);
  res.population = std::move(pop);
  return res;
}

}  // namespace crnoma
