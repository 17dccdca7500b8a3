#include "crnoma/power_alloc.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>

#include "crnoma/errors.hpp"
#include "crnoma/rng.hpp"

namespace crnoma {

PowerAllocation allocation_from_rule(const Pairing& pairing, const Topology& topology, const LinkModel& link,
                                     const DeltaRule& rule) {
  PowerAllocation a;
  a.pairs.reserve(pairing.pairs.size());
  for (const auto& pr : pairing.pairs) {
    const PowerSplit s = rule.apply(link.snr * topology.gains[pr.strong], link.snr * topology.gains[pr.weak]);
    a.pairs.push_back({s.strong, s.weak, link.cluster_power});
  }
  return a;
}

std::vector<PairEval> evaluate_allocation(const Pairing& pairing, const PowerAllocation& allocation,
                                          const Topology& topology, const LinkModel& link) {
  if (allocation.pairs.size() != pairing.pairs.size()) {
    throw ConfigError("allocation", "one power record per pair is required");
  }
  std::vector<PairEval> out;
  out.reserve(pairing.pairs.size());
  for (std::size_t j = 0; j < pairing.pairs.size(); ++j) {
    const auto& pr = pairing.pairs[j];
    const auto& pp = allocation.pairs[j];
    out.push_back(evaluate_pair(link, topology.gains[pr.strong], topology.gains[pr.weak], pp.delta_strong,
                                pp.delta_weak, pp.pair_power));
  }
  return out;
}

double allocation_ee(const Pairing& pairing, const PowerAllocation& allocation, const Topology& topology,
                     const Scenario& scenario) {
  const auto evals = evaluate_allocation(pairing, allocation, topology, scenario.link());
  return network_ee(evals, scenario.effective_total_power(), scenario.cluster_power);
}

std::vector<std::string> validate_allocation(const Pairing& pairing, const PowerAllocation& allocation,
                                             const Topology& topology, const Scenario& scenario) {
  std::vector<std::string> out;
  if (allocation.pairs.size() != pairing.pairs.size()) {
    out.push_back("allocation: " + std::to_string(allocation.pairs.size()) + " records for " +
                  std::to_string(pairing.pairs.size()) + " pairs");
    return out;
  }
  const auto evals = evaluate_allocation(pairing, allocation, topology, scenario.link());
  double total = 0.0;
  for (std::size_t j = 0; j < evals.size(); ++j) {
    const auto& pp = allocation.pairs[j];
    const std::string tag = "pair " + std::to_string(j);
    if (!qos_satisfied(evals[j])) out.push_back("C1: " + tag + " delivers less than its OMA rate to a member");
    const bool split_ok = pp.delta_strong >= 0.0 && pp.delta_weak >= 0.0 && pp.delta_strong <= 1.0 &&
                          pp.delta_weak <= 1.0 && pp.delta_strong + pp.delta_weak <= 1.0 + 1e-12;
    if (!split_ok) out.push_back("C2: " + tag + " split factors leave [0,1] or sum above 1");
    if (!(pp.pair_power > 0.0) || pp.pair_power > scenario.cluster_power * (1.0 + 1e-12)) {
      out.push_back("C2: " + tag + " power outside (0, cluster_power]");
    }
    total += pp.pair_power;
  }
  if (total > scenario.effective_total_power() * (1.0 + 1e-12)) {
    out.push_back("C3: pair budgets sum to more than the total power");
  }
  return out;
}

namespace {

struct ZouppaProblem {
  const Pairing& pairing;
  const Topology& topology;
  const LinkModel link;
  const ZouppaOptions& options;
  double cluster_power;
  double total_power;

  std::size_t pairs() const { return pairing.pairs.size(); }

  PowerAllocation decode(std::span<const double> x) const {
    PowerAllocation a;
    a.pairs.resize(pairs());
    for (std::size_t j = 0; j < pairs(); ++j) {
      const double ds = std::clamp(x[j], 0.0, 1.0);
      const double pj = options.optimize_power ? x[pairs() + j] * cluster_power : cluster_power;
      a.pairs[j] = {ds, 1.0 - ds, pj};
    }
    return a;
  }

  double fitness(std::span<const double> x) const {
    double ee = 0.0;
    double power = 0.0;
    std::size_t violations = 0;
    for (std::size_t j = 0; j < pairs(); ++j) {
      const auto& pr = pairing.pairs[j];
      const double ds = x[j];
      const double pj = options.optimize_power ? x[pairs() + j] * cluster_power : cluster_power;
      const PairEval e =
          evaluate_pair(link, topology.gains[pr.strong], topology.gains[pr.weak], ds, 1.0 - ds, pj);
      ee += e.pair_ee;
      power += pj;
      if (!qos_satisfied(e)) ++violations;
    }
    double penalty = options.penalty * static_cast<double>(violations);
    if (power > total_power * (1.0 + 1e-12)) penalty += options.penalty;
    return ee - penalty;
  }
};

}  // namespace

ZouppaResult zouppa(const Pairing& pairing, const Scenario& scenario, const Topology& topology,
                    const ZouppaOptions& options) {
  scenario.validate();
  const std::size_t J = pairing.pairs.size();
  if (J == 0) throw InfeasibleError("ZOUPPA needs at least one pair");
  const double total_power = scenario.effective_total_power();
  if (!options.optimize_power && static_cast<double>(J) * scenario.cluster_power > total_power * (1.0 + 1e-12)) {
    throw ConstraintViolation("C3", kWholeAllocation,
                              std::to_string(J) + " pairs at the cluster power need more than the total power");
  }
  const LinkModel link = scenario.link();
  ZouppaProblem problem{pairing, topology, link, options, scenario.cluster_power, total_power};

  ZoaConfig cfg = options.zoa;
  const std::size_t dim = options.optimize_power ? 2 * J : J;
  cfg.set_box(dim, 0.0, 1.0);
  if (options.optimize_power) {
    for (std::size_t j = J; j < dim; ++j) cfg.lower[j] = options.min_power_fraction;
  }

  std::vector<std::vector<double>> seeds;
  auto seed_from = [&](const DeltaRule& rule) {
    const PowerAllocation a = allocation_from_rule(pairing, topology, link, rule);
    std::vector<double> x(dim, 1.0);
    for (std::size_t j = 0; j < J; ++j) x[j] = a.pairs[j].delta_strong;
    if (options.optimize_power) {
      // Scale budgets down uniformly when the full cluster power would breach C3.
      const double share = std::min(1.0, total_power / (static_cast<double>(J) * scenario.cluster_power));
      for (std::size_t j = J; j < dim; ++j) x[j] = std::max(share, options.min_power_fraction);
    }
    return x;
  };
  std::optional<std::size_t> bpa_slot;
  if (options.seed_bpa) {
    bpa_slot = seeds.size();
    seeds.push_back(seed_from(DeltaRule::bpa_rule(scenario.beta2)));
  }
  if (options.seed_fpa) seeds.push_back(seed_from(DeltaRule::fpa_rule()));
  seeds.insert(seeds.end(), options.extra_seeds.begin(), options.extra_seeds.end());
  if (seeds.size() > cfg.population_size) seeds.resize(cfg.population_size);

  ZouppaResult res;
  if (bpa_slot) res.seeded_bpa_ee = problem.fitness(seeds[*bpa_slot]);
  res.run = optimize([&](std::span<const double> x) { return problem.fitness(x); }, cfg, seeds);
  res.allocation = problem.decode(res.run.best.position);
  res.evals = evaluate_allocation(pairing, res.allocation, topology, link);

  std::vector<std::size_t> broken;
  for (std::size_t j = 0; j < J; ++j) {
    if (!qos_satisfied(res.evals[j])) broken.push_back(j);
    if (res.evals[j].mode == PairMode::oma) ++res.fallback_pairs;
  }
  if (!broken.empty()) {
    std::string list;
    for (const std::size_t j : broken) list += (list.empty() ? "" : ",") + std::to_string(j);
    throw InfeasibleError("ZOUPPA found no C1-feasible split for pairs " + list);
  }
  res.ee = network_ee(res.evals, total_power, scenario.cluster_power);
  return res;
}

BcdResult bcd_optimize(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                       const BcdOptions& options) {
  if (options.rounds < 1) throw ConfigError("bcd_rounds", "must be at least 1");
  BcdResult best;
  ZoupOptions zo = options.zoup;
  ZouppaOptions po = options.zouppa;
  const std::uint64_t zoup_seed = zo.zoa.rng_seed;
  const std::uint64_t zouppa_seed = po.zoa.rng_seed;
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t round = 0; round < options.rounds; ++round) {
    zo.zoa.rng_seed = round == 0 ? zoup_seed : derive_seed(zoup_seed, round);
    po.zoa.rng_seed = round == 0 ? zouppa_seed : derive_seed(zouppa_seed, round);
    const ZoupResult up = zoup(scenario, topology, avail, zo);
    if (round == 0) best.zoup_ee = up.ee;

    po.extra_seeds = options.zouppa.extra_seeds;
    if (round > 0) {
      // Carry over the splits of pairs that survive into the new pairing.
      std::map<std::pair<std::size_t, std::size_t>, double> kept;
      for (std::size_t j = 0; j < best.pairing.pairs.size(); ++j) {
        kept[{best.pairing.pairs[j].strong, best.pairing.pairs[j].weak}] = best.allocation.pairs[j].delta_strong;
      }
      const PowerAllocation base =
          allocation_from_rule(up.pairing, topology, scenario.link(), DeltaRule::bpa_rule(scenario.beta2));
      std::vector<double> x(po.optimize_power ? 2 * up.pairing.pairs.size() : up.pairing.pairs.size(), 1.0);
      for (std::size_t j = 0; j < up.pairing.pairs.size(); ++j) {
        const auto it = kept.find({up.pairing.pairs[j].strong, up.pairing.pairs[j].weak});
        x[j] = it != kept.end() ? it->second : base.pairs[j].delta_strong;
      }
      po.extra_seeds.insert(po.extra_seeds.begin(), std::move(x));
    }
    const ZouppaResult pa = zouppa(up.pairing, scenario, topology, po);
    ++best.rounds_run;
    if (round == 0 || pa.ee > best.ee) {
      best.pairing = up.pairing;
      best.allocation = pa.allocation;
      best.ee = pa.ee;
    }
    best.ee_trace.push_back(best.ee);
    if (best.ee - previous <= options.epsilon) break;
    previous = best.ee;
    zo.extra_seeds = options.zoup.extra_seeds;
    zo.extra_seeds.insert(zo.extra_seeds.begin(), encode_pairing(best.pairing.pairs, topology.size()));
  }
  return best;
}

}  // namespace crnoma
