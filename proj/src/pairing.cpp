#include "crnoma/pairing.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <ostream>

#include "crnoma/csv.hpp"
#include "crnoma/errors.hpp"

namespace crnoma {

UserPair order_by_gain(std::size_t a, std::size_t b, std::span<const double> gains) {
  if (gains[a] > gains[b] || (gains[a] == gains[b] && a < b)) return {a, b};
  return {b, a};
}

ChannelSets::ChannelSets(const AvailabilityMatrix& avail)
    : m_channels_(avail.m_channels()), words_((avail.m_channels() + 63) / 64),
      bits_(avail.n_users() * words_, 0) {
  for (std::size_t u = 0; u < avail.n_users(); ++u) {
    for (std::size_t m = 0; m < m_channels_; ++m) {
      if (avail.at(u, m)) bits_[u * words_ + m / 64] |= std::uint64_t{1} << (m % 64);
    }
  }
}

bool ChannelSets::shared(std::size_t a, std::size_t b, std::size_t channel) const {
  const std::uint64_t bit = std::uint64_t{1} << (channel % 64);
  const std::size_t w = channel / 64;
  return (bits_[a * words_ + w] & bits_[b * words_ + w] & bit) != 0;
}

void ChannelSets::common_channels(std::size_t a, std::size_t b, std::vector<std::size_t>& out) const {
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t word = bits_[a * words_ + w] & bits_[b * words_ + w];
    while (word) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
}

PairingDecoder::PairingDecoder(const Topology& topology, const AvailabilityMatrix& avail)
    : gains_(topology.gains), sets_(avail), matcher_(topology.size() / 2, avail.m_channels()) {
  if (avail.n_users() != topology.size()) {
    throw ConfigError("availability", "matrix rows differ from the number of users");
  }
}

Pairing PairingDecoder::assign_channels(std::span<const std::pair<std::size_t, std::size_t>> tentative) {
  if (tentative.size() > matcher_.left_count()) matcher_ = BipartiteMatcher(tentative.size(), sets_.m_channels());
  matcher_.clear_edges();
  for (std::size_t j = 0; j < tentative.size(); ++j) {
    scratch_.clear();
    sets_.common_channels(tentative[j].first, tentative[j].second, scratch_);
    for (const std::size_t m : scratch_) matcher_.add_edge(j, m);
  }
  const auto& match = matcher_.solve({}, true);
  Pairing p;
  p.pairs.reserve(tentative.size());
  p.channel_of_pair.reserve(tentative.size());
  for (std::size_t j = 0; j < tentative.size(); ++j) {
    const auto [a, b] = tentative[j];
    if (match[j] == kUnmatched) {
      p.unpaired.push_back(a);
      p.unpaired.push_back(b);
    } else {
      p.pairs.push_back(order_by_gain(a, b, gains_));
      p.channel_of_pair.push_back(match[j]);
    }
  }
  std::sort(p.unpaired.begin(), p.unpaired.end());
  return p;
}

Pairing PairingDecoder::decode(std::span<const double> keys) {
  const std::size_t n = gains_.size();
  if (keys.size() != n) throw ConfigError("keys", "key vector length differs from the number of users");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] < keys[b] || (keys[a] == keys[b] && a < b);
  });
  std::vector<std::pair<std::size_t, std::size_t>> tentative;
  tentative.reserve(n / 2);
  for (std::size_t k = 0; k + 1 < n; k += 2) tentative.emplace_back(order_[k], order_[k + 1]);
  Pairing p = assign_channels(tentative);
  if (n % 2 == 1) {
    p.unpaired.push_back(order_[n - 1]);
    std::sort(p.unpaired.begin(), p.unpaired.end());
  }
  return p;
}

Pairing assign_channels(std::span<const std::pair<std::size_t, std::size_t>> tentative, const Topology& topology,
                        const AvailabilityMatrix& avail) {
  PairingDecoder decoder(topology, avail);
  return decoder.assign_channels(tentative);
}

Pairing decode_pairing(std::span<const double> keys, const Topology& topology, const AvailabilityMatrix& avail) {
  PairingDecoder decoder(topology, avail);
  return decoder.decode(keys);
}

std::vector<double> encode_pairing(std::span<const UserPair> pairs, std::size_t n_users) {
  const double n = static_cast<double>(n_users);
  std::vector<double> keys(n_users, 1.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    keys[pairs[k].strong] = (2.0 * static_cast<double>(k) + 0.5) / n;
    keys[pairs[k].weak] = (2.0 * static_cast<double>(k) + 1.5) / n;
  }
  return keys;
}

std::vector<std::size_t> users_by_gain(std::span<const double> gains) {
  std::vector<std::size_t> order(gains.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gains[a] > gains[b] || (gains[a] == gains[b] && a < b);
  });
  return order;
}

Pairing random_pairing(const Topology& topology, const AvailabilityMatrix& avail, Rng& rng, std::size_t max_retries) {
  PairingDecoder decoder(topology, avail);
  const std::size_t n = topology.size();
  std::vector<std::size_t> perm(n);
  std::vector<std::pair<std::size_t, std::size_t>> tentative;
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    tentative.clear();
    for (std::size_t k = 0; k + 1 < n; k += 2) tentative.emplace_back(perm[k], perm[k + 1]);
    Pairing p = decoder.assign_channels(tentative);
    if (p.feasible() && n % 2 == 0) return p;
  }
  throw InfeasibleError("random pairing found no channel-feasible matching in " + std::to_string(max_retries) +
                        " redraws");
}

Pairing adjacent_pairing(const Topology& topology, const AvailabilityMatrix& avail) {
  const auto order = users_by_gain(topology.gains);
  std::vector<std::pair<std::size_t, std::size_t>> tentative;
  for (std::size_t k = 0; k + 1 < order.size(); k += 2) tentative.emplace_back(order[k], order[k + 1]);
  return assign_channels(tentative, topology, avail);
}

Pairing upwo_pairing(const Topology& topology, const AvailabilityMatrix& avail) {
  const auto order = users_by_gain(topology.gains);
  const std::size_t half = order.size() / 2;
  std::vector<std::pair<std::size_t, std::size_t>> tentative;
  for (std::size_t k = 0; k < half; ++k) tentative.emplace_back(order[k], order[k + half]);
  return assign_channels(tentative, topology, avail);
}

std::vector<PairEval> evaluate_pairing(const Pairing& pairing, const Topology& topology, const LinkModel& link,
                                       const DeltaRule& rule) {
  std::vector<PairEval> out;
  out.reserve(pairing.pairs.size());
  for (const auto& pr : pairing.pairs) {
    const double gs = topology.gains[pr.strong];
    const double gw = topology.gains[pr.weak];
    const PowerSplit s = rule.apply(link.snr * gs, link.snr * gw);
    out.push_back(evaluate_pair(link, gs, gw, s.strong, s.weak));
  }
  return out;
}

double pairing_ee(const Pairing& pairing, const Topology& topology, const LinkModel& link, const DeltaRule& rule) {
  double ee = 0.0;
  for (const auto& e : evaluate_pairing(pairing, topology, link, rule)) ee += e.pair_ee;
  return ee;
}

OmaResult oma_baseline(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail) {
  const std::size_t n = topology.size();
  BipartiteMatcher matcher(n, avail.m_channels());
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t m = 0; m < avail.m_channels(); ++m) {
      if (avail.at(u, m)) matcher.add_edge(u, m);
    }
  }
  const auto order = users_by_gain(topology.gains);
  OmaResult res;
  res.channel_of_user = matcher.solve(order);
  res.served = matcher.matched_count();
  const double snr = snr_linear(scenario);
  for (std::size_t u = 0; u < n; ++u) {
    if (res.channel_of_user[u] != kUnmatched) res.total_rate += oma_rate(snr, topology.gains[u]);
  }
  res.ee = n == 0 ? 0.0 : res.total_rate / (static_cast<double>(n) * scenario.cluster_power);
  return res;
}

double zoup_fitness(const Pairing& pairing, const Topology& topology, const LinkModel& link, const DeltaRule& rule,
                    double penalty) {
  double fitness = 0.0;
  std::size_t violations = pairing.unpaired.size();
  for (const auto& e : evaluate_pairing(pairing, topology, link, rule)) {
    fitness += e.pair_ee;
    if (e.mode == PairMode::noma && !qos_satisfied(e)) ++violations;
  }
  return fitness - penalty * static_cast<double>(violations);
}

ZoupResult zoup(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                const ZoupOptions& options) {
  scenario.validate();
  const std::size_t n = topology.size();
  const LinkModel link = scenario.link();
  PairingDecoder decoder(topology, avail);

  ZoaConfig cfg = options.zoa;
  cfg.set_box(n, 0.0, 1.0);

  std::vector<std::vector<double>> seeds;
  if (options.seed_with_baselines) {
    for (const Pairing& p : {upwo_pairing(topology, avail), adjacent_pairing(topology, avail)}) {
      if (p.feasible()) seeds.push_back(encode_pairing(p.pairs, n));
    }
  }
  seeds.insert(seeds.end(), options.extra_seeds.begin(), options.extra_seeds.end());

  const Objective objective = [&](std::span<const double> keys) {
    return zoup_fitness(decoder.decode(keys), topology, link, options.rule, options.penalty);
  };
  ZoupResult res;
  res.run = optimize(objective, cfg, seeds);
  res.pairing = decoder.decode(res.run.best.position);
  res.ee = pairing_ee(res.pairing, topology, link, options.rule);
  if (!res.pairing.feasible() || res.run.best.fitness < res.ee - 0.5 * options.penalty) {
    throw InfeasibleError("ZOUP found no penalty-free pairing; " + std::to_string(res.pairing.unpaired.size()) +
                          " users left without a channel");
  }
  return res;
}

std::vector<std::string> validate_pairing(const Pairing& pairing, const Topology& topology,
                                          const AvailabilityMatrix& avail) {
  std::vector<std::string> out;
  const std::size_t n = topology.size();
  std::vector<int> seen(n, 0);
  std::vector<int> channel_used(avail.m_channels(), 0);
  if (pairing.channel_of_pair.size() != pairing.pairs.size()) {
    out.push_back("C5: channel list length differs from pair count");
  }
  for (std::size_t j = 0; j < pairing.pairs.size(); ++j) {
    const auto [s, w] = pairing.pairs[j];
    const std::string tag = "pair " + std::to_string(j);
    if (s >= n || w >= n || s == w) {
      out.push_back("C4: " + tag + " does not hold two distinct valid users");
      continue;
    }
    ++seen[s];
    ++seen[w];
    if (topology.gains[s] < topology.gains[w]) out.push_back("roles: " + tag + " has strong gain below weak gain");
    if (j < pairing.channel_of_pair.size()) {
      const std::size_t m = pairing.channel_of_pair[j];
      if (m >= avail.m_channels()) {
        out.push_back("C5: " + tag + " uses an out-of-range channel");
      } else {
        if (++channel_used[m] > 1) out.push_back("C5: channel " + std::to_string(m) + " serves more than one pair");
        if (!avail.at(s, m) || !avail.at(w, m)) {
          out.push_back("C5: channel " + std::to_string(m) + " not available to both members of " + tag);
        }
      }
    }
  }
  for (const std::size_t u : pairing.unpaired) {
    if (u < n) ++seen[u];
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (seen[u] != 1) out.push_back("C4: user " + std::to_string(u) + " appears " + std::to_string(seen[u]) + " times");
  }
  if (!pairing.unpaired.empty()) {
    out.push_back("C4: " + std::to_string(pairing.unpaired.size()) + " users are unpaired");
  }
  return out;
}

void write_pairing_csv(std::ostream& out, const Pairing& pairing, std::span<const PairEval> evals) {
  csv::write_row(out, {"pair", "strong", "weak", "channel", "delta_strong", "delta_weak", "mode", "pair_ee"});
  for (std::size_t j = 0; j < pairing.pairs.size(); ++j) {
    std::vector<std::string> row = {std::to_string(j), std::to_string(pairing.pairs[j].strong),
                                    std::to_string(pairing.pairs[j].weak), std::to_string(pairing.channel_of_pair[j])};
    if (j < evals.size()) {
      row.push_back(csv::format_sig6(evals[j].delta_strong));
      row.push_back(csv::format_sig6(evals[j].delta_weak));
      row.push_back(to_string(evals[j].mode));
      row.push_back(csv::format_sig6(evals[j].pair_ee));
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    csv::write_row(out, row);
  }
}

}  // namespace crnoma
