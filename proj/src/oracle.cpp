#include "crnoma/oracle.hpp"

#include <cmath>
#include <functional>

#include "crnoma/errors.hpp"

namespace crnoma {

OracleResult exhaustive_pairing(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                                const DeltaRule& rule) {
  const std::size_t n = topology.size();
  if (n > kOracleMaxUsers) throw ConfigError("n_users", "oracle enumeration is limited to 8 users");
  if (avail.m_channels() > kOracleMaxChannels) throw ConfigError("m_channels", "oracle enumeration is limited to 6 channels");
  if (n % 2 != 0 || n == 0) throw ConfigError("n_users", "must be even and positive");
  const LinkModel link = scenario.link();
  const ChannelSets sets(avail);
  const std::size_t J = n / 2;

  OracleResult res;
  std::vector<UserPair> pairs;
  std::vector<bool> used(n, false);
  std::vector<std::size_t> channels(J);
  std::vector<bool> channel_taken(avail.m_channels(), false);

  auto score_pairing = [&]() {
    ++res.pairings_count;
    Pairing p;
    p.pairs = pairs;
    p.channel_of_pair.assign(J, 0);
    const double ee = pairing_ee(p, topology, link, rule);
    std::optional<std::vector<std::size_t>> first_map;
    std::function<void(std::size_t)> assign = [&](std::size_t j) {
      if (j == J) {
        ++res.enumerated_count;
        if (!first_map) first_map = channels;
        return;
      }
      for (std::size_t m = 0; m < avail.m_channels(); ++m) {
        if (channel_taken[m] || !sets.shared(pairs[j].strong, pairs[j].weak, m)) continue;
        channel_taken[m] = true;
        channels[j] = m;
        assign(j + 1);
        channel_taken[m] = false;
      }
    };
    assign(0);
    if (first_map && (!res.feasible || ee > res.best_ee)) {
      res.feasible = true;
      res.best_ee = ee;
      p.channel_of_pair = *first_map;
      res.best_delta.clear();
      for (const auto& e : evaluate_pairing(p, topology, link, rule)) res.best_delta.push_back(e.delta_strong);
      res.best_pairing = std::move(p);
    }
  };

  std::function<void()> enumerate = [&]() {
    std::size_t first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
      score_pairing();
      return;
    }
    used[first] = true;
    for (std::size_t other = first + 1; other < n; ++other) {
      if (used[other]) continue;
      used[other] = true;
      pairs.push_back(order_by_gain(first, other, topology.gains));
      enumerate();
      pairs.pop_back();
      used[other] = false;
    }
    used[first] = false;
  };
  enumerate();
  return res;
}

std::optional<GridResult> grid_delta_search(double gain_strong, double gain_weak, const LinkModel& link, double step) {
  if (!(step > 0.0 && step <= 0.01)) throw ConfigError("grid_step", "must lie in (0, 0.01]");
  LinkModel raw = link;
  raw.c1 = C1Policy::penalty;
  const auto intervals = static_cast<std::size_t>(std::llround(1.0 / step));
  std::optional<GridResult> best;
  std::size_t feasible = 0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double ds = i == intervals ? 1.0 : static_cast<double>(i) * step;
    const PairEval e = evaluate_pair(raw, gain_strong, gain_weak, ds, 1.0 - ds);
    if (!qos_satisfied(e)) continue;
    ++feasible;
    if (!best || e.pair_ee > best->ee) best = GridResult{ds, e.pair_ee, 0, 0};
  }
  if (best) {
    best->points = intervals + 1;
    best->feasible_points = feasible;
  }
  return best;
}

}  // namespace crnoma
