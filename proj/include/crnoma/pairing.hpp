#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "crnoma/matching.hpp"
#include "crnoma/net_model.hpp"
#include "crnoma/power_rules.hpp"
#include "crnoma/rate_engine.hpp"
#include "crnoma/rng.hpp"
#include "crnoma/zoa.hpp"

namespace crnoma {

struct UserPair {
  std::size_t strong = 0;
  std::size_t weak = 0;

  bool operator==(const UserPair&) const = default;
};

/// Users grouped into NOMA clusters of two, each cluster on its own CR channel.
struct Pairing {
  std::vector<UserPair> pairs;
  std::vector<std::size_t> channel_of_pair;
  std::vector<std::size_t> unpaired;

  bool feasible() const { return unpaired.empty(); }
  bool operator==(const Pairing&) const = default;
};

/// Orders two users by gain: the larger gain is the strong member, ties go to the lower index.
UserPair order_by_gain(std::size_t a, std::size_t b, std::span<const double> gains);

/// Per-user channel sets packed as bit words, for fast pair-channel edge tests.
class ChannelSets {
 public:
  explicit ChannelSets(const AvailabilityMatrix& avail);

  bool shared(std::size_t a, std::size_t b, std::size_t channel) const;
  /// Appends every channel available to both users, ascending.
  void common_channels(std::size_t a, std::size_t b, std::vector<std::size_t>& out) const;
  std::size_t m_channels() const { return m_channels_; }

 private:
  std::size_t m_channels_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Turns tentative pairs into a Pairing: channels come from a maximum matching
/// between pairs and commonly available channels; pairs left without a channel
/// are dissolved into `unpaired`.
class PairingDecoder {
 public:
  PairingDecoder(const Topology& topology, const AvailabilityMatrix& avail);

  Pairing assign_channels(std::span<const std::pair<std::size_t, std::size_t>> tentative);

  /// Random-key decoding: users sorted by key (ties by index), consecutive users paired.
  Pairing decode(std::span<const double> keys);

  std::size_t n_users() const { return gains_.size(); }

 private:
  std::span<const double> gains_;
  ChannelSets sets_;
  BipartiteMatcher matcher_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> scratch_;
};

Pairing assign_channels(std::span<const std::pair<std::size_t, std::size_t>> tentative, const Topology& topology,
                        const AvailabilityMatrix& avail);

Pairing decode_pairing(std::span<const double> keys, const Topology& topology, const AvailabilityMatrix& avail);

/// Keys that decode back to `pairs` (in that order, strong member first); unlisted users sort last.
std::vector<double> encode_pairing(std::span<const UserPair> pairs, std::size_t n_users);

inline constexpr std::size_t kPairingRetries = 1000;

/// Uniform random perfect matching of users, redrawn until every pair gets a channel.
/// Throws InfeasibleError after `max_retries` failed draws.
Pairing random_pairing(const Topology& topology, const AvailabilityMatrix& avail, Rng& rng,
                       std::size_t max_retries = kPairingRetries);

/// Users by descending gain, paired 1st-2nd, 3rd-4th, ...
Pairing adjacent_pairing(const Topology& topology, const AvailabilityMatrix& avail);

/// Users by descending gain split into halves; k-th of the strong half with k-th of the weak half.
Pairing upwo_pairing(const Topology& topology, const AvailabilityMatrix& avail);

/// Users sorted by descending gain (ties by index).
std::vector<std::size_t> users_by_gain(std::span<const double> gains);

/// Rates of every pair under a split rule, with P_j = cluster power.
std::vector<PairEval> evaluate_pairing(const Pairing& pairing, const Topology& topology, const LinkModel& link,
                                       const DeltaRule& rule);

/// Σ pair EE of the channel-holding pairs (unpaired users contribute nothing).
double pairing_ee(const Pairing& pairing, const Topology& topology, const LinkModel& link, const DeltaRule& rule);

struct OmaResult {
  double ee = 0.0;
  double total_rate = 0.0;
  std::size_t served = 0;
  std::vector<std::size_t> channel_of_user;  // kUnmatched when not served
};

/// One user per channel at the cluster power. Channels go to users by maximum
/// matching with priority to stronger users. EE is the served rate over the power
/// of all N deployed meters, so unserved meters dilute it.
OmaResult oma_baseline(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail);

struct ZoupOptions {
  ZoaConfig zoa;                 // dimension and bounds are set by zoup()
  DeltaRule rule = DeltaRule::bpa_rule(1.0);
  double penalty = 1e6;
  bool seed_with_baselines = true;  // UPWO and adjacent pairings start in the population
  std::vector<std::vector<double>> extra_seeds;  // key vectors placed after the baselines
};

struct ZoupResult {
  Pairing pairing;
  double ee = 0.0;
  ZoaResult run;
};

/// Penalized ZOUP fitness of a decoded pairing.
double zoup_fitness(const Pairing& pairing, const Topology& topology, const LinkModel& link, const DeltaRule& rule,
                    double penalty);

/// Optimizes the pairing with ZOA over random keys. Throws InfeasibleError when the
/// best candidate still carries a penalty.
ZoupResult zoup(const Scenario& scenario, const Topology& topology, const AvailabilityMatrix& avail,
                const ZoupOptions& options);

/// Structural checks: every user in exactly one pair, distinct injective channels
/// available to both members, strong gain >= weak gain. Returns one message per violation.
std::vector<std::string> validate_pairing(const Pairing& pairing, const Topology& topology,
                                          const AvailabilityMatrix& avail);

/// pair, strong, weak, channel, delta_strong, delta_weak, mode, pair_ee
void write_pairing_csv(std::ostream& out, const Pairing& pairing, std::span<const PairEval> evals);

}  // namespace crnoma
