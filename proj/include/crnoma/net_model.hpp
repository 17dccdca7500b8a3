#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crnoma/config.hpp"
#include "crnoma/rate_engine.hpp"
#include "crnoma/rng.hpp"

namespace crnoma {

/// Experiment parameters for one smart-meter neighbourhood network.
///
/// Defaults reproduce the reference simulation table: 100 meters, 60 CR
/// channels, 100 m coverage, path-loss exponent 2, 30 dB SNR, 1 W per cluster.
struct Scenario {
  std::size_t n_users = 100;
  std::size_t m_channels = 60;
  double coverage_radius = 100.0;  // m
  double path_loss_exp = 2.0;
  double snr_db = 30.0;            // p / sigma^2 with p = cluster_power
  double cluster_power = 1.0;      // W, per-pair budget P_j
  std::optional<double> total_power;  // W; unset means n_users/2 * cluster_power
  double availability_prob = 0.5;
  std::uint64_t rng_seed = 1;
  double beta2 = 1.0;              // beta1 = 1 - beta2

  SicInterference interference = SicInterference::weak_user;
  C1Policy c1_policy = C1Policy::oma_fallback;

  std::size_t n_pairs() const { return n_users / 2; }
  double beta1() const { return 1.0 - beta2; }
  double effective_total_power() const;
  LinkModel link() const;

  /// Throws ConfigError naming the first parameter that breaks an invariant.
  void validate() const;
};

/// Config keys understood by scenario_from_config.
const std::vector<std::string>& scenario_keys();

/// Applies recognised keys from `cfg` on top of `base` and validates.
Scenario scenario_from_config(const KeyValueConfig& cfg, Scenario base = {});

Scenario load_scenario(const std::filesystem::path& path);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Node placement and channel gains; the data collector sits at the origin.
struct Topology {
  std::vector<Point> positions;
  std::vector<double> distances;     // m, clamped below at min(1 m, R_C)
  std::vector<double> fading_power;  // |h|^2, unit-mean exponential
  std::vector<double> gains;         // |g|^2 = |h|^2 * d^-chi

  std::size_t size() const { return gains.size(); }
};

/// Channel availability Γ: entry (n, m) is true when channel m is free for user n.
class AvailabilityMatrix {
 public:
  AvailabilityMatrix() = default;
  AvailabilityMatrix(std::size_t n_users, std::size_t m_channels, std::vector<std::uint8_t> entries);

  static AvailabilityMatrix all_available(std::size_t n_users, std::size_t m_channels);

  std::size_t n_users() const { return n_users_; }
  std::size_t m_channels() const { return m_channels_; }
  bool at(std::size_t user, std::size_t channel) const { return entries_[user * m_channels_ + channel] != 0; }
  std::size_t available_count(std::size_t user) const;
  double fraction_available() const;

  bool operator==(const AvailabilityMatrix&) const = default;

 private:
  std::size_t n_users_ = 0;
  std::size_t m_channels_ = 0;
  std::vector<std::uint8_t> entries_;
};

double snr_linear(const Scenario& scenario);

/// |g|^2 for a given fading draw, distance and exponent.
double channel_gain(double fading_power, double distance, double path_loss_exp);

/// Places meters uniformly over the disc of radius R_C and draws Rayleigh fading.
/// Positions and fading use separate sub-streams of `seed`, so the first k users
/// of an (n+1)-user topology equal those of an n-user one.
Topology generate_topology(const Scenario& scenario, std::uint64_t seed);
Topology generate_topology(const Scenario& scenario, Rng& positions, Rng& fading);

/// Recomputes gains from positions/fading (used after editing a topology by hand).
Topology make_topology(std::vector<Point> positions, std::vector<double> fading_power, const Scenario& scenario);

inline constexpr std::size_t kAvailabilityRetries = 1000;

/// I.i.d. Bernoulli(q) availability, redrawn while any user has no channel.
/// Throws InfeasibleError naming the starved user after `max_retries` redraws.
AvailabilityMatrix generate_availability(const Scenario& scenario, Rng& rng,
                                         std::size_t max_retries = kAvailabilityRetries);
AvailabilityMatrix generate_availability(const Scenario& scenario, std::uint64_t seed);

/// One row per user: position, distance, fading, gain, then one 0/1 column per channel.
void write_topology_csv(std::ostream& out, const Topology& topology, const AvailabilityMatrix& avail);

}  // namespace crnoma
