#include "crnoma/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "crnoma/csv.hpp"
#include "crnoma/errors.hpp"

namespace crnoma {

double Scenario::effective_total_power() const {
  return total_power.value_or(static_cast<double>(n_pairs()) * cluster_power);
}

LinkModel Scenario::link() const {
  return LinkModel{snr_linear(*this), cluster_power, interference, c1_policy};
}

void Scenario::validate() const {
  if (n_users < 2) throw ConfigError("n_users", "must be at least 2");
  if (n_users % 2 != 0) throw ConfigError("n_users", "must be even so every meter can be paired");
  if (m_channels < n_users / 2) {
    throw ConfigError("m_channels", "must be at least n_users/2 (" + std::to_string(n_users / 2) + ")");
  }
  if (!(coverage_radius > 0.0) || !std::isfinite(coverage_radius)) {
    throw ConfigError("coverage_radius", "must be positive");
  }
  if (!(path_loss_exp >= 2.0) || !std::isfinite(path_loss_exp)) {
    throw ConfigError("path_loss_exp", "must be >= 2");
  }
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db", "must be finite");
  if (!(cluster_power > 0.0) || !std::isfinite(cluster_power)) {
    throw ConfigError("cluster_power", "must be positive");
  }
  if (total_power && !(*total_power > 0.0)) throw ConfigError("total_power", "must be positive");
  if (!(availability_prob >= 0.0 && availability_prob <= 1.0)) {
    throw ConfigError("availability_prob", "must lie in [0, 1]");
  }
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw ConfigError("beta2", "must lie in [0, 1]");
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = {
      "n_users",      "m_channels", "coverage_radius", "path_loss_exp",     "snr_db",
      "cluster_power", "total_power", "availability_prob", "rng_seed",      "beta2",
      "beta1",        "sic_interference", "c1_policy"};
  return keys;
}

Scenario scenario_from_config(const KeyValueConfig& cfg, Scenario s) {
  auto count = [&](const char* key, std::size_t& field) {
    if (const auto v = cfg.get_int(key)) {
      if (*v < 0) throw ConfigError(key, "must be non-negative");
      field = static_cast<std::size_t>(*v);
    }
  };
  count("n_users", s.n_users);
  count("m_channels", s.m_channels);
  if (const auto v = cfg.get_double("coverage_radius")) s.coverage_radius = *v;
  if (const auto v = cfg.get_double("path_loss_exp")) s.path_loss_exp = *v;
  if (const auto v = cfg.get_double("snr_db")) s.snr_db = *v;
  if (const auto v = cfg.get_double("cluster_power")) s.cluster_power = *v;
  if (const auto v = cfg.get_double("total_power")) s.total_power = *v;
  if (const auto v = cfg.get_double("availability_prob")) s.availability_prob = *v;
  if (const auto v = cfg.get_uint("rng_seed")) s.rng_seed = *v;
  if (const auto v = cfg.get_double("beta2")) s.beta2 = *v;
  if (const auto v = cfg.get_double("beta1")) {
    if (cfg.has("beta2") && std::abs(*v + s.beta2 - 1.0) > 1e-9) {
      throw ConfigError("beta1", "beta1 + beta2 must equal 1");
    }
    s.beta2 = 1.0 - *v;
  }
  if (const auto v = cfg.get("sic_interference")) s.interference = parse_sic_interference(*v);
  if (const auto v = cfg.get("c1_policy")) s.c1_policy = parse_c1_policy(*v);
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const auto cfg = KeyValueConfig::load(path);
  if (const auto unknown = cfg.unknown_keys(scenario_keys()); !unknown.empty()) {
    throw ConfigError(unknown.front(), "unknown scenario key");
  }
  return scenario_from_config(cfg);
}

AvailabilityMatrix::AvailabilityMatrix(std::size_t n_users, std::size_t m_channels,
                                       std::vector<std::uint8_t> entries)
    : n_users_(n_users), m_channels_(m_channels), entries_(std::move(entries)) {
  if (entries_.size() != n_users_ * m_channels_) {
    throw ConfigError("availability", "entry count does not match N x M");
  }
}

AvailabilityMatrix AvailabilityMatrix::all_available(std::size_t n_users, std::size_t m_channels) {
  return AvailabilityMatrix(n_users, m_channels, std::vector<std::uint8_t>(n_users * m_channels, 1));
}

std::size_t AvailabilityMatrix::available_count(std::size_t user) const {
  const auto row = entries_.begin() + static_cast<std::ptrdiff_t>(user * m_channels_);
  return static_cast<std::size_t>(std::count(row, row + static_cast<std::ptrdiff_t>(m_channels_), 1));
}

double AvailabilityMatrix::fraction_available() const {
  if (entries_.empty()) return 0.0;
  return static_cast<double>(std::count(entries_.begin(), entries_.end(), 1)) /
         static_cast<double>(entries_.size());
}

double snr_linear(const Scenario& scenario) { return std::pow(10.0, scenario.snr_db / 10.0); }

double channel_gain(double fading_power, double distance, double path_loss_exp) {
  return fading_power * std::pow(distance, -path_loss_exp);
}

Topology make_topology(std::vector<Point> positions, std::vector<double> fading_power, const Scenario& scenario) {
  if (positions.size() != fading_power.size()) {
    throw ConfigError("topology", "positions and fading draws differ in length");
  }
  const double floor = std::min(1.0, scenario.coverage_radius);
  Topology t;
  t.distances.reserve(positions.size());
  t.gains.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double d = std::max(std::hypot(positions[i].x, positions[i].y), floor);
    t.distances.push_back(d);
    t.gains.push_back(channel_gain(fading_power[i], d, scenario.path_loss_exp));
  }
  t.positions = std::move(positions);
  t.fading_power = std::move(fading_power);
  return t;
}

Topology generate_topology(const Scenario& scenario, Rng& positions, Rng& fading) {
  scenario.validate();
  std::vector<Point> pts;
  std::vector<double> h2;
  pts.reserve(scenario.n_users);
  h2.reserve(scenario.n_users);
  for (std::size_t i = 0; i < scenario.n_users; ++i) {
    // Radius from sqrt(u) makes the density uniform over the disc area.
    const double r = scenario.coverage_radius * std::sqrt(positions.uniform());
    const double theta = 2.0 * std::numbers::pi * positions.uniform();
    pts.push_back({r * std::cos(theta), r * std::sin(theta)});
    h2.push_back(fading.exponential());
  }
  return make_topology(std::move(pts), std::move(h2), scenario);
}

Topology generate_topology(const Scenario& scenario, std::uint64_t seed) {
  Rng positions(derive_seed(seed, streams::positions));
  Rng fading(derive_seed(seed, streams::fading));
  return generate_topology(scenario, positions, fading);
}

AvailabilityMatrix generate_availability(const Scenario& scenario, Rng& rng, std::size_t max_retries) {
  const double q = scenario.availability_prob;
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("availability_prob", "must lie in [0, 1]");
  const std::size_t n = scenario.n_users;
  const std::size_t m = scenario.m_channels;
  std::size_t starved = 0;
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    std::vector<std::uint8_t> entries(n * m);
    for (auto& e : entries) e = rng.uniform() < q ? 1 : 0;
    AvailabilityMatrix avail(n, m, std::move(entries));
    bool ok = true;
    for (std::size_t u = 0; u < n; ++u) {
      if (avail.available_count(u) == 0) {
        starved = u;
        ok = false;
        break;
      }
    }
    if (ok) return avail;
  }
  throw InfeasibleError("infeasible scenario: user " + std::to_string(starved) +
                        " has no available channel after " + std::to_string(max_retries) + " redraws");
}

AvailabilityMatrix generate_availability(const Scenario& scenario, std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::availability));
  return generate_availability(scenario, rng);
}

void write_topology_csv(std::ostream& out, const Topology& topology, const AvailabilityMatrix& avail) {
  std::vector<std::string> header = {"user", "x", "y", "distance", "fading_power", "gain"};
  for (std::size_t m = 0; m < avail.m_channels(); ++m) header.push_back("ch" + std::to_string(m));
  csv::write_row(out, header);
  for (std::size_t u = 0; u < topology.size(); ++u) {
    std::vector<std::string> row = {std::to_string(u),
                                    csv::format_exact(topology.positions[u].x),
                                    csv::format_exact(topology.positions[u].y),
                                    csv::format_exact(topology.distances[u]),
                                    csv::format_exact(topology.fading_power[u]),
                                    csv::format_exact(topology.gains[u])};
    for (std::size_t m = 0; m < avail.m_channels(); ++m) row.push_back(avail.at(u, m) ? "1" : "0");
    csv::write_row(out, row);
  }
}

}  // namespace crnoma
