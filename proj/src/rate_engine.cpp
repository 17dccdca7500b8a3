#include "crnoma/rate_engine.hpp"

#include <algorithm>
#include <cmath>

#include "crnoma/errors.hpp"

namespace crnoma {

SicInterference parse_sic_interference(std::string_view text) {
  if (text == "weak_user" || text == "weak") return SicInterference::weak_user;
  if (text == "as_printed" || text == "strong") return SicInterference::as_printed;
  throw ConfigError("sic_interference", "expected weak_user or as_printed, got '" + std::string(text) + "'");
}

C1Policy parse_c1_policy(std::string_view text) {
  if (text == "oma_fallback" || text == "fallback") return C1Policy::oma_fallback;
  if (text == "penalty") return C1Policy::penalty;
  throw ConfigError("c1_policy", "expected oma_fallback or penalty, got '" + std::string(text) + "'");
}

std::string to_string(SicInterference v) { return v == SicInterference::weak_user ? "weak_user" : "as_printed"; }
std::string to_string(C1Policy v) { return v == C1Policy::oma_fallback ? "oma_fallback" : "penalty"; }
std::string to_string(PairMode v) { return v == PairMode::noma ? "noma" : "oma"; }

double oma_rate(double snr, double gain) { return 0.5 * std::log2(1.0 + snr * gain); }

double noma_weak_rate(double snr, double delta_weak, double gain_weak) {
  return std::log2(1.0 + delta_weak * snr * gain_weak);
}

double noma_strong_rate(double snr, double delta_strong, double delta_weak, double gain_strong) {
  return noma_strong_rate(snr, delta_strong, delta_weak, gain_strong, gain_strong);
}

double noma_strong_rate(double snr, double delta_strong, double delta_weak, double gain_strong,
                        double interference_gain) {
  return std::log2(1.0 + delta_strong * snr * gain_strong / (delta_weak * snr * interference_gain + 1.0));
}

namespace {

double resolve_power(const LinkModel& link, double pair_power) {
  return std::isnan(pair_power) ? link.cluster_power : pair_power;
}

}  // namespace

bool qos_satisfied(const PairEval& p) {
  return p.rate_strong >= p.oma_rate_strong - kRateTolerance * std::max(1.0, p.oma_rate_strong) &&
         p.rate_weak >= p.oma_rate_weak - kRateTolerance * std::max(1.0, p.oma_rate_weak);
}

PairEval evaluate_pair_oma(const LinkModel& link, double gain_strong, double gain_weak, double pair_power) {
  PairEval e;
  e.pair_power = resolve_power(link, pair_power);
  const double snr = link.snr * e.pair_power / link.cluster_power;
  e.oma_rate_strong = oma_rate(snr, gain_strong);
  e.oma_rate_weak = oma_rate(snr, gain_weak);
  e.rate_strong = e.oma_rate_strong;
  e.rate_weak = e.oma_rate_weak;
  e.mode = PairMode::oma;
  e.pair_ee = (e.rate_strong + e.rate_weak) / e.pair_power;
  return e;
}

PairEval evaluate_pair(const LinkModel& link, double gain_strong, double gain_weak, double delta_strong,
                       double delta_weak, double pair_power) {
  PairEval e;
  e.pair_power = resolve_power(link, pair_power);
  e.delta_strong = delta_strong;
  e.delta_weak = delta_weak;
  const double snr = link.snr * e.pair_power / link.cluster_power;
  const double interference_gain = link.interference == SicInterference::weak_user ? gain_weak : gain_strong;
  e.rate_strong = noma_strong_rate(snr, delta_strong, delta_weak, gain_strong, interference_gain);
  e.rate_weak = noma_weak_rate(snr, delta_weak, gain_weak);
  e.oma_rate_strong = oma_rate(snr, gain_strong);
  e.oma_rate_weak = oma_rate(snr, gain_weak);
  e.noma_c1_ok = qos_satisfied(e);
  if (!e.noma_c1_ok && link.c1 == C1Policy::oma_fallback) {
    e.rate_strong = e.oma_rate_strong;
    e.rate_weak = e.oma_rate_weak;
    e.mode = PairMode::oma;
  }
  e.pair_ee = (e.rate_strong + e.rate_weak) / e.pair_power;
  return e;
}

double network_ee(std::span<const PairEval> pairs, double total_power, double cluster_power) {
  constexpr double tol = 1e-12;
  double power = 0.0;
  double ee = 0.0;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& p = pairs[j];
    const bool split_ok = p.delta_strong >= -tol && p.delta_weak >= -tol &&
                          p.delta_strong + p.delta_weak <= 1.0 + tol;
    if (!split_ok || !(p.pair_power > 0.0) || p.pair_power > cluster_power * (1.0 + tol)) {
      throw ConstraintViolation("C2", j,
                                "pair " + std::to_string(j) + " exceeds its power budget");
    }
    power += p.pair_power;
    ee += (p.rate_strong + p.rate_weak) / p.pair_power;
  }
  if (power > total_power * (1.0 + tol)) {
    throw ConstraintViolation("C3", kWholeAllocation, "sum of pair budgets exceeds the total power");
  }
  return ee;
}

}  // namespace crnoma
