#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace crnoma {

/// Which channel gain scales the residual interference in the strong user's rate.
///
/// `weak_user`: the strong user is decoded while the weak user's signal is still
/// present, so the interference is δ_ν·snr·|g_ν|².
/// `as_printed`: interference δ_ν·snr·|g_μ|², using the strong user's own gain.
enum class SicInterference { weak_user, as_printed };

/// What a pair does when its power split fails the per-user NOMA >= OMA check.
///
/// `oma_fallback`: the pair time-shares its channel and each member gets its OMA rate.
/// `penalty`: the NOMA rates stand; optimizers are expected to penalize the pair.
enum class C1Policy { oma_fallback, penalty };

enum class PairMode { noma, oma };

SicInterference parse_sic_interference(std::string_view text);
C1Policy parse_c1_policy(std::string_view text);
std::string to_string(SicInterference v);
std::string to_string(C1Policy v);
std::string to_string(PairMode v);

/// Shared link parameters: snr is p/σ² (linear) with p = cluster_power.
struct LinkModel {
  double snr = 1000.0;
  double cluster_power = 1.0;
  SicInterference interference = SicInterference::weak_user;
  C1Policy c1 = C1Policy::oma_fallback;
};

struct PairEval {
  double rate_strong = 0.0;       // bits/s/Hz actually delivered
  double rate_weak = 0.0;
  double oma_rate_strong = 0.0;   // QoS reference for each member
  double oma_rate_weak = 0.0;
  double pair_power = 0.0;        // W
  double pair_ee = 0.0;           // (rate_strong + rate_weak) / pair_power
  double delta_strong = 0.0;
  double delta_weak = 0.0;
  PairMode mode = PairMode::noma;
  bool noma_c1_ok = true;         // whether the requested split met the QoS check
};

double oma_rate(double snr, double gain);
double noma_weak_rate(double snr, double delta_weak, double gain_weak);

/// Strong-user rate with interference scaled by the strong user's own gain.
double noma_strong_rate(double snr, double delta_strong, double delta_weak, double gain_strong);

/// Strong-user rate with an explicit interference gain.
double noma_strong_rate(double snr, double delta_strong, double delta_weak, double gain_strong,
                        double interference_gain);

/// Rate/QoS record for one pair at transmit budget `pair_power` (defaults to the cluster power).
/// The effective SNR is scaled by pair_power / cluster_power.
PairEval evaluate_pair(const LinkModel& link, double gain_strong, double gain_weak, double delta_strong,
                       double delta_weak, double pair_power = std::numeric_limits<double>::quiet_NaN());

/// Pair evaluated in OMA mode: each member at its own OMA rate.
PairEval evaluate_pair_oma(const LinkModel& link, double gain_strong, double gain_weak,
                           double pair_power = std::numeric_limits<double>::quiet_NaN());

inline constexpr double kRateTolerance = 1e-12;

/// Per-user check: both NOMA rates reach their OMA references.
bool qos_satisfied(const PairEval& pair);

/// Sum of per-pair EE. Throws ConstraintViolation ("C2" with the pair index, or
/// "C3" for the whole list) when a split overspends its pair budget or the pair
/// budgets exceed `total_power`.
double network_ee(std::span<const PairEval> pairs,
                  double total_power = std::numeric_limits<double>::infinity(),
                  double cluster_power = std::numeric_limits<double>::infinity());

}  // namespace crnoma
