#pragma once

#include <string>

namespace crnoma {

/// Power-split factors of one pair: δ_μ (strong) and δ_ν (weak).
struct PowerSplit {
  double strong = 0.0;
  double weak = 0.0;
};

/// Fixed split δ_ν = 0.75, δ_μ = 0.25.
PowerSplit fpa();

/// β-weighted split from the received SNRs x = p|g|² of the two members:
/// δ_μ = β1/(1+sqrt(1+x_μ)) + β2/(1+sqrt(1+x_ν)), δ_ν = 1 - δ_μ.
/// Throws ConfigError when β1 + β2 differs from 1 by more than 1e-9 or either lies outside [0, 1].
PowerSplit bpa(double beta1, double beta2, double x_strong, double x_weak);

/// A per-pair split rule applied from the pair's received SNRs.
struct DeltaRule {
  enum class Kind { bpa, fixed };

  Kind kind = Kind::bpa;
  double beta2 = 1.0;
  PowerSplit split{};

  static DeltaRule bpa_rule(double beta2) { return {Kind::bpa, beta2, {}}; }
  static DeltaRule fixed_rule(PowerSplit s) { return {Kind::fixed, 0.0, s}; }
  static DeltaRule fpa_rule() { return fixed_rule(fpa()); }

  PowerSplit apply(double x_strong, double x_weak) const;
  std::string describe() const;
};

}  // namespace crnoma
