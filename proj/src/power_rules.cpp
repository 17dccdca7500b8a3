#include "crnoma/power_rules.hpp"

#include <cmath>

#include "crnoma/csv.hpp"
#include "crnoma/errors.hpp"

namespace crnoma {

PowerSplit fpa() { return {0.25, 0.75}; }

PowerSplit bpa(double beta1, double beta2, double x_strong, double x_weak) {
  if (!(beta1 >= 0.0 && beta1 <= 1.0)) throw ConfigError("beta1", "must lie in [0, 1]");
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw ConfigError("beta2", "must lie in [0, 1]");
  if (std::abs(beta1 + beta2 - 1.0) > 1e-9) throw ConfigError("beta1", "beta1 + beta2 must equal 1");
  const double strong = beta1 / (1.0 + std::sqrt(1.0 + x_strong)) + beta2 / (1.0 + std::sqrt(1.0 + x_weak));
  return {strong, 1.0 - strong};
}

PowerSplit DeltaRule::apply(double x_strong, double x_weak) const {
  if (kind == Kind::fixed) return split;
  return bpa(1.0 - beta2, beta2, x_strong, x_weak);
}

std::string DeltaRule::describe() const {
  if (kind == Kind::fixed) return "fixed(" + csv::format_sig6(split.strong) + "," + csv::format_sig6(split.weak) + ")";
  return "bpa(beta2=" + csv::format_sig6(beta2) + ")";
}

}  // namespace crnoma
