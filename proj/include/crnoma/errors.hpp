#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crnoma {

inline constexpr std::size_t kWholeAllocation = static_cast<std::size_t>(-1);

/// A configuration parameter is missing, malformed or outside its valid range.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string parameter, const std::string& what)
      : std::runtime_error(parameter + ": " + what), parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// The drawn or requested instance admits no solution satisfying the constraints.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluated allocation violates one of the problem constraints (C1..C5).
/// `index` is the offending pair, or kWholeAllocation for list-level constraints.
class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(std::string constraint, std::size_t index, const std::string& what)
      : std::runtime_error(constraint + " violated" +
                           (index == kWholeAllocation ? std::string() : " at pair " + std::to_string(index)) +
                           ": " + what),
        constraint_(std::move(constraint)),
        index_(index) {}

  const std::string& constraint() const noexcept { return constraint_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::string constraint_;
  std::size_t index_;
};

}  // namespace crnoma
