#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mumimo {

// Raised when a configuration value violates its domain. `key()` names the
// offending setting (e.g. "traffic.extreme_weight") so the CLI can report it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A run produced a result that breaks one of the simulator's invariants.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mumimo
