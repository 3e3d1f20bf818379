#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cwsradar {

/// Speed of light in vacuum (m/s). Every function that needs c takes it as a
/// trailing argument defaulting to this value.
inline constexpr double kSpeedOfLight = 299792458.0;

/// Rounded value used by most published automotive-radar design tables.
inline constexpr double kRoundedSpeedOfLight = 3.0e8;

inline constexpr double kPi = std::numbers::pi;

/// A precondition on an argument was violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input lies outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative or quadrature routine failed its own convergence check.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix was too ill-conditioned to invert reliably.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or schema problem. The message names the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace cwsradar
