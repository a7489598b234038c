// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace iscc {

/// Invalid configuration value, unknown key, or malformed input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument to a library call (shape mismatch, out-of-range count).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of a formula (e.g. non-positive SNR).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Channel matrix too close to rank deficient for zero-forcing.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry the synthesizer cannot map (joint on top of the access point).
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calibration targets that cannot identify the surrogate parameters.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A resource constraint cannot be met. `constraint()` names the first violated one.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string constraint, const std::string& what)
      : std::runtime_error(what), constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

}  // namespace iscc
