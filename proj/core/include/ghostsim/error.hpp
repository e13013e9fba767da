#pragma once
#include <stdexcept>
#include <string>

namespace ghostsim {

/// Malformed scenario files, unknown modes, bad generator parameters.
/// Maps to process exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Violations of the physical domain: transmittance outside [0,1],
/// vanishing background rate, displacement pushing support off-grid.
/// Maps to process exit code 3.
class PhysicsError : public std::runtime_error {
 public:
  explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

/// Work estimate exceeds the configured budget. Maps to exit code 4.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// File I/O failures (missing mask files, unwritable output directory).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ghostsim
