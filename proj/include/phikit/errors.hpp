#pragma once

#include <stdexcept>
#include <string>

namespace phikit {

// Invalid configuration: dimension mismatch, non-antisymmetric matrix,
// unknown system name, malformed run config.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The implicit relation of a step could not be solved, or the fiber
// coordinate left the validity region of the bi-realisation.
class StepTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state or iterate became non-finite or exceeded the blow-up threshold.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phikit
