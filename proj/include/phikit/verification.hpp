// Residual suite over a catalog system: tensor axioms, Casimirs, and the
// bi-realisation axioms plus its orientation probe.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phikit/systems.hpp"

namespace phikit {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string system;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::string orientation;  // empty without a bi-realisation

  bool all_pass() const;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int n_states = 100;
  int n_fibers = 100;
  double max_fiber_norm = 0.1;
  double fd_step = 1e-6;
};

VerifyReport verify_system(const SystemSpec& spec, const VerifyOptions& opts = {});

// Relative mismatch between an analytic gradient and central differences.
double gradient_mismatch(const ScalarField& f, const Vec& x, double fd_step = 1e-6);

}  // namespace phikit
