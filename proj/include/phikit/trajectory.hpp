#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phikit/geometry.hpp"

namespace phikit {

struct StepResult {
  Vec x;
  int iterations = 0;  // 0 for explicit methods
  double residual = 0.0;
};

using StepFn = std::function<StepResult(const Vec&)>;

enum class Termination { completed, blow_up, step_too_large };

std::string to_string(Termination t);

struct StepDiagnostics {
  double hamiltonian = 0.0;
  std::vector<double> casimirs;
  int solver_iters = 0;
  double residual = 0.0;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<StepDiagnostics> per_step;
  Termination termination = Termination::completed;
  // Time the failing step would have reached, when terminated early.
  double termination_time = 0.0;
  std::string message;

  std::size_t size() const { return states.size(); }
  bool completed() const { return termination == Termination::completed; }
};

// Iterates `step` n_steps times from x0 with times k * dt.  Stops early on
// BlowUpError / StepTooLargeError or when a state leaves the finite range,
// returning the partial record.
TrajectoryRecord integrate_steps(const PoissonSystem& sys, const StepFn& step, const Vec& x0,
                                 long n_steps, double dt);

StepDiagnostics diagnose_state(const PoissonSystem& sys, const Vec& x);

}  // namespace phikit
