#include "phikit/trajectory.hpp"

#include <limits>

namespace phikit {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed:
      return "completed";
    case Termination::blow_up:
      return "blow_up";
    case Termination::step_too_large:
      return "step_too_large";
  }
  return "unknown";
}

StepDiagnostics diagnose_state(const PoissonSystem& sys, const Vec& x) {
  StepDiagnostics d;
  d.hamiltonian = sys.hamiltonian(x);
  const bool valid = sys.domain_guard(x);
  for (const auto& c : sys.casimirs) {
    d.casimirs.push_back(valid ? c(x) : std::numeric_limits<double>::quiet_NaN());
  }
  return d;
}

TrajectoryRecord integrate_steps(const PoissonSystem& sys, const StepFn& step, const Vec& x0,
                                 long n_steps, double dt) {
  TrajectoryRecord rec;
  rec.times.push_back(0.0);
  rec.states.push_back(x0);
  rec.per_step.push_back(diagnose_state(sys, x0));
  Vec x = x0;
  for (long k = 1; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    StepResult r;
    try {
      r = step(x);
    } catch (const BlowUpError& e) {
      rec.termination = Termination::blow_up;
      rec.termination_time = t;
      rec.message = e.what();
      return rec;
    } catch (const StepTooLargeError& e) {
      rec.termination = Termination::step_too_large;
      rec.termination_time = t;
      rec.message = e.what();
      return rec;
    }
    if (is_blown_up(r.x)) {
      rec.termination = Termination::blow_up;
      rec.termination_time = t;
      rec.message = "state exceeded the blow-up threshold";
      return rec;
    }
    x = std::move(r.x);
    StepDiagnostics d = diagnose_state(sys, x);
    d.solver_iters = r.iterations;
    d.residual = r.residual;
    rec.times.push_back(t);
    rec.states.push_back(x);
    rec.per_step.push_back(std::move(d));
  }
  return rec;
}

}  // namespace phikit
