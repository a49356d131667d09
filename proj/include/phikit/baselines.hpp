// Classical integrators used for comparison, the closed-form leaf-breaking
// Poisson map, and a step-halving RK4 reference oracle.
#pragma once

#include <vector>

#include "phikit/geometry.hpp"
#include "phikit/solver.hpp"
#include "phikit/trajectory.hpp"

namespace phikit {

// Explicit midpoint: x + h F(x + h/2 F(x)), F = pi grad H.
Vec rk2_step(const PoissonSystem& sys, const Vec& x, double h);

// Classical four-stage Runge-Kutta.
Vec rk4_step(const PoissonSystem& sys, const Vec& x, double h);

// Implicit midpoint x' = x + h F((x + x')/2), solved for m = (x + x')/2 from
// m - h/2 F(m) = x.
StepResult midpoint_step(const PoissonSystem& sys, const Vec& x, double h,
                         const SolverOptions& opts);
Vec symplectic_midpoint_step(const PoissonSystem& sys, const Vec& x, double h, double tol = 1e-14,
                             int max_iter = 100);

// Closed-form map on R^3 that preserves the quad-example bracket but moves
// across its leaves x - y + z = const.  Transcribed as printed:
//
//   a = dt (x^2 + y^2 - 2 y z + z^2) / 2,  b = dt ((x-y+z)^2 + (x+y-z)^2) / 4
//   x' = x cos a + y sin a - z sin a
//   y' = (-x+y-z)/2 sin b + (-x+y+z)/2 e^{dt^k} + (x+y-z)/2 cos b
//   z' = (-x+y+z)/2 e^{dt^k} + (x-y+z)/2 cos b + (x+y-z)/2 sin b
Vec leaf_breaking_map(const Vec& x, double dt, int k);

struct ReferenceOptions {
  double tol = 1e-12;  // sup-norm agreement, relative to max(1, |x|_inf)
  long min_steps = 64;
  long max_steps = 1L << 21;
};

struct ReferenceSolution {
  std::vector<double> times;  // checkpoint times that stayed finite
  std::vector<Vec> states;
  bool converged = false;
  long steps = 0;          // RK4 steps of the accepted level
  double agreement = 0.0;  // last level-to-level sup difference (scaled)
  bool blew_up = false;
  double last_finite_time = 0.0;  // when blew_up: last finite RK4 grid time
};

// Integrates with RK4 on [0, T], doubling the step count until two successive
// levels agree at the n_checkpoints + 1 uniform checkpoints t_j = j T / n.
// States beyond the blow-up threshold stop a level; the report then carries
// the last finite time.
ReferenceSolution reference_solution(const PoissonSystem& sys, const Vec& x0, double T,
                                     int n_checkpoints = 1, const ReferenceOptions& opts = {});

}  // namespace phikit
