#pragma once

#include <functional>

#include "phikit/fields.hpp"

namespace phikit {

struct SolverOptions {
  double tol = 1e-14;
  int max_iter = 100;
  bool newton_fallback = true;
};

struct SolveResult {
  Vec y;
  int iterations = 0;
  double residual = 0.0;
  bool used_newton = false;
};

// Solves G(y) = target for y, seeded at y = target.
//
// Plain iteration y <- y + (target - G(y)) first; after max_iter/2 stalled
// iterations (and if enabled) switches to Newton steps with a
// finite-difference Jacobian, halving the step at most 5 times until the
// residual decreases.  Converged when |G(y) - target|_inf <= tol (1 + |target|_inf);
// the residual of that last evaluation is then applied once more to y.
//
// Throws StepTooLargeError when max_iter is exhausted and BlowUpError when an
// iterate is non-finite or beyond the blow-up threshold.
SolveResult solve_inverse(const std::function<Vec(const Vec&)>& G, const Vec& target,
                          const SolverOptions& opts);

}  // namespace phikit
