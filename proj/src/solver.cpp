#include "phikit/solver.hpp"

#include <string>

#include "phikit/geometry.hpp"

namespace phikit {

namespace {

constexpr int kMaxHalvings = 5;

void check_iterate(const Vec& y) {
  if (is_blown_up(y)) throw BlowUpError("implicit solve: iterate diverged");
}

}  // namespace

SolveResult solve_inverse(const std::function<Vec(const Vec&)>& G, const Vec& target,
                          const SolverOptions& opts) {
  const double scale = opts.tol * (1.0 + target.lpNorm<Eigen::Infinity>());
  SolveResult out;
  Vec y = target;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec g = G(y);
    if (!g.allFinite()) throw BlowUpError("implicit solve: map value is not finite");
    const Vec r = target - g;
    const double res = r.lpNorm<Eigen::Infinity>();
    out.iterations = it;
    out.residual = res;
    if (res <= scale) {
      // One more contraction with the residual already in hand; removes the
      // bias of stopping just under tolerance at no extra evaluation.
      out.y = y + r;
      return out;
    }
    if (opts.newton_fallback && it > opts.max_iter / 2) {
      out.used_newton = true;
      const Mat jac = fd_jacobian(G, y, default_fd_step(y));
      const Vec delta = jac.colPivHouseholderQr().solve(r);
      if (!delta.allFinite()) throw BlowUpError("implicit solve: singular Newton system");
      double lambda = 1.0;
      Vec trial = y + delta;
      for (int k = 0; k < kMaxHalvings; ++k) {
        check_iterate(trial);
        if ((target - G(trial)).lpNorm<Eigen::Infinity>() < res) break;
        lambda *= 0.5;
        trial = y + lambda * delta;
      }
      y = std::move(trial);
    } else {
      y += r;
    }
    check_iterate(y);
  }
  throw StepTooLargeError("implicit solve did not converge in " +
                          std::to_string(opts.max_iter) + " iterations (time step too large)");
}

}  // namespace phikit
