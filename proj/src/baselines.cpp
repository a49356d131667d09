#include "phikit/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace phikit {

namespace {

Vec field(const PoissonSystem& sys, const Vec& x) { return hamiltonian_vector_field(sys, x); }

Vec checked(Vec x) {
  if (!x.allFinite()) throw BlowUpError("explicit step produced a non-finite state");
  return x;
}

}  // namespace

Vec rk2_step(const PoissonSystem& sys, const Vec& x, double h) {
  if (h == 0.0) return x;
  const Vec k1 = field(sys, x);
  return checked(x + h * field(sys, x + 0.5 * h * k1));
}

Vec rk4_step(const PoissonSystem& sys, const Vec& x, double h) {
  if (h == 0.0) return x;
  const Vec k1 = field(sys, x);
  const Vec k2 = field(sys, x + 0.5 * h * k1);
  const Vec k3 = field(sys, x + 0.5 * h * k2);
  const Vec k4 = field(sys, x + h * k3);
  return checked(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

StepResult midpoint_step(const PoissonSystem& sys, const Vec& x, double h,
                         const SolverOptions& opts) {
  if (h == 0.0) return StepResult{x, 1, 0.0};
  auto G = [&](const Vec& m) { return Vec(m - 0.5 * h * field(sys, m)); };
  const SolveResult r = solve_inverse(G, x, opts);
  return StepResult{checked(2.0 * r.y - x), r.iterations, r.residual};
}

Vec symplectic_midpoint_step(const PoissonSystem& sys, const Vec& x, double h, double tol,
                             int max_iter) {
  return midpoint_step(sys, x, h, SolverOptions{tol, max_iter, true}).x;
}

Vec leaf_breaking_map(const Vec& X, double dt, int k) {
  if (X.size() != 3) throw ConfigError("leaf_breaking_map acts on R^3");
  const double x = X[0], y = X[1], z = X[2];
  const double a = dt * (x * x + y * y - 2.0 * y * z + z * z) / 2.0;
  const double b = dt * ((x - y + z) * (x - y + z) + (x + y - z) * (x + y - z)) / 4.0;
  const double e = std::exp(std::pow(dt, k));
  Vec out(3);
  out[0] = x * std::cos(a) + y * std::sin(a) - z * std::sin(a);
  out[1] = (-x + y - z) / 2.0 * std::sin(b) + (-x + y + z) / 2.0 * e + (x + y - z) / 2.0 * std::cos(b);
  out[2] = (-x + y + z) / 2.0 * e + (x - y + z) / 2.0 * std::cos(b) + (x + y - z) / 2.0 * std::sin(b);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Level {
  std::vector<Vec> checkpoints;  // finite checkpoints, in order
  bool blew_up = false;
  double last_finite_time = 0.0;
};

Level run_level(const PoissonSystem& sys, const Vec& x0, double T, int n_checkpoints,
                long per_checkpoint) {
  Level lv;
  lv.checkpoints.push_back(x0);
  const long total = per_checkpoint * n_checkpoints;
  const double h = T / static_cast<double>(total);
  Vec x = x0;
  for (long s = 1; s <= total; ++s) {
    Vec next;
    try {
      next = rk4_step(sys, x, h);
    } catch (const BlowUpError&) {
      lv.blew_up = true;
    }
    if (lv.blew_up || is_blown_up(next)) {
      lv.blew_up = true;
      lv.last_finite_time = static_cast<double>(s - 1) * h;
      return lv;
    }
    x = std::move(next);
    if (s % per_checkpoint == 0) lv.checkpoints.push_back(x);
  }
  lv.last_finite_time = T;
  return lv;
}

}  // namespace

ReferenceSolution reference_solution(const PoissonSystem& sys, const Vec& x0, double T,
                                     int n_checkpoints, const ReferenceOptions& opts) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("reference_solution: T must be >= 0");
  if (n_checkpoints < 1) throw ConfigError("reference_solution: need at least one checkpoint");
  if (x0.size() != sys.dim()) throw ConfigError("reference_solution: dimension mismatch");
  ReferenceSolution out;
  if (T == 0.0) {
    out.times = {0.0};
    out.states = {x0};
    out.converged = true;
    return out;
  }
  long per = std::max(1L, (opts.min_steps + n_checkpoints - 1) / n_checkpoints);
  Level prev = run_level(sys, x0, T, n_checkpoints, per);
  long steps = per * n_checkpoints;
  double agreement = std::numeric_limits<double>::infinity();
  while (2 * steps <= opts.max_steps) {
    per *= 2;
    steps = per * n_checkpoints;
    Level cur = run_level(sys, x0, T, n_checkpoints, per);
    const std::size_t common = std::min(prev.checkpoints.size(), cur.checkpoints.size());
    agreement = 0.0;
    for (std::size_t j = 0; j < common; ++j) {
      const double scale = std::max(1.0, cur.checkpoints[j].lpNorm<Eigen::Infinity>());
      agreement = std::max(
          agreement, (cur.checkpoints[j] - prev.checkpoints[j]).lpNorm<Eigen::Infinity>() / scale);
    }
    const bool same_support = prev.checkpoints.size() == cur.checkpoints.size();
    prev = std::move(cur);
    if (same_support && agreement <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.steps = steps;
  out.agreement = agreement;
  out.blew_up = prev.blew_up;
  out.last_finite_time = prev.last_finite_time;
  for (std::size_t j = 0; j < prev.checkpoints.size(); ++j) {
    out.times.push_back(T * static_cast<double>(j) / n_checkpoints);
    out.states.push_back(prev.checkpoints[j]);
  }
  return out;
}

}  // namespace phikit
