#include "phikit/verification.hpp"

#include <algorithm>
#include <cmath>

#include "phikit/sampling.hpp"

namespace phikit {

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

double gradient_mismatch(const ScalarField& f, const Vec& x, double fd_step) {
  const Vec g = f.grad(x);
  Vec fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += fd_step;
    xm[i] -= fd_step;
    fd[i] = (f(xp) - f(xm)) / (2.0 * fd_step);
  }
  return (g - fd).norm() / (1.0 + g.norm());
}

namespace {

CheckResult make(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value, threshold, value <= threshold, std::move(detail)};
}

}  // namespace

VerifyReport verify_system(const SystemSpec& spec, const VerifyOptions& opts) {
  const PoissonSystem& sys = spec.system;
  const int n = sys.dim();
  VerifyReport rep;
  rep.system = spec.name;
  rep.seed = opts.seed;

  std::vector<Vec> states;
  for (const Vec& x : sample_states(n, opts.n_states, opts.seed))
    if (sys.domain_guard(x)) states.push_back(x);

  double anti = 0.0, jac = 0.0, grad = 0.0;
  for (const Vec& x : states) {
    anti = std::max(anti, antisymmetry_defect(sys, x));
    jac = std::max(jac, jacobi_residual(sys, x, 1e-5));
    grad = std::max(grad, gradient_mismatch(sys.hamiltonian, x));
  }
  rep.checks.push_back(make("antisymmetry", anti, 0.0));
  rep.checks.push_back(make("jacobi", jac, 1e-8));
  rep.checks.push_back(make("hamiltonian_gradient", grad, 1e-6));
  for (std::size_t c = 0; c < sys.casimirs.size(); ++c) {
    double ann = 0.0;
    for (const Vec& x : states) ann = std::max(ann, casimir_annihilation(sys, sys.casimirs[c], x));
    rep.checks.push_back(make("casimir_annihilation_C" + std::to_string(c + 1), ann, 1e-10));
  }

  if (!spec.bireal) return rep;
  const BiRealisation& b = *spec.bireal;
  rep.orientation = to_string(b.orientation);
  const auto fibers = sample_fibers(n, opts.n_fibers, opts.seed + 1, opts.max_fiber_norm);
  std::vector<Vec> xs;
  for (const auto& f : fibers) xs.push_back(f.x);
  rep.checks.push_back(make("unit_section", check_unit(b, xs), 0.0));
  rep.checks.push_back(
      make("source_poisson", check_source_poisson(b, sys, fibers, opts.fd_step), 1e-7));
  rep.checks.push_back(
      make("target_antipoisson", check_target_antipoisson(b, sys, fibers, opts.fd_step), 1e-7));
  rep.checks.push_back(
      make("fiber_orthogonality", check_fiber_orthogonality(b, fibers, opts.fd_step), 1e-7));

  // Orientation: defect of the chosen probe step relative to the step length.
  try {
    const BiRealisation o = auto_orient(b, sys, spec.default_x0);
    const OrientationProbe& pr = *o.probe;
    const double step = pr.h_probe * hamiltonian_vector_field(sys, spec.default_x0).norm();
    const double best = std::min(pr.defect_solve_alpha, pr.defect_solve_beta);
    rep.checks.push_back(make("orientation_probe", best / step, 0.5,
                              "chosen " + to_string(pr.chosen) + ", matches stored: " +
                                  (pr.chosen == b.orientation ? "yes" : "no")));
    if (pr.chosen != b.orientation) rep.checks.back().pass = false;
  } catch (const ConfigError& e) {
    CheckResult c = make("orientation_probe", INFINITY, 0.5, e.what());
    c.pass = false;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace phikit
