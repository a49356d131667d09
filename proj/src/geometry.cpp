#include "phikit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phikit {

namespace {

void require_dim(const PoissonSystem& sys, Eigen::Index n, const char* what) {
  if (n != sys.dim()) {
    throw ConfigError(std::string(what) + ": dimension " + std::to_string(n) +
                      " does not match system dimension " + std::to_string(sys.dim()));
  }
}

}  // namespace

bool is_blown_up(const Vec& x) {
  return !x.allFinite() || x.lpNorm<Eigen::Infinity>() > kBlowUpThreshold;
}

double eval_bracket(const PoissonSystem& sys, const ScalarField& f, const ScalarField& g,
                    const Vec& x) {
  require_dim(sys, x.size(), "eval_bracket state");
  if (f.dim() != sys.dim() || g.dim() != sys.dim()) {
    throw ConfigError("eval_bracket: function dimension does not match system");
  }
  return f.grad(x).dot(sys.tensor(x) * g.grad(x));
}

Vec hamiltonian_vector_field(const PoissonSystem& sys, const Vec& x) {
  require_dim(sys, x.size(), "hamiltonian_vector_field state");
  Vec v = sys.tensor(x) * sys.hamiltonian.grad(x);
  if (!v.allFinite()) throw BlowUpError("Hamiltonian vector field is not finite");
  return v;
}

double default_fd_step(const Vec& x) { return 1e-6 * (1.0 + x.norm()); }

double jacobi_residual(const PoissonSystem& sys, const Vec& x, double fd_step) {
  require_dim(sys, x.size(), "jacobi_residual state");
  const int n = sys.dim();
  const Mat pi = sys.tensor(x);
  std::vector<Mat> dpi(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Vec xp = x, xm = x;
    xp[a] += fd_step;
    xm[a] -= fd_step;
    dpi[static_cast<std::size_t>(a)] = (sys.tensor(xp) - sys.tensor(xm)) / (2.0 * fd_step);
  }
  auto term = [&](int i, int j, int k) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += dpi[static_cast<std::size_t>(a)](i, j) * pi(a, k);
    return s;
  };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(term(i, j, k) + term(j, k, i) + term(k, i, j)));
  return worst;
}

double jacobi_residual(const PoissonSystem& sys, const Vec& x) {
  return jacobi_residual(sys, x, default_fd_step(x));
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double fd_step) {
  const Vec f0 = f(x);
  Mat jac(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += fd_step;
    xm[k] -= fd_step;
    jac.col(k) = (f(xp) - f(xm)) / (2.0 * fd_step);
  }
  return jac;
}

double poisson_map_residual(const PoissonSystem& sys, const DiscreteMap& map, const Vec& x,
                            double fd_step) {
  require_dim(sys, x.size(), "poisson_map_residual state");
  const Mat jac = fd_jacobian(map.apply, x, fd_step);
  const Mat defect = jac * sys.tensor(x) * jac.transpose() - sys.tensor(map(x));
  return defect.norm();
}

double poisson_map_residual(const PoissonSystem& sys, const DiscreteMap& map, const Vec& x) {
  return poisson_map_residual(sys, map, x, default_fd_step(x));
}

double casimir_annihilation(const PoissonSystem& sys, const ScalarField& casimir, const Vec& x) {
  const Mat pi = sys.tensor(x);
  const Vec dc = casimir.grad(x);
  return (pi * dc).norm() / ((1.0 + pi.norm()) * (1.0 + dc.norm()));
}

double antisymmetry_defect(const PoissonSystem& sys, const Vec& x) {
  const Mat pi = sys.tensor(x);
  return (pi + pi.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace phikit
