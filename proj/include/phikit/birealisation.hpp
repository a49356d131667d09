// Bi-realisations: a source/target pair (alpha, beta) from U x R^n to U with
// alpha Poisson, beta anti-Poisson and symplectically orthogonal fibers for the
// canonical bracket {x_i, p_j} = delta_ij on the doubled space.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phikit/fields.hpp"
#include "phikit/geometry.hpp"

namespace phikit {

// Which of the two maps is inverted implicitly in a step and which one pushes
// the intermediate point forward.
enum class Orientation { solve_alpha_push_beta, solve_beta_push_alpha };

std::string to_string(Orientation o);

struct OrientationProbe {
  Orientation chosen = Orientation::solve_alpha_push_beta;
  double h_probe = 0.0;
  // |x1 - x0 - h pi grad H| for each orientation (inf when the probe failed).
  double defect_solve_alpha = 0.0;
  double defect_solve_beta = 0.0;
};

using FiberJacobian = std::function<Mat(const Vec& x, const Vec& p)>;

struct BiRealisation {
  std::string name;
  int dim = 0;
  FiberMap alpha;
  FiberMap beta;
  // d alpha / d p and d beta / d p, when known in closed form.
  std::optional<FiberJacobian> alpha_fiber_jacobian;
  std::optional<FiberJacobian> beta_fiber_jacobian;
  // Fiber validity region; steps outside it raise StepTooLargeError.
  std::function<bool(const Vec& x, const Vec& p)> fiber_valid = [](const Vec&, const Vec&) {
    return true;
  };
  std::string fiber_bound;  // human-readable description of fiber_valid
  Orientation orientation = Orientation::solve_alpha_push_beta;
  std::optional<OrientationProbe> probe;

  // The map inverted in a step (acts as the Poisson source).
  const FiberMap& source() const {
    return orientation == Orientation::solve_alpha_push_beta ? alpha : beta;
  }
  // The map pushing the intermediate point forward (anti-Poisson target).
  const FiberMap& target() const {
    return orientation == Orientation::solve_alpha_push_beta ? beta : alpha;
  }
  const std::optional<FiberJacobian>& source_fiber_jacobian() const {
    return orientation == Orientation::solve_alpha_push_beta ? alpha_fiber_jacobian
                                                             : beta_fiber_jacobian;
  }

  void require_fiber(const Vec& x, const Vec& p) const;
  BiRealisation with_orientation(Orientation o) const;
};

struct FiberSample {
  Vec x;
  Vec p;
};

// alpha = (q - xi_p/2, p + xi_q/2), beta = (q + xi_p/2, p - xi_q/2) on R^{2 n_pairs}.
BiRealisation canonical_symplectic(int n_pairs);

// alpha_j = exp(-1/2 sum_i a_ij x_i p_i) x_j, beta_j = exp(+1/2 sum_i a_ij x_i p_i) x_j.
// Throws ConfigError unless A is exactly antisymmetric.
BiRealisation quadratic(const Mat& A);

// Cayley-map realisation of so(3)* = R^3 (hat-map identification):
// alpha = (1 + A/4) X (1 - A/4), beta = (1 - A/4) X (1 + A/4) with X = hat(x),
// A = 2 hat(p).  Fibers with |A| >= 4 are rejected.
BiRealisation so3_cayley();

Mat hat(const Vec& v);
Vec vee(const Mat& m);

double check_unit(const BiRealisation& b, const std::vector<Vec>& xs);
double check_source_poisson(const BiRealisation& b, const PoissonSystem& sys,
                            const std::vector<FiberSample>& samples, double fd_step);
double check_target_antipoisson(const BiRealisation& b, const PoissonSystem& sys,
                                const std::vector<FiberSample>& samples, double fd_step);
double check_fiber_orthogonality(const BiRealisation& b, const std::vector<FiberSample>& samples,
                                 double fd_step);

// Matrix of {F_i, G_j}_omega for two maps of (x, p), partials by central
// differences.
Mat canonical_bracket_matrix(const FiberMap& f, const FiberMap& g, const Vec& x, const Vec& p,
                             double fd_step);

// Runs one order-1 probe step from x0 in both orientations and keeps the one
// that is first-order consistent with pi grad H.
BiRealisation auto_orient(const BiRealisation& b, const PoissonSystem& sys, const Vec& x0,
                          double h_probe = 1e-4);

}  // namespace phikit
