// Poisson tensors, Hamiltonian systems and numerical residual checks.
//
// Conventions: {f, g}(x) = grad f(x)^T pi(x) grad g(x) and the Hamiltonian
// vector field is pi(x) grad H(x).
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phikit/fields.hpp"

namespace phikit {

struct PoissonTensorField {
  int dim = 0;
  std::function<Mat(const Vec&)> eval;

  Mat operator()(const Vec& x) const { return eval(x); }
};

struct PoissonSystem {
  std::string name;
  PoissonTensorField tensor;
  ScalarField hamiltonian;
  std::vector<ScalarField> casimirs;
  // Validity region (e.g. x2 != 0 where the Lotka-Volterra Casimir is defined).
  std::function<bool(const Vec&)> domain_guard = [](const Vec&) { return true; };
  std::optional<double> blow_up_hint;

  int dim() const { return tensor.dim; }
};

// One step of an integrator or a closed-form map.
struct DiscreteMap {
  int dim = 0;
  std::function<Vec(const Vec&)> apply;

  Vec operator()(const Vec& x) const { return apply(x); }
};

// States whose sup norm exceeds this are treated as numerical infinity.
inline constexpr double kBlowUpThreshold = 1e12;

bool is_blown_up(const Vec& x);

double eval_bracket(const PoissonSystem& sys, const ScalarField& f, const ScalarField& g,
                    const Vec& x);

Vec hamiltonian_vector_field(const PoissonSystem& sys, const Vec& x);

// Default finite-difference step 1e-6 * (1 + |x|).
double default_fd_step(const Vec& x);

// max_{i,j,k} | sum_a d_a pi_ij pi_ak + cyclic(i,j,k) |, derivatives by
// central differences.
double jacobi_residual(const PoissonSystem& sys, const Vec& x, double fd_step);
double jacobi_residual(const PoissonSystem& sys, const Vec& x);

// Central-difference Jacobian of a map R^n -> R^m.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double fd_step);

// || J pi(x) J^T - pi(phi(x)) ||_F with J the Jacobian of the map at x.
double poisson_map_residual(const PoissonSystem& sys, const DiscreteMap& map, const Vec& x,
                            double fd_step);
double poisson_map_residual(const PoissonSystem& sys, const DiscreteMap& map, const Vec& x);

// || pi(x) grad C(x) ||, normalised by (1 + |pi(x)|)(1 + |grad C(x)|).
double casimir_annihilation(const PoissonSystem& sys, const ScalarField& casimir, const Vec& x);

// max |pi(x) + pi(x)^T|.
double antisymmetry_defect(const PoissonSystem& sys, const Vec& x);

}  // namespace phikit
