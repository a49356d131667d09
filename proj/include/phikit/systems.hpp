// Catalog of concrete Poisson Hamiltonian systems.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phikit/birealisation.hpp"
#include "phikit/geometry.hpp"

namespace phikit {

struct SystemSpec {
  std::string name;
  PoissonSystem system;
  std::optional<BiRealisation> bireal;  // oriented against default_x0
  Vec default_x0;
  std::vector<ScalarField> leaf_invariants;
  std::string notes;
};

// f(x) = prod x_i^{u_i} for an integer kernel vector u of A.
struct MonomialCasimir {
  std::vector<long long> exponents;
  ScalarField field;
  // x_i != 0 wherever u_i < 0.
  std::function<bool(const Vec&)> domain_guard;
};

// Exact (rational) kernel basis of A, each vector scaled to coprime integers
// with a positive first nonzero entry.
std::vector<std::vector<long long>> integer_kernel_basis(const Mat& A);
std::vector<MonomialCasimir> casimir_from_kernel(const Mat& A);

Mat lotka_volterra_matrix();  // [[0,1,1],[-1,0,1],[-1,-1,0]]

// pi_ij = a_ij x_i x_j, H = sum x_i.
SystemSpec lotka_volterra(const Mat& A, const Vec& x0);
SystemSpec lotka_volterra3();

// Euler rigid body on so(3)^* = R^3.  H = 1/2 (Tr(J) |x|^2 - x^T J x) equals
// 1/2 Tr(hat(x)^T J hat(x)); it differs from the usual kinetic energy by a
// Casimir multiple, so the dynamics x' = -x ^ J x are the same.
SystemSpec rigid_body(const Mat& J, const Vec& x0);
SystemSpec rigid_body();
Mat default_inertia();  // diag(1, pi, 100)

// pi = [[0,1],[-1,0]] in (q, p), H = (q^2 + p^2) / 2.
SystemSpec harmonic_oscillator();

// pi = (u^2 + v^2)/4 K with u = x - y + z, v = x + y - z and
// K = [[0,-1,-1],[1,0,-1],[1,1,0]]; H = (u^2 + v^2)/8.  Dynamics are pi grad H.
SystemSpec quad_example();
double quad_leaf_invariant(const Vec& x);  // u = x - y + z
// Right-hand side as printed alongside this example (kept for comparison;
// it is not reproduced by pi grad H).
Vec quad_example_printed_rhs(const Vec& x);

std::vector<std::string> catalog_names();  // lv3, rigid-body, harmonic, quad-example
SystemSpec system_by_name(const std::string& name);

}  // namespace phikit
