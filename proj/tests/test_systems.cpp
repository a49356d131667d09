#include <doctest.h>

#include "phikit/baselines.hpp"
#include "phikit/diagnostics.hpp"
#include "phikit/errors.hpp"
#include "phikit/geometry.hpp"
#include "phikit/sampling.hpp"
#include "phikit/systems.hpp"
#include "phikit/verification.hpp"
#include "support.hpp"

using namespace phikit;
using namespace testing;

TEST_CASE("lotka_volterra3 field at (1,1,1)") {
  const SystemSpec lv = lotka_volterra3();
  CHECK(sup(hamiltonian_vector_field(lv.system, vec({1, 1, 1})) - vec({2, 0, -2})) <= 1e-15);
  CHECK(lv.default_x0 == vec({-3, 5, 1e-3}));
}

TEST_CASE("integer kernel basis and monomial Casimirs") {
  const auto lv = casimir_from_kernel(lotka_volterra_matrix());
  REQUIRE(lv.size() == 1);
  CHECK(lv[0].exponents == std::vector<long long>{1, -1, 1});
  const Vec x = vec({2, 3, 5});
  CHECK(lv[0].field(x) == doctest::Approx(2.0 * 5.0 / 3.0));

  Mat sym(2, 2);
  sym << 0, 1, -1, 0;
  CHECK(casimir_from_kernel(sym).empty());

  const auto zero = casimir_from_kernel(Mat::Zero(3, 3));
  REQUIRE(zero.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(zero[i].field(x) == doctest::Approx(x[i]));

  Mat a(4, 4);
  a << 0, 1, 2, 3, -1, 0, 1, 2, -2, -1, 0, 1, -3, -2, -1, 0;
  for (const auto& v : integer_kernel_basis(a)) {
    Vec kv(4);
    for (int i = 0; i < 4; ++i) kv[i] = double(v[i]);
    CHECK(sup(a * kv) == 0.0);
  }
}

TEST_CASE("rigid_body examples") {
  const SystemSpec rb = rigid_body();
  CHECK(rb.system.hamiltonian(vec({1, 1, 1})) == doctest::Approx(101 + std::numbers::pi));
  CHECK(sup(rb.system.tensor(vec({1, 2, 3})) * vec({1, 0, 0}) - vec({0, 3, -2})) == 0.0);
  Mat J = default_inertia();
  J(0, 1) = 0.5;
  CHECK_THROWS_AS(rigid_body(J, vec({1, 1, 1})), ConfigError);
  CHECK_THROWS_AS(rigid_body(-default_inertia(), vec({1, 1, 1})), ConfigError);
}

TEST_CASE("rigid body H and |x|^2 are constant along the reference flow") {
  const SystemSpec rb = rigid_body();
  const ReferenceSolution ref = reference_solution(rb.system, rb.default_x0, 1.0, 10, {1e-10});
  REQUIRE(ref.converged);
  const double h0 = rb.system.hamiltonian(rb.default_x0), c0 = rb.default_x0.squaredNorm();
  for (const Vec& x : ref.states) {
    CHECK(std::abs(rb.system.hamiltonian(x) - h0) <= 1e-9 * h0);
    CHECK(std::abs(x.squaredNorm() - c0) <= 1e-9 * c0);
  }
}

TEST_CASE("harmonic oscillator examples") {
  const SystemSpec ho = harmonic_oscillator();
  CHECK(ho.system.hamiltonian(vec({1, 0})) == 0.5);
  const ReferenceSolution ref = reference_solution(ho.system, ho.default_x0, std::numbers::pi / 2);
  CHECK(sup(ref.states.back() - vec({0, -1})) <= 1e-10);
  Vec x = vec({0.3, 0.8});
  for (int i = 0; i < 100; ++i) {
    const Vec y = symplectic_midpoint_step(ho.system, x, 0.1);
    CHECK(std::abs(ho.system.hamiltonian(y) - ho.system.hamiltonian(x)) <= 1e-13);
    x = y;
  }
}

TEST_CASE("quad_example examples") {
  const SystemSpec q = quad_example();
  const Vec gu = vec({1, -1, 1});
  for (const Vec& x : sample_states(3, 50, 2)) CHECK(sup(q.system.tensor(x) * gu) <= 1e-15);
  CHECK(q.system.hamiltonian(vec({1, 1, 2})) == 0.5);
  CHECK_FALSE(q.bireal.has_value());
  const Vec x0 = vec({0.4, 1.1, -0.3});
  const ReferenceSolution ref = reference_solution(q.system, x0, 1.0);
  REQUIRE(ref.converged);
  CHECK(std::abs(quad_leaf_invariant(ref.states.back()) - quad_leaf_invariant(x0)) <= 1e-10);
}

TEST_CASE("printed quad-example ODE disagrees with pi grad H") {
  // The module generates the dynamics from (pi, H); this records how far the
  // printed right-hand side is from it.
  const SystemSpec q = quad_example();
  double worst = 0.0;
  for (const Vec& x : sample_states(3, 50, 12))
    worst = std::max(worst, sup(quad_example_printed_rhs(x) - hamiltonian_vector_field(q.system, x)));
  MESSAGE("max |printed rhs - pi grad H| over samples: " << worst);
  CHECK(worst > 1e-3);
  // At (1,1,2) the generated flow is at rest while the printed one is not.
  CHECK(sup(hamiltonian_vector_field(q.system, vec({1, 1, 2}))) == 0.0);
  CHECK(sup(quad_example_printed_rhs(vec({1, 1, 2}))) > 0.0);
}

TEST_CASE("every catalog system passes its structural checks") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const SystemSpec s = system_by_name(name);
    for (const Vec& x : sample_states(s.system.dim(), 100, 40)) {
      CHECK(antisymmetry_defect(s.system, x) == 0.0);
      CHECK(jacobi_residual(s.system, x, 1e-5) <= 1e-8);
    }
    const VerifyReport rep = verify_system(s);
    for (const auto& c : rep.checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
    }
  }
  CHECK_THROWS_AS(system_by_name("pendulum"), ConfigError);
}

TEST_CASE("PHI trajectories stay on the Lotka-Volterra leaf") {
  const SystemSpec lv = lotka_volterra3();
  const TrajectoryRecord rec = run_method(lv, parse_method("phi2"), lv.default_x0, 1e-3, 150);
  REQUIRE(rec.completed());
  const double c0 = lv.system.casimirs[0](lv.default_x0);
  for (const Vec& x : rec.states) CHECK(std::abs(lv.system.casimirs[0](x) - c0) <= 1e-12 * std::abs(c0));
}
