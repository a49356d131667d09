#include <doctest.h>

#include "phikit/baselines.hpp"
#include "phikit/diagnostics.hpp"
#include "phikit/errors.hpp"
#include "phikit/hj_phi.hpp"
#include "phikit/sampling.hpp"
#include "phikit/systems.hpp"
#include "support.hpp"

using namespace phikit;
using namespace testing;

namespace {

// Three-species relations and update in their printed exponential form.
Vec printed_relation(const Vec& y, double dt) {
  return vec({std::exp(-dt / 2 * (y[1] + y[2])) * y[0], std::exp(dt / 2 * (y[0] - y[2])) * y[1],
              std::exp(dt / 2 * (y[0] + y[1])) * y[2]});
}
Vec printed_update(const Vec& y, double dt) {
  return vec({std::exp(dt / 2 * (y[1] + y[2])) * y[0], std::exp(dt / 2 * (-y[0] + y[2])) * y[1],
              std::exp(-dt / 2 * (y[0] + y[1])) * y[2]});
}

const std::vector<const char*> kRealised{"lv3", "rigid-body", "harmonic"};

}  // namespace

TEST_CASE("compute_series order 1 is H") {
  for (const char* name : kRealised) {
    const SystemSpec s = system_by_name(name);
    const GeneratingSeries g = compute_series(s.system, *s.bireal, 1);
    for (const Vec& x : sample_states(s.system.dim(), 20, 4)) {
      CHECK(g.value(1, x) == s.system.hamiltonian(x));
      CHECK(sup(g.gradient(1, x) - s.system.hamiltonian.grad(x)) == 0.0);
    }
  }
}

TEST_CASE("compute_series rejects bad input") {
  const SystemSpec s = harmonic_oscillator();
  CHECK_THROWS_AS(compute_series(s.system, *s.bireal, 0), ConfigError);
  CHECK_THROWS_AS(compute_series(s.system, *s.bireal, 4), ConfigError);
  CHECK_THROWS_AS(compute_series(s.system, *lotka_volterra3().bireal, 2), ConfigError);
  const GeneratingSeries g = compute_series(s.system, *s.bireal, 2);
  CHECK_THROWS_AS(g.value(3, s.default_x0), ConfigError);
}

TEST_CASE("harmonic S2 vanishes and matches a finite-difference t-derivative") {
  const SystemSpec s = harmonic_oscillator();
  const GeneratingSeries g = compute_series(s.system, *s.bireal, 2);
  for (const Vec& x : sample_states(2, 100, 9)) {
    CHECK(std::abs(g.value(2, x)) <= 1e-12);
    // d/dt H(source(x, t grad H(x))) at t = 0, by central differences.
    const double h = 1e-5;
    const auto f = [&](double t) {
      return s.system.hamiltonian(s.bireal->source()(x, Vec(t * x)));
    };
    CHECK(std::abs((f(h) - f(-h)) / (2 * h)) <= 1e-8);
    CHECK(std::abs(closed_form_S2(s.system, *s.bireal, x)) <= 1e-12);
  }
}

TEST_CASE("recursion and closed forms agree") {
  for (const char* name : kRealised) {
    CAPTURE(name);
    const SystemSpec s = system_by_name(name);
    const GeneratingSeries g = compute_series(s.system, *s.bireal, 3);
    for (const Vec& x : sample_states(s.system.dim(), 100, 21)) {
      CHECK(std::abs(g.value(2, x) - closed_form_S2(s.system, *s.bireal, x)) <= 1e-8);
      const double s3 = g.value(3, x);
      CHECK(std::abs(s3 - closed_form_S3(s.system, *s.bireal, x)) <= 1e-5 * (1 + std::abs(s3)));
    }
  }
  const SystemSpec lv = lotka_volterra3();
  const Vec ones = vec({1, 1, 1});
  CHECK(std::abs(compute_series(lv.system, *lv.bireal, 2).value(2, ones) -
                 closed_form_S2(lv.system, *lv.bireal, ones)) <= 1e-8);
}

TEST_CASE("closed forms vanish for a constant Hamiltonian") {
  SystemSpec s = lotka_volterra3();
  s.system.hamiltonian = ScalarField::generic(
      3, [](auto) { return 2.5; },
      [](auto x) {
        using T = typename decltype(x)::value_type;
        return std::vector<T>(3, T(0.0));
      });
  CHECK(closed_form_S2(s.system, *s.bireal, vec({1, 2, 3})) == 0.0);
  CHECK(std::abs(closed_form_S3(s.system, *s.bireal, vec({1, 2, 3}))) <= 1e-12);
}

TEST_CASE("series coefficient gradients match finite differences") {
  for (const char* name : kRealised) {
    CAPTURE(name);
    const SystemSpec s = system_by_name(name);
    const GeneratingSeries g = compute_series(s.system, *s.bireal, 3);
    for (int i = 1; i <= 3; ++i) {
      const ScalarField c = g.coefficient(i);
      for (const Vec& x : sample_states(s.system.dim(), 10, 13)) {
        const Vec fd = fd_gradient([&](const Vec& y) { return c(y); }, x, 1e-5);
        CHECK(sup(fd - c.grad(x)) <= 1e-5 * (1 + sup(fd)));
      }
    }
  }
}

TEST_CASE("eval_generating_gradient examples") {
  const SystemSpec ho = harmonic_oscillator();
  const GeneratingSeries g1 = compute_series(ho.system, *ho.bireal, 1);
  const GeneratingSeries g2 = compute_series(ho.system, *ho.bireal, 2);
  const Vec y = vec({0.6, -0.2});
  CHECK(sup(eval_generating_gradient(g2, y, 0.0)) == 0.0);
  CHECK(sup(eval_generating_gradient(g1, y, 0.1) - 0.1 * ho.system.hamiltonian.grad(y)) <= 1e-16);
  CHECK(sup(eval_generating_gradient(g2, y, 0.1) - eval_generating_gradient(g1, y, 0.1)) <= 1e-14);
}

TEST_CASE("StepperConfig validation") {
  const SystemSpec ho = harmonic_oscillator();
  CHECK_THROWS_AS(PhiStepper(ho.system, *ho.bireal, StepperConfig{-1.0, 1}), ConfigError);
  CHECK_THROWS_AS(PhiStepper(ho.system, *ho.bireal, StepperConfig{1e-2, 4}), ConfigError);
  StepperConfig bad_tol{1e-2, 1};
  bad_tol.fp_tol = 0.0;
  CHECK_THROWS_AS(PhiStepper(ho.system, *ho.bireal, bad_tol), ConfigError);
}

TEST_CASE("solve_intermediate examples") {
  const SystemSpec lv = lotka_volterra3();
  StepperConfig zero{1e-3, 1};
  zero.dt = 0.0;
  // h = 0 is the identity; validate() admits it for sweeps.
  const Vec x0 = lv.default_x0;
  const PhiStepper z(lv.system, *lv.bireal, zero);
  const SolveResult r0 = solve_intermediate(z, x0);
  CHECK(r0.y == x0);
  CHECK(r0.iterations == 1);

  const PhiStepper st(lv.system, *lv.bireal, StepperConfig{1e-3, 1});
  const SolveResult r = solve_intermediate(st, x0);
  CHECK(sup(printed_relation(r.y, 1e-3) - x0) <= 1e-12);

  const SystemSpec rb = rigid_body();
  const PhiStepper rst(rb.system, *rb.bireal, StepperConfig{1e-4, 1});
  const SolveResult rr = solve_intermediate(rst, vec({1, 1, 1}));
  CHECK(rr.iterations <= 10);
}

TEST_CASE("phi_step examples") {
  const SystemSpec lv = lotka_volterra3();
  StepperConfig zero{1e-3, 1};
  zero.dt = 0.0;
  CHECK(phi_step(PhiStepper(lv.system, *lv.bireal, zero), lv.default_x0).x == lv.default_x0);

  const PhiStepper st(lv.system, *lv.bireal, StepperConfig{1e-3, 1});
  const Vec x1 = phi_step(st, lv.default_x0).x;
  Vec y = lv.default_x0;
  for (int i = 0; i < 200; ++i) y += lv.default_x0 - printed_relation(y, 1e-3);
  CHECK(sup(x1 - printed_update(y, 1e-3)) <= 1e-12);

  const SystemSpec ho = harmonic_oscillator();
  for (double h : {1e-3, 1e-2, 0.1}) {
    const PhiStepper hs(ho.system, *ho.bireal, StepperConfig{h, 1});
    for (const Vec& x : sample_states(2, 20, 6)) {
      CHECK(sup(phi_step(hs, x).x - symplectic_midpoint_step(ho.system, x, h)) <= 1e-13);
    }
  }
}

TEST_CASE("PHI-1 is implicit Euler then explicit Euler at half steps on canonical systems") {
  const SystemSpec ho = harmonic_oscillator();
  const double h = 0.05;
  const PhiStepper st(ho.system, *ho.bireal, StepperConfig{h, 1});
  for (const Vec& x : sample_states(2, 20, 7)) {
    // Implicit Euler: y = x + h/2 F(y) is linear here; solve it directly.
    Mat pi(2, 2);
    pi << 0, 1, -1, 0;
    const Vec y = (Mat::Identity(2, 2) - h / 2 * pi).lu().solve(x);
    const Vec out = y + h / 2 * pi * y;
    CHECK(sup(phi_step(st, x).x - out) <= 1e-13);
  }
}

TEST_CASE("integrate with zero steps keeps only x0") {
  const SystemSpec rb = rigid_body();
  const PhiStepper st(rb.system, *rb.bireal, StepperConfig{1e-4, 2});
  const TrajectoryRecord rec = integrate(st, rb.default_x0, 0);
  CHECK(rec.size() == 1);
  CHECK(rec.completed());
  CHECK(rec.states[0] == rb.default_x0);
}

TEST_CASE("rigid body Casimir is conserved to solver precision") {
  const SystemSpec rb = rigid_body();
  const PhiStepper st(rb.system, *rb.bireal, StepperConfig{1e-4, 2});
  const TrajectoryRecord rec = integrate(st, rb.default_x0, 100000);
  REQUIRE(rec.completed());
  const double c0 = rb.default_x0.squaredNorm();
  double worst = 0.0;
  for (const Vec& x : rec.states) worst = std::max(worst, std::abs(x.squaredNorm() - c0));
  CHECK(worst / c0 <= 1e-10);
}

TEST_CASE("Casimir bound along PHI trajectories") {
  const SystemSpec lv = lotka_volterra3();
  for (int k : {1, 2}) {
    const PhiStepper st(lv.system, *lv.bireal, StepperConfig{1e-3, k});
    const TrajectoryRecord rec = integrate(st, lv.default_x0, 200);
    REQUIRE(rec.completed());
    const auto& C = lv.system.casimirs.at(0);
    const double c0 = C(lv.default_x0);
    for (std::size_t n = 0; n < rec.size(); ++n)
      CHECK(std::abs(C(rec.states[n]) - c0) <= 10 * 1e-14 * double(std::max<std::size_t>(n, 1)) * (1 + std::abs(c0)));
  }
}

TEST_CASE("sheared realisation exposes the order of the series") {
  // Shearing the canonical realisation by a quadratic form makes S2 nonzero, so
  // PHI-1 drops to order 1 while PHI-2 and PHI-3 recover the higher orders.
  SystemSpec ho = harmonic_oscillator();
  BiRealisation b = canonical_symplectic(1);
  const double c = 0.3;
  b.name = "canonical_sheared";
  b.alpha = FiberMap::generic([c](auto x, auto p) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>{x[0] - p[1] / 2.0 + c * p[0], x[1] + p[0] / 2.0};
  });
  b.beta = FiberMap::generic([c](auto x, auto p) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>{x[0] + p[1] / 2.0 + c * p[0], x[1] - p[0] / 2.0};
  });
  b.alpha_fiber_jacobian.reset();
  b.beta_fiber_jacobian.reset();
  ho.bireal = auto_orient(b, ho.system, ho.default_x0);
  const GeneratingSeries g = compute_series(ho.system, *ho.bireal, 2);
  CHECK(std::abs(g.value(2, vec({1.0, 0.5}))) > 1e-3);

  const std::vector<double> hs{1e-1, 5e-2, 2.5e-2, 1.25e-2};
  for (int k : {1, 2, 3}) {
    CAPTURE(k);
    const ConvergenceReport rep =
        convergence_report(ho, MethodSpec{MethodKind::phi, k}, ho.default_x0, 1.0, hs, 1);
    CHECK(rep.fitted_slope == doctest::Approx(k).epsilon(0.25 / k));
  }
}
