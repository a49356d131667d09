#include <doctest.h>

#include "phikit/baselines.hpp"
#include "phikit/diagnostics.hpp"
#include "phikit/errors.hpp"
#include "phikit/sampling.hpp"
#include "phikit/systems.hpp"
#include "support.hpp"

using namespace phikit;
using namespace testing;

TEST_CASE("explicit baselines are the identity at h = 0") {
  for (const auto& name : catalog_names()) {
    const SystemSpec s = system_by_name(name);
    const Vec x = s.default_x0;
    CHECK(rk2_step(s.system, x, 0.0) == x);
    CHECK(rk4_step(s.system, x, 0.0) == x);
    CHECK(midpoint_step(s.system, x, 0.0, {}).x == x);
  }
  CHECK(symplectic_midpoint_step(harmonic_oscillator().system, vec({1, 0}), 0.0) == vec({1, 0}));
  const Vec q = vec({1, 1, 2});
  CHECK(sup(leaf_breaking_map(q, 0.0, 2) - q) <= 1e-15);
}

TEST_CASE("rk2 on the harmonic oscillator") {
  const SystemSpec ho = harmonic_oscillator();
  const double h = 0.1;
  const Vec x = vec({1, 0});
  const Vec F0 = vec({0, -1});
  const Vec mid = x + h / 2 * F0;
  const Vec expect = x + h * vec({mid[1], -mid[0]});
  CHECK(sup(rk2_step(ho.system, x, h) - expect) <= 1e-16);
  const Vec exact = vec({std::cos(h), -std::sin(h)});
  const double e1 = sup(rk2_step(ho.system, x, h) - exact);
  const double e2 = sup(rk2_step(ho.system, x, h / 2) - vec({std::cos(h / 2), -std::sin(h / 2)}));
  CHECK(e1 / e2 == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("rk2 leaves the quad-example leaf only slightly") {
  const SystemSpec q = quad_example();
  const Vec x = vec({0.4, 1.1, -0.3});
  const double d1 = std::abs(quad_leaf_invariant(rk2_step(q.system, x, 0.1)) - quad_leaf_invariant(x));
  const double d2 = std::abs(quad_leaf_invariant(rk2_step(q.system, x, 0.05)) - quad_leaf_invariant(x));
  // The leaf direction is in the kernel of pi, so the drift is pure rounding.
  CHECK(d1 <= 1e-14);
  CHECK(d2 <= 1e-14);
}

TEST_CASE("baselines flag blow-up") {
  const SystemSpec lv = lotka_volterra3();
  CHECK_THROWS_AS(rk4_step(lv.system, vec({1e300, 1e300, 1e300}), 1.0), BlowUpError);
}

TEST_CASE("midpoint equals PHI-1 on the harmonic oscillator") {
  const SystemSpec ho = harmonic_oscillator();
  const auto a = run_method(ho, parse_method("phi1"), ho.default_x0, 1e-2, 1000);
  const auto b = run_method(ho, parse_method("midpoint"), ho.default_x0, 1e-2, 1000);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(sup(a.states[i] - b.states[i]) <= 1e-12);
}

TEST_CASE("reference_solution examples") {
  const SystemSpec ho = harmonic_oscillator();
  const ReferenceSolution r = reference_solution(ho.system, ho.default_x0, 2 * std::numbers::pi);
  CHECK(r.converged);
  CHECK(sup(r.states.back() - vec({1, 0})) <= 1e-10);

  const ReferenceSolution z = reference_solution(ho.system, ho.default_x0, 0.0);
  REQUIRE(z.states.size() == 1);
  CHECK(z.states[0] == ho.default_x0);

  const SystemSpec lv = lotka_volterra3();
  const ReferenceSolution b = reference_solution(lv.system, lv.default_x0, 0.3);
  CHECK(b.blew_up);
  CHECK(b.last_finite_time >= 0.20);
  CHECK(b.last_finite_time <= 0.26);
}

TEST_CASE("energy and Casimir series") {
  const SystemSpec rb = rigid_body();
  const auto none = run_method(rb, parse_method("phi2"), rb.default_x0, 1e-4, 0);
  CHECK(energy_series(none) == std::vector<double>{0.0});
  CHECK(casimir_series(none) == std::vector<double>{0.0});

  const auto rk = run_method(rb, parse_method("rk4"), rb.default_x0, 1e-4, 100000);
  const auto phi = run_method(rb, parse_method("phi2"), rb.default_x0, 1e-4, 100000);
  const auto pc = casimir_series(phi);
  CHECK(*std::max_element(pc.begin(), pc.end()) <= 1e-10 * rb.default_x0.squaredNorm());
  CHECK(casimir_series(rk).back() > 100 * *std::max_element(pc.begin(), pc.end()));

  const DriftFit rk_fit = drift_slope(energy_deviation(rk));
  const DriftFit phi_fit = drift_slope(energy_deviation(phi));
  CHECK(std::abs(rk_fit.slope) > 0.0);
  CHECK(drift_slope(energy_series(rk)).slope > 0.0);
  CHECK(std::abs(phi_fit.slope) <= 1e-3 * phi_fit.amplitude);
}

TEST_CASE("drift_slope of a constant series") {
  const DriftFit f = drift_slope(std::vector<double>(50, 3.0));
  CHECK(f.slope == 0.0);
  CHECK(f.amplitude == 0.0);
  const DriftFit line = drift_slope({0, 2, 4, 6, 8});
  CHECK(line.slope == doctest::Approx(2.0));
  CHECK(line.amplitude == 8.0);
}

TEST_CASE("fit_loglog recovers an exact power law") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  const LogLogFit f = fit_loglog(h, {3e-4, 3e-4 / 8, 3e-4 / 64});
  CHECK(f.slope == doctest::Approx(3.0));
  CHECK(f.stderr_ <= 1e-12);
}

TEST_CASE("convergence_report examples") {
  const std::vector<double> hs{1e-1, 5e-2, 2.5e-2, 1.25e-2};
  const SystemSpec ho = harmonic_oscillator();
  const auto rk4 = convergence_report(ho, parse_method("rk4"), ho.default_x0, 1.0, hs, 2);
  CHECK(rk4.fitted_slope == doctest::Approx(4.0).epsilon(0.25 / 4));
  CHECK(std::is_sorted(rk4.h_values.rbegin(), rk4.h_values.rend()));
  for (double e : rk4.errors) CHECK(e > 0.0);

  const SystemSpec lv = lotka_volterra3();
  const auto phi2 = convergence_report(lv, parse_method("phi2"), lv.default_x0, 0.1, hs, 2);
  CHECK(phi2.fitted_slope == doctest::Approx(2.0).epsilon(0.25 / 2));

  CHECK_THROWS_AS(convergence_report(ho, parse_method("rk4"), ho.default_x0, 1.0, {0.3}, 1),
                  ConfigError);
}

TEST_CASE("parse_method vocabulary") {
  CHECK(parse_method("phi2") == MethodSpec{MethodKind::phi, 2});
  CHECK(parse_method("leaf-demo3").label() == "leaf-demo3");
  CHECK(parse_method("rk4").label() == "rk4");
  CHECK_THROWS_AS(parse_method("phi4"), ConfigError);
  CHECK_THROWS_AS(parse_method("euler"), ConfigError);
}

TEST_CASE("leaf-breaking map leaves the leaf that the flow keeps") {
  const SystemSpec q = quad_example();
  Vec x = q.default_x0;
  for (int i = 0; i < 10000; ++i) x = leaf_breaking_map(x, 1e-4, 2);
  const double du = std::abs(quad_leaf_invariant(x) - quad_leaf_invariant(q.default_x0));
  CHECK(du >= 1e-8);
  const ReferenceSolution ref = reference_solution(q.system, q.default_x0, 1.0);
  CHECK(std::abs(quad_leaf_invariant(ref.states.back()) - quad_leaf_invariant(q.default_x0)) <= 1e-10);
}
