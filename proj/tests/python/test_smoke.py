import math

import numpy as np
import pytest

import phikit


def test_catalog():
    assert phikit.catalog_names() == ["lv3", "rigid-body", "harmonic", "quad-example"]
    lv = phikit.system("lv3")
    assert lv.dim == 3
    assert lv.orientation == "solve_beta_push_alpha"
    np.testing.assert_allclose(lv.vector_field([1.0, 1.0, 1.0]), [2.0, 0.0, -2.0], atol=1e-15)
    assert not phikit.quad_example().has_birealisation
    with pytest.raises(ValueError):
        phikit.system("pendulum")


def test_rigid_body_values():
    rb = phikit.rigid_body()
    assert rb.hamiltonian([1.0, 1.0, 1.0]) == pytest.approx(101 + math.pi)
    np.testing.assert_allclose(rb.vector_field([1.0, 1.0, 1.0]), [math.pi - 100, 99, 1 - math.pi])
    with pytest.raises(ValueError):
        phikit.rigid_body(J_diag=[1.0, -2.0, 3.0])


def test_simulate_rigid_body_casimir():
    rb = phikit.rigid_body()
    rec = phikit.simulate(rb, "phi2", dt=1e-4, steps=2000)
    assert rec["termination"] == "completed"
    assert rec["states"].shape == (2001, 3)
    c = np.asarray(rec["casimirs"])[:, 0]
    assert np.max(np.abs(c - c[0])) / c[0] <= 1e-10


def test_midpoint_matches_phi1_on_harmonic():
    ho = phikit.harmonic_oscillator()
    a = phikit.simulate(ho, "phi1", dt=1e-2, steps=500)["states"]
    b = phikit.simulate(ho, "midpoint", dt=1e-2, steps=500)["states"]
    assert np.max(np.abs(a - b)) <= 1e-12


def test_lv3_singularity():
    lv = phikit.lotka_volterra3()
    ref = phikit.reference_solution(lv, T=0.3)
    assert ref["blew_up"] and 0.20 <= ref["last_finite_time"] <= 0.26
    phi = phikit.simulate(lv, "phi1", dt=1e-3, steps=300)
    rk = phikit.simulate(lv, "rk2", dt=1e-3, steps=300)
    assert phi["termination"] != "completed"
    exact = phikit.reference_solution(lv, T=0.22)["states"][-1]
    assert np.max(np.abs(phi["states"][220] - exact)) < np.max(np.abs(rk["states"][220] - exact))


def test_series_cross_check():
    for name in ["lv3", "rigid-body", "harmonic"]:
        s = phikit.system(name)
        x = np.array(s.default_x0) * 0.5 + 0.3
        assert phikit.series_value(s, 1, x) == pytest.approx(s.hamiltonian(x))
        assert abs(phikit.series_value(s, 2, x) - phikit.closed_form_S2(s, x)) <= 1e-8


def test_verify_and_poisson_residual():
    for name in ["lv3", "rigid-body", "harmonic", "quad-example"]:
        rep = phikit.verify(phikit.system(name), seed=3)
        assert rep["all_pass"], rep
    rb = phikit.rigid_body()
    assert phikit.phi_poisson_residual(rb, 2, 1e-3, [0.5, -1.0, 2.0]) <= 1e-6


def test_convergence_rk4():
    rep = phikit.convergence(phikit.harmonic_oscillator(), "rk4", T=1.0, h_list=[0.1, 0.05, 0.025, 0.0125])
    assert rep["slope"] == pytest.approx(4.0, abs=0.25)


def test_errors_are_typed():
    rb = phikit.rigid_body()
    with pytest.raises(phikit.StepTooLargeError):
        phikit.step(rb, "phi1", [1.0, 1.0, 1.0], 0.5)
    with pytest.raises(ValueError):
        phikit.simulate(rb, "phi9", dt=1e-3, steps=1)
    with pytest.raises(ValueError):
        phikit.series_value(phikit.quad_example(), 1, [1.0, 1.0, 2.0])


def test_leaf_breaking_map_leaves_the_leaf():
    x = np.array([1.0, 1.0, 2.0])
    np.testing.assert_allclose(phikit.leaf_breaking_map(x, 0.0, 2), x, atol=1e-15)
    y = x
    for _ in range(1000):
        y = phikit.leaf_breaking_map(y, 1e-4, 2)
    assert abs((y[0] - y[1] + y[2]) - 2.0) > 1e-8
