"""Poisson Hamiltonian integrators: generating-series steppers on bi-realisations."""

from ._core import (
    BlowUpError,
    StepTooLargeError,
    System,
    catalog_names,
    closed_form_S2,
    closed_form_S3,
    convergence,
    harmonic_oscillator,
    leaf_breaking_map,
    leaf_breaking_residual,
    lotka_volterra3,
    phi_poisson_residual,
    quad_example,
    reference_solution,
    rigid_body,
    series_gradient,
    series_value,
    simulate,
    step,
    system,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
