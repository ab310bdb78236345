"""Shared fixtures; the expensive sweeps are computed once per session."""

import pytest

import assurekit as ak
from assurekit.finite_n import FiniteNSolver, finite_n_curves, reduced_form_curve
from assurekit.overton import overton_curve
from assurekit.presets import (baseline_params, finite_n_params, overton_prior,
                               whistleblowing_params)

FULL_T = range(2, 100)


@pytest.fixture(scope="session")
def baseline():
    return baseline_params()


@pytest.fixture(scope="session")
def baseline_curve(baseline):
    """Conditional objective on T = 1..99 (T=1 included for hump checks)."""
    return ak.optimize_threshold("conditional", baseline, range(1, 100))


@pytest.fixture(scope="session")
def whistleblowing_curves():
    out = {}
    for pi in (0.05, 0.15, 0.30):
        params = whistleblowing_params(pi)
        out[pi] = (params, ak.optimize_threshold("conditional", params, FULL_T))
    return out


@pytest.fixture(scope="session")
def overton_bundle(baseline):
    prior = overton_prior()
    curves = {
        "baseline": overton_curve(prior, baseline, FULL_T),
        "diffuse": overton_curve(prior.scaled(0.5), baseline, FULL_T),
        "concentrated": overton_curve(prior.scaled(10.0), baseline, FULL_T),
    }
    return prior, curves


@pytest.fixture(scope="session")
def finite_bundle():
    params = finite_n_params()
    solver = FiniteNSolver(params)
    curves = finite_n_curves(params, FULL_T, floors=(0, 60), solver=solver)
    reduced = reduced_form_curve(params, FULL_T, solver=solver)
    return params, solver, curves, reduced
