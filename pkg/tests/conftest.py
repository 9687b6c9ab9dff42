"""Shared fixtures and independent oracles for the test suite."""

import math

import pytest

import predprey as pp


def bisect_oracle(f, a, b, tol=1e-14, max_iter=200):
    """Plain bisection, independent of the package's root finder."""
    fa, fb = f(a), f(b)
    assert fa * fb < 0, f"oracle bracket has no sign change: {fa}, {fb}"
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or (b - a) < tol:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


@pytest.fixture(scope="session")
def r3_params():
    """Coexistence parameters with R = 3 and interior equilibrium (1, 1)."""
    return pp.DampedPPParams(alpha=1.0, beta=2.0, gamma=1.0, delta=3.0, sigma=1.0)


@pytest.fixture(scope="session")
def ext_params():
    """Extinction parameters with R = 0.5 and attractor (1, 0)."""
    return pp.DampedPPParams(alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, sigma=2.0)


@pytest.fixture(scope="session")
def exact_peak_params():
    """Virus parameters whose peak bound is exactly 2/3 (R = 2, beta = 3)."""
    return pp.VirusParams(delta=1.0, alpha=1.0, gamma=2.0, q=1.0, sigma=1.0)


@pytest.fixture(scope="session")
def r3_trajectory(r3_params):
    field = pp.damped_pp_field(r3_params)
    return pp.integrate(field, (0.5, 0.5), (0.0, 200.0))


@pytest.fixture(scope="session")
def ext_trajectory(ext_params):
    field = pp.damped_pp_field(ext_params)
    return pp.integrate(field, (0.5, 0.5), (0.0, 400.0))


@pytest.fixture(scope="session")
def stop_plant_params():
    """Stopping scenario: v/sigma = 1 below the threshold y_f = 1.2."""
    return pp.PlantParams(
        v=1.0, gamma=2.0, sigma=1.0, threshold=pp.ThresholdSpec(y_f=1.2, k=1.0)
    )


@pytest.fixture(scope="session")
def stop_plant_run(stop_plant_params):
    return pp.simulate_plant(stop_plant_params, (0.25, 2.5, 0.5), 100.0)


@pytest.fixture(scope="session")
def unbounded_plant_params():
    """Unbounded scenario: threshold y_f = 0.5 below v/sigma = 1."""
    return pp.PlantParams(
        v=1.0, gamma=2.0, sigma=1.0, threshold=pp.ThresholdSpec(y_f=0.5, k=1.0)
    )


@pytest.fixture(scope="session")
def unbounded_plant_run(unbounded_plant_params):
    return pp.simulate_plant(unbounded_plant_params, (0.5, 1.5, 0.2), 100.0)
