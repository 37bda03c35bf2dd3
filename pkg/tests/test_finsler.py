import math

import numpy as np
import pytest

from grassvar.errors import DimensionMismatchError, InvalidMetricError, SlitDomainError
from grassvar.finsler import (
    areal_gram,
    check_homogeneity,
    check_projectability,
    energy_metric,
    euclidean_metric,
    fiber_gradient_fd_residual,
    hilbert_form,
    pullback_identity_residual,
    quartic_root_metric,
    randers_metric,
    riemannian_metric,
)
from grassvar.maps import circle, fourier_curve, helix

HOMOGENEITY_TOL = 1e-11
EULER_TOL = 1e-11
GRAD_FD_TOL = 1e-6
LAMBDAS = (0.5, 2.0, 10.0)


def catalog_metrics(rng):
    g = rng.normal(size=(3, 3))
    spd = g @ g.T + 3.0 * np.eye(3)
    yield euclidean_metric(3)
    yield riemannian_metric(3, {"field": "constant", "matrix": spd.tolist()})
    yield riemannian_metric(3, {"field": "conformal", "matrix": np.eye(3).tolist(), "coefficient": 0.4})
    yield randers_metric(3, [0.3, 0.0, 0.0])
    yield randers_metric(3, [0.2, -0.1, 0.15], {"field": "constant", "matrix": spd.tolist()})
    yield quartic_root_metric([1.0, 2.0, 0.5])
    yield areal_gram(2, 3)


def test_catalog_homogeneity_and_projectability(rng):
    for F in catalog_metrics(rng):
        assert check_homogeneity(F, rng, 100, LAMBDAS) <= HOMOGENEITY_TOL
        assert check_projectability(F, rng, 100, LAMBDAS) <= HOMOGENEITY_TOL


def test_energy_fails_homogeneity(rng):
    F = energy_metric(3)
    res = check_homogeneity(F, rng, 20, (2.0,))
    assert res >= 0.5  # |lambda - 1| = 1 for the squared norm at lambda = 2
    proj = check_projectability(F, rng, 20, (2.0,))
    assert proj > 1e-2


def test_euclidean_examples(rng):
    F = euclidean_metric(3)
    assert check_homogeneity(F, rng, 30, LAMBDAS) <= 1e-15
    y, v = np.zeros(3), np.array([3.0, 4.0, 0.0])
    assert F(y, v) == 5.0
    assert np.allclose(F.fiber_gradient(y, v), v / 5.0)


def test_randers_closed_form(rng):
    b = np.array([0.3, 0.0, 0.0])
    F = randers_metric(3, b)
    y, v = np.zeros(3), rng.normal(size=3)
    assert F(y, v) == pytest.approx(np.linalg.norm(v) + b @ v, rel=1e-15)
    assert np.allclose(F.fiber_gradient(y, v), v / np.linalg.norm(v) + b)
    assert check_homogeneity(F, rng, 50, LAMBDAS) <= 1e-12


def test_randers_positivity_guard():
    with pytest.raises(InvalidMetricError):
        randers_metric(2, [1.0, 0.0])
    with pytest.raises(InvalidMetricError):
        # |b|_g with g = diag(0.25, 1): |(0.6, 0)|_g = 1.2
        randers_metric(2, [0.6, 0.0], {"field": "constant", "matrix": [[0.25, 0.0], [0.0, 1.0]]})


def test_metric_validation():
    with pytest.raises(InvalidMetricError):
        riemannian_metric(2, {"field": "constant", "matrix": [[1.0, 0.0], [0.0, -1.0]]})
    with pytest.raises(InvalidMetricError):
        riemannian_metric(2, {"field": "constant", "matrix": [[1.0, 0.5], [0.0, 1.0]]})
    with pytest.raises(InvalidMetricError):
        quartic_root_metric([1.0, -1.0])


def test_fiber_gradient_matches_finite_differences(rng):
    for F in catalog_metrics(rng):
        assert fiber_gradient_fd_residual(F, rng, 30) <= GRAD_FD_TOL


def test_slit_domain_guard():
    F = euclidean_metric(2)
    with pytest.raises(SlitDomainError):
        F(np.zeros(2), np.zeros(2))
    with pytest.raises(SlitDomainError):
        F.fiber_gradient(np.zeros(2), np.array([0.0, 1e-15]))


# -- Hilbert form ------------------------------------------------------------

def test_hilbert_form_euclidean_coefficients():
    F = euclidean_metric(2)
    eta = hilbert_form(F)
    z = np.array([0.3, -0.1, 3.0, 4.0])  # (y, v)
    vals = eta.values(z)
    assert np.allclose(vals[:2], [0.6, 0.8])
    assert np.allclose(vals[2:], 0.0)


def test_hilbert_form_randers_coefficients():
    b = np.array([0.3, 0.0])
    eta = hilbert_form(randers_metric(2, b))
    z = np.array([0.0, 0.0, 0.0, 2.0])
    assert np.allclose(eta.values(z)[:2], np.array([0.0, 1.0]) + b)


def test_hilbert_form_riemannian_coefficients(rng):
    g = np.array([[2.0, 0.3], [0.3, 1.0]])
    eta = hilbert_form(riemannian_metric(2, {"field": "constant", "matrix": g.tolist()}))
    v = rng.normal(size=2)
    z = np.concatenate([np.zeros(2), v])
    expected = g @ v / math.sqrt(v @ g @ v)
    assert np.allclose(eta.values(z)[:2], expected)


def test_hilbert_form_slit_error():
    eta = hilbert_form(euclidean_metric(2))
    with pytest.raises(SlitDomainError):
        eta.values(np.array([0.0, 0.0, 0.0, 0.0]))


def test_hilbert_form_rejects_areal():
    with pytest.raises(DimensionMismatchError):
        hilbert_form(areal_gram(2, 3))


# -- Euler identity ----------------------------------------------------------

def test_euler_identity_on_curves(rng):
    curves = [
        circle(radius=1.3),
        helix(0.8, 0.4),
        fourier_curve(rng.normal(size=3), rng.normal(size=(3, 2)), rng.normal(size=(3, 2))),
    ]
    metrics2 = [euclidean_metric(2)]
    metrics3 = [
        euclidean_metric(3),
        randers_metric(3, [0.2, 0.1, -0.1]),
        riemannian_metric(3, {"field": "constant", "matrix": (2 * np.eye(3)).tolist()}),
    ]
    ts = rng.uniform(0.0, 2 * math.pi, size=12)
    for z in curves:
        for F in metrics2 if z.codomain_dim == 2 else metrics3:
            assert pullback_identity_residual(F, z, ts) <= EULER_TOL


def test_euler_identity_fails_for_energy():
    F = energy_metric(2)
    z = circle()
    # gradient . v = 2|v|^2 while F = |v|^2: residual equals F itself
    res = pullback_identity_residual(F, z, [0.4])
    assert res == pytest.approx(1.0, rel=1e-12)
