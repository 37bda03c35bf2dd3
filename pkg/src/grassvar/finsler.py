"""Finsler fundamental functions, areal Lagrangians, and the Hilbert form.

A fundamental function F(y, v) is positive for nonzero fiber argument and
positively 1-homogeneous in v; its fiber gradient dF/dv is then
0-homogeneous, which is exactly what lets the 1-form (dF/dv_nu) dy^nu
descend from the tangent chart to the space of rays.  The catalog:

    euclidean    F = |v|
    riemannian   F = sqrt(v^T g(y) v),   g constant or conformally scaled
    randers      F = sqrt(v^T g v) + b . v,  |b|_g < 1
    mth_root     F = (sum_i c_i v_i^4)^(1/4)  (quartic, diagonal)
    areal_gram   L(y, Xi) = |Xi|  on k-vector components (k-area integrand)
    energy       F = |v|^2  -- deliberately NOT 1-homogeneous; kept in the
                 catalog as the standard negative example for the
                 homogeneity and projectability checks

All gradients are analytic.  Evaluation on the slit |v| ~ 0 raises
SlitDomainError instead of propagating NaNs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatchError,
    ImmersionError,
    InvalidMetricError,
    SlitDomainError,
)
from .forms import KForm
from .maps import DifferentiableMap

SLIT_TOL = 1e-13
EPS_DEN = 1e-300  # guards homogeneity-residual denominators


@dataclass(frozen=True)
class FinslerFunction:
    """A fiber-wise Lagrangian with analytic fiber gradient.

    ``degree`` is the exterior degree of the fiber argument: 1 for tangent
    vectors (fiber_dim = m), k for areal Lagrangians on k-vector components
    (fiber_dim = C(m, k)).
    """

    kind: str
    m: int
    degree: int
    fiber_dim: int
    params: dict
    _eval: Callable[[np.ndarray, np.ndarray], float]
    _grad: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def _check_args(self, y, v):
        y = np.asarray(y, dtype=float).reshape(-1)
        v = np.asarray(v, dtype=float).reshape(-1)
        if y.shape != (self.m,):
            raise DimensionMismatchError(f"base point must have length {self.m}")
        if v.shape != (self.fiber_dim,):
            raise DimensionMismatchError(f"fiber argument must have length {self.fiber_dim}")
        scale = max(1.0, float(np.max(np.abs(y))))
        if float(np.max(np.abs(v))) <= SLIT_TOL * scale:
            raise SlitDomainError("fiber argument is numerically zero (slit domain)")
        return y, v

    def __call__(self, y, v) -> float:
        y, v = self._check_args(y, v)
        return float(self._eval(y, v))

    def fiber_gradient(self, y, v) -> np.ndarray:
        y, v = self._check_args(y, v)
        return np.asarray(self._grad(y, v), dtype=float).reshape(self.fiber_dim)


# -- metric fields -----------------------------------------------------------

def _constant_field(g0: np.ndarray):
    return (lambda y: g0), (lambda y: 1.0)


def _conformal_field(g0: np.ndarray, coeff: float):
    # phi(y) = 1 + coeff |y|^2 with coeff >= 0 keeps g positive definite
    def phi(y):
        return 1.0 + coeff * float(y @ y)

    return (lambda y: phi(y) * g0), phi


def _build_metric_field(m: int, spec) -> tuple[Callable, Callable]:
    if spec is None:
        g0 = np.eye(m)
        return _constant_field(g0)
    kind = spec.get("field", "constant")
    g0 = np.asarray(spec.get("matrix", np.eye(m)), dtype=float)
    if g0.shape != (m, m):
        raise InvalidMetricError(f"metric matrix must be {m}x{m}")
    if np.max(np.abs(g0 - g0.T)) > 1e-12:
        raise InvalidMetricError("metric matrix must be symmetric")
    if np.any(np.linalg.eigvalsh(g0) <= 0.0):
        raise InvalidMetricError("metric matrix must be positive definite")
    if kind == "constant":
        return _constant_field(g0)
    if kind == "conformal":
        coeff = float(spec.get("coefficient", 0.0))
        if coeff < 0.0:
            raise InvalidMetricError("conformal coefficient must be >= 0")
        return _conformal_field(g0, coeff)
    raise InvalidMetricError(f"unknown metric field kind {kind!r}")


# -- catalog builders --------------------------------------------------------

def euclidean_metric(dim: int) -> FinslerFunction:
    """F(y, v) = |v|; the fiber gradient is the unit vector v/|v|."""
    return FinslerFunction(
        "euclidean",
        dim,
        1,
        dim,
        {},
        lambda y, v: float(np.linalg.norm(v)),
        lambda y, v: v / np.linalg.norm(v),
    )


def riemannian_metric(dim: int, g: dict | None = None) -> FinslerFunction:
    """F(y, v) = sqrt(v^T g(y) v) with gradient g(y) v / F."""
    gfun, _ = _build_metric_field(dim, g)

    def ev(y, v):
        return math.sqrt(float(v @ gfun(y) @ v))

    def grad(y, v):
        gv = gfun(y) @ v
        return gv / math.sqrt(float(v @ gv))

    return FinslerFunction("riemannian", dim, 1, dim, {"g": g}, ev, grad)


def randers_metric(dim: int, b, g: dict | None = None) -> FinslerFunction:
    """F(y, v) = sqrt(v^T g v) + b . v.

    Positivity of F on nonzero v is equivalent to |b|_g < 1 (norm taken
    with the inverse metric); the constructor rejects anything else.
    """
    gfun, _ = _build_metric_field(dim, g)
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape != (dim,):
        raise InvalidMetricError(f"drift covector must have length {dim}")
    g0 = gfun(np.zeros(dim))
    b_norm = math.sqrt(float(b @ np.linalg.solve(g0, b)))
    if b_norm >= 1.0:
        raise InvalidMetricError(f"|b|_g = {b_norm:g} >= 1 makes F non-positive")

    def ev(y, v):
        return math.sqrt(float(v @ gfun(y) @ v)) + float(b @ v)

    def grad(y, v):
        gv = gfun(y) @ v
        return gv / math.sqrt(float(v @ gv)) + b

    return FinslerFunction("randers", dim, 1, dim, {"b": b.tolist(), "g": g}, ev, grad)


def quartic_root_metric(weights) -> FinslerFunction:
    """F(y, v) = (sum_i c_i v_i^4)^(1/4) with positive diagonal weights."""
    c = np.asarray(weights, dtype=float).reshape(-1)
    if np.any(c <= 0.0):
        raise InvalidMetricError("quartic weights must be positive")
    dim = len(c)

    def ev(y, v):
        return float(np.sum(c * v**4)) ** 0.25

    def grad(y, v):
        F = ev(y, v)
        return c * v**3 / F**3

    return FinslerFunction("mth_root", dim, 1, dim, {"weights": c.tolist()}, ev, grad)


def areal_gram(k: int, m: int) -> FinslerFunction:
    """L(y, Xi) = |Xi| on k-vector components.

    On canonical lifts of a parametrization this is the square root of the
    Gram determinant of the Jacobian columns, i.e. the classical k-area
    integrand.
    """
    fiber_dim = math.comb(m, k)
    return FinslerFunction(
        "areal_gram",
        m,
        k,
        fiber_dim,
        {"k": k},
        lambda y, v: float(np.linalg.norm(v)),
        lambda y, v: v / np.linalg.norm(v),
    )


def energy_metric(dim: int) -> FinslerFunction:
    """F(y, v) = |v|^2; 2-homogeneous, so every homogeneity check must fail."""
    return FinslerFunction(
        "energy",
        dim,
        1,
        dim,
        {},
        lambda y, v: float(v @ v),
        lambda y, v: 2.0 * v,
    )


METRIC_KINDS = {
    "euclidean": euclidean_metric,
    "riemannian": riemannian_metric,
    "randers": randers_metric,
    "mth_root": quartic_root_metric,
    "areal_gram": areal_gram,
    "energy": energy_metric,
}


# -- checks ------------------------------------------------------------------

def _sample_fibers(F: FinslerFunction, rng: np.random.Generator, count: int, box):
    lo, hi = box
    samples = []
    while len(samples) < count:
        y = rng.uniform(lo, hi, size=F.m)
        v = rng.standard_normal(F.fiber_dim)
        if np.max(np.abs(v)) <= 1e-6:
            continue  # resample near-zero fibers
        samples.append((y, v))
    return samples


def check_homogeneity(
    F: FinslerFunction,
    rng: np.random.Generator,
    sample_count: int = 100,
    lambdas=(0.5, 2.0, 10.0),
    box=(-1.0, 1.0),
) -> float:
    """Max relative residual of F(y, lambda v) = lambda F(y, v) over random
    samples and the given positive scalings."""
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambdas must be positive")
    worst = 0.0
    for y, v in _sample_fibers(F, rng, sample_count, box):
        base = F(y, v)
        for lam in lambdas:
            r = abs(F(y, lam * v) - lam * base) / (abs(lam * base) + EPS_DEN)
            worst = max(worst, r)
    return worst


def check_projectability(
    F: FinslerFunction,
    rng: np.random.Generator,
    sample_count: int = 100,
    lambdas=(0.5, 2.0, 10.0),
    box=(-1.0, 1.0),
) -> float:
    """Max residual of scale invariance of the fiber gradient.

    0-homogeneity of dF/dv is the coordinate content of the Hilbert form
    descending to the ray space."""
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambdas must be positive")
    worst = 0.0
    for y, v in _sample_fibers(F, rng, sample_count, box):
        base = F.fiber_gradient(y, v)
        for lam in lambdas:
            r = float(np.max(np.abs(F.fiber_gradient(y, lam * v) - base)))
            worst = max(worst, r)
    return worst


def hilbert_form(F: FinslerFunction) -> KForm:
    """The 1-form (dF/dv_nu) dy^nu on the doubled chart (y, v) of TY.

    Coefficients of the dy block are the fiber-gradient entries evaluated
    at the chart point; coefficients of the dv block vanish.  Pulling this
    form back through the tangent lift of a curve and integrating
    reproduces the length functional of a homogeneous F.
    """
    if F.degree != 1:
        raise DimensionMismatchError("the Hilbert form construction is degree-1 only")
    m = F.m

    def make_dy_coeff(nu):
        def coeff(z):
            z = np.asarray(z, dtype=float)
            return float(F.fiber_gradient(z[:m], z[m:])[nu])

        return coeff

    coeffs = [make_dy_coeff(nu) for nu in range(m)]
    coeffs += [lambda z: 0.0] * m
    return KForm(1, 2 * m, coeffs)


def pullback_identity_residual(F: FinslerFunction, curve: DifferentiableMap, t_samples) -> float:
    """Max residual of the Euler identity sum_nu dF/dv_nu(z, z') z'^nu = F(z, z')
    along a curve; this is the coordinate content of the pullback statement
    for the Hilbert form."""
    if F.degree != 1 or curve.codomain_dim != F.m or curve.domain_dim != 1:
        raise DimensionMismatchError("need a degree-1 metric and a curve into its chart")
    worst = 0.0
    for t in np.atleast_1d(np.asarray(t_samples, dtype=float)):
        y = curve(np.array([t]))
        v = curve.jacobian(np.array([t]))[:, 0]
        try:
            val = float(F.fiber_gradient(y, v) @ v) - F(y, v)
        except SlitDomainError as exc:
            raise ImmersionError(f"{curve.name}: zero velocity at t={t}") from exc
        worst = max(worst, abs(val))
    return worst


def fiber_gradient_fd_residual(
    F: FinslerFunction, rng: np.random.Generator, sample_count: int = 50, h: float = 1e-6
) -> float:
    """Max deviation of the analytic fiber gradient from central differences."""
    worst = 0.0
    for y, v in _sample_fibers(F, rng, sample_count, (-1.0, 1.0)):
        g = F.fiber_gradient(y, v)
        for j in range(F.fiber_dim):
            vp, vm = v.copy(), v.copy()
            vp[j] += h
            vm[j] -= h
            fd = (F(y, vp) - F(y, vm)) / (2.0 * h)
            worst = max(worst, abs(g[j] - fd))
    return worst
