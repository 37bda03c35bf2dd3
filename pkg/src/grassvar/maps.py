"""Differentiable maps between chart domains, with a named catalog.

Scenario files cannot serialize arbitrary functions, so every map used by
the CLI comes from a named family with a fixed parameter schema and an
analytic Jacobian:

    identity, linear, affine, polynomial, segment, circle, helix,
    torus_patch, sphere_patch, graph_surface, fourier_curve,
    sine_shift, trig_shear, positive_scale

Python callers may additionally combine maps with :func:`compose`,
:func:`add_scaled` and :func:`tangent_lift`.  A central finite-difference
Jacobian (step 1e-6 * max(1, |x|_inf)) backs any map constructed without
an analytic one.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, MapEvaluationError

FD_JACOBIAN_SCALE = 1e-6


def _as_point(t, dim: int) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (dim,):
        raise DimensionMismatchError(f"expected point of dimension {dim}, got shape {t.shape}")
    return t


class DifferentiableMap:
    """A map R^n -> R^m given by evaluation and Jacobian callables.

    Immutable after construction.  ``second_derivative`` (d^2 f / dt^2,
    curves only) and ``inverse`` are optional and analytic where the
    catalog provides them.
    """

    def __init__(
        self,
        name: str,
        domain_dim: int,
        codomain_dim: int,
        func: Callable[[np.ndarray], np.ndarray],
        jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
        second_derivative: Callable[[np.ndarray], np.ndarray] | None = None,
        inverse: "DifferentiableMap | None" = None,
        params: dict | None = None,
    ):
        self.name = name
        self.domain_dim = int(domain_dim)
        self.codomain_dim = int(codomain_dim)
        self._func = func
        self._jacobian = jacobian
        self._second = second_derivative
        self._inverse = inverse
        self.params = dict(params or {})

    def __call__(self, t) -> np.ndarray:
        t = _as_point(t, self.domain_dim)
        y = np.asarray(self._func(t), dtype=float).reshape(self.codomain_dim)
        if not np.all(np.isfinite(y)):
            raise MapEvaluationError(f"{self.name}: non-finite value at t={t}")
        return y

    def jacobian(self, t) -> np.ndarray:
        t = _as_point(t, self.domain_dim)
        if self._jacobian is not None:
            J = np.asarray(self._jacobian(t), dtype=float).reshape(
                self.codomain_dim, self.domain_dim
            )
        else:
            J = self._fd_jacobian(t)
        if not np.all(np.isfinite(J)):
            raise MapEvaluationError(f"{self.name}: non-finite Jacobian at t={t}")
        return J

    def _fd_jacobian(self, t: np.ndarray) -> np.ndarray:
        h = FD_JACOBIAN_SCALE * max(1.0, float(np.max(np.abs(t))) if t.size else 1.0)
        J = np.empty((self.codomain_dim, self.domain_dim))
        for j in range(self.domain_dim):
            tp, tm = t.copy(), t.copy()
            tp[j] += h
            tm[j] -= h
            J[:, j] = (self(tp) - self(tm)) / (2.0 * h)
        return J

    def second_derivative(self, t) -> np.ndarray:
        """d^2 f / dt^2 for curves (domain_dim 1); finite differences of the
        Jacobian when no analytic expression is attached."""
        if self.domain_dim != 1:
            raise DimensionMismatchError("second_derivative is defined for curves only")
        t = _as_point(t, 1)
        if self._second is not None:
            return np.asarray(self._second(t), dtype=float).reshape(self.codomain_dim)
        h = FD_JACOBIAN_SCALE * max(1.0, abs(float(t[0])))
        jp = self.jacobian(t + h)[:, 0]
        jm = self.jacobian(t - h)[:, 0]
        return (jp - jm) / (2.0 * h)

    def inverted(self) -> "DifferentiableMap":
        if self._inverse is None:
            raise MapEvaluationError(f"{self.name}: no inverse available")
        return self._inverse

    @property
    def has_inverse(self) -> bool:
        return self._inverse is not None

    def __repr__(self) -> str:
        return (
            f"DifferentiableMap({self.name!r}, {self.domain_dim}->{self.codomain_dim})"
        )


def verify_jacobian(f: DifferentiableMap, points, tol: float = 1e-6) -> float:
    """Max abs deviation between the map's Jacobian and central differences."""
    worst = 0.0
    for t in points:
        t = _as_point(t, f.domain_dim)
        worst = max(worst, float(np.max(np.abs(f.jacobian(t) - f._fd_jacobian(t)))))
    if worst > tol:
        raise MapEvaluationError(f"{f.name}: Jacobian off by {worst:g} (> {tol:g})")
    return worst


# ---------------------------------------------------------------------------
# catalog families
# ---------------------------------------------------------------------------

def identity_map(dim: int) -> DifferentiableMap:
    dim = int(dim)
    eye = np.eye(dim)
    out = DifferentiableMap(
        "identity", dim, dim, lambda t: t, lambda t: eye, params={"dim": dim}
    )
    out._inverse = out
    return out


def linear_map(matrix) -> DifferentiableMap:
    """y = A t.  An inverse is attached when A is square and invertible."""
    A = np.asarray(matrix, dtype=float)
    m, n = A.shape
    out = DifferentiableMap(
        "linear", n, m, lambda t: A @ t, lambda t: A, params={"matrix": A.tolist()}
    )
    if m == n and abs(np.linalg.det(A)) > 1e-300:
        Ainv = np.linalg.inv(A)
        inv = DifferentiableMap(
            "linear_inverse", m, n, lambda y: Ainv @ y, lambda y: Ainv
        )
        inv._inverse = out
        out._inverse = inv
    return out


def affine_map(matrix, offset) -> DifferentiableMap:
    """y = A t + b, with inverse t = A^{-1}(y - b) for invertible square A."""
    A = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    m, n = A.shape
    if b.shape != (m,):
        raise DimensionMismatchError("offset length must match matrix rows")
    out = DifferentiableMap(
        "affine",
        n,
        m,
        lambda t: A @ t + b,
        lambda t: A,
        params={"matrix": A.tolist(), "offset": b.tolist()},
    )
    if m == n and abs(np.linalg.det(A)) > 1e-300:
        Ainv = np.linalg.inv(A)
        inv = DifferentiableMap(
            "affine_inverse", m, n, lambda y: Ainv @ (y - b), lambda y: Ainv
        )
        inv._inverse = out
        out._inverse = inv
    return out


def segment(start, end) -> DifferentiableMap:
    """Straight segment t -> p + t (q - p), t in [0, 1] by convention."""
    p = np.asarray(start, dtype=float)
    q = np.asarray(end, dtype=float)
    d = q - p
    m = len(p)
    return DifferentiableMap(
        "segment",
        1,
        m,
        lambda t: p + t[0] * d,
        lambda t: d.reshape(m, 1),
        second_derivative=lambda t: np.zeros(m),
        params={"start": p.tolist(), "end": q.tolist()},
    )


def polynomial_map(domain_dim: int, terms) -> DifferentiableMap:
    """Componentwise multivariate polynomials.

    ``terms`` is one list per output component of ``[coeff, exponents]``
    pairs, exponents being a length-``domain_dim`` tuple of nonnegative
    integers.
    """
    n = int(domain_dim)
    parsed = []
    for comp in terms:
        parsed.append([(float(c), tuple(int(e) for e in exps)) for c, exps in comp])
        for _, exps in parsed[-1]:
            if len(exps) != n:
                raise DimensionMismatchError("exponent tuple length must equal domain_dim")
    m = len(parsed)

    def ev(t):
        out = np.zeros(m)
        for i, comp in enumerate(parsed):
            for c, exps in comp:
                out[i] += c * np.prod([t[j] ** e for j, e in enumerate(exps)])
        return out

    def jac(t):
        J = np.zeros((m, n))
        for i, comp in enumerate(parsed):
            for c, exps in comp:
                for j, e in enumerate(exps):
                    if e == 0:
                        continue
                    factors = [
                        t[l] ** (ee - 1) if l == j else t[l] ** ee
                        for l, ee in enumerate(exps)
                    ]
                    J[i, j] += c * e * np.prod(factors)
        return J

    return DifferentiableMap(
        "polynomial", n, m, ev, jac, params={"domain_dim": n, "terms": terms}
    )


def circle(radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> DifferentiableMap:
    """t -> center + radius (cos(t + phase), sin(t + phase))."""
    r = float(radius)
    c = np.asarray(center, dtype=float)
    ph = float(phase)
    return DifferentiableMap(
        "circle",
        1,
        2,
        lambda t: c + r * np.array([math.cos(t[0] + ph), math.sin(t[0] + ph)]),
        lambda t: r * np.array([[-math.sin(t[0] + ph)], [math.cos(t[0] + ph)]]),
        second_derivative=lambda t: -r * np.array([math.cos(t[0] + ph), math.sin(t[0] + ph)]),
        params={"radius": r, "center": c.tolist(), "phase": ph},
    )


def helix(radius: float = 1.0, pitch: float = 1.0) -> DifferentiableMap:
    """t -> (r cos t, r sin t, pitch t)."""
    r, p = float(radius), float(pitch)
    return DifferentiableMap(
        "helix",
        1,
        3,
        lambda t: np.array([r * math.cos(t[0]), r * math.sin(t[0]), p * t[0]]),
        lambda t: np.array([[-r * math.sin(t[0])], [r * math.cos(t[0])], [p]]),
        second_derivative=lambda t: np.array(
            [-r * math.cos(t[0]), -r * math.sin(t[0]), 0.0]
        ),
        params={"radius": r, "pitch": p},
    )


def torus_patch(major_radius: float = 2.0, minor_radius: float = 1.0) -> DifferentiableMap:
    """(u, v) -> torus point with tube angle v, axial angle u."""
    R, r = float(major_radius), float(minor_radius)

    def ev(t):
        u, v = t
        w = R + r * math.cos(v)
        return np.array([w * math.cos(u), w * math.sin(u), r * math.sin(v)])

    def jac(t):
        u, v = t
        w = R + r * math.cos(v)
        return np.array(
            [
                [-w * math.sin(u), -r * math.sin(v) * math.cos(u)],
                [w * math.cos(u), -r * math.sin(v) * math.sin(u)],
                [0.0, r * math.cos(v)],
            ]
        )

    return DifferentiableMap(
        "torus_patch", 2, 3, ev, jac, params={"major_radius": R, "minor_radius": r}
    )


def sphere_patch(radius: float = 1.0) -> DifferentiableMap:
    """(theta, phi) -> r (sin th cos ph, sin th sin ph, cos th); degenerate at poles."""
    r = float(radius)

    def ev(t):
        th, ph = t
        return r * np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )

    def jac(t):
        th, ph = t
        return r * np.array(
            [
                [math.cos(th) * math.cos(ph), -math.sin(th) * math.sin(ph)],
                [math.cos(th) * math.sin(ph), math.sin(th) * math.cos(ph)],
                [-math.sin(th), 0.0],
            ]
        )

    return DifferentiableMap("sphere_patch", 2, 3, ev, jac, params={"radius": r})


def graph_surface(terms) -> DifferentiableMap:
    """(u, v) -> (u, v, h(u, v)) with h a polynomial given by [coeff, (eu, ev)]."""
    h = polynomial_map(2, [terms])

    def ev(t):
        return np.array([t[0], t[1], h(t)[0]])

    def jac(t):
        Jh = h.jacobian(t)[0]
        return np.array([[1.0, 0.0], [0.0, 1.0], [Jh[0], Jh[1]]])

    return DifferentiableMap("graph_surface", 2, 3, ev, jac, params={"terms": terms})


def fourier_curve(constant, cos_coeffs, sin_coeffs) -> DifferentiableMap:
    """t -> c + sum_j (A[:, j-1] cos(j t) + B[:, j-1] sin(j t)), j = 1..J."""
    c = np.asarray(constant, dtype=float)
    A = np.asarray(cos_coeffs, dtype=float).reshape(len(c), -1)
    B = np.asarray(sin_coeffs, dtype=float).reshape(len(c), -1)
    if A.shape != B.shape:
        raise DimensionMismatchError("cos/sin coefficient arrays must have equal shape")
    m, J = A.shape
    js = np.arange(1, J + 1, dtype=float)

    def ev(t):
        return c + A @ np.cos(js * t[0]) + B @ np.sin(js * t[0])

    def jac(t):
        d = -A @ (js * np.sin(js * t[0])) + B @ (js * np.cos(js * t[0]))
        return d.reshape(m, 1)

    def second(t):
        return -A @ (js**2 * np.cos(js * t[0])) - B @ (js**2 * np.sin(js * t[0]))

    return DifferentiableMap(
        "fourier_curve",
        1,
        m,
        ev,
        jac,
        second_derivative=second,
        params={"constant": c.tolist(), "cos_coeffs": A.tolist(), "sin_coeffs": B.tolist()},
    )


def sine_shift(amplitude: float = 0.3) -> DifferentiableMap:
    """Reparametrization s -> s + a sin s; a diffeomorphism of R for |a| < 1."""
    a = float(amplitude)
    if abs(a) >= 1.0:
        raise MapEvaluationError("sine_shift requires |amplitude| < 1 to stay monotone")

    def inv_ev(y):
        # Newton on s + a sin s = y; monotone with derivative >= 1 - |a|.
        s = float(y[0])
        for _ in range(60):
            step = (s + a * math.sin(s) - y[0]) / (1.0 + a * math.cos(s))
            s -= step
            if abs(step) < 1e-15 * max(1.0, abs(s)):
                break
        return np.array([s])

    out = DifferentiableMap(
        "sine_shift",
        1,
        1,
        lambda t: np.array([t[0] + a * math.sin(t[0])]),
        lambda t: np.array([[1.0 + a * math.cos(t[0])]]),
        second_derivative=lambda t: np.array([-a * math.sin(t[0])]),
        params={"amplitude": a},
    )
    inv = DifferentiableMap(
        "sine_shift_inverse",
        1,
        1,
        inv_ev,
        lambda y: np.array([[1.0 / (1.0 + a * math.cos(inv_ev(y)[0]))]]),
    )
    inv._inverse = out
    out._inverse = inv
    return out


def trig_shear(amplitude: float = 0.3) -> DifferentiableMap:
    """(x, y) -> (x + a sin y, y); unit Jacobian determinant, exact inverse."""
    a = float(amplitude)
    out = DifferentiableMap(
        "trig_shear",
        2,
        2,
        lambda t: np.array([t[0] + a * math.sin(t[1]), t[1]]),
        lambda t: np.array([[1.0, a * math.cos(t[1])], [0.0, 1.0]]),
        params={"amplitude": a},
    )
    inv = DifferentiableMap(
        "trig_shear_inverse",
        2,
        2,
        lambda t: np.array([t[0] - a * math.sin(t[1]), t[1]]),
        lambda t: np.array([[1.0, -a * math.cos(t[1])], [0.0, 1.0]]),
    )
    inv._inverse = out
    out._inverse = inv
    return out


def positive_scale(factors) -> DifferentiableMap:
    """Diagonal scaling with strictly positive factors."""
    f = np.asarray(factors, dtype=float)
    if np.any(f <= 0):
        raise MapEvaluationError("positive_scale requires positive factors")
    D = np.diag(f)
    Dinv = np.diag(1.0 / f)
    n = len(f)
    out = DifferentiableMap(
        "positive_scale", n, n, lambda t: f * t, lambda t: D, params={"factors": f.tolist()}
    )
    inv = DifferentiableMap("positive_scale_inverse", n, n, lambda y: y / f, lambda y: Dinv)
    inv._inverse = out
    out._inverse = inv
    return out


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------

def _bare_compose(outer: DifferentiableMap, inner: DifferentiableMap) -> DifferentiableMap:
    second = None
    if inner.domain_dim == 1 and inner.codomain_dim == 1 and outer.domain_dim == 1:
        # (f o g)'' = f''(g) g'^2 + f'(g) g'' for curve-in-curve composites
        def second(t):
            g, gp, gpp = inner(t), inner.jacobian(t)[0, 0], inner.second_derivative(t)[0]
            return outer.second_derivative(g) * gp * gp + outer.jacobian(g)[:, 0] * gpp

    return DifferentiableMap(
        f"{outer.name}({inner.name})",
        inner.domain_dim,
        outer.codomain_dim,
        lambda t: outer(inner(t)),
        lambda t: outer.jacobian(inner(t)) @ inner.jacobian(t),
        second_derivative=second,
    )


def compose(outer: DifferentiableMap, inner: DifferentiableMap) -> DifferentiableMap:
    """outer o inner, with the chain-rule Jacobian."""
    if inner.codomain_dim != outer.domain_dim:
        raise DimensionMismatchError(
            f"cannot compose {outer.name} o {inner.name}: "
            f"{inner.codomain_dim} != {outer.domain_dim}"
        )
    out = _bare_compose(outer, inner)
    if outer.has_inverse and inner.has_inverse:
        inv = _bare_compose(inner.inverted(), outer.inverted())
        inv._inverse = out
        out._inverse = inv
    return out


def add_scaled(f: DifferentiableMap, g: DifferentiableMap, coeff: float) -> DifferentiableMap:
    """t -> f(t) + coeff * g(t) for maps with identical dimensions."""
    if (f.domain_dim, f.codomain_dim) != (g.domain_dim, g.codomain_dim):
        raise DimensionMismatchError("add_scaled requires identical dimensions")
    c = float(coeff)
    second = None
    if f.domain_dim == 1:
        second = lambda t: f.second_derivative(t) + c * g.second_derivative(t)
    return DifferentiableMap(
        f"{f.name}+{c:g}·{g.name}",
        f.domain_dim,
        f.codomain_dim,
        lambda t: f(t) + c * g(t),
        lambda t: f.jacobian(t) + c * g.jacobian(t),
        second_derivative=second,
    )


def tangent_lift(curve: DifferentiableMap) -> DifferentiableMap:
    """t -> (zeta(t), zeta'(t)) into the doubled chart of the tangent bundle."""
    if curve.domain_dim != 1:
        raise DimensionMismatchError("tangent_lift is defined for curves only")
    m = curve.codomain_dim

    def ev(t):
        return np.concatenate([curve(t), curve.jacobian(t)[:, 0]])

    def jac(t):
        return np.concatenate([curve.jacobian(t)[:, 0], curve.second_derivative(t)]).reshape(
            2 * m, 1
        )

    return DifferentiableMap(f"T{curve.name}", 1, 2 * m, ev, jac)


def insert_axis_map(k: int, axis: int, value: float) -> DifferentiableMap:
    """Affine inclusion R^{k-1} -> R^k fixing coordinate ``axis`` (1-based) to ``value``."""
    A = np.zeros((k, k - 1))
    rows = [i for i in range(k) if i != axis - 1]
    for col, row in enumerate(rows):
        A[row, col] = 1.0
    b = np.zeros(k)
    b[axis - 1] = float(value)
    return affine_map(A, b)


class CanonicalInclusion:
    """The inclusion i_{k,m}: (t^1..t^k) -> (t^1..t^k, 0,...,0) and its left
    inverse pr_{m,k}; pr o i is the identity on R^k."""

    def __init__(self, k: int, m: int):
        if not 1 <= k <= m:
            raise DimensionMismatchError(f"need 1 <= k <= m, got k={k}, m={m}")
        self.k = int(k)
        self.m = int(m)
        A = np.zeros((m, k))
        A[:k, :] = np.eye(k)
        self.inclusion = DifferentiableMap(
            f"iota_{k}_{m}", k, m, lambda t: A @ t, lambda t: A
        )
        P = A.T
        self.projection = DifferentiableMap(
            f"pr_{m}_{k}", m, k, lambda y: P @ y, lambda y: P
        )


# name -> builder; the scenario loader resolves geometry through this table.
CATALOG: dict[str, Callable[..., DifferentiableMap]] = {
    "identity": identity_map,
    "linear": linear_map,
    "affine": affine_map,
    "polynomial": polynomial_map,
    "segment": segment,
    "circle": circle,
    "helix": helix,
    "torus_patch": torus_patch,
    "sphere_patch": sphere_patch,
    "graph_surface": graph_surface,
    "fourier_curve": fourier_curve,
    "sine_shift": sine_shift,
    "trig_shear": trig_shear,
    "positive_scale": positive_scale,
}


def from_catalog(name: str, params: dict | None = None) -> DifferentiableMap:
    """Build a catalog map by name, validating the parameter schema."""
    if name not in CATALOG:
        raise MapEvaluationError(f"unknown catalog map {name!r}")
    try:
        return CATALOG[name](**(params or {}))
    except TypeError as exc:
        raise MapEvaluationError(f"bad parameters for catalog map {name!r}: {exc}") from exc
