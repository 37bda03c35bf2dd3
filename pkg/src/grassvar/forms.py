"""Differential forms on chart domains and their quadrature over pieces.

This module provides degree-k forms with per-multi-index coefficient
functions, pullback along differentiable maps, the exterior derivative,
tensor-product Gauss-Legendre integration over parametrized box pieces,
partition-of-unity splitting, and numerical verifiers for the three
integral identities the variational theory rests on: invariance under
orientation-preserving change of the integration domain, differentiation
under the integral sign, and the Stokes formula.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegeneratePieceWarning,
    DimensionMismatchError,
    EvaluationError,
    InvalidDegreeError,
    InvalidPartitionError,
    OrientationError,
    QuadratureTargetWarning,
)
from .expressions import ExprCoeff
from .kvector import canonical_lift
from .maps import DifferentiableMap, compose, insert_axis_map
from .multiindex import enumerate_multiindices, normalize_tuple, rank

DEGENERACY_TOL = 1e-13


class KForm:
    """A degree-k differential form on an m-dimensional chart domain.

    Parameters
    ----------
    k : int
        Degree.  Degree 0 (a scalar function) is admitted so that the
        bottom of the Stokes recursion is expressible.
    m : int
        Chart dimension.
    coeffs : sequence of callables
        One coefficient function per increasing multi-index, in rank order
        (a single entry for k = 0).  Entries may be plain callables or
        :class:`ExprCoeff`; only the latter contribute analytic partials.
    fd_step : float
        Central-difference step used for partials of non-symbolic
        coefficients.
    """

    def __init__(self, k: int, m: int, coeffs: Sequence[Callable], fd_step: float = 1e-5):
        self.k = int(k)
        self.m = int(m)
        if self.k < 0 or self.k > self.m:
            raise InvalidDegreeError(f"degree {self.k} not in 0..{self.m}")
        n_comp = 1 if self.k == 0 else math.comb(self.m, self.k)
        coeffs = list(coeffs)
        if len(coeffs) != n_comp:
            raise DimensionMismatchError(f"expected {n_comp} coefficients, got {len(coeffs)}")
        self.coeffs = coeffs
        self.fd_step = float(fd_step)

    @classmethod
    def from_dict(cls, k: int, m: int, entries: dict, fd_step: float = 1e-5) -> "KForm":
        """Build from a {index tuple: coefficient} mapping; missing entries are 0.

        Coefficient values may be callables, ExprCoeff, expression strings,
        or numbers.
        """
        def lift(v):
            if callable(v):
                return v
            if isinstance(v, str):
                return ExprCoeff(v, m)
            return ExprCoeff(float(v), m)

        if k == 0:
            return cls(0, m, [lift(entries.get((), 0.0))], fd_step)
        coeffs = [lift(0.0)] * math.comb(m, k)
        for key, v in entries.items():
            idx, sign = normalize_tuple(tuple(key), m)
            if sign == 0:
                raise DimensionMismatchError(f"repeated index in {key}")
            if sign < 0:
                raise DimensionMismatchError(f"use increasing index order in {key}")
            coeffs[rank(idx)] = lift(v)
        return cls(k, m, coeffs, fd_step)

    @property
    def is_symbolic(self) -> bool:
        return all(isinstance(c, ExprCoeff) for c in self.coeffs)

    def values(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.array([float(c(y)) for c in self.coeffs])
        if not np.all(np.isfinite(out)):
            raise EvaluationError(f"non-finite form coefficient at y={y}")
        return out

    def partial(self, comp: int, j: int, y) -> float:
        """d(coeffs[comp])/dy^{j+1} at y, analytic when available."""
        c = self.coeffs[comp]
        if isinstance(c, ExprCoeff):
            return c.partial(j)(y)
        y = np.asarray(y, dtype=float)
        h = self.fd_step
        yp, ym = y.copy(), y.copy()
        yp[j] += h
        ym[j] -= h
        return (float(c(yp)) - float(c(ym))) / (2.0 * h)


@dataclass(frozen=True)
class Piece:
    """A compact parameter box mapped into a chart, with an orientation flag."""

    param_box: tuple
    map: DifferentiableMap
    orientation: int = 1

    def __post_init__(self):
        box = tuple((float(a), float(b)) for a, b in self.param_box)
        object.__setattr__(self, "param_box", box)
        if self.orientation not in (-1, 1):
            raise OrientationError("orientation must be +1 or -1")
        if self.map.domain_dim != len(box):
            raise DimensionMismatchError(
                f"map domain {self.map.domain_dim} != box dimension {len(box)}"
            )
        for a, b in box:
            if not a <= b:
                raise DimensionMismatchError(f"empty interval ({a}, {b})")

    @property
    def k(self) -> int:
        return len(self.param_box)

    def grid(self, per_axis: int = 3):
        axes = [np.linspace(a, b, per_axis) for a, b in self.param_box]
        return (np.array(p) for p in itertools.product(*axes))

    def validate_immersion(self, per_axis: int = 3, tol: float = DEGENERACY_TOL) -> bool:
        """True when the canonical lift is nonzero on a sample grid."""
        for t in self.grid(per_axis):
            kv = canonical_lift(self.map, t)
            if kv.norm <= tol * max(1.0, float(np.max(np.abs(self.map.jacobian(t))))):
                return False
        return True


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product Gauss-Legendre settings."""

    gauss_order: int = 8
    cells_per_axis: int = 16
    adaptive: bool = False
    target: float = 1e-9
    max_refinements: int = 6

    def __post_init__(self):
        if self.gauss_order < 1 or self.cells_per_axis < 1:
            raise ValueError("gauss_order and cells_per_axis must be >= 1")

    def with_cells(self, cells: int) -> "QuadratureSpec":
        return QuadratureSpec(self.gauss_order, cells, False, self.target, self.max_refinements)


def _axis_nodes(a: float, b: float, q: QuadratureSpec, cells: int):
    """Nodes and weights on [a, b] subdivided into ``cells`` equal cells."""
    x, w = np.polynomial.legendre.leggauss(q.gauss_order)
    h = (b - a) / cells
    nodes = np.empty(cells * q.gauss_order)
    weights = np.empty_like(nodes)
    for c in range(cells):
        lo = a + c * h
        nodes[c * q.gauss_order : (c + 1) * q.gauss_order] = lo + 0.5 * h * (x + 1.0)
        weights[c * q.gauss_order : (c + 1) * q.gauss_order] = 0.5 * h * w
    return nodes, weights


def integrate_scalar_over_box(
    g: Callable[[np.ndarray], float], box, q: QuadratureSpec
) -> float:
    """Quadrature of a scalar function over a product of intervals.

    Summation order is fixed (per-node accumulation into an array followed
    by a single ``np.sum``), so results are deterministic.
    """
    box = [(float(a), float(b)) for a, b in box]
    if any(b == a for a, b in box):
        return 0.0

    def fixed(cells: int) -> float:
        per_axis = [_axis_nodes(a, b, q, cells) for a, b in box]
        vals = []
        for combo in itertools.product(*[range(len(n)) for n, _ in per_axis]):
            t = np.array([per_axis[d][0][i] for d, i in enumerate(combo)])
            wgt = math.prod(per_axis[d][1][i] for d, i in enumerate(combo))
            vals.append(wgt * float(g(t)))
        return float(np.sum(np.asarray(vals)))

    if not q.adaptive:
        return fixed(q.cells_per_axis)

    cells = q.cells_per_axis
    coarse = fixed(cells)
    for _ in range(q.max_refinements):
        cells *= 2
        fine = fixed(cells)
        if abs(fine - coarse) <= q.target:
            return fine
        coarse = fine
    warnings.warn(
        f"adaptive refinement stopped at {cells} cells/axis with estimate "
        f"{abs(fine - coarse):.3e} > {q.target:.3e}",
        QuadratureTargetWarning,
        stacklevel=2,
    )
    return fine


def pullback(eta: KForm, f: DifferentiableMap) -> KForm:
    """Pull a degree-k form on the codomain of f back to its domain.

    The coefficient at a target multi-index J is the minor expansion
    sum_I eta_I(f(t)) det(Jac(t)[I rows, J cols]).
    """
    if eta.m != f.codomain_dim:
        raise DimensionMismatchError(
            f"form lives in dimension {eta.m}, map codomain is {f.codomain_dim}"
        )
    n = f.domain_dim
    if eta.k > n:
        raise InvalidDegreeError(f"cannot pull a degree-{eta.k} form back to dimension {n}")
    if eta.k == 0:
        return KForm(0, n, [lambda t, _e=eta: float(_e.coeffs[0](f(t)))], eta.fd_step)

    src_idx = enumerate_multiindices(eta.k, eta.m)
    tgt_idx = enumerate_multiindices(eta.k, n)

    def make_coeff(J):
        cols = [j - 1 for j in J]

        def coeff(t):
            y = f(t)
            Jac = f.jacobian(t)
            vals = eta.values(y)
            total = 0.0
            for r, I in enumerate(src_idx):
                if vals[r] == 0.0:
                    continue
                rows = [i - 1 for i in I]
                sub = Jac[np.ix_(rows, cols)]
                minor = sub[0, 0] if eta.k == 1 else float(np.linalg.det(sub))
                total += vals[r] * minor
            return total

        return coeff

    return KForm(eta.k, n, [make_coeff(J) for J in tgt_idx], eta.fd_step)


def _top_pullback_value(eta: KForm, f: DifferentiableMap, t: np.ndarray):
    """(pullback top coefficient, wedge norm) at a node; one Jacobian eval."""
    y = f(t)
    Jac = f.jacobian(t)
    k = eta.k
    vals = eta.values(y)
    total = 0.0
    sq = 0.0
    for r, I in enumerate(enumerate_multiindices(k, eta.m)):
        rows = [i - 1 for i in I]
        sub = Jac[rows, :]
        minor = sub[0, 0] if k == 1 else float(np.linalg.det(sub))
        sq += minor * minor
        total += vals[r] * minor
    return total, math.sqrt(sq)


def integrate(eta: KForm, piece: Piece, q: QuadratureSpec = QuadratureSpec()) -> float:
    """Integral of a degree-k form over a k-piece.

    The form is pulled back through the piece's parametrization and the
    single top-degree coefficient is integrated over the parameter box with
    tensor-product Gauss-Legendre quadrature, weighted by the orientation
    flag.  Nodes where the parametrization degenerates (zero canonical
    lift) raise a DegeneratePieceWarning but do not abort.
    """
    if eta.k != piece.k:
        raise InvalidDegreeError(f"form degree {eta.k} != piece dimension {piece.k}")
    if eta.k == 0:
        p = piece.map(np.zeros(0))
        v = float(eta.coeffs[0](p))
        if not np.isfinite(v):
            raise EvaluationError(f"non-finite coefficient at {p}")
        return piece.orientation * v
    if eta.m != piece.map.codomain_dim:
        raise DimensionMismatchError("form and piece live in different chart dimensions")

    degenerate = 0

    def g(t):
        nonlocal degenerate
        val, wnorm = _top_pullback_value(eta, piece.map, t)
        if wnorm <= DEGENERACY_TOL:
            degenerate += 1
        if not np.isfinite(val):
            raise EvaluationError(f"non-finite integrand at t={t}")
        return val

    result = piece.orientation * integrate_scalar_over_box(g, piece.param_box, q)
    if degenerate:
        warnings.warn(
            f"{piece.map.name}: canonical lift vanished at {degenerate} quadrature node(s)",
            DegeneratePieceWarning,
            stacklevel=2,
        )
    return result


# ---------------------------------------------------------------------------
# partition of unity
# ---------------------------------------------------------------------------

def _bump(u: float) -> float:
    # exp(-1/(1-u^2)) on (-1, 1); flat zero outside
    if abs(u) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - u * u))


@dataclass(frozen=True)
class PartitionOfUnity:
    """Normalized product bumps subordinate to an overlapping subbox cover.

    Each cover member carries the product of one-dimensional mollifiers
    exp(-1/(1-u^2)) over its axes; the family is normalized pointwise by
    its sum, so it sums to 1 wherever the cover has no gap.  Cover boxes
    may overhang the ends of the integration box so that boundary points
    stay strictly inside some member's support.
    """

    cover: tuple

    def __post_init__(self):
        boxes = tuple(tuple((float(a), float(b)) for a, b in box) for box in self.cover)
        object.__setattr__(self, "cover", boxes)
        if not boxes:
            raise InvalidPartitionError("empty cover")

    @property
    def size(self) -> int:
        return len(self.cover)

    def raw_bump(self, j: int, t: np.ndarray) -> float:
        out = 1.0
        for (a, b), x in zip(self.cover[j], t):
            u = (2.0 * x - a - b) / (b - a)
            out *= _bump(u)
            if out == 0.0:
                return 0.0
        return out

    def chi(self, j: int, t) -> float:
        """The j-th normalized partition function at t."""
        t = np.asarray(t, dtype=float)
        raw = [self.raw_bump(i, t) for i in range(self.size)]
        total = float(np.sum(raw))
        if total <= 1e-300:
            raise InvalidPartitionError(f"cover does not sum to 1 at t={t} (gap in cover)")
        return raw[j] / total

    def check_sums_to_one(self, box, per_axis: int = 9, tol: float = 1e-10) -> float:
        """Max |sum_j chi_j - 1| over a sample grid of ``box``."""
        axes = [np.linspace(a, b, per_axis) for a, b in box]
        worst = 0.0
        for p in itertools.product(*axes):
            t = np.asarray(p)
            s = sum(self.chi(j, t) for j in range(self.size))
            worst = max(worst, abs(s - 1.0))
        if worst > tol:
            raise InvalidPartitionError(f"partition sums deviate from 1 by {worst:g}")
        return worst

    @classmethod
    def uniform_cover(
        cls, box, pieces_per_axis, overlap: float = 0.6, overhang: float = 0.35
    ) -> "PartitionOfUnity":
        """Overlapping windows, ``pieces_per_axis[d]`` per axis, as a product cover.

        ``overlap`` widens every window relative to the plain subdivision;
        ``overhang`` additionally extends the two end windows of each axis
        beyond the box so that the endpoints are interior to their support.
        """
        if isinstance(pieces_per_axis, int):
            pieces_per_axis = [pieces_per_axis] * len(box)
        per_axis_windows = []
        for (a, b), n in zip(box, pieces_per_axis):
            h = (b - a) / n
            wins = []
            for i in range(n):
                lo = a + i * h - overlap * h
                hi = a + (i + 1) * h + overlap * h
                if i == 0:
                    lo -= overhang * h
                if i == n - 1:
                    hi += overhang * h
                wins.append((lo, hi))
            per_axis_windows.append(wins)
        cover = tuple(tuple(combo) for combo in itertools.product(*per_axis_windows))
        return cls(cover)


def integrate_with_partition(
    eta: KForm, piece: Piece, pou: PartitionOfUnity, q: QuadratureSpec = QuadratureSpec()
) -> float:
    """Integral computed as the sum of bump-weighted integrals over the cover.

    Each term is integrated over the intersection of its cover box with the
    parameter box; the result must agree with :func:`integrate` up to
    quadrature error for any valid partition.
    """
    if eta.k != piece.k or eta.k == 0:
        raise InvalidDegreeError("partition integration expects matching positive degree")
    total_parts = []
    for j in range(pou.size):
        sub = []
        for (a, b), (lo, hi) in zip(piece.param_box, pou.cover[j]):
            ca, cb = max(a, lo), min(b, hi)
            if ca >= cb:
                sub = None
                break
            sub.append((ca, cb))
        if sub is None:
            continue

        def g(t, _j=j):
            val, _ = _top_pullback_value(eta, piece.map, t)
            return pou.chi(_j, t) * val

        total_parts.append(integrate_scalar_over_box(g, sub, q))
    return piece.orientation * float(np.sum(np.asarray(total_parts)))


# ---------------------------------------------------------------------------
# exterior derivative and boundaries
# ---------------------------------------------------------------------------

def exterior_derivative(eta: KForm) -> KForm:
    """The degree-(k+1) form with coefficients
    (d eta)_J = sum_a (-1)^a d(eta_{J minus j_a}) / dy^{j_a}.

    Partials are analytic (symbolic coefficients) or central differences
    with the form's fd_step; symbolic input yields symbolic output, so a
    second application stays analytic.
    """
    k, m = eta.k, eta.m
    if k + 1 > m:
        raise InvalidDegreeError(f"no degree-{k + 1} forms in dimension {m}")
    tgt_idx = enumerate_multiindices(k + 1, m)

    if eta.is_symbolic:
        import sympy as sp

        coeffs = []
        for J in tgt_idx:
            total = sp.S.Zero
            for a, j in enumerate(J.indices):
                rest = tuple(i for i in J.indices if i != j)
                src = eta.coeffs[0] if k == 0 else eta.coeffs[rank(normalize_tuple(rest, m)[0])]
                total += (-1) ** a * sp.diff(src.expr, src.vars[j - 1])
            coeffs.append(ExprCoeff(total, m))
        return KForm(k + 1, m, coeffs, eta.fd_step)

    def make_coeff(J):
        def coeff(y):
            total = 0.0
            for a, j in enumerate(J.indices):
                rest = tuple(i for i in J.indices if i != j)
                comp = 0 if k == 0 else rank(normalize_tuple(rest, m)[0])
                total += (-1.0) ** a * eta.partial(comp, j - 1, y)
            return total

        return coeff

    return KForm(k + 1, m, [make_coeff(J) for J in tgt_idx], eta.fd_step)


def boundary_faces(piece: Piece) -> list[Piece]:
    """The 2k oriented faces of a k-piece's parameter box.

    The induced orientation is outward-normal-first: the face at the upper
    end of axis i carries the sign (-1)^(i-1) relative to the piece, the
    lower face the opposite sign.  For k = 1 the faces are 0-pieces (signed
    points).
    """
    k = piece.k
    if k == 0:
        return []
    faces = []
    for axis in range(1, k + 1):
        lo, hi = piece.param_box[axis - 1]
        rest = tuple(iv for d, iv in enumerate(piece.param_box) if d != axis - 1)
        for value, upper in ((hi, True), (lo, False)):
            sign = (-1) ** (axis - 1) if upper else (-1) ** axis
            inclusion = insert_axis_map(k, axis, value)
            faces.append(
                Piece(rest, compose(piece.map, inclusion), piece.orientation * sign)
            )
    return faces


# ---------------------------------------------------------------------------
# lemma verifiers
# ---------------------------------------------------------------------------

def verify_stokes(eta: KForm, piece: Piece, q: QuadratureSpec = QuadratureSpec()) -> float:
    """| integral of eta over the boundary - integral of d(eta) over the piece |."""
    if eta.k != piece.k - 1:
        raise InvalidDegreeError("Stokes check needs a form of degree k-1 on a k-piece")
    boundary = float(
        np.sum(np.asarray([integrate(eta, face, q) for face in boundary_faces(piece)]))
    )
    interior = integrate(exterior_derivative(eta), piece, q)
    return abs(boundary - interior)


def _check_orientation_preserving(alpha: DifferentiableMap, points) -> None:
    for t in points:
        det = float(np.linalg.det(alpha.jacobian(t)))
        if det <= 0.0:
            raise OrientationError(
                f"{alpha.name}: Jacobian determinant {det:g} <= 0 at {np.asarray(t)}"
            )


def verify_domain_transform(
    eta: KForm,
    alpha: DifferentiableMap,
    piece: Piece,
    q: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Residual of the change-of-domain identity
    | integral_Omega eta  -  integral_{alpha^{-1}(Omega)} alpha^* eta |.

    ``alpha`` must be an orientation-preserving diffeomorphism of the chart
    with a catalog inverse; alpha^{-1}(Omega) is realized by precomposing
    the piece's parametrization with the inverse.
    """
    if alpha.domain_dim != alpha.codomain_dim or alpha.codomain_dim != eta.m:
        raise DimensionMismatchError("alpha must be a diffeomorphism of the form's chart")
    sample = [alpha.inverted()(piece.map(t)) for t in piece.grid(3)]
    _check_orientation_preserving(alpha, sample)
    lhs = integrate(eta, piece, q)
    preimage = Piece(piece.param_box, compose(alpha.inverted(), piece.map), piece.orientation)
    rhs = integrate(pullback(eta, alpha), preimage, q)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class ParametricFormFamily:
    """A one-parameter family t -> g(t) * eta0 with analytic dg/dt."""

    base: KForm
    profile: Callable[[float], float]
    profile_dot: Callable[[float], float]

    def form_at(self, t: float) -> KForm:
        g = float(self.profile(t))
        return _scale_form(self.base, g)

    def dform_at(self, t: float) -> KForm:
        g = float(self.profile_dot(t))
        return _scale_form(self.base, g)


def _scale_form(eta: KForm, factor: float) -> KForm:
    return KForm(
        eta.k,
        eta.m,
        [lambda y, _c=c, _g=factor: _g * float(_c(y)) for c in eta.coeffs],
        eta.fd_step,
    )


PROFILE_FAMILIES = {
    "sin": (math.sin, math.cos),
    "linear": (lambda t: t, lambda t: 1.0),
    "constant": (lambda t: 1.0, lambda t: 0.0),
}


def verify_leibniz(
    family: ParametricFormFamily,
    piece: Piece,
    t0: float,
    dt_step: float = 1e-4,
    q: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Residual of differentiation under the integral sign at t0:
    | d/dt integral(eta_t) (central difference) - integral(d eta_t / dt) |."""
    plus = integrate(family.form_at(t0 + dt_step), piece, q)
    minus = integrate(family.form_at(t0 - dt_step), piece, q)
    lhs = (plus - minus) / (2.0 * dt_step)
    rhs = integrate(family.dform_at(t0), piece, q)
    return abs(lhs - rhs)
