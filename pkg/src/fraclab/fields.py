"""Bounded scalar fields the operators act on.

Every field carries its own sup bound (the quadrature tail truncation is
certified from it without global scans) and a smoothness tag that gates which
evaluation pathway is legal: C2_near admits classical pointwise quadrature,
Lipschitz fields are probed per point for local smoothness, LSC_only fields
must provide an exact line restriction (indicators) or go through the
punctured pathway.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import geometry
from .errors import InvalidDimension, UnboundedSet
from .frames import as_point, unit_direction

C2_NEAR = "C2_near"
LIPSCHITZ = "Lipschitz"
LSC_ONLY = "LSC_only"

EXACT_INDICATOR = "exact_indicator"
CALLABLE = "callable"


@dataclass
class LineRestriction:
    """Restriction tau -> u(x + tau*xi) of a field to a full line."""

    kind: str  # EXACT_INDICATOR or CALLABLE
    base_value: float
    smooth: str
    intervals: Optional[list] = None  # {tau : u = 1}, for exact indicators
    func: Optional[Callable[[float], float]] = None

    def __call__(self, tau: float) -> float:
        if self.kind == EXACT_INDICATOR:
            return 1.0 if geometry.intervals_contain(self.intervals, tau) else 0.0
        return self.func(tau)


class ScalarField:
    """A bounded function on R^N with evaluation metadata."""

    def __init__(
        self,
        evaluator,
        sup_bound: float,
        smoothness: str,
        dim: int,
        *,
        name: str = "field",
        scene: Optional[geometry.CsgSet] = None,
        lipschitz: Optional[float] = None,
        hessian=None,
        batch_evaluator=None,
        line_provider=None,
        smoothness_probe=None,
    ):
        self._eval = evaluator
        self.sup_bound = float(sup_bound)
        self.smoothness = smoothness
        self.dim = int(dim)
        self.name = name
        self.scene = scene
        self.lipschitz = lipschitz
        self._hessian = hessian
        self._batch = batch_evaluator
        self._line_provider = line_provider
        self._probe = smoothness_probe

    def value(self, x) -> float:
        return float(self._eval(as_point(x)))

    def values(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self._batch is not None:
            return np.asarray(self._batch(pts), dtype=float)
        return np.array([self._eval(p) for p in pts], dtype=float)

    def smoothness_at(self, x) -> str:
        if self._probe is not None:
            return self._probe(as_point(x))
        return self.smoothness

    def hessian_at(self, x) -> Optional[np.ndarray]:
        if self._hessian is None:
            return None
        return np.asarray(self._hessian(as_point(x)), dtype=float)

    def line_restriction(self, x, xi) -> LineRestriction:
        p = as_point(x)
        d = unit_direction(xi)
        if self._line_provider is not None:
            return self._line_provider(p, d)
        return LineRestriction(
            kind=CALLABLE,
            base_value=self.value(p),
            smooth=self.smoothness_at(p),
            func=lambda tau: self.value(p + tau * d),
        )

    def __repr__(self):
        return f"ScalarField({self.name}, dim={self.dim}, sup={self.sup_bound})"


def restrict_to_line(u: ScalarField, x, xi) -> LineRestriction:
    return u.line_restriction(x, xi)


# ---------------------------------------------------------------------------
# constructors


def indicator_field(s: geometry.CsgSet) -> ScalarField:
    """Characteristic function of the open set: 1 inside, 0 elsewhere."""

    def line_provider(x, xi):
        return LineRestriction(
            kind=EXACT_INDICATOR,
            base_value=1.0 if s.contains(x) else 0.0,
            smooth=LSC_ONLY,
            intervals=s.line_intervals(x, xi),
        )

    return ScalarField(
        evaluator=lambda p: 1.0 if s.contains(p) else 0.0,
        batch_evaluator=lambda pts: s.contains_batch(pts).astype(float),
        sup_bound=1.0,
        smoothness=LSC_ONLY,
        dim=s.dim,
        name="indicator",
        scene=s,
        line_provider=line_provider,
    )


def _distance_smoothness_probe(s: geometry.CsgSet, step: float = 1e-5, tol: float = 1e-3):
    """Detect non-C2 points (boundary kinks, medial axis) of the distance field.

    One-sided directional difference quotients are compared at the given
    step; a mismatch beyond tol demotes the point to Lipschitz.
    """
    n = s.dim
    rng = np.random.default_rng(20240)
    extra = rng.standard_normal((2, n))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    probes = np.concatenate([np.eye(n), extra])

    def probe(x):
        ux = geometry.distance_to_complement(s, x)
        for d in probes:
            up = geometry.distance_to_complement(s, x + step * d)
            um = geometry.distance_to_complement(s, x - step * d)
            if abs((up - ux) - (ux - um)) / step > tol:
                return LIPSCHITZ
        return C2_NEAR

    return probe


def distance_field(s: geometry.CsgSet, *, unbounded_ok: bool = False) -> ScalarField:
    """dist(x, complement of s); positive exactly on the open set.

    Unbounded sets are rejected unless unbounded_ok is set (legitimate for
    s > 1/2, where the Lipschitz tail bound replaces the sup-based one).
    """
    bound = s.bounding_radius()
    if bound == geometry.INF and not unbounded_ok:
        raise UnboundedSet(
            "distance field over an unbounded set: use the truncated variant "
            "or pass unbounded_ok=True (requires s > 1/2 at evaluation time)"
        )
    return ScalarField(
        evaluator=lambda p: geometry.distance_to_complement(s, p),
        sup_bound=bound if bound < geometry.INF else float("inf"),
        smoothness=LIPSCHITZ,
        dim=s.dim,
        name="distance",
        scene=s,
        lipschitz=1.0,
        smoothness_probe=_distance_smoothness_probe(s),
    )


def truncated_distance_field(s: geometry.CsgSet) -> ScalarField:
    """min(dist(x, complement of s), 1); bounded for any set."""
    return ScalarField(
        evaluator=lambda p: min(geometry.distance_to_complement(s, p), 1.0),
        sup_bound=1.0,
        smoothness=LIPSCHITZ,
        dim=s.dim,
        name="truncated_distance",
        scene=s,
        lipschitz=1.0,
        smoothness_probe=_distance_smoothness_probe(s),
    )


def gaussian_bump(center, width: float) -> ScalarField:
    """u(x) = exp(-|x - center|^2 / width^2), with analytic Hessian."""
    c = as_point(center)
    if width <= 0:
        raise InvalidDimension("width must be > 0")
    w2 = float(width) ** 2

    def evaluator(p):
        return np.exp(-np.dot(p - c, p - c) / w2)

    def hessian(p):
        d = p - c
        u = np.exp(-np.dot(d, d) / w2)
        return u * (4.0 * np.outer(d, d) / w2**2 - 2.0 * np.eye(c.size) / w2)

    return ScalarField(
        evaluator=evaluator,
        batch_evaluator=lambda pts: np.exp(-np.sum((pts - c) ** 2, axis=1) / w2),
        sup_bound=1.0,
        smoothness=C2_NEAR,
        dim=c.size,
        name="gaussian_bump",
        hessian=hessian,
    )


def quadratic_bump(coeffs, center=None) -> ScalarField:
    """u(x) = exp(-sum_i a_i (x_i - c_i)^2); Hessian at the center is -2 diag(a)."""
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if np.any(a <= 0):
        raise InvalidDimension("all quadratic coefficients must be > 0")
    c = np.zeros(a.size) if center is None else as_point(center)

    def evaluator(p):
        d = p - c
        return np.exp(-float(np.dot(a * d, d)))

    def hessian(p):
        d = p - c
        u = evaluator(p)
        g = -2.0 * a * d
        return u * (np.outer(g, g) - 2.0 * np.diag(a))

    return ScalarField(
        evaluator=evaluator,
        sup_bound=1.0,
        smoothness=C2_NEAR,
        dim=a.size,
        name="quadratic_bump",
        hessian=hessian,
    )


def getoor_profile(s: float, dim: int = 1, axis: int = 0) -> ScalarField:
    """u(x) = (1 - x_axis^2)_+^s, constant in the other coordinates.

    A quadrature oracle with a known closed-form directional value at the
    origin along the axis.
    """
    if not 0 < s < 1:
        raise InvalidDimension("profile exponent must lie in (0, 1)")
    if not 0 <= axis < dim:
        raise InvalidDimension("axis outside ambient dimension")

    def evaluator(p):
        t = 1.0 - p[axis] ** 2
        return t**s if t > 0 else 0.0

    return ScalarField(
        evaluator=evaluator,
        sup_bound=1.0,
        smoothness=C2_NEAR,
        dim=dim,
        name=f"getoor_profile(s={s})",
    )


def constant_field(value: float, dim: int) -> ScalarField:
    v = float(value)
    return ScalarField(
        evaluator=lambda p: v,
        batch_evaluator=lambda pts: np.full(pts.shape[0], v),
        sup_bound=abs(v),
        smoothness=C2_NEAR,
        dim=dim,
        name=f"constant({v})",
        hessian=lambda p: np.zeros((dim, dim)),
    )


def from_callable(
    func,
    sup_bound: float,
    dim: int,
    *,
    smoothness: str = C2_NEAR,
    hessian=None,
    lipschitz=None,
    name: str = "callable_field",
) -> ScalarField:
    """Wrap a plain function as a field (tests and demos)."""
    return ScalarField(
        evaluator=lambda p: float(func(p)),
        sup_bound=sup_bound,
        smoothness=smoothness,
        dim=dim,
        name=name,
        hessian=hessian,
        lipschitz=lipschitz,
    )
