"""Machine-checkable supersolution certificates for the constructed fields.

Three pipelines:

* indicator verification: the 0/1 field of a set satisfying the avoidance
  predicate is certified sample by sample, with exact interval arithmetic
  (inside the set every directional value is <= 0 because the field is
  maximal there; outside, the predicate witness makes every witness-line
  integrand vanish identically);

* distance verification: the (possibly truncated) distance field is
  certified through the proof device of translating the witness frame from
  the nearest complement point y0, where the Lipschitz comparison
  u(x +- t xi) <= |x - y0| = u(x) makes the second difference nonpositive;
  samples where the distance function is not C2 nearby are rerouted to a
  punctured lower-cut evaluation, sound because dropping a neighbourhood of
  the singularity from a nonpositive integrand only raises the value;

* punctured minimum test: at a zero of a nonnegative field, the punctured
  frame sums are minimized for a decreasing ladder of puncture radii; the
  limit witness must vanish on its lines, re-verified exactly for
  scene-backed fields and by dense sampling otherwise.

Every report satisfies #certified + #skipped + #failed = #samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry
from .errors import (
    NotAMinimumPoint,
    PointInsideU,
    PointOutsideOmega,
    UnboundedWithoutTruncation,
)
from .fields import (
    C2_NEAR,
    ScalarField,
    distance_field,
    indicator_field,
    truncated_distance_field,
)
from .frames import Frame, Subspace, as_point
from .geometry import CsgSet, depth_with_point
from .operators import OptimizerConfig, _minimize_over_frames
from .predicates import check_G, check_G_affine
from .quadrature import (
    FracParams,
    OperatorValue,
    QuadratureSpec,
    eval_directional,
    eval_directional_from,
    eval_directional_punctured,
)

CERTIFIED = "certified"
SKIPPED = "skipped"
FAILED = "failed"


@dataclass
class SampleRecord:
    index: int
    point: np.ndarray
    status: str
    value: Optional[float] = None
    lo: Optional[float] = None
    hi: Optional[float] = None
    witness: object = None
    detail: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    kind: str
    params: dict
    records: list

    def count(self, status: str) -> int:
        return sum(1 for r in self.records if r.status == status)

    @property
    def certified(self) -> int:
        return self.count(CERTIFIED)

    @property
    def skipped(self) -> int:
        return self.count(SKIPPED)

    @property
    def failed(self) -> int:
        return self.count(FAILED)

    @property
    def all_certified(self) -> bool:
        return self.failed == 0 and self.certified > 0

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "samples": len(self.records),
            "certified": self.certified,
            "skipped": self.skipped,
            "failed": self.failed,
        }


def _subspace_direction_grid(v: Subspace, count: int = 32, seed: int = 0):
    """Basis directions plus deterministic extra unit vectors of the subspace."""
    dirs = [row for row in v.basis]
    k = v.k
    if k == 1:
        return dirs
    if k == 2:
        for t in np.linspace(0.0, np.pi, count, endpoint=False)[1:]:
            dirs.append(np.cos(t) * v.basis[0] + np.sin(t) * v.basis[1])
        return dirs
    rng = np.random.default_rng(seed)
    coords = rng.standard_normal((count, k))
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    dirs.extend(coords @ v.basis)
    return dirs


def _record_value(terms) -> tuple:
    return (
        sum(t.value for t in terms),
        sum(t.lo for t in terms),
        sum(t.hi for t in terms),
    )


def _sup_value(terms) -> tuple:
    best = max(terms, key=lambda t: t.value)
    return best.value, best.lo, best.hi


# ---------------------------------------------------------------------------
# indicator construction


def verify_indicator_supersolution(
    u_set: CsgSet,
    omega: Optional[CsgSet],
    k: int,
    samples,
    s: float,
    mode: str = "frames",
    spec: QuadratureSpec = QuadratureSpec(),
    search: OptimizerConfig = OptimizerConfig(),
    resolution_deg: float = 2.0,
    tol: float = 1e-12,
) -> VerificationReport:
    """Certify the indicator field of u_set at every sample point.

    Inside the set the classical pathway applies (the field is maximal, so
    every exact directional value is <= 0).  Outside, the avoidance
    predicate supplies the witness frame or subspace whose lines carry an
    identically vanishing integrand.  Predicate failures are findings, not
    crashes; inconclusive predicates skip the sample.
    """
    if mode not in ("frames", "subspaces"):
        raise ValueError(f"unknown mode {mode!r}")
    u = indicator_field(u_set)
    records = []
    for i, raw in enumerate(samples):
        x = as_point(raw)
        if omega is not None and not omega.contains(x):
            records.append(
                SampleRecord(i, x, SKIPPED, detail={"reason": "outside omega"})
            )
            continue
        if u_set.contains(x):
            frame = Frame(np.eye(x.size)[:k])
            terms = [eval_directional(u, x, xi, s, spec) for xi in frame.directions]
            val, lo, hi = _record_value(terms)
            status = CERTIFIED if hi <= tol else FAILED
            records.append(
                SampleRecord(
                    i, x, status, val, lo, hi, frame, {"pathway": "classical_inside"}
                )
            )
            continue
        if mode == "frames":
            verdict = check_G(u_set, omega, k, x, search, resolution_deg)
        else:
            verdict = check_G_affine(u_set, k, x, search, resolution_deg)
        if verdict.status == "inconclusive":
            records.append(
                SampleRecord(i, x, SKIPPED, detail={"reason": "predicate inconclusive"})
            )
            continue
        if verdict.fails:
            records.append(
                SampleRecord(
                    i,
                    x,
                    FAILED,
                    witness=None,
                    detail={
                        "reason": "predicate fails",
                        "certificate": verdict.certificate,
                    },
                )
            )
            continue
        wit = verdict.witness
        if mode == "frames":
            dirs = list(wit.directions)
        else:
            dirs = _subspace_direction_grid(wit)
        terms = [eval_directional(u, x, xi, s, spec) for xi in dirs]
        if mode == "frames":
            val, lo, hi = _record_value(terms)
        else:
            val, lo, hi = _sup_value(terms)
        status = CERTIFIED if hi <= tol else FAILED
        records.append(
            SampleRecord(i, x, status, val, lo, hi, wit, {"pathway": "witness_lines"})
        )
    return VerificationReport(
        kind=f"indicator[{mode}]",
        params={"k": k, "s": s, "mode": mode, "tol": tol},
        records=records,
    )


# ---------------------------------------------------------------------------
# distance construction


def _witness_at_projection(
    u_set: CsgSet,
    x: np.ndarray,
    k: int,
    mode: str,
    search: OptimizerConfig,
    resolution_deg: float,
):
    """Predicate witness at the nearest complement point, nudged outward.

    The nudge (1e-9 along the radial) gives tangent frames a strict float
    margin; it perturbs the comparison value u(x) by at most 1e-9, far below
    the certification tolerance.
    """
    d, y0 = depth_with_point(u_set, x)
    if y0 is None:
        return None, None
    gap = y0 - x
    ng = float(np.linalg.norm(gap))
    y = y0 + (1e-9 / ng) * gap if ng > 1e-12 else y0
    if u_set.contains(y):
        y = y0
    try:
        if mode == "frames":
            verdict = check_G(u_set, None, k, y, search, resolution_deg)
        else:
            verdict = check_G_affine(u_set, k, y, search, resolution_deg)
    except (PointInsideU, PointOutsideOmega):
        return None, y0
    if not verdict.holds:
        return None, y0
    return verdict.witness, y0


def verify_distance_supersolution(
    u_set: CsgSet,
    k: int,
    samples,
    s: float,
    mode: str = "frames",
    truncated: bool = False,
    spec: QuadratureSpec = QuadratureSpec(),
    search: OptimizerConfig = OptimizerConfig(),
    resolution_deg: float = 2.0,
    tol: float = 1e-6,
    punctured_cuts=(1e-2, 1e-3),
) -> VerificationReport:
    """Certify the (truncated) distance field of u_set at every sample.

    Outside the set: the witness lines avoid the set, hence the field
    vanishes on them identically (re-verified exactly).  Inside: the witness
    frame at the nearest complement point is translated to the sample; the
    second difference along its lines is nonpositive, and the quadrature
    value must come out <= tol.  Non-C2 samples go through decreasing lower
    cuts, each of which upper-bounds the full integral.
    """
    if mode not in ("frames", "subspaces"):
        raise ValueError(f"unknown mode {mode!r}")
    bounded = geometry.is_bounded(u_set)
    if not bounded and not truncated and not s > 0.5:
        raise UnboundedWithoutTruncation(
            "unbounded set: use truncated=True or s > 1/2"
        )
    if truncated:
        u = truncated_distance_field(u_set)
    else:
        u = distance_field(u_set, unbounded_ok=not bounded)

    records = []
    for i, raw in enumerate(samples):
        x = as_point(raw)
        if not u_set.contains(x):
            if mode == "frames":
                verdict = check_G(u_set, None, k, x, search, resolution_deg)
            else:
                verdict = check_G_affine(u_set, k, x, search, resolution_deg)
            if verdict.status == "inconclusive":
                records.append(
                    SampleRecord(i, x, SKIPPED, detail={"reason": "predicate inconclusive"})
                )
                continue
            if verdict.fails:
                records.append(
                    SampleRecord(
                        i,
                        x,
                        FAILED,
                        detail={"reason": "predicate fails", "certificate": verdict.certificate},
                    )
                )
                continue
            wit = verdict.witness
            dirs = wit.directions if mode == "frames" else wit.basis
            exact = all(geometry.line_avoids(u_set, x, xi) for xi in dirs)
            records.append(
                SampleRecord(
                    i,
                    x,
                    CERTIFIED if exact else FAILED,
                    0.0,
                    0.0,
                    0.0,
                    wit,
                    {"pathway": "vanishes_on_witness_lines"},
                )
            )
            continue

        wit, y0 = _witness_at_projection(u_set, x, k, mode, search, resolution_deg)
        if wit is None:
            records.append(
                SampleRecord(
                    i,
                    x,
                    SKIPPED,
                    detail={"reason": "no witness at projection", "projection": y0},
                )
            )
            continue
        dirs = (
            list(wit.directions)
            if mode == "frames"
            else _subspace_direction_grid(wit)
        )
        smooth = u.smoothness_at(x) == C2_NEAR
        if smooth:
            terms = [eval_directional(u, x, xi, s, spec) for xi in dirs]
            pathway = "classical"
        else:
            cut = min(punctured_cuts)
            terms = [eval_directional_from(u, x, xi, s, cut, spec) for xi in dirs]
            pathway = "punctured_cut"
        if mode == "frames":
            val, lo, hi = _record_value(terms)
        else:
            val, lo, hi = _sup_value(terms)
        status = CERTIFIED if hi <= tol else FAILED
        records.append(
            SampleRecord(
                i,
                x,
                status,
                val,
                lo,
                hi,
                wit,
                {"pathway": pathway, "projection": y0},
            )
        )
    return VerificationReport(
        kind=f"distance[{mode}]{'[truncated]' if truncated else ''}",
        params={"k": k, "s": s, "mode": mode, "truncated": truncated, "tol": tol},
        records=records,
    )


# ---------------------------------------------------------------------------
# punctured minimum pipeline


@dataclass
class PuncturedReport:
    point: np.ndarray
    mode: str
    eps_values: list
    minima: list
    minima_lo: list
    minima_hi: list
    witnesses: list
    limit_witness: object
    lines_verified: bool
    vanish_tol: float = 1e-12
    detail: dict = field(default_factory=dict)

    @property
    def minima_vanish(self) -> bool:
        # exact pathways give literal zeros; quadrature pathways are judged
        # against the certified bracket floor (tail tolerance)
        return all(
            lo <= 1e-12 and v <= self.vanish_tol
            for v, lo in zip(self.minima, self.minima_lo)
        )


def _punctured_objective(u, x, s, eps, spec, mode):
    if mode == "frames":

        def objective(f: Frame) -> OperatorValue:
            terms = [
                eval_directional_punctured(u, x, xi, s, eps, spec)
                for xi in f.directions
            ]
            val, lo, hi = _record_value(terms)
            return OperatorValue(val, lo, hi, witness=f)

    else:

        def objective(f: Frame) -> OperatorValue:
            dirs = _subspace_direction_grid(Subspace(f.directions))
            terms = [
                eval_directional_punctured(u, x, xi, s, eps, spec) for xi in dirs
            ]
            val, lo, hi = _sup_value(terms)
            return OperatorValue(val, lo, hi, witness=f)

    return objective


def _line_vanishes(u: ScalarField, x: np.ndarray, xi: np.ndarray, span: float) -> bool:
    """u == 0 along the full line: exact for scene-backed fields, else sampled."""
    if u.scene is not None:
        return geometry.line_avoids(u.scene, x, xi)
    taus = np.concatenate([-np.geomspace(1e-6, span, 5000)[::-1], np.geomspace(1e-6, span, 5000)])
    vals = np.abs([u.value(x + t * xi) for t in taus])
    return float(np.max(vals)) <= 1e-9


def punctured_min_test(
    u: ScalarField,
    x0,
    params: FracParams,
    eps_values=None,
    mode: str = "frames",
    spec: QuadratureSpec = QuadratureSpec(),
    opt: OptimizerConfig = OptimizerConfig(),
    search: OptimizerConfig = OptimizerConfig(),
) -> PuncturedReport:
    """Minimize punctured sums over frames/subspaces along a puncture ladder.

    Requires a nonnegative field with u(x0) = 0.  Witnesses are warm-started
    across the ladder; the limit witness is re-verified to vanish on its
    lines (exactly when the field is scene-backed).
    """
    x = as_point(x0)
    v0 = u.value(x)
    if abs(v0) > 1e-12:
        raise NotAMinimumPoint(f"u(x0) = {v0:.3e} is not 0")
    if eps_values is None:
        eps_values = [2.0**-j for j in range(3, 11)]
    eps_values = sorted(eps_values, reverse=True)

    initial = []
    if u.scene is not None:
        try:
            if mode == "frames":
                verdict = check_G(u.scene, None, params.k, x, search)
            else:
                verdict = check_G_affine(u.scene, params.k, x, search)
            if verdict.holds:
                w = verdict.witness
                initial.append(Frame(w.directions if isinstance(w, Frame) else w.basis))
        except (PointInsideU, PointOutsideOmega):
            pass

    minima, minima_lo, minima_hi, witnesses = [], [], [], []
    warm = list(initial)
    for eps in eps_values:
        objective = _punctured_objective(u, x, params.s, eps, spec, mode)
        best, frame = _minimize_over_frames(
            objective, params.n, params.k, opt, initial=warm
        )
        minima.append(best.value)
        minima_lo.append(best.lo)
        minima_hi.append(best.hi)
        witnesses.append(frame)
        warm = [frame] + list(initial)

    limit = witnesses[-1]
    span = 2.0 * (np.linalg.norm(x) + (u.scene.bounding_radius() if u.scene is not None and np.isfinite(u.scene.bounding_radius()) else 10.0) + 1.0)
    verified = all(_line_vanishes(u, x, xi, span) for xi in limit.directions)
    wit_out = limit if mode == "frames" else Subspace(limit.directions)
    return PuncturedReport(
        point=x,
        mode=mode,
        eps_values=list(eps_values),
        minima=minima,
        witnesses=witnesses,
        limit_witness=wit_out,
        lines_verified=verified,
    )


# ---------------------------------------------------------------------------
# positivity sets


@dataclass
class PositivityReport:
    threshold: float
    grid_shape: tuple
    positive_points: np.ndarray
    zero_points: np.ndarray

    @property
    def minima_candidates(self) -> np.ndarray:
        return self.zero_points


def positivity_set_report(
    u: ScalarField, box: geometry.Box, h: float, threshold: float = 1e-12
) -> PositivityReport:
    """Grid classification of {u > threshold} with the zero set alongside."""
    axes = geometry._grid_axes(box, h)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = u.values(pts)
    positive = vals > threshold
    return PositivityReport(
        threshold=threshold,
        grid_shape=tuple(len(a) for a in axes),
        positive_points=pts[positive],
        zero_points=pts[~positive],
    )
