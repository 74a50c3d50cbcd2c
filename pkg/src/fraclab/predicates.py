"""Geometric conditions on positivity sets and their differential consequences.

Two avoidance predicates are decided at a query point x outside the set U:

* line condition: there exists an orthonormal k-frame whose k full lines
  through x miss U;
* subspace condition: there exists a k-dimensional linear subspace V with
  (x + V) disjoint from U (stronger; implies the line condition
  direction-wise).

Holds verdicts always carry a witness that re-verifies under the exact
interval / projection rules.  Fails verdicts are only produced for N <= 3,
where a direction or plane grid together with a continuity margin (a line's
distance to a primitive is 1-Lipschitz in the direction angle) excludes all
candidates; anything weaker is reported Inconclusive with the resolution.

The curvature checker evaluates principal curvatures of an implicit C2
boundary patch with the graph convention: writing the set locally as an
epigraph {x_N > f(x')} with the inner normal along +e_N, the curvatures are
the eigenvalues of D^2 f, equal to those of -P (D^2 phi / |grad phi|) P on
the tangent space for any level function phi positive inside the set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import geometry
from .errors import (
    DegenerateGradient,
    InvalidDimension,
    NotOnBoundary,
    PointInsideU,
    PointOutsideOmega,
)
from .frames import Frame, Subspace, as_point, complete_to_basis, random_frame
from .geometry import (
    Ball,
    Box,
    CsgSet,
    PredicateVerdict,
    UndecidablePrimitive,
    affine_meet_witness,
    affine_subspace_avoids,
    connected_components,
    distance_to_complement,
    is_component_convex,
    line_avoids,
)
from .operators import OptimizerConfig

BIG_LENGTH = 1e6


# ---------------------------------------------------------------------------
# shared helpers


def _positive_balls(s: CsgSet):
    return [
        prim for prim, neg in geometry.collect_primitives(s) if isinstance(prim, Ball) and not neg
    ]


def _chord_penalty(s: CsgSet, x: np.ndarray, xi: np.ndarray) -> float:
    total = 0.0
    for a, b in s.line_intervals(x, xi):
        if np.isfinite(a) and np.isfinite(b):
            total += b - a
        else:
            total += BIG_LENGTH
    return total


def _frame_penalty(s: CsgSet, x: np.ndarray, frame: Frame) -> float:
    return sum(_chord_penalty(s, x, xi) for xi in frame.directions)


def _frame_avoids(s: CsgSet, x: np.ndarray, frame: Frame) -> bool:
    return all(line_avoids(s, x, xi) for xi in frame.directions)


def _ball_avoiding_direction_candidates(s: CsgSet, x: np.ndarray):
    """Deterministic direction candidates built from ball primitives.

    Directions orthogonal to one radial vector keep the corresponding full
    line at distance |c - x| > r from the ball center; in R^3 the cross
    product of two radials avoids both balls at once.
    """
    balls = _positive_balls(s)
    n = x.size
    out = []
    radials = [b.center - x for b in balls]
    cross_dirs = []
    if n == 3 and len(radials) >= 2:
        for r1, r2 in itertools.combinations(radials, 2):
            c = np.cross(r1, r2)
            nc = np.linalg.norm(c)
            if nc > 1e-10:
                cross_dirs.append(c / nc)
    out.extend(cross_dirs)
    for r in radials:
        nr = np.linalg.norm(r)
        if nr < 1e-12:
            continue
        rh = r / nr
        # exact tangents paired with the cross directions
        for c in cross_dirs:
            t = np.cross(c, rh)
            nt = np.linalg.norm(t)
            if nt > 1e-10:
                out.append(t / nt)
        base = complete_to_basis(rh[None, :])
        out.extend(base[1:])
    return out


def _complete_avoiding_frame(s: CsgSet, x: np.ndarray, seed_dirs, k: int):
    """Try to grow seed directions into a k-frame of exactly avoiding lines."""
    avoiding = [d for d in seed_dirs if line_avoids(s, x, d)]
    for first in avoiding:
        rows = [first]
        # greedy: extend with avoiding directions orthogonal to what we have
        for d in avoiding:
            if len(rows) == k:
                break
            if all(abs(np.dot(d, r)) < 1e-9 for r in rows):
                rows.append(d)
        if len(rows) < k and x.size == 3 and len(rows) == 1:
            # scan the circle orthogonal to the first direction
            basis = complete_to_basis(np.array(rows))[1:]
            for psi in np.deg2rad(np.arange(0.0, 180.0, 1.0)):
                d = np.cos(psi) * basis[0] + np.sin(psi) * basis[1]
                if line_avoids(s, x, d):
                    rows.append(d)
                    break
        if len(rows) == k:
            f = Frame(np.array(rows))
            if _frame_avoids(s, x, f):
                return f
    return None


def _tangent_plane_frames(s: CsgSet, x: np.ndarray, k: int):
    """Frames scanned inside planes orthogonal to ball radials (N = 3, k = 2).

    At a point on (or near) a ball boundary, every avoiding line must stay in
    the tangent plane, so the frame search reduces to one in-plane rotation.
    """
    if x.size != 3 or k != 2:
        return None
    for b in _positive_balls(s):
        r = b.center - x
        nr = np.linalg.norm(r)
        if nr < 1e-12:
            continue
        basis = complete_to_basis((r / nr)[None, :])[1:]
        for psi in np.deg2rad(np.arange(0.0, 90.0, 1.0)):
            d1 = np.cos(psi) * basis[0] + np.sin(psi) * basis[1]
            d2 = -np.sin(psi) * basis[0] + np.cos(psi) * basis[1]
            f = Frame(np.stack([d1, d2]))
            if _frame_avoids(s, x, f):
                return f
    return None


def _holds_frame_search(s: CsgSet, x: np.ndarray, k: int, opt: OptimizerConfig):
    """Search for an exactly avoiding k-frame; None when none was found."""
    n = x.size
    exact = []
    for combo in itertools.combinations(range(n), k):
        f = Frame(np.eye(n)[list(combo)])
        if _frame_avoids(s, x, f):
            exact.append(f)
    if exact:
        return min(exact, key=lambda f: f.sort_key())

    seeds = _ball_avoiding_direction_candidates(s, x)
    if seeds:
        f = _complete_avoiding_frame(s, x, seeds, k)
        if f is not None:
            return f
    f = _tangent_plane_frames(s, x, k)
    if f is not None:
        return f

    # penalty descent: total chord length of the k lines, exact from intervals
    best_f, best_p = None, np.inf
    for i in range(opt.restarts):
        f = random_frame(n, k, opt.seed + 523 * i)
        p = _frame_penalty(s, x, f)
        if p < best_p:
            best_f, best_p = f, p
    if best_p == 0.0 and _frame_avoids(s, x, best_f):
        return best_f
    from .frames import perturb_frame

    cur_f, cur_p = best_f, best_p
    counter = itertools.count(opt.seed + 77)
    iters = 0
    for step in opt.step_schedule:
        while iters < opt.max_iters:
            improved = False
            for _ in range(opt.proposals):
                trial = perturb_frame(cur_f, step, next(counter))
                tp = _frame_penalty(s, x, trial)
                iters += 1
                if tp < cur_p:
                    cur_f, cur_p = trial, tp
                    improved = True
            if cur_p == 0.0 and _frame_avoids(s, x, cur_f):
                return cur_f
            if not improved:
                break
        if iters >= opt.max_iters:
            break
    if cur_p == 0.0 and _frame_avoids(s, x, cur_f):
        return cur_f
    return None


def _direction_hit_margin(s: CsgSet, x: np.ndarray, xi: np.ndarray):
    """Angular robustness of a hitting line: max depth(p)/|p - x| over witnesses.

    Any direction within that angle of xi also meets the set: rotating the
    line moves the witness p = x + tau*xi by at most |tau| * angle, less
    than its depth inside the set.
    """
    ivs = s.line_intervals(x, xi)
    if not ivs:
        return np.inf, None  # avoiding direction
    bound = s.bounding_radius()
    clip = 2.0 * ((bound if np.isfinite(bound) else 10.0) + float(np.linalg.norm(x)) + 1.0)
    best, best_p = 0.0, None
    for a, b in ivs:
        a_c = max(a, -clip)
        b_c = min(b, clip)
        if a_c >= b_c:
            continue
        for frac in (0.5, 0.25, 0.75):
            tau = a_c + frac * (b_c - a_c)
            if abs(tau) < 1e-12:
                continue
            p = x + tau * xi
            depth = distance_to_complement(s, p)
            margin = depth / abs(tau)
            if margin > best:
                best, best_p = margin, p
    return best, best_p


def _angle_mod_sign(u: np.ndarray, v: np.ndarray) -> float:
    c = min(1.0, abs(float(np.dot(u, v))))
    return float(np.arccos(c))


def _grid_directions(n: int, res_rad: float):
    if n == 2:
        return [np.array([np.cos(t), np.sin(t)]) for t in np.arange(0.0, np.pi, res_rad)]
    if n == 3:
        from .operators import _hemisphere_grid

        return list(_hemisphere_grid(res_rad))
    raise InvalidDimension("direction grids only for N <= 3")


def _refute_lines(s: CsgSet, x: np.ndarray, k: int, res_deg: float):
    """Grid + margin refutation for the line condition, N <= 3.

    Returns ("holds", frame), ("fails", certificate) or ("inconclusive", data).
    """
    n = x.size
    res = np.deg2rad(res_deg)
    cover = 0.5 * res if n == 2 else 0.75 * res
    dirs = _grid_directions(n, res)

    margins, witnesses = [], []
    weak = []  # avoid or weakly-hit directions: possible avoid zone
    for d in dirs:
        m, p = _direction_hit_margin(s, x, d)
        margins.append(m)
        witnesses.append(p)
        if not np.isfinite(m) or m <= cover:
            weak.append(d)

    finite = [m for m in margins if np.isfinite(m)]
    if len(finite) == len(margins) and len(weak) == 0:
        # every direction robustly hits: no avoiding line at all, any k fails
        i = int(np.argmin(margins))
        return "fails", {
            "certificate": witnesses[i],
            "min_margin_deg": float(np.rad2deg(margins[i])),
        }
    if k == 1:
        return "inconclusive", {"weak_directions": len(weak)}
    if not weak:
        i = int(np.argmin(margins))
        return "fails", {
            "certificate": witnesses[i],
            "min_margin_deg": float(np.rad2deg(margins[i])),
        }
    # k >= 2: exclude frames when the possible-avoid zone is angularly small,
    # so it cannot contain two orthonormal directions
    diam = 0.0
    for u, v in itertools.combinations(weak, 2):
        diam = max(diam, _angle_mod_sign(u, v))
        if diam + 2 * cover >= 0.5 * np.pi:
            return "inconclusive", {"avoid_zone_diameter_deg": float(np.rad2deg(diam))}
    hit_ws = [w for w, m in zip(witnesses, margins) if np.isfinite(m) and w is not None]
    cert = hit_ws[0] if hit_ws else None
    return "fails", {
        "certificate": cert,
        "avoid_zone_diameter_deg": float(np.rad2deg(diam)),
    }


def check_G(
    u_set: CsgSet,
    omega: Optional[CsgSet],
    k: int,
    x,
    search: OptimizerConfig = OptimizerConfig(),
    resolution_deg: float = 2.0,
) -> PredicateVerdict:
    """Decide the line condition at x: k orthonormal full lines missing U.

    Lines are tested against U over all of R regardless of omega; omega only
    enters through the precondition x in omega \\ U.
    """
    p = as_point(x)
    if u_set.contains(p):
        raise PointInsideU(f"{p.tolist()} lies in U")
    if omega is not None and not omega.contains(p):
        raise PointOutsideOmega(f"{p.tolist()} lies outside Omega")
    if not 1 <= k <= p.size:
        raise InvalidDimension(f"need 1 <= k <= N, got k={k}")

    frame = _holds_frame_search(u_set, p, k, search)
    if frame is not None:
        assert _frame_avoids(u_set, p, frame)
        return PredicateVerdict(
            "holds", witness=frame.canonicalized(), resolution=resolution_deg
        )
    if p.size <= 3:
        status, data = _refute_lines(u_set, p, k, resolution_deg)
        if status == "fails":
            return PredicateVerdict(
                "fails",
                certificate=data.pop("certificate"),
                resolution=resolution_deg,
                detail=data,
            )
        return PredicateVerdict("inconclusive", resolution=resolution_deg, detail=data)
    return PredicateVerdict("inconclusive", resolution=resolution_deg)


# ---------------------------------------------------------------------------
# subspace condition


def _subspace_candidates(s: CsgSet, x: np.ndarray, k: int, opt: OptimizerConfig):
    n = x.size
    for combo in itertools.combinations(range(n), k):
        yield Subspace(np.eye(n)[list(combo)])
    balls = _positive_balls(s)
    radials = [b.center - x for b in balls]
    if radials:
        stack = np.array(radials)
        _, sv, vt = np.linalg.svd(stack, full_matrices=True)
        rank = int(np.sum(sv > 1e-10))
        null = vt[rank:]
        if null.shape[0] >= k:
            for combo in itertools.combinations(range(null.shape[0]), k):
                yield Subspace(null[list(combo)])
    for i in range(opt.restarts):
        yield Subspace(random_frame(n, k, opt.seed + 911 * i).directions)


def _try_avoids(s: CsgSet, x: np.ndarray, v: Subspace):
    try:
        return affine_subspace_avoids(s, x, v)
    except UndecidablePrimitive:
        return None


def _ball_subspace_penalty(s: CsgSet, x: np.ndarray, v: Subspace) -> float:
    pen = 0.0
    for b in _positive_balls(s):
        w = b.center - x
        resid = w - v.basis.T @ (v.basis @ w)
        pen += max(0.0, b.radius - float(np.linalg.norm(resid))) ** 2
    return pen


def _holds_subspace_search(s: CsgSet, x: np.ndarray, k: int, opt: OptimizerConfig):
    exact = []
    for v in _subspace_candidates(s, x, k, opt):
        if _try_avoids(s, x, v) is True:
            exact.append(v)
    if exact:
        return min(exact, key=lambda v: Frame(v.basis).sort_key())
    if not _positive_balls(s):
        return None
    from .frames import perturb_frame

    cur = Subspace(random_frame(x.size, k, opt.seed + 5).directions)
    cur_p = _ball_subspace_penalty(s, x, cur)
    counter = itertools.count(opt.seed + 303)
    iters = 0
    for step in opt.step_schedule:
        while iters < opt.max_iters:
            improved = False
            for _ in range(opt.proposals):
                trial = Subspace(perturb_frame(Frame(cur.basis), step, next(counter)).directions)
                tp = _ball_subspace_penalty(s, x, trial)
                iters += 1
                if tp < cur_p:
                    cur, cur_p = trial, tp
                    improved = True
            if cur_p == 0.0 and _try_avoids(s, x, cur) is True:
                return cur
            if not improved:
                break
        if iters >= opt.max_iters:
            break
    if _try_avoids(s, x, cur) is True:
        return cur
    return None


def _plane_witness_margin(s: CsgSet, x: np.ndarray, basis: np.ndarray, needed: float):
    """Best margin depth/|p-x| over witnesses of (x+V) meeting the set.

    Evaluated lazily with early exit once the margin clears `needed`; the
    returned value is then only a lower bound on the achievable margin.
    """
    best, best_p = 0.0, None

    def score(p) -> bool:
        nonlocal best, best_p
        d = float(np.linalg.norm(p - x))
        if d < 1e-12:
            return False
        margin = distance_to_complement(s, p) / d
        if margin > best:
            best, best_p = margin, p
        return best > needed

    for b in _positive_balls(s):
        w = x + basis.T @ (basis @ (b.center - x))
        if s.contains(w) and score(w):
            return best, best_p
    wit = affine_meet_witness(s, x, Subspace(basis))
    if wit is not None and s.contains(wit) and score(wit):
        return best, best_p
    seen_pts = geometry._subspace_samples(
        x, basis, 1.0 + float(np.linalg.norm(x)) + min(s.bounding_radius(), 8.0)
    )
    inside = s.contains_batch(seen_pts)
    idx = np.nonzero(inside)[0]
    for i in idx[:: max(1, len(idx) // 16)]:
        if score(seen_pts[i]):
            return best, best_p
    # local pattern refinement in-plane around the best witness
    if best_p is not None:
        t = basis @ (best_p - x)
        step = 0.25 * max(1.0, float(np.linalg.norm(t)))
        for _ in range(24):
            improved = False
            for dt in np.vstack([np.eye(basis.shape[0]), -np.eye(basis.shape[0])]):
                cand = x + basis.T @ (t + step * dt)
                if not s.contains(cand):
                    continue
                m = distance_to_complement(s, cand) / max(float(np.linalg.norm(cand - x)), 1e-12)
                if m > best:
                    best, best_p, t = m, cand, t + step * dt
                    improved = True
            if best > needed:
                return best, best_p
            if not improved:
                step *= 0.5
                if step < 1e-4:
                    break
    return best, best_p


def check_G_affine(
    u_set: CsgSet,
    k: int,
    x,
    search: OptimizerConfig = OptimizerConfig(),
    resolution_deg: float = 2.0,
) -> PredicateVerdict:
    """Decide the subspace condition at x: a k-dim V with (x+V) missing U."""
    p = as_point(x)
    if u_set.contains(p):
        raise PointInsideU(f"{p.tolist()} lies in U")
    n = p.size
    if not 1 <= k <= n:
        raise InvalidDimension(f"need 1 <= k <= N, got k={k}")

    if k == 1:
        inner = check_G(u_set, None, 1, p, search, resolution_deg)
        if inner.holds:
            return PredicateVerdict(
                "holds",
                witness=Subspace(inner.witness.directions),
                resolution=resolution_deg,
            )
        return inner

    if k == n:
        wit = affine_meet_witness(u_set, p, Subspace(np.eye(n)))
        if wit is None:
            return PredicateVerdict("holds", witness=Subspace(np.eye(n)))
        return PredicateVerdict("fails", certificate=wit, resolution=resolution_deg)

    v = _holds_subspace_search(u_set, p, k, search)
    if v is not None:
        assert _try_avoids(u_set, p, v) is True
        return PredicateVerdict("holds", witness=v, resolution=resolution_deg)

    if n == 3 and k == 2:
        res = np.deg2rad(resolution_deg)
        cover = 0.75 * res
        normals = _grid_directions(3, res)
        worst, worst_p = np.inf, None
        for nrm in normals:
            basis = complete_to_basis(nrm[None, :])[1:]
            status = _try_avoids(u_set, p, Subspace(basis))
            if status is True:
                return PredicateVerdict(
                    "holds", witness=Subspace(basis), resolution=resolution_deg
                )
            margin, wit = _plane_witness_margin(u_set, p, basis, needed=2.0 * cover)
            if wit is None or margin <= cover:
                return PredicateVerdict(
                    "inconclusive",
                    resolution=resolution_deg,
                    detail={"undecided_normal": nrm.tolist(), "margin": margin},
                )
            if margin < worst:
                worst, worst_p = margin, wit
        return PredicateVerdict(
            "fails",
            certificate=worst_p,
            resolution=resolution_deg,
            detail={"min_margin_deg": float(np.rad2deg(worst))},
        )
    return PredicateVerdict("inconclusive", resolution=resolution_deg)


# ---------------------------------------------------------------------------
# curvature


@dataclass
class ImplicitSurfacePatch:
    """C2 level function with phi > 0 inside the set and phi = 0 on the patch."""

    phi: Callable
    grad: Optional[Callable] = None
    hess: Optional[Callable] = None
    name: str = "patch"

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        h = 1e-6 * (1.0 + float(np.linalg.norm(x)))
        n = x.size
        g = np.zeros(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            g[i] = (self.phi(x + e) - self.phi(x - e)) / (2 * h)
        return g

    def hessian(self, x: np.ndarray) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        h = 1e-4 * (1.0 + float(np.linalg.norm(x)))
        n = x.size
        out = np.zeros((n, n))
        f0 = self.phi(x)
        e = np.eye(n)
        for i in range(n):
            out[i, i] = (self.phi(x + h * e[i]) + self.phi(x - h * e[i]) - 2 * f0) / h**2
        for i in range(n):
            for j in range(i + 1, n):
                pij, mij = h * (e[i] + e[j]), h * (e[i] - e[j])
                out[i, j] = out[j, i] = (
                    self.phi(x + pij)
                    + self.phi(x - pij)
                    - self.phi(x + mij)
                    - self.phi(x - mij)
                ) / (4 * h**2)
        return out


def principal_curvatures(patch: ImplicitSurfacePatch, x) -> np.ndarray:
    """Principal curvatures at a boundary point, ascending, graph convention.

    Equal to the eigenvalues of -P (D^2 phi) P / |grad phi| restricted to the
    tangent space; the paraboloid epigraph {x_3 > (x_1^2+x_2^2)/2} pins the
    sign at the origin to (+1, +1).
    """
    p = as_point(x)
    val = float(patch.phi(p))
    if abs(val) > 1e-8:
        raise NotOnBoundary(f"|phi(x)| = {abs(val):.2e} > 1e-8")
    g = patch.gradient(p)
    ng = float(np.linalg.norm(g))
    if ng < 1e-8:
        raise DegenerateGradient(f"|grad phi| = {ng:.2e} < 1e-8")
    nrm = g / ng
    tangent = complete_to_basis(nrm[None, :])[1:]
    h = patch.hessian(p)
    shape_op = -(tangent @ h @ tangent.T) / ng
    return np.linalg.eigvalsh(shape_op)


def check_curvature(
    patch: ImplicitSurfacePatch, x, k: int, mode: str = "sum_top_k"
) -> PredicateVerdict:
    """Curvature consequences of the avoidance conditions on a smooth patch.

    mode "sum_top_k": the sum of the k largest principal curvatures must be
    >= -1e-8 (line condition); mode "single": the (N-k)-th curvature must be
    >= -1e-8 (subspace condition).
    """
    p = as_point(x)
    kappa = principal_curvatures(patch, p)
    m = kappa.size  # = N - 1
    if not 1 <= k <= m:
        raise InvalidDimension(f"need 1 <= k <= N-1 = {m}, got k={k}")
    if mode == "sum_top_k":
        stat = float(np.sum(kappa[m - k :]))
    elif mode == "single":
        stat = float(kappa[m - k])  # kappa_{N-k} in ascending 1-based order
    else:
        raise InvalidDimension(f"unknown mode {mode!r}")
    detail = {"curvatures": kappa.tolist(), "statistic": stat, "mode": mode}
    if stat >= -1e-8:
        return PredicateVerdict("holds", detail=detail)
    return PredicateVerdict("fails", certificate={"point": p, **detail})


def project_to_boundary(patch: ImplicitSurfacePatch, x, steps: int = 5) -> np.ndarray:
    """Newton projection of a nearby point onto the zero level set."""
    p = as_point(x).copy()
    for _ in range(steps):
        g = patch.gradient(p)
        n2 = float(np.dot(g, g))
        if n2 < 1e-16:
            raise DegenerateGradient("cannot project: vanishing gradient")
        p -= float(patch.phi(p)) / n2 * g
    return p


# -- library patches ---------------------------------------------------------


def paraboloid_patch() -> ImplicitSurfacePatch:
    """Epigraph of |x'|^2/2 in R^3; curvatures (+1, +1) at the origin."""

    def phi(p):
        return p[2] - 0.5 * (p[0] ** 2 + p[1] ** 2)

    def grad(p):
        return np.array([-p[0], -p[1], 1.0])

    def hess(p):
        return np.diag([-1.0, -1.0, 0.0])

    return ImplicitSurfacePatch(phi, grad, hess, name="paraboloid")


def ball_patch(center, radius: float, inside: bool = True) -> ImplicitSurfacePatch:
    """Sphere boundary; `inside` selects which side is the set."""
    c = as_point(center)
    sgn = 1.0 if inside else -1.0

    def phi(p):
        return sgn * (radius**2 - float(np.dot(p - c, p - c)))

    def grad(p):
        return sgn * (-2.0 * (p - c))

    def hess(p):
        return sgn * (-2.0 * np.eye(c.size))

    return ImplicitSurfacePatch(phi, grad, hess, name=f"ball(inside={inside})")


def union_of_balls_patch(balls) -> ImplicitSurfacePatch:
    """Union of ball interiors; smooth near each boundary away from overlaps."""
    data = [(as_point(c), float(r)) for c, r in balls]

    def branch(p):
        vals = [r**2 - float(np.dot(p - c, p - c)) for c, r in data]
        return int(np.argmax(vals))

    def phi(p):
        return max(r**2 - float(np.dot(p - c, p - c)) for c, r in data)

    def grad(p):
        c, _ = data[branch(p)]
        return -2.0 * (p - c)

    def hess(p):
        c, _ = data[branch(p)]
        return -2.0 * np.eye(c.size)

    return ImplicitSurfacePatch(phi, grad, hess, name="union_of_balls")


def cylindrical_shell_patch(r_inner: float, r_outer: float) -> ImplicitSurfacePatch:
    """Open region r_inner < sqrt(x1^2 + x2^2) < r_outer in R^3."""
    a, b = r_inner**2, r_outer**2

    def q(p):
        return p[0] ** 2 + p[1] ** 2

    def phi(p):
        return (q(p) - a) * (b - q(p))

    def grad(p):
        dq = np.array([2.0 * p[0], 2.0 * p[1], 0.0])
        return (-2.0 * q(p) + a + b) * dq

    def hess(p):
        dq = np.array([2.0 * p[0], 2.0 * p[1], 0.0])
        hq = np.diag([2.0, 2.0, 0.0])
        return -2.0 * np.outer(dq, dq) + (-2.0 * q(p) + a + b) * hq

    return ImplicitSurfacePatch(phi, grad, hess, name="cylindrical_shell")


# ---------------------------------------------------------------------------
# convexity of components


def check_convex_components(
    u_set: CsgSet, box: Box, h: float, m: int, seed: int = 0
) -> PredicateVerdict:
    """Grid the set, label components, probe segment convexity on each."""
    comps = connected_components(u_set, box, h)
    for comp in comps:
        verdict = is_component_convex(comp.points, u_set, m, seed=seed)
        if verdict.fails:
            verdict.detail["component"] = comp.label
            verdict.detail["n_components"] = len(comps)
            verdict.resolution = {"h": h, "m": m}
            return verdict
    return PredicateVerdict(
        "holds", resolution={"h": h, "m": m}, detail={"n_components": len(comps)}
    )
