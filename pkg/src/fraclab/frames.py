"""Orthonormal frames, linear subspaces and the moves used by the optimizers.

A frame is a set of k orthonormal directions in R^N stored as the rows of a
(k, N) array; a subspace is the span of such a basis.  Directions xi and -xi
are semantically identified (the directional operator is even in xi), so a
canonical sign is fixed whenever frames are compared or reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InvalidDimension

GRAM_TOL = 1e-10


def as_point(x) -> np.ndarray:
    """Coerce to a finite float vector."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1 or p.size < 1:
        raise InvalidDimension(f"point must be a 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidDimension("point has non-finite coordinates")
    return p


def unit_direction(v) -> np.ndarray:
    """Normalize v to a unit direction."""
    d = as_point(v)
    n = float(np.linalg.norm(d))
    if n < 1e-14:
        raise DegenerateInput("cannot normalize the zero vector")
    return d / n


def canonical_direction(xi: np.ndarray) -> np.ndarray:
    """Fix the sign of xi so its first nonzero coordinate is positive."""
    for c in xi:
        if abs(c) > 1e-14:
            return xi if c > 0 else -xi
    return xi


def _gram_error(rows: np.ndarray) -> float:
    g = rows @ rows.T
    return float(np.max(np.abs(g - np.eye(rows.shape[0]))))


@dataclass(frozen=True)
class Frame:
    """k orthonormal directions in R^N (rows of `directions`)."""

    directions: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 2:
            raise InvalidDimension("frame directions must be a (k, N) array")
        object.__setattr__(self, "directions", d)
        k, n = d.shape
        if k > n:
            raise InvalidDimension(f"frame has k={k} > N={n}")
        err = _gram_error(d)
        if err > GRAM_TOL:
            raise DegenerateInput(f"frame fails the Gram test: error {err:.3e}")

    @property
    def k(self) -> int:
        return self.directions.shape[0]

    @property
    def n(self) -> int:
        return self.directions.shape[1]

    def gram_error(self) -> float:
        return _gram_error(self.directions)

    def canonicalized(self) -> "Frame":
        """Sign-fix every direction and sort rows lexicographically."""
        rows = [canonical_direction(row) for row in self.directions]
        order = np.lexsort(np.array(rows).T[::-1])
        return Frame(np.array([rows[i] for i in order]))

    def sort_key(self) -> tuple:
        return tuple(np.round(self.canonicalized().directions, 12).ravel())


@dataclass(frozen=True)
class Subspace:
    """k-dimensional linear subspace of R^N with an orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise InvalidDimension("subspace basis must be a (k, N) array")
        object.__setattr__(self, "basis", b)
        k, n = b.shape
        if k > n:
            raise InvalidDimension(f"subspace has k={k} > N={n}")
        err = _gram_error(b)
        if err > GRAM_TOL:
            raise DegenerateInput(f"basis fails the Gram test: error {err:.3e}")

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        return self.basis.T @ self.basis

    def complement_projector(self) -> np.ndarray:
        """Orthogonal projector onto the orthogonal complement."""
        return np.eye(self.n) - self.projector()

    def frame(self) -> Frame:
        return Frame(self.basis)


def orthonormalize(vectors) -> Frame:
    """Orthonormalize m independent vectors in R^N into a frame.

    Raises DegenerateInput when the input is rank deficient (smallest
    singular value <= 1e-10).
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim != 2:
        raise InvalidDimension("expected a (m, N) array of row vectors")
    m, n = v.shape
    if m > n:
        raise InvalidDimension(f"cannot orthonormalize {m} vectors in R^{n}")
    smin = np.linalg.svd(v, compute_uv=False)[-1]
    if smin <= 1e-10:
        raise DegenerateInput(f"rank-deficient input: smallest singular value {smin:.3e}")
    # QR on columns; fix signs so already-orthonormal inputs are returned as-is
    q, r = np.linalg.qr(v.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return Frame((q * signs).T)


def orthogonal_complement_projector(v: Subspace) -> np.ndarray:
    """Projector P onto the orthogonal complement of V (P^2 = P, P|V = 0)."""
    return v.complement_projector()


def random_frame(n: int, k: int, seed: int) -> Frame:
    """Rotation-invariant random orthonormal k-frame in R^N, reproducible by seed."""
    if not 1 <= k <= n:
        raise InvalidDimension(f"need 1 <= k <= N, got k={k}, N={n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return Frame((q * signs).T)


def complete_to_basis(rows: np.ndarray) -> np.ndarray:
    """Extend orthonormal rows (k, N) to a full orthonormal basis (N, N)."""
    k, n = rows.shape
    if k == n:
        return rows
    q, _ = np.linalg.qr(np.concatenate([rows, np.eye(n)]).T)
    out = q.T[:n]
    # first k rows of Q span the same flag; re-align signs with the input
    for i in range(k):
        if np.dot(out[i], rows[i]) < 0:
            out[i] = -out[i]
    out[:k] = rows
    return orthonormalize(out).directions


def perturb_frame(frame: Frame, step: float, seed: int) -> Frame:
    """Move the frame along the manifold by a random rotation of size ~step.

    step = 0 returns the input object.  The rotation is the Cayley transform
    of a random skew generator scaled to spectral norm <= step, followed by a
    re-orthonormalization so iterates stay exactly feasible.
    """
    if step < 0:
        raise InvalidDimension("step must be >= 0")
    if step == 0:
        return frame
    n = frame.n
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    skew = a - a.T
    norm = np.linalg.norm(skew, 2)
    if norm > 0:
        skew *= step / norm
    half = 0.5 * skew
    rot = np.linalg.solve(np.eye(n) - half, np.eye(n) + half)
    return orthonormalize(frame.directions @ rot.T)


def frame_max_angle(a: Frame, b: Frame) -> float:
    """Largest angle (rad) between corresponding directions, signs identified."""
    angles = []
    for u, v in zip(a.directions, b.directions):
        c = min(1.0, abs(float(np.dot(u, v))))
        angles.append(float(np.arccos(c)))
    return max(angles)
