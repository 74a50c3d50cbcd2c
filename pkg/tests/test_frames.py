import numpy as np
import pytest

from fraclab.errors import DegenerateInput, InvalidDimension
from fraclab.frames import (
    Frame,
    Subspace,
    frame_max_angle,
    orthogonal_complement_projector,
    orthonormalize,
    perturb_frame,
    random_frame,
)


def test_orthonormalize_identity_passthrough():
    f = orthonormalize(np.eye(2))
    assert np.allclose(f.directions, np.eye(2), atol=1e-12)


def test_orthonormalize_gram_schmidt_by_hand():
    # [(1,0),(1,1)] reduces to the canonical axes up to sign
    f = orthonormalize([[1.0, 0.0], [1.0, 1.0]])
    assert np.allclose(np.abs(f.directions), np.eye(2), atol=1e-12)


def test_orthonormalize_random_gram_error():
    rng = np.random.default_rng(3)
    v = rng.standard_normal((3, 5))
    f = orthonormalize(v)
    assert f.gram_error() <= 1e-10
    # spans the same subspace: projections of the original rows are exact
    proj = v @ f.directions.T @ f.directions
    assert np.allclose(proj, v, atol=1e-9)


def test_orthonormalize_idempotent():
    rng = np.random.default_rng(11)
    f = orthonormalize(rng.standard_normal((2, 4)))
    g = orthonormalize(f.directions)
    assert np.max(np.abs(g.directions - f.directions)) <= 1e-12


def test_orthonormalize_rank_deficient():
    with pytest.raises(DegenerateInput):
        orthonormalize([[1.0, 0.0], [2.0, 1e-13]])


def test_random_frame_deterministic():
    a = random_frame(2, 1, seed=7)
    b = random_frame(2, 1, seed=7)
    assert np.array_equal(a.directions, b.directions)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_random_frame_gram(seed):
    f = random_frame(3, 2, seed)
    assert f.gram_error() <= 1e-10


def test_random_frame_full_basis_determinant(seed=5):
    f = random_frame(3, 3, seed)
    assert abs(abs(np.linalg.det(f.directions)) - 1.0) <= 1e-10


def test_random_frame_invalid_dimension():
    with pytest.raises(InvalidDimension):
        random_frame(2, 3, seed=0)


def test_perturb_frame_zero_step_is_identity():
    f = random_frame(3, 2, 0)
    assert perturb_frame(f, 0.0, seed=4) is f


def test_perturb_frame_small_step_angles():
    f = random_frame(3, 2, 1)
    g = perturb_frame(f, 1e-3, seed=9)
    assert frame_max_angle(f, g) <= 2e-3
    assert g.gram_error() <= 1e-10


def test_perturb_frame_repeated_feasibility():
    f = random_frame(4, 3, 2)
    for i in range(50):
        f = perturb_frame(f, 0.05, seed=i)
        assert f.gram_error() <= 1e-10


def test_projector_axis_cases():
    p = orthogonal_complement_projector(Subspace(np.eye(2)[:1]))
    assert np.allclose(p, np.diag([0.0, 1.0]), atol=1e-12)
    v = Subspace(np.eye(3)[2:3])
    q = orthogonal_complement_projector(v)
    assert np.allclose(q @ np.array([1.0, 2.0, 3.0]), [1.0, 2.0, 0.0], atol=1e-12)


def test_projector_random_idempotent():
    v = Subspace(random_frame(4, 2, 13).directions)
    p = orthogonal_complement_projector(v)
    assert np.max(np.abs(p @ p - p)) <= 1e-10
    for row in v.basis:
        assert np.linalg.norm(p @ row) <= 1e-10


def test_frame_rejects_non_orthonormal():
    with pytest.raises(DegenerateInput):
        Frame(np.array([[1.0, 0.0], [0.5, 0.5]]))


def test_frame_rejects_k_above_n():
    with pytest.raises(InvalidDimension):
        Frame(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))


def test_canonicalization_sign_and_order():
    f = Frame(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    c = f.canonicalized()
    assert np.allclose(c.directions, [[0.0, 1.0], [1.0, 0.0]])
