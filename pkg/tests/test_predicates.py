"""Avoidance predicates, curvature fixtures and convexity checks."""

import math

import numpy as np
import pytest

from fraclab.errors import (
    DegenerateGradient,
    NotOnBoundary,
    PointInsideU,
    PointOutsideOmega,
)
from fraclab.frames import complete_to_basis, random_frame
from fraclab.geometry import (
    Ball,
    Box,
    Complement,
    Cylinder,
    Intersection,
    contains,
    distance_to_complement,
    line_avoids,
    transform_rigid,
)
from fraclab.operators import OptimizerConfig
from fraclab.predicates import (
    ball_patch,
    check_convex_components,
    check_curvature,
    check_G,
    check_G_affine,
    cylindrical_shell_patch,
    paraboloid_patch,
    principal_curvatures,
    project_to_boundary,
    union_of_balls_patch,
)
from fraclab.scenes import quasi_random_points

SEARCH = OptimizerConfig(restarts=3, max_iters=40)
SQ2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# line condition


def test_check_g_two_ball_interior_gap(two_balls):
    v = check_G(two_balls, None, 2, [0, 2, 0], SEARCH)
    assert v.holds
    for xi in v.witness.directions:
        assert line_avoids(two_balls, [0, 2, 0], xi)


def test_check_g_many_points(two_balls):
    pts = quasi_random_points(
        Box([-2, -2, -2], [2, 6, 2]), 10, seed=3, exclude=two_balls
    )
    for p in pts:
        v = check_G(two_balls, None, 2, p, SEARCH)
        assert v.holds, p
        for xi in v.witness.directions:
            assert line_avoids(two_balls, p, xi)


def test_check_g_unit_ball_full_frame():
    # all three lines can keep distance >= 1 from the center by symmetry
    ub = Ball([0, 0, 0], 1.0)
    v = check_G(ub, None, 3, [2, 0, 0], SEARCH)
    assert v.holds
    for xi in v.witness.directions:
        assert line_avoids(ub, [2, 0, 0], xi)


def test_check_g_gates(two_balls):
    with pytest.raises(PointInsideU):
        check_G(two_balls, None, 2, [0, 0, 0], SEARCH)
    small_omega = Ball([0, 0, 0], 0.5)
    with pytest.raises(PointOutsideOmega):
        check_G(two_balls, small_omega, 2, [0, 2, 0], SEARCH)


def test_check_g_fails_planar_annulus():
    # in R^2 every line through the origin crosses the ring 1 < |x| < sqrt(2)
    ring = Intersection((Ball([0, 0], SQ2), Complement(Ball([0, 0], 1.0))))
    v = check_G(ring, None, 1, [0, 0], SEARCH, resolution_deg=2.0)
    assert v.fails
    assert contains(ring, v.certificate)


def test_check_g_fails_shell_two_frame(shell):
    # only the axis direction avoids the shell, so no orthonormal pair can
    v = check_G(shell, None, 2, [0, 0, 0], SEARCH, resolution_deg=4.0)
    assert v.fails
    assert contains(shell, v.certificate)


def test_check_g_holds_shell_axis(shell):
    v = check_G(shell, None, 1, [0, 0, 0], SEARCH)
    assert v.holds
    d = v.witness.directions[0]
    assert abs(abs(d[2]) - 1.0) <= 1e-9


# ---------------------------------------------------------------------------
# subspace condition


def test_affine_boundary_point_fails(two_balls, p_eps):
    v = check_G_affine(two_balls, 2, p_eps, SEARCH, resolution_deg=2.0)
    assert v.fails
    assert contains(two_balls, v.certificate)
    assert contains(Ball([0, 4, 0], 1.0), v.certificate)


def test_affine_shell_k1_holds(shell):
    v = check_G_affine(shell, 1, [0, 0, 0], SEARCH)
    assert v.holds
    basis = v.witness.basis
    assert min(
        np.linalg.norm(basis[0] - [0, 0, 1]), np.linalg.norm(basis[0] + [0, 0, 1])
    ) <= 1e-9


def test_affine_shell_k2_fails(shell):
    v = check_G_affine(shell, 2, [0, 0, 0], SEARCH, resolution_deg=2.0)
    assert v.fails
    assert contains(shell, v.certificate)


def test_affine_exterior_tangent_plane_holds():
    ub = Ball([0, 0, 0], 1.0)
    v = check_G_affine(ub, 2, [2, 0, 0], SEARCH)
    assert v.holds
    from fraclab.geometry import affine_subspace_avoids

    assert affine_subspace_avoids(ub, [2, 0, 0], v.witness)


def test_affine_gate(two_balls):
    with pytest.raises(PointInsideU):
        check_G_affine(two_balls, 2, [0, 4, 0], SEARCH)


def test_subspace_holds_implies_linewise(unit_ball):
    pts = quasi_random_points(Box([-2, -2, -2], [2, 2, 2]), 8, seed=5, exclude=unit_ball)
    for p in pts:
        v = check_G_affine(unit_ball, 2, p, SEARCH)
        assert v.holds
        for xi in v.witness.basis:
            assert line_avoids(unit_ball, p, xi)
        g = check_G(unit_ball, None, 2, p, SEARCH)
        assert g.holds


def test_rigid_motion_invariance(two_balls, p_eps):
    rot = random_frame(3, 3, 17).directions
    t = np.array([0.4, -0.7, 1.1])
    moved = transform_rigid(two_balls, rot, t)
    v = check_G(moved, None, 2, rot @ np.array([0.0, 2.0, 0.0]) + t, SEARCH)
    assert v.holds
    w = check_G_affine(moved, 2, rot @ p_eps + t, SEARCH, resolution_deg=2.0)
    assert w.fails


# ---------------------------------------------------------------------------
# curvature


def test_paraboloid_curvatures():
    kappa = principal_curvatures(paraboloid_patch(), [0, 0, 0])
    assert np.allclose(kappa, [1.0, 1.0], atol=1e-6)


def test_shell_inner_wall_curvatures():
    patch = cylindrical_shell_patch(1.0, SQ2)
    kappa = principal_curvatures(patch, [1, 0, 0])
    assert np.allclose(kappa, [-1.0, 0.0], atol=1e-6)


def test_ball_interior_and_exterior_curvatures():
    inner = principal_curvatures(ball_patch([0, 0, 0], 1.0, inside=True), [1, 0, 0])
    assert np.allclose(inner, [1.0, 1.0], atol=1e-6)
    outer = principal_curvatures(ball_patch([0, 0, 0], 1.0, inside=False), [1, 0, 0])
    assert np.allclose(outer, [-1.0, -1.0], atol=1e-6)


def test_curvature_gates():
    patch = paraboloid_patch()
    with pytest.raises(NotOnBoundary):
        principal_curvatures(patch, [0, 0, 1])
    flat = ball_patch([0, 0, 0], 1.0).__class__(
        phi=lambda p: p[0] ** 2, grad=lambda p: np.array([2 * p[0], 0.0, 0.0]),
        hess=lambda p: np.diag([2.0, 0.0, 0.0]),
    )
    with pytest.raises(DegenerateGradient):
        principal_curvatures(flat, [0, 0, 0])


def test_check_curvature_fixture_verdicts():
    parab = paraboloid_patch()
    assert check_curvature(parab, [0, 0, 0], 1, "sum_top_k").holds
    assert check_curvature(parab, [0, 0, 0], 1, "single").holds
    shell_patch = cylindrical_shell_patch(1.0, SQ2)
    assert check_curvature(shell_patch, [1, 0, 0], 1, "sum_top_k").holds
    assert check_curvature(shell_patch, [1, 0, 0], 1, "single").holds
    v = check_curvature(shell_patch, [1, 0, 0], 2, "sum_top_k")
    assert v.fails  # -1 + 0 < 0: consistent with no 2-frame avoiding the shell


def test_newton_boundary_projection():
    patch = ball_patch([0, 0, 0], 1.0)
    p = project_to_boundary(patch, [1.13, 0.2, -0.1])
    assert abs(np.linalg.norm(p) - 1.0) <= 1e-10


def test_line_condition_curvature_consistency(unit_ball):
    # where the line condition holds near the boundary, the top-k curvature
    # sum is nonnegative on the boundary (smooth scene)
    patch = ball_patch([0, 0, 0], 1.0)
    rng = np.random.default_rng(11)
    for _ in range(6):
        raw = rng.standard_normal(3)
        bp = project_to_boundary(patch, raw / np.linalg.norm(raw) * 1.1)
        outside = bp * (1.0 + 1e-7)
        g = check_G(unit_ball, None, 2, outside, SEARCH)
        assert g.holds
        assert check_curvature(patch, bp, 2, "sum_top_k").holds


def test_subspace_condition_single_curvature_consistency(shell):
    # the axis line exists at every hole point, and the matching curvature
    # statistic kappa_{N-1} is zero on the inner wall
    patch = cylindrical_shell_patch(1.0, SQ2)
    rng = np.random.default_rng(12)
    for _ in range(6):
        theta = rng.uniform(0, 2 * np.pi)
        hole_point = np.array([0.5 * np.cos(theta), 0.5 * np.sin(theta), rng.uniform(-1, 1)])
        v = check_G_affine(shell, 1, hole_point, SEARCH)
        assert v.holds
        wall_point = np.array([np.cos(theta), np.sin(theta), 0.0])
        assert check_curvature(patch, wall_point, 1, "single").holds


def test_two_ball_patch_curvatures(two_balls):
    patch = union_of_balls_patch([([0, 0, 0], 1.0), ([0, 4, 0], 1.0)])
    kappa = principal_curvatures(patch, [0, 3, 0])
    assert np.allclose(kappa, [1.0, 1.0], atol=1e-6)


# ---------------------------------------------------------------------------
# convexity


def test_convex_components_fixtures(two_balls, unit_ball, shell):
    assert check_convex_components(unit_ball, Box([-2, -2, -2], [2, 2, 2]), 0.2, 8).holds
    assert check_convex_components(two_balls, Box([-2, -2, -2], [2, 6, 2]), 0.2, 8).holds
    v = check_convex_components(shell, Box([-2, -2, -2], [2, 2, 2]), 0.1, 16)
    assert v.fails
    assert np.allclose(v.certificate, [0.0, 0.0, 0.0], atol=0.0)
