"""Optimizer and oracle tests for the two k-dimensional operators."""

import math

import numpy as np
import pytest

from fraclab.errors import DimensionTooLarge, NotSmooth
from fraclab.fields import (
    constant_field,
    distance_field,
    from_callable,
    gaussian_bump,
    indicator_field,
    quadratic_bump,
)
from fraclab.frames import Frame, random_frame
from fraclab.geometry import Ball
from fraclab.operators import (
    OptimizerConfig,
    brute_force_oracle,
    eval_eigenvalue,
    eval_truncated,
    frame_sum,
    local_limit_reference,
)
from fraclab.quadrature import FracParams, eval_directional

OPT = OptimizerConfig(restarts=3, max_iters=40, inner_restarts=8, inner_iters=12)


def test_frame_sum_constant():
    c = constant_field(2.0, 3)
    f = random_frame(3, 2, 0)
    v = frame_sum(c, [0, 0, 0], f, 0.5)
    assert abs(v.value) <= 1e-11


def test_frame_sum_radial_symmetry():
    g = gaussian_bump([0.0, 0.0, 0.0], 1.0)
    single = eval_directional(g, [0, 0, 0], [1, 0, 0], 0.6)
    f = random_frame(3, 2, 3)
    v = frame_sum(g, [0, 0, 0], f, 0.6)
    assert v.value == pytest.approx(2.0 * single.value, abs=1e-7)


def test_frame_sum_indicator_closed_form():
    u = indicator_field(Ball([0, 0, 0], 1.0))
    f = Frame(np.eye(3)[:2])
    v = frame_sum(u, [2, 0, 0], f, 0.5)
    # e1 contributes 2/(3 pi); the e2 line misses the ball entirely
    assert v.value == pytest.approx(2.0 / (3.0 * math.pi), abs=1e-14)


def test_eval_truncated_constant():
    c = constant_field(1.0, 2)
    v = eval_truncated(c, [0, 0], FracParams(0.5, 1, 2), opt=OPT)
    assert abs(v.value) <= 1e-11


def test_eval_truncated_full_frame_radial():
    g = gaussian_bump([0.0, 0.0], 1.0)
    single = eval_directional(g, [0, 0], [1, 0], 0.5)
    v = eval_truncated(g, [0, 0], FracParams(0.5, 2, 2), opt=OPT)
    assert v.value == pytest.approx(2.0 * single.value, abs=1e-6)


def test_eval_truncated_two_ball_witness_bound(two_balls):
    # the +-45 degree frame in the horizontal plane avoids the set entirely
    u = indicator_field(two_balls)
    r = 1.0 / math.sqrt(2.0)
    witness = Frame(np.array([[r, r, 0.0], [r, -r, 0.0]]))
    v = eval_truncated(
        u, [0, 0, 0], FracParams(0.5, 2, 3), opt=OPT, initial_frames=[witness]
    )
    target = frame_sum(u, [0, 0, 0], witness, 0.5)
    assert target.value == pytest.approx(-4.0 / math.pi, abs=1e-13)
    assert v.value <= target.value + 1e-12


def test_upper_bound_semantics():
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.7, 1, 2)
    rng = np.random.default_rng(0)
    frames = [random_frame(2, 1, int(s)) for s in rng.integers(0, 1000, size=5)]
    v = eval_truncated(u, [0.1, 0.2], params, opt=OPT, initial_frames=frames)
    for f in frames:
        assert v.value <= frame_sum(u, [0.1, 0.2], f, 0.7).value + 1e-12


def test_eigenvalue_k1_coincides_with_truncated():
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.8, 1, 2)
    a = eval_truncated(u, [0, 0], params, opt=OPT)
    b = eval_eigenvalue(u, [0, 0], params, opt=OPT)
    assert a.value == pytest.approx(b.value, abs=1e-12)


def test_eigenvalue_constant():
    c = constant_field(5.0, 2)
    v = eval_eigenvalue(c, [0, 0], FracParams(0.5, 2, 2), opt=OPT)
    assert abs(v.value) <= 1e-11


def test_eigenvalue_radial_center():
    g = gaussian_bump([0.0, 0.0], 1.0)
    single = eval_directional(g, [0, 0], [1, 0], 0.5)
    v = eval_eigenvalue(g, [0, 0], FracParams(0.5, 2, 2), opt=OPT)
    assert v.value == pytest.approx(single.value, abs=1e-6)


def test_sandwich_inequality():
    # truncated <= k * eigenvalue for every subspace, via max >= mean
    rng = np.random.default_rng(1)
    for trial in range(6):
        a = float(rng.uniform(0.5, 3.0))
        b = float(rng.uniform(0.5, 3.0))
        u = quadratic_bump([a, b], center=rng.uniform(-0.2, 0.2, size=2))
        s = float(rng.uniform(0.3, 0.8))
        k = 2
        params = FracParams(s, k, 2)
        x = rng.uniform(-0.3, 0.3, size=2)
        eig = eval_eigenvalue(u, x, params, opt=OPT)
        trunc = eval_truncated(
            u, x, params, opt=OPT, initial_frames=[Frame(eig.witness.basis)]
        )
        tol = trunc.width + k * eig.width + 1e-9
        assert trunc.value <= k * eig.value + tol


def test_rotation_equivariance():
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.6, 1, 2)
    x = np.array([0.15, -0.1])
    base = eval_truncated(u, x, params, opt=OPT)
    rng = np.random.default_rng(2)
    for seed in range(3):
        theta = float(rng.uniform(0, 2 * np.pi))
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        rotated = from_callable(
            lambda p, r=rot: u.value(r @ p), sup_bound=1.0, dim=2, name="rotated"
        )
        v = eval_truncated(rotated, rot.T @ x, params, opt=OPT)
        assert v.value == pytest.approx(base.value, abs=1e-6 * max(1.0, abs(base.value)))


# ---------------------------------------------------------------------------
# brute-force oracle


def test_oracle_constant_n2():
    c = constant_field(1.0, 2)
    v = brute_force_oracle(c, [0, 0], FracParams(0.5, 1, 2), 10.0)
    assert abs(v.value) <= 1e-11


def test_oracle_anisotropic_minimizer_direction():
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.7, 1, 2)
    oracle = brute_force_oracle(u, [0, 0], params, 1.0)
    # the minimizing direction hugs the steep axis e2
    d = oracle.witness.directions[0]
    angle = math.degrees(math.acos(min(1.0, abs(d[1]))))
    assert angle <= 1.0 + 1e-9
    opt = eval_truncated(u, [0, 0], params, opt=OPT)
    scale = abs(oracle.value)
    assert opt.value <= oracle.value + 1e-12
    assert oracle.value - opt.value <= 1e-3 * scale


def test_oracle_vs_optimizer_three_dim_indicator(two_balls):
    u = indicator_field(two_balls)
    params = FracParams(0.5, 2, 3)
    oracle = brute_force_oracle(u, [0, 0, 0], params, 15.0)
    opt = eval_truncated(u, [0, 0, 0], params, opt=OPT)
    scale = max(1.0, abs(opt.value))
    assert oracle.value >= opt.value - 1e-3 * scale


def test_oracle_eigenvalue_full_space_n2():
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.5, 2, 2)
    oracle = brute_force_oracle(u, [0, 0], params, 1.0, operator="eigenvalue")
    # sup over the circle of directional values: attained near the flat axis e1
    direct = eval_directional(u, [0, 0], [1, 0], 0.5)
    assert oracle.value == pytest.approx(direct.value, abs=5e-4)


def test_oracle_dimension_gate():
    c = constant_field(0.0, 4)
    with pytest.raises(DimensionTooLarge):
        brute_force_oracle(c, [0, 0, 0, 0], FracParams(0.5, 1, 4), 10.0)


# ---------------------------------------------------------------------------
# local limit reference


def test_local_limit_gaussian():
    g = gaussian_bump([0.0, 0.0, 0.0], 1.0)
    for k in (1, 2, 3):
        total, kth = local_limit_reference(g, [0, 0, 0], k)
        assert total == pytest.approx(-2.0 * k, abs=1e-6)
        assert kth == pytest.approx(-2.0, abs=1e-6)


def test_local_limit_anisotropic():
    u = quadratic_bump([1.0, 4.0])
    total, kth = local_limit_reference(u, [0, 0], 1)
    assert total == pytest.approx(-8.0, abs=1e-5)
    assert kth == pytest.approx(-8.0, abs=1e-5)


def test_local_limit_flat_field():
    # bounded field that is affine near the origin: zero Hessian there
    u = from_callable(
        lambda p: 0.5 + 0.1 * math.tanh(p[0]), sup_bound=0.6, dim=2, name="flat"
    )
    total, kth = local_limit_reference(u, [0, 0], 2)
    assert abs(total) <= 1e-6
    assert abs(kth) <= 1e-6


def test_local_limit_smoothness_gate(two_balls):
    u = distance_field(two_balls)
    with pytest.raises(NotSmooth):
        local_limit_reference(u, [0, 0, 0], 1)


def test_operator_level_local_limit():
    # the truncated operator at s -> 1 approaches the smallest Hessian eigenvalue
    u = quadratic_bump([1.0, 4.0])
    params = FracParams(0.99, 1, 2)
    v = eval_truncated(u, [0, 0], params, opt=OPT)
    total, _ = local_limit_reference(u, [0, 0], 1)
    assert abs(v.value - total) / abs(total) < 0.10
