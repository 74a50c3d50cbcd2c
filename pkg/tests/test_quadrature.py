"""Oracle-backed tests for the directional quadrature engine.

Expected values come from sources independent of the evaluation path:
closed forms for the profile (1-x^2)_+^s and for Gaussians (via the Fourier
side), hand-integrated kernel integrals for indicators, and finite
differences for the local limit.
"""

import math

import numpy as np
import pytest

from fraclab.errors import (
    NotClassicallyEvaluable,
    OutOfRange,
    PreconditionViolated,
)
from fraclab.fields import (
    constant_field,
    distance_field,
    from_callable,
    gaussian_bump,
    getoor_profile,
    indicator_field,
)
from fraclab.geometry import Ball, Union
from fraclab.quadrature import (
    QuadratureSpec,
    eval_directional,
    eval_directional_from,
    eval_directional_punctured,
    normalization_constant,
    tail_radius,
)


def getoor_target(s: float) -> float:
    """Closed form for the profile operator value at the origin."""
    return -(2 ** (2 * s)) * math.gamma(1 + s) * math.gamma((1 + 2 * s) / 2) / math.gamma(0.5)


def gaussian_line_target(a: float, s: float) -> float:
    """Fourier-side closed form for exp(-a t^2) at t = 0."""
    return -((4 * a) ** s) * math.gamma(s + 0.5) / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# normalization constant


def test_normalization_constant_half():
    assert normalization_constant(0.5) == pytest.approx(1.0 / math.pi, abs=1e-15)


def test_normalization_constant_positive():
    for s in np.linspace(0.001, 0.999, 41):
        assert normalization_constant(float(s)) > 0.0


def test_normalization_constant_range_gate():
    with pytest.raises(OutOfRange):
        normalization_constant(0.0)
    with pytest.raises(OutOfRange):
        normalization_constant(1.0)


# ---------------------------------------------------------------------------
# directional values


def test_constant_field_evaluates_to_zero():
    c = constant_field(3.0, 2)
    v = eval_directional(c, [0, 0], [1, 0], 0.5)
    assert abs(v.value) <= 1e-12


def test_getoor_profile_oracle():
    u = getoor_profile(0.5, dim=1)
    v = eval_directional(u, [0.0], [1.0], 0.5)
    assert v.value == pytest.approx(-1.0, abs=1e-3)
    assert v.value == pytest.approx(getoor_target(0.5), abs=1e-3)
    assert v.lo <= v.value <= v.hi


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_getoor_profile_other_orders(s):
    u = getoor_profile(s, dim=1)
    v = eval_directional(u, [0.0], [1.0], s)
    assert v.value == pytest.approx(getoor_target(s), abs=2e-3)


def test_indicator_ball_closed_form():
    # u(2+t)+u(2-t) = chi_(1,3)(t); value = C_{1/2} * int_1^3 t^-2 dt = 2/(3 pi)
    u = indicator_field(Ball([0, 0, 0], 1.0))
    v = eval_directional(u, [2, 0, 0], [1, 0, 0], 0.5)
    assert v.value == pytest.approx(2.0 / (3.0 * math.pi), abs=1e-14)
    assert v.lo == v.value == v.hi


def test_indicator_inside_is_nonpositive(two_balls):
    u = indicator_field(two_balls)
    for xi in np.eye(3):
        v = eval_directional(u, [0, 0, 0], xi, 0.5)
        assert v.hi <= 0.0


def test_indicator_divergence_at_boundary(p_eps, two_balls):
    # boundary point: mass accumulates at tau -> 0 along an entering line
    u = indicator_field(two_balls)
    v = eval_directional(u, p_eps, [0, 0, 1], 0.5)
    assert v.value == math.inf


def test_gaussian_fourier_oracle():
    g = gaussian_bump([0.0, 0.0], 1.0)
    for s in (0.3, 0.5, 0.7, 0.9):
        v = eval_directional(g, [0, 0], [1, 0], s)
        assert v.value == pytest.approx(gaussian_line_target(1.0, s), abs=1e-6)
        assert v.hi - v.lo <= 1e-6


def test_symmetry_in_direction_sign(two_balls):
    g = gaussian_bump([0.3, -0.2, 0.1], 0.8)
    ind = indicator_field(two_balls)
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = rng.uniform(-1, 1, size=3)
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        a = eval_directional(g, x, d, 0.6)
        b = eval_directional(g, x, -d, 0.6)
        assert abs(a.value - b.value) <= 1e-12
        ia = eval_directional(ind, x + np.array([0, 2, 0]), d, 0.5)
        ib = eval_directional(ind, x + np.array([0, 2, 0]), -d, 0.5)
        assert ia.value == ib.value


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_law(lam):
    # u_lam(y) = u(lam y)  =>  value(u_lam, x) = lam^(2s) value(u, lam x)
    s = 0.6
    g = gaussian_bump([0.0, 0.0], 1.0)
    u_lam = from_callable(
        lambda p: g.value(lam * p), sup_bound=1.0, dim=2, name="scaled"
    )
    x = np.array([0.2, -0.1])
    xi = np.array([1.0, 0.0])
    a = eval_directional(u_lam, x, xi, s)
    b = eval_directional(g, lam * x, xi, s)
    assert a.value == pytest.approx(lam ** (2 * s) * b.value, abs=a.width + b.width + 1e-9)


def test_local_limit_decreasing_errors():
    g = gaussian_bump([0.0, 0.0], 1.0)
    target = -2.0  # second directional derivative at the center
    errs = []
    for s in (0.9, 0.95, 0.99):
        v = eval_directional(g, [0, 0], [1, 0], s)
        errs.append(abs(v.value - target))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] / abs(target) < 0.10


def test_monotonicity_ellipticity():
    # u <= v with u(x) = v(x) forces value(u) <= value(v) up to brackets
    rng = np.random.default_rng(7)
    x = np.zeros(2)
    for trial in range(10):
        w = float(rng.uniform(0.6, 1.6))
        c = rng.uniform(-0.3, 0.3, size=2)
        v_field = gaussian_bump(c, w)
        scale = float(rng.uniform(0.05, 0.3))

        def lower(p, vf=v_field, sc=scale):
            d2 = float(np.dot(p - x, p - x))
            return vf.value(p) - sc * d2 * math.exp(-d2)

        u_field = from_callable(lower, sup_bound=1.0, dim=2, name="lowered")
        s = float(rng.uniform(0.2, 0.8))
        d = rng.standard_normal(2)
        d /= np.linalg.norm(d)
        a = eval_directional(u_field, x, d, s)
        b = eval_directional(v_field, x, d, s)
        assert a.value <= b.value + a.width + b.width + 1e-12


def test_not_classically_evaluable_gate(two_balls):
    u = distance_field(two_balls)
    with pytest.raises(NotClassicallyEvaluable):
        eval_directional(u, [0, 0, 0], [1, 0, 0], 0.5)  # medial point


# ---------------------------------------------------------------------------
# punctured variant


def test_punctured_zero_field():
    z = constant_field(0.0, 2)
    v = eval_directional_punctured(z, [0, 0], [1, 0], 0.5, eps=0.1)
    assert v.value == pytest.approx(0.0, abs=1e-12)


def test_punctured_gate_nonzero_base(two_balls):
    u = indicator_field(two_balls)
    with pytest.raises(PreconditionViolated):
        eval_directional_punctured(u, [0, 0, 0], [1, 0, 0], 0.5, eps=0.1)


def test_punctured_avoiding_line_is_exact_zero():
    u = indicator_field(Ball([0, 0, 0], 1.0))
    v = eval_directional_punctured(u, [2, 0, 0], [0, 1, 0], 0.5, eps=0.1)
    assert v.value == 0.0


def test_punctured_nonnegative(two_balls):
    u = indicator_field(two_balls)
    rng = np.random.default_rng(8)
    for _ in range(10):
        x = rng.uniform(-2, 2, size=3) + np.array([0, -2.5, 0])
        if two_balls.contains(x):
            continue
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        v = eval_directional_punctured(u, x, d, 0.5, eps=0.05)
        assert v.value >= 0.0 and v.lo >= 0.0


def test_punctured_monotone_in_eps():
    u = indicator_field(Ball([0, 0, 0], 1.0))
    x, d = [1.5, 0, 0], [1, 0, 0]
    small = eval_directional_punctured(u, x, d, 0.5, eps=0.1)
    large = eval_directional_punctured(u, x, d, 0.5, eps=0.4)
    assert large.value <= small.value + 1e-12


def test_punctured_matches_closed_form():
    # x=(2,0,0), xi=e1: interval (1,3); eps=2 clips it to (2,3)
    u = indicator_field(Ball([0, 0, 0], 1.0))
    v = eval_directional_punctured(u, [2, 0, 0], [1, 0, 0], 0.5, eps=2.0)
    expected = (1.0 / math.pi) * (1.0 / 2.0 - 1.0 / 3.0)
    assert v.value == pytest.approx(expected, abs=1e-14)


def test_from_cut_matches_full_on_smooth_field():
    g = gaussian_bump([0.0, 0.0], 1.0)
    full = eval_directional(g, [0, 0], [1, 0], 0.5)
    cut = eval_directional_from(g, [0, 0], [1, 0], 0.5, lo_cut=1e-4)
    # dropping (0, 1e-4) of a bounded-by-2 integrand changes little at s=1/2
    assert cut.value == pytest.approx(full.value, abs=1e-3)


# ---------------------------------------------------------------------------
# tail radius


def test_tail_radius_reference_value():
    r = tail_radius(1.0, 0.0, 0.5, 1e-6)
    assert r == pytest.approx(2.0 / (math.pi * 1e-6), rel=1e-12)


def test_tail_radius_tol_scaling():
    r1 = tail_radius(1.0, 0.0, 0.5, 1e-6)
    r2 = tail_radius(1.0, 0.0, 0.5, 2e-6)
    assert r2 == pytest.approx(r1 / 2.0, rel=1e-12)


def test_tail_radius_monotone_in_s():
    r_small = tail_radius(1.0, 0.0, 0.4, 1e-6)
    r_large = tail_radius(1.0, 0.0, 0.8, 1e-6)
    assert r_large < r_small


def test_quadrature_spec_gates():
    with pytest.raises(OutOfRange):
        QuadratureSpec(inner_nodes=4)
    with pytest.raises(OutOfRange):
        QuadratureSpec(outer_tol=0.0)
    with pytest.raises(OutOfRange):
        QuadratureSpec(split_radius=-1.0)
