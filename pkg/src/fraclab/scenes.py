"""Scene files: JSON descriptions of the set, the field and solver settings.

A scene is self-contained (no includes) and fully determines a batch run:
ambient dimension, the open set U and the ambient set Omega, the field the
operators act on, operator parameters, quadrature and optimizer settings and
a sampling box.  Named fixtures expand to their full definitions:

* "two-balls-r3"  : union of the open unit balls at (0,0,0) and (0,4,0);
* "annulus-shell" : open region 1 < x1^2 + x2^2 < 2 in R^3;
* "unit-ball"     : open unit ball in R^3;
* "paraboloid"    : curvature-only scene for the epigraph of |x'|^2 / 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import geometry, predicates
from .errors import ParseError, ValidationError
from .fields import (
    ScalarField,
    distance_field,
    gaussian_bump,
    getoor_profile,
    indicator_field,
    truncated_distance_field,
)
from .geometry import (
    Ball,
    Box,
    Complement,
    CsgSet,
    Cylinder,
    Everything,
    HalfSpace,
    Intersection,
    Union,
)
from .operators import OptimizerConfig
from .quadrature import FracParams, QuadratureSpec

FIELD_KINDS = ("indicator", "distance", "truncated_distance", "gaussian", "getoor")
FIXTURES = ("two-balls-r3", "annulus-shell", "unit-ball", "paraboloid")


@dataclass
class Scene:
    dimension: int
    set: Optional[CsgSet]
    omega: CsgSet
    field_kind: str
    params: FracParams
    quadrature: QuadratureSpec
    optimizer: OptimizerConfig
    box: Box
    name: str = "scene"
    field_options: dict = dc_field(default_factory=dict)
    patch: object = None

    def field(self) -> ScalarField:
        if self.field_kind == "indicator":
            return indicator_field(self._require_set())
        if self.field_kind == "distance":
            return distance_field(
                self._require_set(), unbounded_ok=self.params.s > 0.5
            )
        if self.field_kind == "truncated_distance":
            return truncated_distance_field(self._require_set())
        if self.field_kind == "gaussian":
            center = self.field_options.get("center", [0.0] * self.dimension)
            width = self.field_options.get("width", 1.0)
            return gaussian_bump(center, width)
        if self.field_kind == "getoor":
            return getoor_profile(self.params.s, dim=self.dimension)
        raise ValidationError(f"unknown field kind {self.field_kind!r}")

    def _require_set(self) -> CsgSet:
        if self.set is None:
            raise ValidationError(f"scene {self.name!r} has no set (patch-only)")
        return self.set

    def curvature_patch(self):
        if self.patch is None:
            raise ValidationError(f"scene {self.name!r} has no curvature patch")
        return self.patch


# ---------------------------------------------------------------------------
# set (de)serialization


def set_from_dict(node: dict, dim: int) -> CsgSet:
    if not isinstance(node, dict) or "type" not in node:
        raise ParseError(f"set node must be an object with a 'type': {node!r}")
    t = node["type"]
    try:
        if t == "ball":
            return Ball(node["center"], node["radius"])
        if t == "box":
            return Box(node["lo"], node["hi"])
        if t == "halfspace":
            return HalfSpace(node["normal"], node["offset"])
        if t == "cylinder":
            return Cylinder(node["axis_point"], node["axis_dir"], node["radius"])
        if t == "everything":
            return Everything(dim)
        if t == "union":
            return Union(tuple(set_from_dict(c, dim) for c in node["children"]))
        if t == "intersection":
            return Intersection(tuple(set_from_dict(c, dim) for c in node["children"]))
        if t == "complement":
            return Complement(set_from_dict(node["child"], dim))
    except KeyError as e:
        raise ParseError(f"set node {t!r} missing field {e}") from e
    raise ParseError(f"unknown set type {t!r}")


def set_to_dict(s: CsgSet) -> dict:
    if isinstance(s, Ball):
        return {"type": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Box):
        return {"type": "box", "lo": s.lo.tolist(), "hi": s.hi.tolist()}
    if isinstance(s, HalfSpace):
        return {"type": "halfspace", "normal": s.normal.tolist(), "offset": s.offset}
    if isinstance(s, Cylinder):
        return {
            "type": "cylinder",
            "axis_point": s.axis_point.tolist(),
            "axis_dir": s.axis_dir.tolist(),
            "radius": s.radius,
        }
    if isinstance(s, Everything):
        return {"type": "everything"}
    if isinstance(s, Union):
        return {"type": "union", "children": [set_to_dict(c) for c in s.parts]}
    if isinstance(s, Intersection):
        return {"type": "intersection", "children": [set_to_dict(c) for c in s.parts]}
    if isinstance(s, Complement):
        return {"type": "complement", "child": set_to_dict(s.part)}
    raise ValidationError(f"cannot serialize {type(s).__name__}")


# ---------------------------------------------------------------------------
# fixtures


def two_balls_set() -> CsgSet:
    return Union((Ball([0.0, 0.0, 0.0], 1.0), Ball([0.0, 4.0, 0.0], 1.0)))


def annulus_shell_set() -> CsgSet:
    axis_p, axis_d = [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]
    return Intersection(
        (
            Cylinder(axis_p, axis_d, math.sqrt(2.0)),
            Complement(Cylinder(axis_p, axis_d, 1.0)),
        )
    )


def fixture_scene(name: str, overrides: Optional[dict] = None) -> Scene:
    if name not in FIXTURES:
        raise ParseError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    base = {
        "dimension": 3,
        "omega": {"type": "everything"},
        "field": "indicator",
        "params": {"s": 0.5, "k": 2},
    }
    if name == "two-balls-r3":
        base["set"] = {
            "type": "union",
            "children": [
                {"type": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0},
                {"type": "ball", "center": [0.0, 4.0, 0.0], "radius": 1.0},
            ],
        }
        base["box"] = [[-2.0, -2.0, -2.0], [2.0, 6.0, 2.0]]
    elif name == "annulus-shell":
        base["set"] = {
            "type": "intersection",
            "children": [
                {
                    "type": "cylinder",
                    "axis_point": [0.0, 0.0, 0.0],
                    "axis_dir": [0.0, 0.0, 1.0],
                    "radius": math.sqrt(2.0),
                },
                {
                    "type": "complement",
                    "child": {
                        "type": "cylinder",
                        "axis_point": [0.0, 0.0, 0.0],
                        "axis_dir": [0.0, 0.0, 1.0],
                        "radius": 1.0,
                    },
                },
            ],
        }
        base["box"] = [[-2.0, -2.0, -2.0], [2.0, 2.0, 2.0]]
    elif name == "unit-ball":
        base["set"] = {"type": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0}
        base["box"] = [[-2.0, -2.0, -2.0], [2.0, 2.0, 2.0]]
    else:  # paraboloid: curvature-only
        base["set"] = None
        base["box"] = [[-2.0, -2.0, -2.0], [2.0, 2.0, 2.0]]
    if overrides:
        for key, val in overrides.items():
            if isinstance(val, dict) and isinstance(base.get(key), dict):
                base[key] = {**base[key], **val}
            else:
                base[key] = val
    scene = scene_from_dict(base, name=name)
    return scene


def _fixture_patch(name: str):
    if name == "paraboloid":
        return predicates.paraboloid_patch()
    if name == "unit-ball":
        return predicates.ball_patch([0.0, 0.0, 0.0], 1.0, inside=True)
    if name == "annulus-shell":
        return predicates.cylindrical_shell_patch(1.0, math.sqrt(2.0))
    if name == "two-balls-r3":
        return predicates.union_of_balls_patch(
            [([0.0, 0.0, 0.0], 1.0), ([0.0, 4.0, 0.0], 1.0)]
        )
    return None


# ---------------------------------------------------------------------------
# parsing


def scene_from_dict(doc: dict, name: str = "scene") -> Scene:
    if "fixture" in doc:
        overrides = {k: v for k, v in doc.items() if k != "fixture"}
        return fixture_scene(doc["fixture"], overrides)
    try:
        dim = int(doc["dimension"])
    except KeyError:
        raise ParseError("scene is missing 'dimension'")
    if dim < 1:
        raise ValidationError(f"dimension must be >= 1, got {dim}")

    params_doc = doc.get("params", {})
    s = float(params_doc.get("s", 0.5))
    k = int(params_doc.get("k", 1))
    if not 0.0 < s < 1.0:
        raise ValidationError(f"params.s must lie in (0,1), got {s}")
    if not 1 <= k <= dim:
        raise ValidationError(f"params.k must satisfy 1 <= k <= {dim}, got {k}")
    params = FracParams(s=s, k=k, n=dim)

    set_doc = doc.get("set")
    u_set = None if set_doc is None else set_from_dict(set_doc, dim)
    if u_set is not None and u_set.dim != dim:
        raise ValidationError(
            f"set dimension {u_set.dim} does not match scene dimension {dim}"
        )
    omega_doc = doc.get("omega", {"type": "everything"})
    omega = set_from_dict(omega_doc, dim)
    if omega.dim != dim:
        raise ValidationError("omega dimension does not match scene dimension")

    field_kind = doc.get("field", "indicator")
    field_options = {}
    if isinstance(field_kind, dict):
        field_options = {kk: v for kk, v in field_kind.items() if kk != "kind"}
        field_kind = field_kind.get("kind", "indicator")
    if field_kind not in FIELD_KINDS:
        raise ValidationError(
            f"field must be one of {FIELD_KINDS}, got {field_kind!r}"
        )

    quad_doc = doc.get("quadrature", {})
    quad = QuadratureSpec(
        split_radius=float(quad_doc.get("split_radius", 0.5)),
        inner_nodes=int(quad_doc.get("inner_nodes", 64)),
        outer_tol=float(quad_doc.get("outer_tol", 1e-8)),
        tail_tol=float(quad_doc.get("tail_tol", 1e-8)),
    )
    opt_doc = doc.get("optimizer", {})
    opt = OptimizerConfig(
        restarts=int(opt_doc.get("restarts", 4)),
        max_iters=int(opt_doc.get("max_iters", 60)),
        seed=int(opt_doc.get("seed", 0)),
        tol=float(opt_doc.get("tol", 1e-9)),
    )

    box_doc = doc.get("box")
    if box_doc is None:
        box = Box([-2.0] * dim, [2.0] * dim)
    else:
        box = Box(box_doc[0], box_doc[1])
    if box.dim != dim:
        raise ValidationError("box dimension does not match scene dimension")

    scene = Scene(
        dimension=dim,
        set=u_set,
        omega=omega,
        field_kind=field_kind,
        params=params,
        quadrature=quad,
        optimizer=opt,
        box=box,
        name=name,
        field_options=field_options,
    )
    scene.patch = _fixture_patch(name)
    if scene.patch is None and isinstance(u_set, Ball):
        scene.patch = predicates.ball_patch(u_set.center, u_set.radius, inside=True)
    return scene


def parse_scene(path) -> Scene:
    """Load and validate a scene file (JSON syntax)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read scene file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"scene file {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("scene file must contain a JSON object")
    name = doc.get("fixture", doc.get("name", str(path)))
    return scene_from_dict(doc, name=name)


def scene_to_dict(scene: Scene) -> dict:
    return {
        "dimension": scene.dimension,
        "set": None if scene.set is None else set_to_dict(scene.set),
        "omega": set_to_dict(scene.omega),
        "field": scene.field_kind
        if not scene.field_options
        else {"kind": scene.field_kind, **scene.field_options},
        "params": {"s": scene.params.s, "k": scene.params.k},
        "quadrature": {
            "split_radius": scene.quadrature.split_radius,
            "inner_nodes": scene.quadrature.inner_nodes,
            "outer_tol": scene.quadrature.outer_tol,
            "tail_tol": scene.quadrature.tail_tol,
        },
        "optimizer": {
            "restarts": scene.optimizer.restarts,
            "max_iters": scene.optimizer.max_iters,
            "seed": scene.optimizer.seed,
            "tol": scene.optimizer.tol,
        },
        "box": [scene.box.lo.tolist(), scene.box.hi.tolist()],
    }


def quasi_random_points(
    box: Box, count: int, seed: int = 0, exclude: Optional[CsgSet] = None,
    require: Optional[CsgSet] = None,
) -> np.ndarray:
    """Deterministic Halton points in the box, optionally filtered."""
    from scipy.stats import qmc

    eng = qmc.Halton(d=box.dim, seed=seed)
    out = []
    guard = 0
    while len(out) < count and guard < 200:
        batch = qmc.scale(eng.random(max(count, 16)), box.lo, box.hi)
        for p in batch:
            if exclude is not None and exclude.contains(p):
                continue
            if require is not None and not require.contains(p):
                continue
            out.append(p)
            if len(out) == count:
                break
        guard += 1
    if len(out) < count:
        raise ValidationError("could not draw enough sample points in the box")
    return np.array(out)
