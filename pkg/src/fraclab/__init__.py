"""Numerical laboratory for directional fractional operators.

Evaluates the one-dimensional directional operator with certified brackets,
the k-frame truncated operator and the k-th subspace minimax built on it,
and verifies the geometric structure of positivity sets: line- and
subspace-avoidance predicates, supersolution certificates, principal
curvature checks and convexity probes, all at desk scale.
"""

from .errors import FraclabError
from .frames import (
    Frame,
    Subspace,
    orthonormalize,
    orthogonal_complement_projector,
    perturb_frame,
    random_frame,
)
from .geometry import (
    Ball,
    Box,
    Complement,
    Cylinder,
    Everything,
    HalfSpace,
    Intersection,
    PredicateVerdict,
    Union,
    affine_subspace_avoids,
    connected_components,
    contains,
    distance_to_complement,
    is_component_convex,
    line_avoids,
    line_intersection_intervals,
)
from .fields import (
    ScalarField,
    constant_field,
    distance_field,
    from_callable,
    gaussian_bump,
    getoor_profile,
    indicator_field,
    quadratic_bump,
    restrict_to_line,
    truncated_distance_field,
)
from .quadrature import (
    FracParams,
    OperatorValue,
    QuadratureSpec,
    eval_directional,
    eval_directional_punctured,
    normalization_constant,
    tail_radius,
)
from .operators import (
    OptimizerConfig,
    brute_force_oracle,
    eval_eigenvalue,
    eval_truncated,
    frame_sum,
    local_limit_reference,
)

__version__ = "0.1.0"
