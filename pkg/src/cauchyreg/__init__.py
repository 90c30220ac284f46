"""High-order evaluation of Cauchy-type contour integrals, Laplace layer
potentials, and conformal maps, accurate everywhere including near and on
the contour via density-interpolation regularization."""

from .cauchy_ops import (
    EvalPolicy,
    TargetPoint,
    cauchy_boundary_limit,
    cauchy_eval,
    cauchy_raw,
    cauchy_regularized,
    hilbert_regularized,
    make_target,
)
from .conformal import (
    ConformalMap,
    build_exterior_map,
    build_interior_map,
    eval_exterior_map,
    eval_interior_map,
    export_mapped_grid,
)
from .contour import (
    AnalyticClosed,
    Contour,
    PatchCollection,
    PeriodicSpline,
    SideClass,
    build_koch_polygon,
    circle,
    classify_point,
    ellipse,
    jellyfish,
    subdivide_patches,
    to_patches,
)
from .errors import (
    AmbiguousWindingError,
    CapabilityError,
    CauchyRegError,
    ConfigError,
    DegenerateParametrizationError,
    GeometryError,
    NonConvergenceError,
    OrderError,
)
from .interpolant import InterpolantTable, build_interpolant_table, eval_PN
from .laplace_ops import (
    Chain,
    RealDensity,
    StarRay,
    adjoint_double_layer_Kt,
    double_layer_operator_K,
    double_layer_potential,
    gradient_potentials,
    hypersingular_T,
    single_layer_operator_S,
    single_layer_potential,
)
from .numerics import NodeTable, build_node_table, fejer_rule, gmres, trapezoid_nodes
from .solver import (
    BieProblem,
    BieSolution,
    greens_field,
    solve_conformal_exterior,
    solve_conformal_interior,
    solve_robin_hyper,
    solve_robin_single,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
