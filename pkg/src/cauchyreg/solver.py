"""Nystrom discretization and GMRES solution of the boundary integral
equations, plus Green's-formula field evaluation.

Robin problem (Delta u = 0, du/dnu + u = f):
  single-layer form:   (I/2 + K + S) du/dnu = (I/2 + K) f
  hypersingular form:  (-I/2 + K^T + T) u   = (-I/2 + K^T) f
Conformal-map densities:
  interior:  -phi/2 + K phi = -log|x|
  exterior:   phi/2 + K phi + int_Gamma phi ds = -log|x|
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import laplace_ops as lp
from .cauchy_ops import EvalPolicy, make_target
from .contour import SideClass, classify_point
from .errors import GeometryError, OrderError
from .interpolant import build_interpolant_table
from .numerics import gmres

EQUATIONS = ("robin_single", "robin_hyper", "conf_interior", "conf_exterior")


@dataclass
class BieProblem:
    nodes: object
    equation: str
    data: np.ndarray | None = None  # boundary samples f(x_m); None for conformal
    order: int = 3
    tol: float = 1e-12
    max_iter: int = 400
    branch: object = None  # defaults to StarRay about the centroid

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}")
        if self.data is not None:
            self.data = np.asarray(self.data, dtype=float)
            if self.data.size != self.nodes.size:
                raise ValueError("data length does not match node count")
        if self.equation == "robin_hyper" and self.order < 1:
            raise OrderError("hypersingular equation requires order N >= 1")
        if self.branch is None:
            self.branch = lp.StarRay(complex(np.mean(self.nodes.gamma)))


@dataclass
class BieSolution:
    values: np.ndarray  # real trace samples at the nodes
    niter: int
    residuals: list = field(default_factory=list)


def _psi_table(nodes, values, N):
    dens = lp.RealDensity.from_samples(nodes, values)
    return dens, build_interpolant_table(nodes, dens.psi, N)


def solve_robin_single(problem):
    """Solve (I/2 + K + S) v = (I/2 + K) f for the normal derivative v."""
    nodes, N = problem.nodes, problem.order
    Kmat = lp.double_layer_matrix(nodes)
    branch = problem.branch

    def matvec(x):
        xr = np.real(x)
        dens, table = _psi_table(nodes, xr, N)
        return xr / 2 + Kmat @ xr + lp.apply_S(nodes, dens, table, branch)

    rhs = problem.data / 2 + Kmat @ problem.data
    res = gmres(matvec, rhs.astype(complex), tol=problem.tol,
                max_iter=problem.max_iter)
    return BieSolution(np.real(res.x), res.niter, res.residuals)


def solve_robin_hyper(problem):
    """Solve (-I/2 + K^T + T) u = (-I/2 + K^T) f for the trace u."""
    nodes, N = problem.nodes, problem.order
    Ktmat = lp.adjoint_double_layer_matrix(nodes)

    def matvec(x):
        xr = np.real(x)
        table = build_interpolant_table(nodes, xr.astype(complex), N)
        return -xr / 2 + Ktmat @ xr + lp.apply_T(nodes, table)

    rhs = -problem.data / 2 + Ktmat @ problem.data
    res = gmres(matvec, rhs.astype(complex), tol=problem.tol,
                max_iter=problem.max_iter)
    return BieSolution(np.real(res.x), res.niter, res.residuals)


def _require_origin_inside(nodes):
    side, _ = classify_point(0j, nodes)
    if side is not SideClass.INTERIOR:
        raise GeometryError("the conformal-map equations require the origin "
                            "strictly inside the contour")


def solve_conformal_interior(problem):
    """Solve -phi/2 + K phi = -log|x| for the interior map density."""
    nodes = problem.nodes
    _require_origin_inside(nodes)
    Kmat = lp.double_layer_matrix(nodes)
    matvec = lambda x: -x / 2 + Kmat @ x  # noqa: E731
    rhs = -np.log(np.abs(nodes.gamma))
    res = gmres(matvec, rhs.astype(complex), tol=problem.tol,
                max_iter=problem.max_iter)
    return BieSolution(np.real(res.x), res.niter, res.residuals)


def solve_conformal_exterior(problem):
    """Solve phi/2 + K phi + int phi ds = -log|x| for the exterior density."""
    nodes = problem.nodes
    _require_origin_inside(nodes)
    Kmat = lp.double_layer_matrix(nodes)
    ds = nodes.weights * np.abs(nodes.dgamma[0])

    def matvec(x):
        return x / 2 + Kmat @ x + np.sum(ds * x)

    rhs = -np.log(np.abs(nodes.gamma))
    res = gmres(matvec, rhs.astype(complex), tol=problem.tol,
                max_iter=problem.max_iter)
    return BieSolution(np.real(res.x), res.niter, res.residuals)


def greens_field(nodes, u_trace, v_trace, target, branch, order=3,
                 policy=None, tables=None):
    """u(r) = S v - D u at an off-curve target, with both potentials
    regularized per the 5h policy.

    ``tables`` may carry precomputed interpolant tables as a dict with keys
    "u" (interpolant of u) and "v_psi" (interpolant of psi for v), so grid
    sweeps build them once.
    """
    u_dens = lp.RealDensity.from_samples(nodes, u_trace)
    v_dens = lp.RealDensity.from_samples(nodes, v_trace)
    if tables is None:
        tables = {}
    if "u" not in tables:
        tables["u"] = build_interpolant_table(
            nodes, np.asarray(u_trace, dtype=complex), order)
    if "v_psi" not in tables:
        tables["v_psi"] = build_interpolant_table(nodes, v_dens.psi, order)
    if not hasattr(target, "side"):
        target = make_target(target, nodes, policy or EvalPolicy(order=order))
    sv = lp.single_layer_potential(nodes, v_dens, tables["v_psi"], target,
                                   branch, policy)
    du = lp.double_layer_potential(nodes, u_dens, tables["u"], target, policy)
    return sv - du
