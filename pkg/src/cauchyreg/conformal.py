"""Interior and exterior conformal maps onto the unit disk and its exterior.

Both maps are driven by a real double-layer density solved in ``solver``:
  interior:  f_i(z) = z exp(-(C phi_i)(z) - i v_i(0)),  v_i(0) = -Im (C phi_i)(0)
  exterior:  f_e(z) = z exp(-(C phi_e)(z) + int_Gamma phi_e ds)
The capacity of the contour is exp(-int phi_e ds).  Near-contour and
on-contour points use the regularized Cauchy evaluation (boundary values
via the one-sided Hilbert limits).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cauchy_ops import (
    EvalPolicy,
    cauchy_boundary_limit,
    cauchy_eval,
    cauchy_raw,
    make_target,
)
from .contour import SideClass
from .errors import GeometryError
from .interpolant import build_interpolant_table
from .solver import BieProblem, solve_conformal_exterior, solve_conformal_interior


@dataclass
class ConformalMap:
    direction: str  # "interior" | "exterior"
    nodes: object
    density: np.ndarray  # real density at the nodes
    order: int
    table: object  # interpolant table of the (complexified) density
    alpha: float = 0.0  # interior rotation v_i(0)
    log_offset: float = 0.0  # exterior additive constant int phi ds
    capacity: float = float("nan")
    niter: int = 0


def build_interior_map(nodes, order=3, tol=1e-12):
    sol = solve_conformal_interior(BieProblem(nodes, "conf_interior",
                                              order=order, tol=tol))
    phi = sol.values.astype(complex)
    table = build_interpolant_table(nodes, phi, order)
    v0 = -float(np.imag(cauchy_raw(nodes, phi, 0j)))
    return ConformalMap("interior", nodes, sol.values, order, table,
                        alpha=v0, niter=sol.niter)


def build_exterior_map(nodes, order=3, tol=1e-12):
    sol = solve_conformal_exterior(BieProblem(nodes, "conf_exterior",
                                              order=order, tol=tol))
    phi = sol.values.astype(complex)
    table = build_interpolant_table(nodes, phi, order)
    offset = float(np.sum(nodes.weights * np.abs(nodes.dgamma[0]) * sol.values))
    return ConformalMap("exterior", nodes, sol.values, order, table,
                        log_offset=offset, capacity=float(np.exp(-offset)),
                        niter=sol.niter)


def _cauchy_value(cmap, z, allowed_side, policy=None):
    """C phi at z, dispatching off-curve vs. Plemelj boundary-limit paths."""
    nodes = cmap.nodes
    policy = policy or EvalPolicy(order=cmap.order)
    target = make_target(z, nodes, policy)
    if target.side is SideClass.ON_CURVE:
        return cauchy_boundary_limit(nodes, cmap.density.astype(complex),
                                     cmap.table, target.nearest_index,
                                     allowed_side)
    if target.side is not allowed_side:
        raise GeometryError(
            f"target on the {target.side.value} side; this map is defined "
            f"on the {allowed_side.value} side")
    return cauchy_eval(nodes, cmap.density.astype(complex), cmap.table, target)


def eval_interior_map(cmap, z, policy=None):
    if cmap.direction != "interior":
        raise ValueError("map was built for the exterior direction")
    c = _cauchy_value(cmap, z, SideClass.INTERIOR, policy)
    return complex(z * np.exp(-c - 1j * cmap.alpha))


def eval_exterior_map(cmap, z, policy=None):
    if cmap.direction != "exterior":
        raise ValueError("map was built for the interior direction")
    c = _cauchy_value(cmap, z, SideClass.EXTERIOR, policy)
    return complex(z * np.exp(-c + cmap.log_offset))


def eval_map(cmap, z, policy=None):
    if cmap.direction == "interior":
        return eval_interior_map(cmap, z, policy)
    return eval_exterior_map(cmap, z, policy)


def map_points(cmap, points, policy=None):
    return np.array([eval_map(cmap, z, policy) for z in np.ravel(points)])


def _default_grid(cmap, n_radial, n_angular):
    """Points on the map's side of the contour, scaled copies of the nodes."""
    g = cmap.nodes.gamma
    if cmap.direction == "interior":
        radii = np.linspace(0.1, 0.995, n_radial)
    else:
        radii = np.linspace(1.005, 3.0, n_radial)
    t = np.linspace(0.0, 2 * np.pi, n_angular, endpoint=False)
    curve = np.interp(t, 2 * np.pi * np.arange(g.size) / g.size, g,
                      period=2 * np.pi)
    return (radii[:, None] * curve[None, :]).ravel()


def export_mapped_grid(cmap, out_csv, n_radial=12, n_angular=64, points=None,
                       policy=None):
    """Write rows (x, y, Re f, Im f) and a JSON metadata sidecar.

    Returns (csv_path, json_path).
    """
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    if points is None:
        points = _default_grid(cmap, n_radial, n_angular)
    points = np.ravel(np.asarray(points, dtype=complex))
    values = map_points(cmap, points, policy)
    with open(out_csv, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "re_f", "im_f"])
        for z, f in zip(points, values):
            wr.writerow([f"{z.real:.16e}", f"{z.imag:.16e}",
                         f"{f.real:.16e}", f"{f.imag:.16e}"])
    meta = {
        "direction": cmap.direction,
        "capacity": None if np.isnan(cmap.capacity) else cmap.capacity,
        "alpha": cmap.alpha,
        "M": int(cmap.nodes.size),
        "N": int(cmap.order),
    }
    json_path = out_csv.with_suffix(".json")
    with open(json_path, "w") as fh:
        json.dump(meta, fh, indent=2)
    return out_csv, json_path
