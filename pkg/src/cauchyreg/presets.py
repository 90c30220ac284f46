"""Fixed experiment presets for the near-boundary error studies.

Pole locations are not published for the reference error tables (they are
shown only graphically), so each preset documents its own fixed list of
exterior poles at clearance >= 0.25 from the contour (about a tenth of the
contour diameter).  Accuracy checks therefore use magnitude bands, not
digit matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import contour as ct
from .numerics import build_node_table

# jellyfish: poles offset along the exterior normal at these parameters;
# chosen so the minimum pole-to-contour distance is ~0.25-0.26
JELLYFISH_POLE_PARAMS = (0.9, 2.0, 3.1, 4.2, 5.3)
JELLYFISH_POLE_OFFSET = 0.26

# snowflake: radial poles; minimum clearance ~0.30
SNOWFLAKE_POLE_ANGLES = (0.4, 1.7, 2.6, 3.9, 5.2)
SNOWFLAKE_POLE_RADIUS = 1.3


def jellyfish_poles():
    t = np.asarray(JELLYFISH_POLE_PARAMS)
    c = ct.jellyfish()
    g0, g1 = c.derivs(t, 1)
    return g0 + JELLYFISH_POLE_OFFSET * (-1j * g1 / np.abs(g1))


def snowflake_poles():
    return SNOWFLAKE_POLE_RADIUS * np.exp(1j * np.asarray(SNOWFLAKE_POLE_ANGLES))


def meromorphic(poles):
    """f(z) = sum_l 1/(z - z_l) and its derivatives, as a callable."""
    poles = np.asarray(poles, dtype=complex)

    def f(z, deriv=0):
        z = np.asarray(z, dtype=complex)
        vals = ((-1.0) ** deriv * factorial(deriv) * np.sum(
            1.0 / (z[..., None] - poles) ** (deriv + 1), axis=-1))
        return vals
    return f


@dataclass
class Table1Preset:
    name: str
    nodes: object
    poles: np.ndarray
    density: object  # callable f(z, deriv)
    targets: np.ndarray  # 100 points at delta inside the contour
    delta: float


def jellyfish_table1(M=800, delta=1e-4, n_targets=100):
    """Smooth preset: trapezoid rule, targets delta inside along the curve."""
    c = ct.jellyfish()
    nodes = build_node_table(c, M, n_derivs=6)
    s = 2 * np.pi * np.arange(n_targets) / n_targets
    g0, g1 = c.derivs(s, 1)
    nu = -1j * g1 / np.abs(g1)
    poles = jellyfish_poles()
    return Table1Preset("jellyfish", nodes, poles, meromorphic(poles),
                        g0 - delta * nu, delta)


def snowflake_table1(level=3, subdivide=3, M=8, delta=1e-4, n_targets=100):
    """Piecewise-smooth preset: Koch polygon, Fejer rule, M nodes per patch.

    Targets sit at the central node of evenly spaced patches, offset inward
    along the node normal (central nodes keep clear of the corners).
    """
    c = ct.subdivide_patches(ct.build_koch_polygon(level), subdivide)
    nodes = build_node_table(c, M, n_derivs=6)
    P = len(c.patches)
    psel = (np.arange(n_targets) * P) // n_targets
    idx = psel * M + M // 2 - 1
    targets = nodes.gamma[idx] - delta * nodes.normals[idx]
    poles = snowflake_poles()
    return Table1Preset("snowflake", nodes, poles, meromorphic(poles),
                        targets, delta)
