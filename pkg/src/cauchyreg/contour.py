"""Closed planar contours: parametrizations, derivatives, point classification.

All contours are counterclockwise.  Global contours are parametrized on
[0, 2*pi); patches are parametrized on [-1, 1].  Points in the plane are
represented as complex numbers throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    AmbiguousWindingError,
    CapabilityError,
    DegenerateParametrizationError,
)

ON_CURVE_TOL_FACTOR = 1e-12  # times the contour diameter


class SideClass(enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    ON_CURVE = "on_curve"


class Contour:
    """Base class for closed curves.  Subclasses implement ``derivs``."""

    kind = "abstract"
    max_order = 2  # closed-form derivative orders available

    def derivs(self, t, order):
        """Return [gamma(t), gamma'(t), ..., gamma^(order)(t)]."""
        raise NotImplementedError

    def point(self, t):
        return self.derivs(t, 0)[0]

    def diameter(self):
        t = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
        g = self.point(t)
        return float(np.ptp(g.real) ** 2 + np.ptp(g.imag) ** 2) ** 0.5

    def centroid(self):
        t = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
        return complex(np.mean(self.point(t)))


def eval_parametrization(contour, t, order=0):
    """Evaluate gamma and its first ``order`` closed-form derivatives at t.

    Raises CapabilityError when the parametrization does not provide the
    requested smoothness (splines: order <= 3; higher orders are obtained
    downstream by spectral differentiation of node samples, not here).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if order > contour.max_order:
        raise CapabilityError(
            f"{contour.kind} contour provides closed-form derivatives up to "
            f"order {contour.max_order}, requested {order}"
        )
    out = contour.derivs(t, order)
    if order >= 1:
        g1 = np.asarray(out[1])
        if np.any(np.abs(g1) == 0.0):
            raise DegenerateParametrizationError("gamma'(t) vanishes")
    return out


class AnalyticClosed(Contour):
    """Named analytic parametrization with closed-form derivatives."""

    kind = "analytic"

    def __init__(self, name, deriv_funcs, max_order=2):
        self.name = name
        self._funcs = deriv_funcs  # tuple of callables, index = order
        self.max_order = max_order

    def derivs(self, t, order):
        t = np.asarray(t, dtype=float)
        if order > self.max_order:
            raise CapabilityError(
                f"analytic contour '{self.name}' implements derivatives up to "
                f"order {self.max_order}"
            )
        return [np.asarray(f(t), dtype=complex) for f in self._funcs[: order + 1]]


def circle(radius=1.0, center=0j):
    funcs = [lambda t, n=n: (
        center + radius * np.exp(1j * t) if n == 0
        else radius * (1j) ** n * np.exp(1j * t)
    ) for n in range(9)]
    c = AnalyticClosed("circle", funcs, max_order=8)
    c.params = {"radius": radius, "center": center}
    return c


def ellipse(a=2.0, b=1.0):
    def d(t, n):
        ca, cb = np.cos(t + n * np.pi / 2), np.sin(t + n * np.pi / 2)
        return a * ca + 1j * b * cb

    funcs = [lambda t, n=n: d(t, n) for n in range(9)]
    c = AnalyticClosed("ellipse", funcs, max_order=8)
    c.params = {"a": a, "b": b}
    return c


def jellyfish():
    """gamma(t) = (1 + 0.3 cos(4t + 2 sin t)) * exp(i (t - pi/2))."""

    def parts(t):
        u = 4 * t + 2 * np.sin(t)
        up = 4 + 2 * np.cos(t)
        upp = -2 * np.sin(t)
        r = 1 + 0.3 * np.cos(u)
        rp = -0.3 * np.sin(u) * up
        rpp = -0.3 * (np.cos(u) * up**2 + np.sin(u) * upp)
        e = np.exp(1j * (t - np.pi / 2))
        return r, rp, rpp, e

    def g0(t):
        r, _, _, e = parts(t)
        return r * e

    def g1(t):
        r, rp, _, e = parts(t)
        return (rp + 1j * r) * e

    def g2(t):
        r, rp, rpp, e = parts(t)
        return (rpp + 2j * rp - r) * e

    return AnalyticClosed("jellyfish", (g0, g1, g2), max_order=2)


class PeriodicSpline(Contour):
    """Periodic cubic spline through ordered complex control points.

    Knots are uniform in index, mapped to [0, 2*pi).
    """

    kind = "spline"
    max_order = 3

    def __init__(self, control_points):
        pts = np.asarray(control_points, dtype=complex)
        if pts.size < 3:
            raise ValueError("need at least 3 control points")
        self.control_points = pts
        n = pts.size
        knots = 2 * np.pi * np.arange(n + 1) / n
        y = np.append(pts, pts[0])
        self._spline = CubicSpline(knots, y, bc_type="periodic")
        self.knots = knots[:-1]

    def derivs(self, t, order):
        t = np.mod(np.asarray(t, dtype=float), 2 * np.pi)
        if order > 3:
            raise CapabilityError("cubic spline provides derivatives up to order 3")
        return [np.asarray(self._spline(t, nu=n), dtype=complex)
                for n in range(order + 1)]


class Patch:
    """One smooth piece of a piecewise-smooth contour, on [-1, 1]."""

    max_order = 2

    def derivs(self, s, order):
        raise NotImplementedError

    def point(self, s):
        return self.derivs(s, 0)[0]

    def endpoints(self):
        a = self.point(np.array([-1.0, 1.0]))
        return complex(a[0]), complex(a[1])


class LinePatch(Patch):
    """Straight segment from z0 to z1."""

    max_order = 8

    def __init__(self, z0, z1):
        self.z0 = complex(z0)
        self.z1 = complex(z1)

    def derivs(self, s, order):
        s = np.asarray(s, dtype=float)
        half = (self.z1 - self.z0) / 2
        # convex combination: exact at the endpoints
        out = [self.z0 * (1 - s) / 2 + self.z1 * (1 + s) / 2,
               np.full_like(s, half, dtype=complex)]
        for _ in range(2, order + 1):
            out.append(np.zeros_like(s, dtype=complex))
        return out[: order + 1]


class MappedPatch(Patch):
    """Restriction of a global contour to a parameter subinterval [a, b]."""

    def __init__(self, base, a, b):
        self.base = base
        self.a = float(a)
        self.b = float(b)
        self.max_order = base.max_order

    def derivs(self, s, order):
        s = np.asarray(s, dtype=float)
        half = (self.b - self.a) / 2
        t = (self.a + self.b) / 2 + half * s
        vals = self.base.derivs(t, order)
        return [vals[n] * half**n for n in range(order + 1)]


class SubPatch(Patch):
    """Restriction of a patch to a sub-interval of its own parameter."""

    def __init__(self, parent, a, b):
        self.parent = parent
        self.a = float(a)
        self.b = float(b)
        self.max_order = parent.max_order

    def derivs(self, s, order):
        s = np.asarray(s, dtype=float)
        half = (self.b - self.a) / 2
        u = (self.a + self.b) / 2 + half * s
        vals = self.parent.derivs(u, order)
        return [vals[n] * half**n for n in range(order + 1)]


class PatchCollection(Contour):
    """Ordered, counterclockwise, non-overlapping patches that close up."""

    kind = "patches"

    def __init__(self, patches):
        if not patches:
            raise ValueError("empty patch list")
        self.patches = list(patches)
        self.max_order = min(p.max_order for p in self.patches)

    def derivs(self, t, order):
        # Global parameter: patch p covers [2*pi*p/P, 2*pi*(p+1)/P).
        t = np.mod(np.asarray(t, dtype=float), 2 * np.pi)
        P = len(self.patches)
        idx = np.minimum((t * P / (2 * np.pi)).astype(int), P - 1)
        s = t * P / np.pi - 2 * idx - 1.0  # local coordinate in [-1, 1)
        scale = P / np.pi  # ds/dt
        out = [np.zeros(t.shape, dtype=complex) for _ in range(order + 1)]
        for p in range(P):
            sel = idx == p
            if not np.any(sel):
                continue
            vals = self.patches[p].derivs(s[sel], order)
            for n in range(order + 1):
                out[n][sel] = vals[n] * scale**n
        return out

    def is_closed(self, tol=0.0):
        ends = [p.endpoints() for p in self.patches]
        for (_, e), (s, _) in zip(ends, ends[1:] + ends[:1]):
            if abs(e - s) > tol:
                return False
        return True


def build_koch_polygon(level):
    """Koch snowflake polygon with 3 * 4**level vertices, as line patches."""
    if level < 0:
        raise ValueError("level must be >= 0")
    verts = [np.exp(1j * (np.pi / 2 + 2 * np.pi * k / 3)) for k in range(3)]
    for _ in range(level):
        new = []
        for a, b in zip(verts, verts[1:] + verts[:1]):
            third = (b - a) / 3
            p1 = a + third
            p2 = a + 2 * third
            tip = p1 + third * np.exp(-1j * np.pi / 3)  # outward bump, CCW polygon
            new.extend([a, p1, tip, p2])
        verts = new
    patches = [LinePatch(a, b) for a, b in zip(verts, verts[1:] + verts[:1])]
    pc = PatchCollection(patches)
    pc.vertices = np.asarray(verts, dtype=complex)
    return pc


def subdivide_patches(contour, pieces_per_patch):
    """Split every patch into equal parameter subintervals; same point set."""
    if pieces_per_patch < 1:
        raise ValueError("pieces_per_patch must be >= 1")
    if pieces_per_patch == 1:
        return contour
    if not isinstance(contour, PatchCollection):
        contour = to_patches(contour, 1)
    bounds = np.linspace(-1.0, 1.0, pieces_per_patch + 1)
    out = []
    for patch in contour.patches:
        out.extend(SubPatch(patch, a, b) for a, b in zip(bounds[:-1], bounds[1:]))
    return PatchCollection(out)


def to_patches(contour, n_patches):
    """Convert a globally parametrized contour into n equal parameter patches."""
    if isinstance(contour, PatchCollection):
        raise ValueError("contour is already a patch collection")
    edges = 2 * np.pi * np.arange(n_patches + 1) / n_patches
    return PatchCollection(
        [MappedPatch(contour, a, b) for a, b in zip(edges[:-1], edges[1:])]
    )


def nearest_node(z, node_table):
    """Index and distance of the closest quadrature node; ties -> lowest index."""
    d = np.abs(node_table.gamma - z)
    idx = int(np.argmin(d))
    return idx, float(d[idx])


def winding_number(z, node_table):
    """Discrete winding number of the contour about z."""
    gp = node_table.dgamma[0]
    w = np.sum(node_table.weights * gp / (node_table.gamma - z)) / (2j * np.pi)
    return float(w.real)


def classify_point(z, node_table, on_curve_tol=None):
    """Interior/exterior by winding number; on-curve by node proximity."""
    if node_table.gamma.size == 0:
        raise ValueError("empty node table")
    if on_curve_tol is None:
        on_curve_tol = ON_CURVE_TOL_FACTOR * node_table.diameter
    idx, dist = nearest_node(z, node_table)
    if dist < on_curve_tol:
        return SideClass.ON_CURVE, idx

    def _local_side():
        # signed distance to the osculating parabola at the nearest node:
        # normal projection plus the kappa a^2 / 2 curvature sag, so targets
        # much closer than one node spacing are classified correctly
        w = np.conj(node_table.normals[idx]) * (z - node_table.gamma[idx])
        g1, g2 = node_table.dgamma[0][idx], node_table.dgamma[1][idx]
        kappa = np.imag(np.conj(g1) * g2) / np.abs(g1) ** 3
        s = w.real + kappa * w.imag**2 / 2
        return SideClass.EXTERIOR if s > 0 else SideClass.INTERIOR

    if dist < node_table.spacing[idx]:
        # the winding quadrature is itself nearly singular here
        return _local_side(), idx
    w = winding_number(z, node_table)
    if abs(w - round(w)) > 0.1:
        if dist < 2 * node_table.spacing[idx]:
            return _local_side(), idx
        raise AmbiguousWindingError(
            f"winding number {w:.3f} is ambiguous at z={z}; refine the grid"
        )
    return (SideClass.INTERIOR if round(w) == 1 else SideClass.EXTERIOR), idx
