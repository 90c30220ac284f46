"""Laplace layer potentials, their gradients, and the four boundary operators.

Double-layer quantities reduce to real/imaginary parts of the Cauchy
operator; single-layer quantities use the phase-rotated density
psi = phi * |gamma'| / gamma' and a branch-controlled complex logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cauchy_ops import TWO_PI_I, cauchy_eval, cauchy_raw
from .contour import SideClass
from .errors import GeometryError, OrderError
from .interpolant import eval_PN, eval_PN_pairwise, integrate_PN_segment
from .numerics import density_field


@dataclass
class RealDensity:
    """Real boundary density and its complex single-layer transform.

    ``psi`` satisfies psi(gamma(t)) = phi(gamma(t)) * |gamma'(t)| / gamma'(t),
    a pure phase rotation: |psi| = |phi| at every node.
    """

    samples: np.ndarray  # real values at the nodes
    psi: np.ndarray      # complex transform at the nodes

    @classmethod
    def from_samples(cls, nodes, values):
        v = np.asarray(values, dtype=float)
        if v.size != nodes.size:
            raise ValueError("sample count does not match node count")
        g1 = nodes.dgamma[0]
        return cls(v, v * np.abs(g1) / g1)


def curvature(nodes):
    """Signed curvature at the nodes (positive for a counterclockwise circle)."""
    if "curvature" not in nodes._cache:
        g1, g2 = nodes.dgamma[0], nodes.dgamma[1]
        nodes._cache["curvature"] = np.imag(np.conj(g1) * g2) / np.abs(g1) ** 3
    return nodes._cache["curvature"]


def _arclength_weights(nodes):
    return nodes.weights * np.abs(nodes.dgamma[0])


# ---------------------------------------------------------------------------
# double layer
# ---------------------------------------------------------------------------

def double_layer_potential(nodes, density, table, target, policy=None):
    """D(phi) at an off-curve target: -Re of the (regularized) Cauchy value."""
    if target.side is SideClass.ON_CURVE:
        raise ValueError("use double_layer_operator_K for on-curve points")
    phi = np.asarray(density.samples, dtype=complex)
    return float(-np.real(cauchy_eval(nodes, phi, table, target)))


def double_layer_matrix(nodes):
    """Dense double-layer operator K; smooth kernel, curvature diagonal."""
    if "K_matrix" not in nodes._cache:
        g = nodes.gamma
        diff = g[:, None] - g[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.real(np.conj(nodes.normals)[None, :] * diff) / (
                np.abs(diff) ** 2
            )
        np.fill_diagonal(kern, -curvature(nodes) / 2)
        nodes._cache["K_matrix"] = kern / (2 * np.pi) * _arclength_weights(nodes)
    return nodes._cache["K_matrix"]


def apply_K(nodes, values):
    return double_layer_matrix(nodes) @ np.asarray(values)


def double_layer_operator_K(nodes, density, node_index):
    return float(double_layer_matrix(nodes)[node_index] @ density.samples)


def adjoint_double_layer_matrix(nodes):
    """Dense adjoint operator K^T: transposed kernel, same diagonal limit."""
    if "Kt_matrix" not in nodes._cache:
        g = nodes.gamma
        diff = g[:, None] - g[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = -np.real(np.conj(nodes.normals)[:, None] * diff) / (
                np.abs(diff) ** 2
            )
        np.fill_diagonal(kern, -curvature(nodes) / 2)
        nodes._cache["Kt_matrix"] = kern / (2 * np.pi) * _arclength_weights(nodes)
    return nodes._cache["Kt_matrix"]


def apply_Kt(nodes, values):
    return adjoint_double_layer_matrix(nodes) @ np.asarray(values)


def adjoint_double_layer_Kt(nodes, density, node_index):
    return float(adjoint_double_layer_matrix(nodes)[node_index] @ density.samples)


# ---------------------------------------------------------------------------
# hypersingular operator
# ---------------------------------------------------------------------------

def _T_diagonal(nodes, table):
    """Limit of (phi - p_N)(tau) gamma'(tau) / (gamma(tau) - gamma(t))^2.

    Second-order Taylor quotient: a / (2 gamma'), with
    a = phi'' - c_1 gamma'' - c_2 gamma'^2 (the c_2 term only for N >= 2,
    where a vanishes analytically and the formula returns roundoff).
    """
    g1, g2 = nodes.dgamma[0], nodes.dgamma[1]
    phi2 = nodes.diff(nodes.diff(table.samples))
    a = phi2 - table.coeffs[:, 1] * g2
    if table.order >= 2:
        a = a - table.coeffs[:, 2] * g1**2
    return a / (2 * g1)


def apply_T(nodes, table):
    """Hypersingular operator applied to the density held by ``table``."""
    if table.order < 1:
        raise OrderError("hypersingular regularization requires order N >= 1")
    g = nodes.gamma
    dz = g[None, :] - g[:, None]  # row m: zeta_k - gamma_m
    resid = table.samples[None, :] - eval_PN_pairwise(table, dz)
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = resid * nodes.dgamma[0][None, :] / dz**2
    idx = np.arange(nodes.size)
    integ[idx, idx] = _T_diagonal(nodes, table)
    sums = integ @ nodes.weights
    return -np.real(nodes.normals * sums / TWO_PI_I)


def hypersingular_T(nodes, density, table, node_index):
    return float(apply_T(nodes, table)[node_index])


# ---------------------------------------------------------------------------
# branch cuts for the single layer
# ---------------------------------------------------------------------------

def log_ray(u, alpha):
    """log(u) with the branch cut along the ray arg(u) = alpha."""
    shift = np.exp(1j * (np.pi - alpha))
    return np.log(np.asarray(u, dtype=complex) * shift) - 1j * (np.pi - alpha)


@dataclass
class StarRay:
    """Branch cuts as straight rays pointing away from a star center.

    Valid whenever every ray {p + s (p - center), s >= 0} from a point p of
    interest meets the contour at most at p itself (guaranteed for contours
    star-shaped about ``center``).
    """

    center: complex = 0j

    def log_values(self, nodes, z, side, node_index):
        """log(gamma_k - z) at all nodes, cut chosen per the target's side.

        Interior targets route the cut through the interpolation node
        gamma_m and then radially outward; exterior targets use a single
        outward ray from z.  The entry at ``node_index`` is unused by the
        callers (the regularized integrand vanishes there) and is set to 0.
        """
        g = nodes.gamma
        m = node_index
        z0 = g[m]
        out = np.zeros(nodes.size, dtype=complex)
        mask = np.arange(nodes.size) != m
        if side is SideClass.INTERIOR:
            alpha0 = np.angle(z0 - self.center)
            self._check_segment(nodes, z, m)
            self._check_ray(nodes, z0, alpha0, m)
            out[mask] = np.log((g[mask] - z) / (g[mask] - z0)) + log_ray(
                g[mask] - z0, alpha0
            )
        else:
            alpha = np.angle(z - self.center)
            self._check_ray(nodes, z, alpha, m if side is SideClass.ON_CURVE
                            else None)
            out[mask] = log_ray(g[mask] - z, alpha)
        return out

    def _check_ray(self, nodes, p, alpha, allowed_index):
        """The ray {p + s e^{i alpha}} may touch the contour only at p."""
        d = np.exp(1j * alpha)
        u = (nodes.gamma - p) * np.conj(d)  # ray -> positive real axis
        near = (np.abs(u.imag) < nodes.spacing / 2) & (u.real > 0)
        if allowed_index is not None:
            near &= np.abs(nodes.gamma - p) > 2 * nodes.spacing[allowed_index]
        if np.any(near):
            raise GeometryError(
                "branch-cut ray re-intersects the contour; choose another "
                "star center or use a chain cut"
            )

    def _check_segment(self, nodes, z, node_index):
        """The cut segment from z to the node must stay off the contour."""
        z0 = nodes.gamma[node_index]
        seg = z0 - z
        if abs(seg) == 0.0:
            return
        u = (nodes.gamma - z) / seg
        near = (np.abs(u.imag) * abs(seg) < nodes.spacing / 2) & (
            u.real > 0) & (u.real < 1)
        near &= np.abs(nodes.gamma - z0) > 2 * nodes.spacing[node_index]
        if np.any(near):
            raise GeometryError(
                "branch-cut segment from the target to its nearest node "
                "crosses the contour"
            )


@dataclass
class Chain:
    """Piecewise-linear branch cut through user control points.

    log(zeta - z) = Log((zeta - z)/(zeta - z_0)) + sum_q Log((zeta -
    z_{q-1})/(zeta - z_q)) + log_tau(zeta - z_Q): the cut runs z -> z_0 ->
    ... -> z_Q and then along the ray of direction ``direction``.
    """

    control_points: tuple
    direction: complex

    def log_values(self, nodes, z, side, node_index):
        pts = [complex(p) for p in self.control_points]
        if not pts:
            raise ValueError("chain cut needs at least one control point")
        g = nodes.gamma
        m = node_index
        out = np.zeros(nodes.size, dtype=complex)
        mask = np.arange(nodes.size) != m
        gm = g[mask]
        self._check_chain(nodes, z, node_index)
        acc = np.log((gm - z) / (gm - pts[0]))
        for a, b in zip(pts[:-1], pts[1:]):
            acc += np.log((gm - a) / (gm - b))
        acc += log_ray(gm - pts[-1], float(np.angle(self.direction)))
        out[mask] = acc
        return out

    def _check_chain(self, nodes, z, node_index):
        pts = [complex(z)] + [complex(p) for p in self.control_points]
        for a, b in zip(pts[:-1], pts[1:]):
            seg = b - a
            if abs(seg) == 0.0:
                continue
            u = (nodes.gamma - a) / seg
            near = (np.abs(u.imag) * abs(seg) < nodes.spacing / 2) & (
                u.real > 0) & (u.real < 1)
            near &= np.abs(nodes.gamma - nodes.gamma[node_index]) > (
                2 * nodes.spacing[node_index])
            if np.any(near):
                raise GeometryError("chain branch cut crosses the contour")
        d = np.exp(1j * np.angle(self.direction))
        u = (nodes.gamma - pts[-1]) * np.conj(d)
        if np.any((np.abs(u.imag) < nodes.spacing / 2) & (u.real > 0)):
            raise GeometryError("chain branch-cut ray crosses the contour")


# ---------------------------------------------------------------------------
# single layer
# ---------------------------------------------------------------------------

def single_layer_raw(nodes, density, z):
    """Direct real-log quadrature -(1/2 pi) int log|z - y| phi(y) ds(y)."""
    z = np.asarray(z, dtype=complex)
    w = _arclength_weights(nodes) * density.samples
    vals = -(w[:, None] * np.log(np.abs(
        z.ravel()[None, :] - nodes.gamma[:, None]))).sum(axis=0) / (2 * np.pi)
    return vals.reshape(z.shape) if z.shape else float(vals[0])


def single_layer_potential(nodes, density, psi_table, target, branch,
                           policy=None):
    """Regularized single-layer potential at an off-curve target."""
    if target.side is SideClass.ON_CURVE:
        raise ValueError("use single_layer_operator_S for on-curve points")
    if not target.regularize:
        return single_layer_raw(nodes, density, target.z)
    m = target.nearest_index
    L = branch.log_values(nodes, target.z, target.side, m)
    resid = density.psi - eval_PN(psi_table, m, nodes.gamma)
    resid[m] = 0.0  # exact: Q_N matches psi at its center
    val = np.sum(nodes.weights * nodes.dgamma[0] * L * resid) / TWO_PI_I
    if target.side is SideClass.INTERIOR:
        val -= integrate_PN_segment(psi_table, m, target.z)
    return float(np.imag(val))


def single_layer_operator_S(nodes, density, psi_table, node_index, branch):
    """Boundary trace of the single layer at a node.

    The singular-node term vanishes for N >= 1 and is skipped for N = 0
    (the quadrature sum simply omits the node).
    """
    m = node_index
    L = branch.log_values(nodes, nodes.gamma[m], SideClass.ON_CURVE, m)
    resid = density.psi - eval_PN(psi_table, m, nodes.gamma)
    resid[m] = 0.0
    val = np.sum(nodes.weights * nodes.dgamma[0] * L * resid) / TWO_PI_I
    return float(np.imag(val))


def apply_S(nodes, density, psi_table, branch):
    """Single-layer operator at every node (vectorized over rows)."""
    g = nodes.gamma
    M = nodes.size
    key = ("S_log", repr(branch))
    if key not in nodes._cache:
        L = np.zeros((M, M), dtype=complex)
        for m in range(M):
            L[m] = branch.log_values(nodes, g[m], SideClass.ON_CURVE, m)
        nodes._cache[key] = L
    L = nodes._cache[key]
    dz = g[None, :] - g[:, None]
    resid = density.psi[None, :] - eval_PN_pairwise(psi_table, dz)
    idx = np.arange(M)
    resid[idx, idx] = 0.0
    vals = (L * resid * nodes.dgamma[0][None, :]) @ nodes.weights / TWO_PI_I
    return np.imag(vals)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def gradient_potentials(nodes, density, phi_table, psi_table, target,
                        policy=None):
    """(grad D, grad S) at an off-curve target as two real 2-vectors.

    grad D = (-Re C'phi, Im C'phi); grad S = -(Im C psi, Re C psi).
    """
    if target.side is SideClass.ON_CURVE:
        raise ValueError("gradients are defined off the contour")
    phi = np.asarray(density.samples, dtype=complex)
    cp = cauchy_eval(nodes, phi, phi_table, target, deriv=1)
    grad_d = np.array([-cp.real, cp.imag])
    cpsi = cauchy_eval(nodes, density.psi, psi_table, target)
    grad_s = np.array([-cpsi.imag, -cpsi.real])
    return grad_d, grad_s
