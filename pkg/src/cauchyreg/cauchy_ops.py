"""Raw and regularized evaluation of the Cauchy operator, its derivatives,
and the principal-value Hilbert transform."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np

from .contour import SideClass, classify_point, nearest_node
from .errors import OrderError
from .interpolant import eval_PN
from .numerics import DensityField

TWO_PI_I = 2j * np.pi


@dataclass
class EvalPolicy:
    """Controls interpolation order and the near-boundary switch."""

    order: int = 3
    distance_factor: float = 5.0  # the "5h" rule
    force_regularize: bool | None = None

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.distance_factor <= 0:
            raise ValueError("distance_factor must be positive")


@dataclass
class TargetPoint:
    z: complex
    side: SideClass
    nearest_index: int
    delta: float
    regularize: bool


def make_target(z, nodes, policy=None):
    """Classify z, find its nearest node, and decide the 5h switch."""
    policy = policy or EvalPolicy()
    side, idx = classify_point(z, nodes)
    if side is SideClass.ON_CURVE:
        idx, delta = nearest_node(z, nodes)
        return TargetPoint(complex(z), side, idx, delta, True)
    idx, delta = nearest_node(z, nodes)
    if policy.force_regularize is not None:
        reg = policy.force_regularize
    else:
        reg = delta < policy.distance_factor * nodes.spacing[idx]
    return TargetPoint(complex(z), side, idx, delta, reg)


def _samples(density):
    return density.samples if isinstance(density, DensityField) else (
        np.asarray(density, dtype=complex)
    )


def cauchy_raw(nodes, density, z, deriv=0):
    """Direct quadrature of n!/(2 pi i) * int phi(zeta)/(zeta-z)^{n+1} dzeta."""
    phi = _samples(density)
    z = np.asarray(z, dtype=complex)
    diff = nodes.gamma[..., None] - z.ravel()[None, :]
    if np.any(np.abs(diff) == 0.0):
        raise ZeroDivisionError("target coincides with a quadrature node")
    w = nodes.weights * nodes.dgamma[0] * phi
    vals = (w[:, None] / diff ** (deriv + 1)).sum(axis=0)
    vals *= factorial(deriv) / TWO_PI_I
    return vals.reshape(z.shape) if z.shape else complex(vals[0])


def cauchy_regularized(nodes, density, table, target, deriv=0):
    """Density-interpolation evaluation of the Cauchy operator near the contour.

    Quadrature of n!/(2 pi i) * int (phi - P_N(., z0))/(zeta-z)^{n+1} dzeta
    plus, for interior targets, the n-th derivative of P_N at z.
    """
    n = deriv
    if target.side is SideClass.ON_CURVE:
        if n > 0:
            raise OrderError("on-curve derivatives are not supported")
        return hilbert_regularized(nodes, density, table, target.nearest_index)
    N = table.order
    if n > 0 and n >= N:
        raise OrderError(f"derivative order {n} requires N > n (got N={N})")
    if N < n + 2:
        warnings.warn(
            f"interpolation order N={N} leaves no bounded-derivative margin "
            f"for deriv={n}; expect reduced accuracy", stacklevel=2)
    phi = _samples(density)
    m0 = target.nearest_index
    z = target.z
    resid = phi - eval_PN(table, m0, nodes.gamma)
    diff = nodes.gamma - z
    val = np.sum(nodes.weights * nodes.dgamma[0] * resid / diff ** (n + 1))
    val *= factorial(n) / TWO_PI_I
    if target.side is SideClass.INTERIOR:
        val += eval_PN(table, m0, z, deriv=n)
    return complex(val)


def cauchy_eval(nodes, density, table, target, deriv=0):
    """Raw or regularized evaluation according to the target's 5h flag."""
    if target.regularize or target.side is SideClass.ON_CURVE:
        return cauchy_regularized(nodes, density, table, target, deriv)
    return cauchy_raw(nodes, density, target.z, deriv)


def hilbert_regularized(nodes, density, table, node_index):
    """Principal-value Hilbert transform at a node.

    (1/pi i) int (phi - P_N(., z_m))/(zeta - z_m) dzeta + phi(z_m); the
    diagonal quadrature entry is the L'Hospital limit for N = 0 and zero
    for N >= 1.
    """
    phi = _samples(density)
    m = node_index
    resid = phi - eval_PN(table, m, nodes.gamma)
    diff = nodes.gamma - nodes.gamma[m]
    integrand = np.empty(nodes.size, dtype=complex)
    mask = np.arange(nodes.size) != m
    integrand[mask] = resid[mask] * nodes.dgamma[0][mask] / diff[mask]
    if table.order == 0:
        # limit of (phi(tau)-phi(t_m)) gamma'(tau) / (gamma(tau)-gamma(t_m))
        integrand[m] = nodes.diff(phi)[m]
    else:
        integrand[m] = 0.0
    val = np.sum(nodes.weights * integrand) / (1j * np.pi)
    return complex(val + phi[m])


def cauchy_boundary_limit(nodes, density, table, node_index, side):
    """One-sided limit of the Cauchy operator on the contour (Plemelj)."""
    h = hilbert_regularized(nodes, density, table, node_index)
    phi = _samples(density)[node_index]
    if side is SideClass.INTERIOR:
        return (h + phi) / 2
    return (h - phi) / 2
