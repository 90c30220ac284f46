"""Taylor-like density interpolants centered at the contour nodes.

The coefficient table is produced by repeated spectral differentiation and
element-wise division by gamma'; a Bell-polynomial triangular solve is kept
as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import DegenerateParametrizationError, OrderError
from .numerics import MAX_DIFF_ORDER, DensityField, density_field


@dataclass
class InterpolantTable:
    """Row m holds coefficients c_0..c_N of the interpolant centered at node m."""

    coeffs: np.ndarray  # shape (M, N+1)
    order: int
    nodes: object
    samples: np.ndarray

    def __post_init__(self):
        # inverse factorials used by every evaluation
        self._ifac = 1.0 / np.array(
            [factorial(j) for j in range(self.order + 1)]
        )


def build_interpolant_table(nodes, density, N):
    """Coefficient rows c_j(gamma(t_m)) for all nodes at once.

    Column 0 is the density itself; column j+1 is the spectral derivative of
    column j divided element-wise by gamma'.
    """
    if N < 0:
        raise ValueError("interpolation order must be >= 0")
    if N > MAX_DIFF_ORDER:
        raise OrderError(f"interpolation order capped at {MAX_DIFF_ORDER}")
    samples = density.samples if isinstance(density, DensityField) else (
        np.asarray(density, dtype=complex)
    )
    if samples.size != nodes.size:
        raise ValueError("density sampled on a different grid")
    gp = nodes.dgamma[0]
    if np.any(np.abs(gp) == 0.0):
        raise DegenerateParametrizationError("gamma' vanishes at a node")
    B = np.empty((nodes.size, N + 1), dtype=complex)
    B[:, 0] = samples
    for j in range(N):
        B[:, j + 1] = nodes.diff(B[:, j]) / gp
    return InterpolantTable(B, N, nodes, samples)


def bell_polynomials(x, N):
    """Incomplete Bell polynomials B[m, j](x_1, ..., x_{m-j+1}) for m, j <= N."""
    B = np.zeros((N + 1, N + 1), dtype=complex)
    B[0, 0] = 1.0
    for m in range(1, N + 1):
        for j in range(1, m + 1):
            acc = 0.0 + 0j
            for i in range(1, m - j + 2):
                acc += comb(m - 1, i - 1) * x[i - 1] * B[m - i, j - 1]
            B[m, j] = acc
    return B


def build_interpolant_bell(nodes, density, N, node_index):
    """Coefficient row at one node via the triangular Bell system (oracle).

    Solves the lower-triangular system whose entries are incomplete Bell
    polynomials in the parametric derivatives of gamma, by forward
    substitution.  Intended for cross-validation at small N.
    """
    if N > 6:
        raise OrderError("Bell-system oracle supports N <= 6")
    if isinstance(density, DensityField):
        if density.derivs.shape[0] < N:
            density = density_field(nodes, density.samples, n_derivs=max(N, 1))
    else:
        density = density_field(nodes, density, n_derivs=max(N, 1))
    m = node_index
    row = np.zeros(N + 1, dtype=complex)
    row[0] = density.samples[m]
    if N == 0:
        return row
    if nodes.dgamma.shape[0] < N:
        raise ValueError(f"node table stores {nodes.dgamma.shape[0]} "
                         f"gamma-derivatives, need {N}")
    gders = nodes.dgamma[:N, m]  # gamma', ..., gamma^(N)
    if abs(gders[0]) == 0.0:
        raise DegenerateParametrizationError("gamma' vanishes at the node")
    B = bell_polynomials(gders, N)
    b = density.derivs[:N, m]  # phi', ..., phi^(N)
    for k in range(1, N + 1):
        acc = b[k - 1]
        for j in range(1, k):
            acc -= B[k, j] * row[j]
        row[k] = acc / B[k, k]
    return row


def eval_PN(table, node_index, z, deriv=0):
    """Evaluate the interpolant (or its ``deriv``-th z-derivative) at z.

    Horner evaluation of sum_{j=0}^{N-n} c_{j+n}/j! (z - z_m)^j.
    """
    n = deriv
    if n < 0 or n > table.order:
        raise OrderError(f"derivative order {n} outside 0..{table.order}")
    c = table.coeffs[node_index]
    dz = np.asarray(z) - table.nodes.gamma[node_index]
    acc = np.zeros_like(dz, dtype=complex)
    for j in range(table.order - n, -1, -1):
        acc = acc * dz + c[j + n] * table._ifac[j]
    return acc


def eval_PN_pairwise(table, dz, deriv=0):
    """Vectorized interpolant values for a matrix of displacements.

    ``dz[m, k]`` is (z_k - gamma_m); row m uses the interpolant centered at
    node m.  Used by the operator assembly routines.
    """
    n = deriv
    c = table.coeffs
    acc = np.zeros_like(dz, dtype=complex)
    for j in range(table.order - n, -1, -1):
        acc = acc * dz + (c[:, j + n] * table._ifac[j])[:, None]
    return acc


def integrate_PN_segment(table, node_index, z):
    """Straight-line antiderivative from the node to z:
    sum_j c_j/(j+1)! (z - z_m)^{j+1}."""
    c = table.coeffs[node_index]
    dz = np.asarray(z) - table.nodes.gamma[node_index]
    acc = np.zeros_like(dz, dtype=complex)
    for j in range(table.order, -1, -1):
        acc = acc * dz + c[j] * table._ifac[j] / (j + 1)
    return acc * dz
