"""Spectral building blocks: quadrature rules, differentiation, GMRES.

The NodeTable is the discrete contour: nodes, weights, curve samples,
spectrally computed parametric derivatives, and unit normals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from . import contour as ct
from .errors import DegenerateParametrizationError, NonConvergenceError

MAX_DIFF_ORDER = 8  # repeated spectral differentiation amplifies roundoff


def trapezoid_nodes(M):
    """Uniform nodes t_m = 2*pi*(m-1)/M and weights 2*pi/M."""
    if M < 2:
        raise ValueError("trapezoid rule needs M >= 2")
    t = 2 * np.pi * np.arange(M) / M
    w = np.full(M, 2 * np.pi / M)
    return t, w


def fejer_rule(M):
    """Fejer (first) rule on [-1, 1]: Chebyshev-zero nodes, positive weights.

    Weights are the cosine series evaluated with an O(M log M) DCT.
    Nodes are returned in the natural Chebyshev ordering (decreasing).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    theta = (2 * np.arange(1, M + 1) - 1) * np.pi / (2 * M)
    t = np.cos(theta)
    x = np.zeros(M)
    x[0] = 1.0
    ell = np.arange(1, (M - 1) // 2 + 1)
    if ell.size:
        x[2 * ell] = -1.0 / (4 * ell**2 - 1)
    w = (2.0 / M) * dct(x, type=3)
    return t, w


def fft_diff_periodic(values):
    """Spectral derivative of samples at uniform nodes of a 2*pi-periodic function."""
    v = np.asarray(values, dtype=complex)
    m = v.size
    if m < 2:
        raise ValueError("need at least 2 samples")
    k = np.fft.fftfreq(m, d=1.0 / m)
    mult = 1j * k
    if m % 2 == 0:
        mult[m // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(v))


def _dct_c(x, kind):
    if np.iscomplexobj(x):
        return dct(x.real, type=kind) + 1j * dct(x.imag, type=kind)
    return dct(x, type=kind)


def cheb_diff(values):
    """Derivative of the Chebyshev interpolant through samples at Fejer nodes.

    ``values`` are ordered as the nodes of :func:`fejer_rule` (t decreasing).
    """
    v = np.asarray(values, dtype=complex)
    M = v.size
    if M == 1:
        return np.zeros(1, dtype=complex)
    a = _dct_c(v, 2) / M
    a[0] /= 2
    b = np.zeros(M, dtype=complex)
    for k in range(M - 1, 0, -1):
        b[k - 1] = (b[k + 1] if k + 1 < M else 0.0) + 2 * k * a[k]
    b[0] /= 2
    x = b / 2
    x[0] = b[0]
    return _dct_c(x, 3)


@dataclass
class NodeTable:
    """Discrete contour: quadrature data plus spectral derivative columns.

    ``dgamma[n-1]`` holds gamma^(n) at the nodes in the rule's parameter
    (global t for the trapezoid rule, per-patch coordinate for Fejer).
    """

    rule: str
    contour: object
    t: np.ndarray
    weights: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    normals: np.ndarray
    spacing: np.ndarray
    patch_index: np.ndarray | None = None
    patch_m: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self):
        return self.gamma.size

    @property
    def diameter(self):
        if "diameter" not in self._cache:
            g = self.gamma
            self._cache["diameter"] = float(
                np.hypot(np.ptp(g.real), np.ptp(g.imag))
            )
        return self._cache["diameter"]

    def diff(self, values):
        """Rule-appropriate spectral differentiation of node samples."""
        v = np.asarray(values, dtype=complex)
        if self.rule == "trapezoid":
            return fft_diff_periodic(v)
        m = self.patch_m
        out = np.empty_like(v)
        for p in range(v.size // m):
            out[p * m:(p + 1) * m] = cheb_diff(v[p * m:(p + 1) * m])
        return out


def _spacing_cyclic(gamma):
    d = np.abs(np.diff(gamma, append=gamma[:1]))
    return (d + np.roll(d, 1)) / 2


def _spacing_blocks(gamma, m):
    out = np.empty(gamma.size)
    for p in range(gamma.size // m):
        g = gamma[p * m:(p + 1) * m]
        if m == 1:
            out[p] = np.inf
            continue
        d = np.abs(np.diff(g))
        h = np.empty(m)
        h[0], h[-1] = d[0], d[-1]
        h[1:-1] = (d[:-1] + d[1:]) / 2
        out[p * m:(p + 1) * m] = h
    return out


def build_node_table(cont, M, n_derivs=4):
    """Discretize a contour.

    Globally parametrized contours use the trapezoidal rule with M nodes;
    patch collections use the Fejer rule with M nodes per patch.
    """
    n_derivs = min(max(n_derivs, 2), MAX_DIFF_ORDER)
    if isinstance(cont, ct.PatchCollection):
        t1, w1 = fejer_rule(M)
        P = len(cont.patches)
        t = np.tile(t1, P)
        w = np.tile(w1, P)
        gamma = np.concatenate([p.point(t1) for p in cont.patches])
        patch_index = np.repeat(np.arange(P), M)
        table = NodeTable("fejer", cont, t, w, gamma, None, None,
                          _spacing_blocks(gamma, M), patch_index, M)
    else:
        t, w = trapezoid_nodes(M)
        gamma = cont.point(t)
        table = NodeTable("trapezoid", cont, t, w, gamma, None, None,
                          _spacing_cyclic(gamma))
    cols = [table.diff(gamma)]
    for _ in range(1, n_derivs):
        cols.append(table.diff(cols[-1]))
    table.dgamma = np.asarray(cols)
    g1 = table.dgamma[0]
    if np.any(np.abs(g1) < 1e-14 * max(table.diameter, 1.0)):
        raise DegenerateParametrizationError("gamma'(t) ~ 0 at a node")
    table.normals = -1j * g1 / np.abs(g1)
    return table


@dataclass
class DensityField:
    """Complex density samples at the nodes plus spectral parametric derivatives."""

    samples: np.ndarray
    derivs: np.ndarray  # shape (n, M): orders 1..n


def density_field(nodes, samples, n_derivs=2):
    v = np.asarray(samples, dtype=complex)
    if v.size != nodes.size:
        raise ValueError("sample count does not match node count")
    cols = []
    cur = v
    for _ in range(min(n_derivs, MAX_DIFF_ORDER)):
        cur = nodes.diff(cur)
        cols.append(cur)
    return DensityField(v, np.asarray(cols))


@dataclass
class GmresResult:
    x: np.ndarray
    residuals: list
    niter: int


def gmres(matvec, rhs, tol=1e-12, max_iter=400):
    """Dense complex GMRES without restart, modified Gram-Schmidt.

    ``matvec`` may be a callable or a 2-D array.  Returns the solution once
    ||A x - b|| / ||b|| <= tol; raises NonConvergenceError otherwise, with
    the residual history attached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(rhs, dtype=complex)
    if not callable(matvec):
        mat = np.asarray(matvec)
        matvec = lambda v: mat @ v  # noqa: E731
    n = b.size
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return GmresResult(np.zeros(n, dtype=complex), [0.0], 0)
    max_iter = min(max_iter, n)
    V = np.zeros((max_iter + 1, n), dtype=complex)
    H = np.zeros((max_iter + 1, max_iter), dtype=complex)
    cs = np.zeros(max_iter, dtype=complex)
    sn = np.zeros(max_iter, dtype=complex)
    g = np.zeros(max_iter + 1, dtype=complex)
    V[0] = b / bnorm
    g[0] = bnorm
    residuals = [1.0]
    for j in range(max_iter):
        w = np.asarray(matvec(V[j]), dtype=complex)
        for i in range(j + 1):
            H[i, j] = np.vdot(V[i], w)
            w -= H[i, j] * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] > 0:
            V[j + 1] = w / H[j + 1, j]
        for i in range(j):  # apply stored Givens rotations
            tmp = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -np.conj(sn[i]) * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = tmp
        denom = np.hypot(abs(H[j, j]), abs(H[j + 1, j]))
        if denom == 0.0:
            cs[j], sn[j] = 1.0, 0.0
        else:
            cs[j] = abs(H[j, j]) / denom
            ph = H[j, j] / abs(H[j, j]) if H[j, j] != 0 else 1.0
            sn[j] = ph * np.conj(H[j + 1, j]) / denom
        H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
        H[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        res = abs(g[j + 1]) / bnorm
        residuals.append(min(res, residuals[-1]))
        if res <= tol:
            y = np.linalg.solve(H[: j + 1, : j + 1], g[: j + 1])
            x = V[: j + 1].T @ y
            return GmresResult(x, residuals, j + 1)
    raise NonConvergenceError(
        f"GMRES did not reach tol={tol} in {max_iter} iterations "
        f"(last residual {residuals[-1]:.3e})",
        residuals,
    )
