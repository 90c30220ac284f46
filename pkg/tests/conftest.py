import warnings

import numpy as np
import pytest

from cauchyreg import contour as ct
from cauchyreg.numerics import build_node_table


@pytest.fixture(autouse=True)
def _quiet_order_warnings():
    # low interpolation orders warn about the reduced-margin regime; the
    # tests exercise those orders deliberately
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture(scope="session")
def circle_nodes():
    return build_node_table(ct.circle(), 256, n_derivs=6)


@pytest.fixture(scope="session")
def jellyfish_nodes():
    return build_node_table(ct.jellyfish(), 800, n_derivs=6)


@pytest.fixture(scope="session")
def koch_nodes():
    contour = ct.subdivide_patches(ct.build_koch_polygon(3), 3)
    return build_node_table(contour, 8, n_derivs=6)


def manufactured_traces(nodes):
    """u = e^x sin y, harmonic; (u, du/dnu) at the nodes."""
    g = nodes.gamma
    u = np.exp(g.real) * np.sin(g.imag)
    ux = np.exp(g.real) * np.sin(g.imag)
    uy = np.exp(g.real) * np.cos(g.imag)
    v = nodes.normals.real * ux + nodes.normals.imag * uy
    return u, v
