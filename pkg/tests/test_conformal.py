import csv
import json

import numpy as np
import pytest

from cauchyreg import contour as ct
from cauchyreg.conformal import (
    build_exterior_map,
    build_interior_map,
    eval_exterior_map,
    eval_interior_map,
    eval_map,
    export_mapped_grid,
    map_points,
)
from cauchyreg.errors import GeometryError
from cauchyreg.numerics import build_node_table


@pytest.fixture(scope="module")
def jelly_maps(jellyfish_nodes):
    return (build_interior_map(jellyfish_nodes),
            build_exterior_map(jellyfish_nodes))


def test_circle_maps_are_identity(circle_nodes):
    mi = build_interior_map(circle_nodes)
    me = build_exterior_map(circle_nodes)
    for z in [0.3 + 0.2j, -0.5j, 0.9 + 0j]:
        assert abs(eval_interior_map(mi, z) - z) < 1e-12
    for z in [1.5 - 0.5j, 3.0 + 2.0j]:
        assert abs(eval_exterior_map(me, z) - z) < 1e-12
    assert abs(me.capacity - 1.0) < 1e-12
    # on-curve points route through the one-sided boundary limits
    zc = complex(circle_nodes.gamma[17])
    assert abs(eval_interior_map(mi, zc) - zc) < 1e-12
    assert abs(eval_exterior_map(me, zc) - zc) < 1e-12


def test_ellipse_capacity():
    nodes = build_node_table(ct.ellipse(2.0, 1.0), 256, n_derivs=6)
    me = build_exterior_map(nodes)
    assert abs(me.capacity - 1.5) < 1e-9


def test_interior_normalization(jelly_maps):
    mi, _ = jelly_maps
    # f(0) = 0 and f'(0) real positive
    assert abs(eval_interior_map(mi, 0j)) < 1e-13
    h = 1e-6
    fp = (eval_interior_map(mi, h) - eval_interior_map(mi, -h)) / (2 * h)
    assert abs(fp.imag) < 1e-6
    assert fp.real > 0


def test_exterior_normalization(jelly_maps):
    _, me = jelly_maps
    # f(z)/z -> 1/capacity at infinity; averaging over a circle of radius
    # 1e3 cancels the decaying Laurent terms
    R = 1e3 * me.nodes.diameter
    zs = R * np.exp(2j * np.pi * np.arange(16) / 16)
    ratios = np.array([eval_exterior_map(me, z) / z for z in zs])
    lim = ratios.mean()
    assert abs(lim.imag) < 1e-8
    assert abs(lim.real - 1 / me.capacity) < 1e-8


def test_boundary_modulus_one(jelly_maps):
    mi, me = jelly_maps
    nodes = mi.nodes
    for m in range(0, nodes.size, 40):
        zc = complex(nodes.gamma[m])
        assert abs(abs(eval_interior_map(mi, zc)) - 1) < 1e-7
        assert abs(abs(eval_exterior_map(me, zc)) - 1) < 1e-7


def test_near_curve_agrees_with_boundary(jelly_maps):
    mi, me = jelly_maps
    nodes = mi.nodes
    m = 222
    zc = complex(nodes.gamma[m])
    zi = zc - 1e-7 * nodes.normals[m]
    ze = zc + 1e-7 * nodes.normals[m]
    assert abs(eval_interior_map(mi, zi) - eval_interior_map(mi, zc)) < 1e-5
    assert abs(eval_exterior_map(me, ze) - eval_exterior_map(me, zc)) < 1e-5


def test_wrong_side_rejected(jelly_maps):
    mi, me = jelly_maps
    with pytest.raises(GeometryError):
        eval_interior_map(mi, 5.0 + 0j)
    with pytest.raises(GeometryError):
        eval_exterior_map(me, 0.05 + 0.05j)
    with pytest.raises(ValueError):
        eval_interior_map(me, 0.05 + 0.05j)
    with pytest.raises(ValueError):
        eval_exterior_map(mi, 5.0 + 0j)


def test_map_is_injective_on_sample_grid(jelly_maps):
    mi, _ = jelly_maps
    pts = np.array([r * np.exp(2j * np.pi * k / 24) * 0.4
                    for r in (0.3, 0.6, 0.9) for k in range(24)])
    vals = map_points(mi, pts)
    rounded = {(round(v.real, 8), round(v.imag, 8)) for v in vals}
    assert len(rounded) == pts.size


def test_map_is_conformal(jelly_maps):
    # angles between mapped coordinate directions stay right angles
    mi, _ = jelly_maps
    z, h = 0.2 + 0.1j, 1e-5
    fx = (eval_interior_map(mi, z + h) - eval_interior_map(mi, z - h)) / (2 * h)
    fy = (eval_interior_map(mi, z + 1j * h)
          - eval_interior_map(mi, z - 1j * h)) / (2 * h)
    angle = np.angle(fy / fx)
    assert abs(abs(angle) - np.pi / 2) < 1e-3


def test_export_mapped_grid(tmp_path, circle_nodes):
    me = build_exterior_map(circle_nodes)
    out_csv, out_json = export_mapped_grid(me, tmp_path / "grid" / "map.csv",
                                           n_radial=3, n_angular=8)
    with open(out_csv) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "re_f", "im_f"]
    assert len(rows) == 1 + 3 * 8
    meta = json.loads(out_json.read_text())
    assert meta["direction"] == "exterior"
    assert abs(meta["capacity"] - 1.0) < 1e-10
    # identity map: output equals input
    x, y, rf, mf = map(float, rows[1])
    assert abs(complex(x, y) - complex(rf, mf)) < 1e-10


def test_eval_map_dispatch(circle_nodes):
    mi = build_interior_map(circle_nodes)
    assert eval_map(mi, 0.2 + 0.1j) == eval_interior_map(mi, 0.2 + 0.1j)
