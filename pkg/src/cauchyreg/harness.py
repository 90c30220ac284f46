"""Experiment drivers and file I/O behind the command-line interface.

All drivers are deterministic: the same configuration produces byte-identical
CSV output.  CSV carries the data; a JSON sidecar carries run metadata.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import contour as ct
from . import presets
from .cauchy_ops import EvalPolicy, cauchy_eval, cauchy_raw, make_target
from .contour import SideClass
from .errors import ConfigError
from .interpolant import build_interpolant_table
from .numerics import build_node_table
from .solver import BieProblem, solve_robin_hyper, solve_robin_single

_KNOWN_KEYS = {
    "preset", "contour", "M", "patch_M", "orders", "order", "delta",
    "n_targets", "targets", "density", "poles", "grid", "M_list",
    "equation", "direction", "tol", "regularize", "out",
}


@dataclass
class ExperimentConfig:
    raw: dict = dc_field(default_factory=dict)

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def __contains__(self, key):
        return key in self.raw


def load_config(source):
    """Load and schema-check a config from a path, JSON string, or dict."""
    if isinstance(source, (str, Path)) and Path(str(source)).exists():
        with open(source) as fh:
            data = json.load(fh)
    elif isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is neither a file nor JSON: {exc}")
    elif isinstance(source, dict):
        data = source
    else:
        raise ConfigError(f"unsupported config source {type(source)}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("M", "patch_M"):
        if key in data and (not isinstance(data[key], int) or data[key] < 1):
            raise ConfigError(f"{key} must be a positive integer")
    if "orders" in data:
        if (not isinstance(data["orders"], list)
                or not all(isinstance(n, int) and n >= 0
                           for n in data["orders"])):
            raise ConfigError("orders must be a list of integers >= 0")
    if "order" in data and (not isinstance(data["order"], int)
                            or data["order"] < 0):
        raise ConfigError("order must be an integer >= 0")
    if "preset" in data and data["preset"] not in ("jellyfish", "snowflake"):
        raise ConfigError("preset must be 'jellyfish' or 'snowflake'")
    if "equation" in data and data["equation"] not in ("single", "hyper"):
        raise ConfigError("equation must be 'single' or 'hyper'")
    if "direction" in data and data["direction"] not in (
            "interior", "exterior"):
        raise ConfigError("direction must be 'interior' or 'exterior'")
    return ExperimentConfig(data)


def build_contour(spec):
    """Contour factory from a config fragment."""
    if spec is None:
        spec = {"kind": "jellyfish"}
    kind = spec.get("kind")
    if kind == "circle":
        center = spec.get("center", [0.0, 0.0])
        return ct.circle(float(spec.get("radius", 1.0)),
                         complex(center[0], center[1]))
    if kind == "ellipse":
        return ct.ellipse(float(spec.get("a", 2.0)), float(spec.get("b", 1.0)))
    if kind == "jellyfish":
        return ct.jellyfish()
    if kind == "koch":
        return ct.subdivide_patches(
            ct.build_koch_polygon(int(spec.get("level", 3))),
            int(spec.get("subdivide", 1)))
    if kind == "spline":
        pts = spec.get("control_points")
        if pts is None and "file" in spec:
            pts = [row for row in csv.reader(open(spec["file"]))]
        if pts is None:
            raise ConfigError("spline contour needs control_points or file")
        return ct.PeriodicSpline([complex(float(p[0]), float(p[1]))
                                  for p in pts])
    raise ConfigError(f"unknown contour kind {kind!r}")


def _parse_poles(cfg):
    poles = cfg.get("poles")
    if poles is None:
        return None
    try:
        return np.array([complex(p[0], p[1]) for p in poles])
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"poles must be [x, y] pairs: {exc}")


def check_poles_outside(nodes, poles):
    """Reject any pole inside the contour (winding-number test)."""
    for p in poles:
        side, _ = ct.classify_point(complex(p), nodes)
        if side is not SideClass.EXTERIOR:
            raise ConfigError(f"pole {p} is not strictly outside the contour")


def _table1_preset(cfg):
    name = cfg.get("preset")
    if name is None:
        raise ConfigError("the reference error study requires a preset "
                          "('jellyfish' or 'snowflake')")
    delta = float(cfg.get("delta", 1e-4))
    if name == "jellyfish":
        pre = presets.jellyfish_table1(M=cfg.get("M", 800), delta=delta)
    else:
        pre = presets.snowflake_table1(M=cfg.get("patch_M", 8), delta=delta)
    poles = _parse_poles(cfg)
    if poles is not None:
        check_poles_outside(pre.nodes, poles)
        pre.poles = poles
        pre.density = presets.meromorphic(poles)
    return pre


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        wr.writerows(rows)
    return path


def _write_meta(path, meta):
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, default=str)
    return path


def run_table1_study(cfg, out_dir=None):
    """Near-boundary max relative errors E0, E1, E2 versus interpolation order.

    Rows: 'none' (no regularization) followed by N = 0..4 (configurable via
    'orders').  100 targets at distance delta inside the contour.
    """
    pre = _table1_preset(cfg)
    nodes, targets = pre.nodes, pre.targets
    orders = cfg.get("orders", [0, 1, 2, 3, 4])
    phi = pre.density(nodes.gamma)
    refs = {n: pre.density(targets, n) for n in range(3)}
    scale = {n: np.max(np.abs(refs[n])) for n in range(3)}

    def errs_for(vals, n):
        return float(np.max(np.abs(vals - refs[n])) / scale[n])

    rows = []
    raw = {n: np.array([cauchy_raw(nodes, phi, z, n) for z in targets])
           for n in range(3)}
    rows.append(["none"] + [f"{errs_for(raw[n], n):.6e}" for n in range(3)])
    policy = EvalPolicy(force_regularize=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for N in orders:
            table = build_interpolant_table(nodes, phi, N)
            row = [str(N)]
            for n in range(3):
                if n > 0 and n >= N:
                    row.append("")
                    continue
                vals = np.array([
                    cauchy_eval(nodes, phi, table,
                                make_target(z, nodes, policy), n)
                    for z in targets])
                row.append(f"{errs_for(vals, n):.6e}")
            rows.append(row)
    result = {"preset": pre.name, "delta": pre.delta, "rows": rows}
    if out_dir is not None:
        out = Path(out_dir)
        result["csv"] = str(_write_csv(out / "table1.csv",
                                       ["N", "E0", "E1", "E2"], rows))
        result["meta"] = str(_write_meta(out / "table1.json", {
            "preset": pre.name, "M": int(nodes.size), "delta": pre.delta,
            "poles": [[p.real, p.imag] for p in pre.poles],
            "orders": orders,
        }))
    return result


def run_errormap(cfg, out_dir=None):
    """log10 absolute Cauchy-operator error on an interior cartesian grid."""
    contour = build_contour(cfg.get("contour"))
    M = cfg.get("M", 400)
    N = cfg.get("order", 3)
    nodes = build_node_table(contour, M, n_derivs=max(4, N))
    poles = _parse_poles(cfg)
    if poles is None:
        poles = (presets.jellyfish_poles()
                 if getattr(contour, "name", "") == "jellyfish"
                 else 1.1 * nodes.diameter * np.exp(2j))
        poles = np.atleast_1d(poles)
    check_poles_outside(nodes, poles)
    density = presets.meromorphic(poles)
    phi = density(nodes.gamma)
    grid = cfg.get("grid", {})
    nx, ny = int(grid.get("nx", 60)), int(grid.get("ny", 60))
    g = nodes.gamma
    pad = 0.02 * nodes.diameter
    xs = np.linspace(g.real.min() + pad, g.real.max() - pad, nx)
    ys = np.linspace(g.imag.min() + pad, g.imag.max() - pad, ny)
    regularize = bool(cfg.get("regularize", True))
    policy = EvalPolicy(order=N,
                        force_regularize=None if regularize else False)
    table = build_interpolant_table(nodes, phi, N)
    rows, errors = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for y in ys:
            for x in xs:
                z = complex(x, y)
                try:
                    target = make_target(z, nodes, policy)
                except Exception:
                    continue
                if target.side is not SideClass.INTERIOR:
                    continue
                val = cauchy_eval(nodes, phi, table, target)
                err = abs(val - density(np.array(z)))
                errors.append(err)
                rows.append([f"{x:.12e}", f"{y:.12e}",
                             f"{np.log10(max(err, 1e-300)):.6f}"])
    result = {"max_error": float(max(errors)), "count": len(errors)}
    if out_dir is not None:
        out = Path(out_dir)
        name = "errormap.csv" if regularize else "errormap_raw.csv"
        result["csv"] = str(_write_csv(out / name,
                                       ["x", "y", "log10_abs_error"], rows))
        result["meta"] = str(_write_meta(out / (Path(name).stem + ".json"), {
            "M": M, "N": N, "regularize": regularize,
            "max_error": result["max_error"],
            "poles": [[p.real, p.imag] for p in np.atleast_1d(poles)],
        }))
    return result


def _manufactured_traces(nodes):
    """u = e^x sin y and its exterior-normal derivative at the nodes."""
    g = nodes.gamma
    u = np.exp(g.real) * np.sin(g.imag)
    ux = np.exp(g.real) * np.sin(g.imag)
    uy = np.exp(g.real) * np.cos(g.imag)
    v = nodes.normals.real * ux + nodes.normals.imag * uy
    return u, v


def run_convergence(cfg, out_dir=None):
    """Robin-equation trace error versus M, with fitted log-log slopes."""
    contour = build_contour(cfg.get("contour"))
    equation = cfg.get("equation", "single")
    M_list = cfg.get("M_list", [100, 200, 400, 800])
    orders = cfg.get("orders", [0, 1, 2, 3] if equation == "single"
                     else [1, 2, 3])
    tol = float(cfg.get("tol", 1e-12))
    solve = solve_robin_single if equation == "single" else solve_robin_hyper
    eq_name = "robin_single" if equation == "single" else "robin_hyper"
    rows, slopes = [], {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for N in orders:
            errs = []
            for M in M_list:
                nodes = build_node_table(contour, M, n_derivs=max(4, N))
                u, v = _manufactured_traces(nodes)
                sol = solve(BieProblem(nodes, eq_name, v + u, order=N,
                                       tol=tol))
                exact = v if equation == "single" else u
                err = float(np.max(np.abs(sol.values - exact))
                            / np.max(np.abs(exact)))
                errs.append(err)
                rows.append([str(N), str(M), f"{err:.6e}"])
            slopes[N] = fitted_slope(M_list, errs)
    result = {"equation": equation, "M_list": M_list, "slopes": slopes,
              "rows": rows}
    if out_dir is not None:
        out = Path(out_dir)
        result["csv"] = str(_write_csv(out / f"convergence_{equation}.csv",
                                       ["N", "M", "rel_error"], rows))
        result["meta"] = str(_write_meta(
            out / f"convergence_{equation}.json",
            {"equation": equation, "orders": orders, "M_list": M_list,
             "slopes": {str(k): v for k, v in slopes.items()}}))
    return result


def fitted_slope(M_list, errors, floor=1e-13):
    """Least-squares log-log slope over the resolved regime.

    Leading entries are dropped while doing so keeps at least two points and
    the remaining fit changes by more than 0.25 (preasymptotic transients);
    trailing entries at the roundoff floor are dropped first.
    """
    m = np.asarray(M_list, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > floor
    if keep.sum() >= 2:
        m, e = m[keep], e[keep]

    def fit(lo):
        return float(np.polyfit(np.log(m[lo:]), np.log(e[lo:]), 1)[0])

    lo = 0
    slope = fit(0)
    while m.size - lo > 2 and abs(fit(lo + 1) - slope) > 0.25:
        lo += 1
        slope = fit(lo)
    return slope


def run_eval(cfg, out_dir=None):
    """Evaluate the Cauchy operator at explicit targets; one CSV row each."""
    contour = build_contour(cfg.get("contour"))
    M = cfg.get("M", 256)
    N = cfg.get("order", 3)
    nodes = build_node_table(contour, M, n_derivs=max(4, N))
    targets = cfg.get("targets")
    if not targets:
        raise ConfigError("eval requires a 'targets' list of [x, y] pairs")
    try:
        zs = [complex(p[0], p[1]) for p in targets]
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"targets must be [x, y] pairs: {exc}")
    dens_spec = cfg.get("density", {"kind": "meromorphic"})
    if dens_spec.get("kind") == "meromorphic":
        poles = _parse_poles(cfg)
        if poles is None:
            raise ConfigError("meromorphic density requires 'poles'")
        check_poles_outside(nodes, poles)
        phi = presets.meromorphic(poles)(nodes.gamma)
    elif dens_spec.get("kind") == "samples":
        vals = dens_spec.get("values")
        if vals is None or len(vals) != nodes.size:
            raise ConfigError("sample density must provide M values")
        phi = np.array([complex(v[0], v[1]) if isinstance(v, list) else
                        complex(v) for v in vals])
    else:
        raise ConfigError("density kind must be 'meromorphic' or 'samples'")
    table = build_interpolant_table(nodes, phi, N)
    policy = EvalPolicy(order=N)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for z in zs:
            t = make_target(z, nodes, policy)
            val = cauchy_eval(nodes, phi, table, t)
            rows.append([f"{z.real:.12e}", f"{z.imag:.12e}", t.side.value,
                         f"{val.real:.16e}", f"{val.imag:.16e}"])
    result = {"rows": rows}
    if out_dir is not None:
        result["csv"] = str(_write_csv(Path(out_dir) / "eval.csv",
                                       ["x", "y", "side", "re", "im"], rows))
    return result


def run_solve_robin(cfg, out_dir=None):
    """Solve a Robin problem with manufactured data; write trace + error."""
    contour = build_contour(cfg.get("contour"))
    equation = cfg.get("equation", "single")
    M = cfg.get("M", 400)
    N = cfg.get("order", 3)
    nodes = build_node_table(contour, M, n_derivs=max(4, N))
    u, v = _manufactured_traces(nodes)
    eq_name = "robin_single" if equation == "single" else "robin_hyper"
    solve = solve_robin_single if equation == "single" else solve_robin_hyper
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve(BieProblem(nodes, eq_name, v + u, order=N,
                               tol=float(cfg.get("tol", 1e-12))))
    exact = v if equation == "single" else u
    err = float(np.max(np.abs(sol.values - exact)) / np.max(np.abs(exact)))
    rows = [[f"{t:.12e}", f"{val:.16e}", f"{ex:.16e}"]
            for t, val, ex in zip(nodes.t, sol.values, exact)]
    result = {"equation": equation, "rel_error": err, "niter": sol.niter}
    if out_dir is not None:
        out = Path(out_dir)
        result["csv"] = str(_write_csv(out / f"robin_{equation}.csv",
                                       ["t", "trace", "exact"], rows))
        result["meta"] = str(_write_meta(out / f"robin_{equation}.json", {
            "equation": equation, "M": M, "N": N, "rel_error": err,
            "niter": sol.niter}))
    return result


def run_conformal(cfg, out_dir=None):
    """Build a conformal map and export the mapped grid."""
    from .conformal import (build_exterior_map, build_interior_map,
                            export_mapped_grid)
    contour = build_contour(cfg.get("contour"))
    direction = cfg.get("direction", "interior")
    M = cfg.get("M", 400)
    N = cfg.get("order", 3)
    nodes = build_node_table(contour, M, n_derivs=max(4, N))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        build = (build_interior_map if direction == "interior"
                 else build_exterior_map)
        cmap = build(nodes, order=N, tol=float(cfg.get("tol", 1e-12)))
        result = {"direction": direction, "capacity": cmap.capacity,
                  "alpha": cmap.alpha, "niter": cmap.niter}
        if out_dir is not None:
            grid = cfg.get("grid", {})
            csv_path, json_path = export_mapped_grid(
                cmap, Path(out_dir) / f"conformal_{direction}.csv",
                n_radial=int(grid.get("nx", 12)),
                n_angular=int(grid.get("ny", 64)))
            result["csv"] = str(csv_path)
            result["meta"] = str(json_path)
    return result
