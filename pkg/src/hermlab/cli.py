"""Command-line front end: geometry selection, reports, checks, spectra, exports.

Verbs
-----
* ``report``          curvature/connection report at requested points (+ extrema,
                      balanced residuals); CSV format exports the per-sample plot
                      table and renders PNG figures alongside it.
* ``check``           run a verification suite (identities | bounds | all).
* ``spectrum``        first-eigenvalue data; CSV exports the mesh.
* ``list-geometries`` print the built-in catalogue.

Exit codes: 0 all-pass, 1 check failure, 2 config error, 3 singular metric,
4 unsupported capability.

JSON output is canonical: keys sorted, floats printed with 17 significant
digits, so identical run configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import plots
from .charts import (
    AnalyticDerivatives,
    Box,
    GeometryCatalogueEntry,
    MetricField,
    catalogue_names,
    load_catalogue,
)
from .curvature import curvature_bundle, curvature_extrema
from .errors import (
    ConfigError,
    HermlabError,
    ResolutionError,
    SingularMetricError,
    UnsupportedGeometryError,
)
from .hodge import balanced_residual
from .spectral import sphere_fs_spectrum, spectrum, torus_spectrum
from .verify import RunSettings, pointwise_profile, run_suite, sample_points

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_UNSUPPORTED = 4


@dataclass
class RunConfig:
    command: str
    geometry: str = ""
    metric_file: str = ""
    points: str = "origin"
    grid: int = 200
    subdivisions: int = 5
    seed: int = 0
    tol: dict = field(default_factory=dict)
    out: str = ""
    format: str = "json"
    suite: str = "all"
    figures: bool = True

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "geometry": self.geometry,
            "metric_file": self.metric_file,
            "points": self.points,
            "grid": self.grid,
            "subdivisions": self.subdivisions,
            "seed": self.seed,
            "tol": {k: self.tol[k] for k in sorted(self.tol)},
            "format": self.format,
            "suite": self.suite,
        }


# -- canonical JSON -----------------------------------------------------------------


def _canon(obj) -> str:
    if isinstance(obj, dict):
        items = ",".join(f"{_canon(str(k))}:{_canon(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return '"%s"' % repr(x)
        return format(x, ".17g")
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if obj is None:
        return "null"
    raise ConfigError(f"cannot serialize {type(obj)!r}")


def dumps_canonical(obj) -> str:
    return _canon(obj) + "\n"


def _real_nested(arr, tol=1e-6) -> list:
    a = np.asarray(arr)
    if np.max(np.abs(a.imag)) > tol * (1.0 + np.max(np.abs(a))):
        raise HermlabError("unexpected imaginary leakage in a real-valued block")
    return np.round(a.real, 14).tolist()


def _complex_nested(arr) -> list:
    a = np.asarray(arr, dtype=complex)
    stacked = np.stack([a.real, a.imag], axis=-1)
    return np.round(stacked, 14).tolist()


# -- metric file loader ----------------------------------------------------------------


def metric_file_loader(path: str) -> MetricField:
    """Load a grid-sampled Hermitian metric from the declarative text format.

    Header: ``herm-metric v1; n=<int>; domain=<x0,x1;y0,y1;...>; grid=<g1,...>``
    followed by whitespace-separated entries: for each grid node in row-major
    order, the upper-triangle metric entries (i <= j) as re/im pairs.

    n = 1 metrics interpolate with bivariate splines (derivatives from spline
    differentiation); higher n uses a regular-grid interpolator with the
    standard finite-difference derivative machinery on top.
    """
    try:
        with open(path) as fh:
            text = fh.read().split()
    except OSError as exc:
        raise ConfigError(f"cannot read metric file {path!r}: {exc}") from exc
    raw = " ".join(text)
    if not raw.startswith("herm-metric v1;"):
        raise ConfigError("metric file must start with 'herm-metric v1;'")
    import re

    m_n = re.search(r"\bn\s*=\s*(\d+)\s*;", raw)
    m_dom = re.search(r"domain\s*=\s*(.*?);\s*grid\s*=", raw)
    m_grid = re.search(r"grid\s*=\s*([0-9,\s]*?);", raw)
    if not (m_n and m_dom and m_grid):
        raise ConfigError("metric file header needs 'n=...; domain=...; grid=...;'")
    try:
        n = int(m_n.group(1))
        pairs = [tuple(float(t) for t in p.split(","))
                 for p in m_dom.group(1).split(";") if p.strip()]
        grid = tuple(int(g) for g in m_grid.group(1).replace(",", " ").split())
        values = np.array([float(t) for t in raw[m_grid.end():].split()])
    except ValueError as exc:
        raise ConfigError(f"malformed metric file header/data: {exc}") from exc
    if len(pairs) != 2 * n or any(len(p) != 2 for p in pairs):
        raise ConfigError(f"domain must list {2 * n} (lo,hi) pairs for n={n}")
    if len(grid) != 2 * n:
        raise ConfigError(f"grid must list {2 * n} counts for n={n}")
    ntri = n * (n + 1) // 2
    expected = int(np.prod(grid)) * ntri * 2
    if values.size != expected:
        raise ConfigError(
            f"metric file holds {values.size} numbers, expected {expected} "
            f"(grid {grid} x {ntri} upper-triangle entries x re/im)"
        )
    comp = values.reshape(grid + (ntri, 2))
    comp = comp[..., 0] + 1j * comp[..., 1]
    axes = [np.linspace(lo, hi, g) for (lo, hi), g in zip(pairs, grid)]

    tri = [(i, j) for i in range(n) for j in range(i, n)]

    def assemble(entries) -> np.ndarray:
        H = np.zeros((n, n), dtype=complex)
        for t, (i, j) in enumerate(tri):
            H[i, j] = entries[t]
            if i != j:
                H[j, i] = np.conj(entries[t])
        return H

    # positive-definiteness spot check on the grid corners and center
    probe_idx = [tuple(0 for _ in grid), tuple(g - 1 for g in grid),
                 tuple(g // 2 for g in grid)]
    for idx in probe_idx:
        Hp = assemble(comp[idx])
        if np.min(np.linalg.eigvalsh(0.5 * (Hp + Hp.conj().T))) <= 0:
            raise SingularMetricError("metric file holds non-positive-definite samples")

    lo = tuple(p[0] for p in pairs)
    hi = tuple(p[1] for p in pairs)
    domain = Box(lo, hi)

    if n == 1:
        from scipy.interpolate import RectBivariateSpline

        kx = min(5, grid[0] - 1)
        ky = min(5, grid[1] - 1)
        spl_re = RectBivariateSpline(axes[0], axes[1], comp[..., 0].real, kx=kx, ky=ky)
        spl_im = RectBivariateSpline(axes[0], axes[1], comp[..., 0].imag, kx=kx, ky=ky)

        def ev(z, dx=0, dy=0):
            x, y = float(z[0].real), float(z[0].imag)
            return complex(spl_re(x, y, dx=dx, dy=dy)[0, 0], spl_im(x, y, dx=dx, dy=dy)[0, 0])

        def h_eval(z):
            return np.array([[ev(z)]])

        def h_d1(z):
            return np.array([[[0.5 * (ev(z, 1, 0) - 1j * ev(z, 0, 1))]]])

        def h_d2(z):
            return np.array([[[[0.25 * (ev(z, 2, 0) + ev(z, 0, 2))]]]])

        analytic = AnalyticDerivatives(d1=h_d1, d2=h_d2)
        return MetricField(1, h_eval, label=f"file:{os.path.basename(path)}",
                           domain=domain, analytic=analytic)

    from scipy.interpolate import RegularGridInterpolator

    method = "quintic" if all(g >= 6 for g in grid) else "cubic" if all(g >= 4 for g in grid) else "linear"
    interps = [
        RegularGridInterpolator(axes, comp[..., t], method=method)
        for t in range(ntri)
    ]

    def h_eval_n(z):
        reals = np.empty(2 * n)
        reals[0::2] = np.real(z)
        reals[1::2] = np.imag(z)
        return assemble([complex(itp(reals)[0]) for itp in interps])

    return MetricField(n, h_eval_n, label=f"file:{os.path.basename(path)}", domain=domain)


# -- argument handling --------------------------------------------------------------------


def parse_points(spec: str, n: int) -> list:
    """Semicolon-separated points, each 'origin' or a comma list of re,im pairs."""
    pts = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if chunk == "origin":
            pts.append(np.zeros(n, dtype=complex))
            continue
        try:
            vals = [float(t) for t in chunk.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse point {chunk!r}: {exc}") from exc
        if len(vals) != 2 * n:
            raise ConfigError(
                f"point {chunk!r} needs {2 * n} real numbers (re,im per coordinate)"
            )
        pts.append(np.array(vals[0::2]) + 1j * np.array(vals[1::2]))
    if not pts:
        raise ConfigError("empty --points specification")
    return pts


def parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        if "=" in item:
            name, _, val = item.partition("=")
            out[name.strip()] = float(val)
        else:
            out[""] = float(item)
    return out


def resolve_geometry(cfg: RunConfig) -> GeometryCatalogueEntry:
    if cfg.metric_file:
        m = metric_file_loader(cfg.metric_file)
        return GeometryCatalogueEntry(
            name=m.label, metric=m,
            is_balanced_expected=None, is_kahler_expected=None,
            sample_box=m.domain,
        )
    if not cfg.geometry:
        raise ConfigError("need --geometry NAME or --metric-file PATH")
    return load_catalogue(cfg.geometry)


def settings_from(cfg: RunConfig) -> RunSettings:
    return RunSettings(seed=cfg.seed, samples=cfg.grid, subdivisions=cfg.subdivisions,
                       tol_overrides=dict(cfg.tol))


def _write(path: str, payload: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _stem(path: str) -> str:
    root, _ = os.path.splitext(path)
    return root


# -- commands ---------------------------------------------------------------------------


def _geometry_block(entry, settings) -> dict:
    pts = sample_points(entry, settings, count=25)
    bres = balanced_residual(entry.metric, pts)
    block = {"name": entry.name, "n": entry.n, "balanced_residual": bres["residual"]}
    if bres["residual"] > 1e-3:
        block["warning"] = "metric is not balanced at the sampled points"
    return block


def cmd_report(cfg: RunConfig) -> int:
    entry = resolve_geometry(cfg)
    settings = settings_from(cfg)
    m = entry.metric
    pts = parse_points(cfg.points, entry.n)
    sample = sample_points(entry, settings, count=min(cfg.grid, 100))
    bres = balanced_residual(m, sample[: 30])

    point_blocks = []
    for z in pts:
        bundle = curvature_bundle(m, z, route="direct")
        from .connections import chern_from_jet, sb_from_jet, torsion
        from .charts import metric_jet

        jet = metric_jet(m, z, order=1)
        cg = chern_from_jet(jet)
        sg = sb_from_jet(jet)
        ct = cg.gamma_hol - np.swapaxes(cg.gamma_hol, 1, 2)
        st = sg.gamma_hol - np.swapaxes(sg.gamma_hol, 1, 2)
        point_blocks.append({
            "point": _complex_nested(z),
            "h": _complex_nested(jet.H),
            "chern_gamma": _complex_nested(cg.gamma_hol),
            "sb_gamma": _complex_nested(sg.gamma_hol),
            "sb_gamma_mixed": _complex_nested(sg.gamma_mixed),
            "chern_torsion_max": float(np.max(np.abs(ct))),
            "sb_torsion_max": float(np.max(np.abs(st))),
            "theta_ric1": _real_nested(bundle.theta_ric1.data),
            "ric_sb1": _real_nested(bundle.ric_sb[0].data),
            "ric_sb2": _real_nested(bundle.ric_sb[1].data),
            "ric_sb3": _real_nested(bundle.ric_sb[2].data),
            "ric_sb4": _real_nested(bundle.ric_sb[3].data),
            "t_circ_tbar": _real_nested(bundle.t_circ_tbar.data),
        })

    ext = curvature_extrema(m, sample[:24], directions=32, seed=cfg.seed)
    geometry_block = {
        "name": entry.name,
        "n": entry.n,
        "balanced_residual": bres["residual"],
        "balanced_residual_trace": bres["trace"],
        "balanced_residual_top_power": bres["top_power"],
    }
    if bres["residual"] > 1e-3:
        geometry_block["warning"] = "metric is not balanced at the sampled points"

    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "geometry": geometry_block,
        "curvature": {
            "points": point_blocks,
            "extrema": {
                "min_hol_ricci": ext.min_hol_ricci,
                "min_hsc": ext.min_hsc,
                "sample_count": ext.sample_count,
                "argmin_ricci_point": _complex_nested(ext.argmin_ricci_point),
                "argmin_ricci_direction": _complex_nested(ext.argmin_ricci_direction),
            },
        },
        "spectrum": None,
        "checks": [],
    }

    if cfg.format == "csv":
        if entry.eigenfunction is None:
            raise UnsupportedGeometryError(
                f"{entry.name} has no eigenfunction; CSV profile export unsupported"
            )
        rows = pointwise_profile(entry, settings)
        _write_profile_csv(cfg.out, rows)
        if cfg.figures and cfg.out:
            plots.sample_profile_figure(rows, _stem(cfg.out) + ".png", entry.name)
        return EXIT_OK
    if cfg.format == "text":
        lines = [f"geometry {entry.name} (n={entry.n})",
                 f"balanced residual: {bres['residual']:.3e}"]
        for blk in point_blocks:
            lines.append(f"point {blk['point']}: ric_sb4 = {blk['ric_sb4']}")
        lines.append(f"min holomorphic Ricci: {ext.min_hol_ricci:.12g}")
        lines.append(f"min HSC: {ext.min_hsc:.12g}")
        _write(cfg.out, "\n".join(lines) + "\n")
        return EXIT_OK
    _write(cfg.out, dumps_canonical(doc))
    return EXIT_OK


def _write_profile_csv(path: str, rows: list) -> None:
    cols = sorted(rows[0].keys())
    coord_cols = [c for c in cols if c.startswith(("re_", "im_"))]
    data_cols = ["grad_norm_sq", "q_composite", "p_ratio", "bochner_residual", "u", "radius"]
    header = coord_cols + data_cols
    out = []
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(format(float(row[c]), ".17g") for c in header))
    payload = "\n".join(out) + "\n"
    _write(path, payload)


def cmd_check(cfg: RunConfig) -> int:
    entry = resolve_geometry(cfg)
    settings = settings_from(cfg)
    reports = run_suite(entry, settings, which=cfg.suite)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        sys.stderr.write(
            f"[{status}] {entry.name} {rep.name} value={rep.value:.6e} tol={rep.tolerance:.1e}\n"
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "geometry": _geometry_block(entry, settings),
        "spectrum": None,
        "curvature": None,
        "checks": [rep.to_dict() for rep in reports],
    }
    if cfg.format == "text":
        lines = [
            f"[{'PASS' if rep.passed else 'FAIL'}] {rep.name} value={rep.value:.6e} "
            f"tol={rep.tolerance:.1e}" for rep in reports
        ]
        _write(cfg.out, "\n".join(lines) + "\n")
    else:
        _write(cfg.out, dumps_canonical(doc))
    if cfg.figures and cfg.out and cfg.format == "json":
        plots.checks_figure(reports, _stem(cfg.out) + ".png", entry.name)
    return EXIT_OK if all(rep.passed for rep in reports) else EXIT_CHECK_FAILED


def cmd_spectrum(cfg: RunConfig) -> int:
    entry = resolve_geometry(cfg)
    if not entry.has_spectrum:
        raise UnsupportedGeometryError(f"no spectral support for {entry.name}")
    if entry.period is not None:
        result = torus_spectrum(entry)
    else:
        result = sphere_fs_spectrum(entry, cfg.subdivisions)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "geometry": _geometry_block(entry, settings_from(cfg)),
        "curvature": None,
        "checks": [],
        "spectrum": {
            "lambda1": result.lambda1,
            "diameter": result.diameter,
            "method": result.method,
            "residual": result.residual,
            "resolution": result.resolution,
            "exact_lambda1": entry.exact_lambda1,
        },
    }
    if cfg.format == "csv":
        if result.mesh is None:
            raise UnsupportedGeometryError("CSV mesh export needs the mesh route")
        _write_mesh_csv(cfg.out, result)
    elif cfg.format == "text":
        s = doc["spectrum"]
        lines = [f"geometry {entry.name}",
                 f"lambda1  {s['lambda1']:.12g} ({s['method']}, residual {s['residual']:.2e})",
                 f"diameter {s['diameter']:.12g}"]
        _write(cfg.out, "\n".join(lines) + "\n")
    else:
        _write(cfg.out, dumps_canonical(doc))
    if cfg.figures and cfg.out:
        plots.spectrum_figure(result, _stem(cfg.out) + ".png", entry.name)
    return EXIT_OK


def _write_mesh_csv(path: str, result) -> None:
    verts = result.mesh["vertices"]
    faces = result.mesh["faces"]
    vec = result.mesh["eigenvector"]
    lines = ["kind,i0,i1,i2,value"]
    for v, w in zip(verts, vec):
        lines.append(
            "vertex," + ",".join(format(float(x), ".17g") for x in v)
            + "," + format(float(w), ".17g")
        )
    for f in faces:
        lines.append("face," + ",".join(str(int(i)) for i in f) + ",0")
    _write(path, "\n".join(lines) + "\n")


def cmd_list_geometries(cfg: RunConfig) -> int:
    lines = ["built-in geometries:"]
    for name in catalogue_names():
        lines.append(f"  {name}")
    lines.append("metric files: --metric-file PATH (header 'herm-metric v1; ...')")
    _write(cfg.out, "\n".join(lines) + "\n")
    return EXIT_OK


# -- entry point -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hermlab",
        description="Hermitian-geometry verification laboratory",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--geometry", default="", help="catalogue name, e.g. fubini-study:1")
        p.add_argument("--metric-file", default="", help="grid-sampled metric file")
        p.add_argument("--points", default="origin", help="semicolon-separated chart points")
        p.add_argument("--grid", type=int, default=200, help="sample count for checks")
        p.add_argument("--subdivisions", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", action="append", default=[],
                       help="tolerance override: VALUE or NAME=VALUE (repeatable)")
        p.add_argument("--out", default="", help="output path (default: stdout)")
        p.add_argument("--format", default="json", choices=["json", "csv", "text"])
        p.add_argument("--no-figures", dest="figures", action="store_false")

    p_report = sub.add_parser("report", help="curvature report")
    common(p_report)
    p_check = sub.add_parser("check", help="verification suites")
    p_check.add_argument("suite", nargs="?", default="all",
                         choices=["identities", "bounds", "all"])
    common(p_check)
    p_spec = sub.add_parser("spectrum", help="first eigenvalue")
    common(p_spec)
    p_list = sub.add_parser("list-geometries", help="print the catalogue")
    common(p_list)
    return ap


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        geometry=args.geometry,
        metric_file=getattr(args, "metric_file", ""),
        points=args.points,
        grid=args.grid,
        subdivisions=args.subdivisions,
        seed=args.seed,
        tol=parse_tol(args.tol),
        out=args.out,
        format=args.format,
        suite=getattr(args, "suite", "all"),
        figures=args.figures,
    )


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        cfg = config_from_args(args)
        handler = {
            "report": cmd_report,
            "check": cmd_check,
            "spectrum": cmd_spectrum,
            "list-geometries": cmd_list_geometries,
        }[cfg.command]
        return handler(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except SingularMetricError as exc:
        sys.stderr.write(f"singular metric: {exc}\n")
        return EXIT_SINGULAR
    except (UnsupportedGeometryError, ResolutionError) as exc:
        sys.stderr.write(f"unsupported: {exc}\n")
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
