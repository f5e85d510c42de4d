"""Command-line front end: `hypgeo <command> [options]`.

Every command prints a JSON report on stdout and, with --out DIR, also
writes it to DIR/<command>.json together with CSV tables.  Exit status:
0 when every checked tolerance holds, 1 on a tolerance failure, 2 on a
parse or usage error, 3 on a numerical failure.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import complex_metric as cm
from . import frame_integrator as fi
from . import hypersurface as hs
from . import integrability as ig
from . import sl2c
from .io import (
    DATA_SCHEMA,
    METRIC_SCHEMA,
    REPORT_SCHEMA,
    InputError,
    complex_from_json,
    grid_from_json,
    load_json,
    parse_complex,
    require,
    write_report,
)
from .minkowski import GeometryError

EXIT_OK, EXIT_TOL, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    tol: float | None = None
    resolution: int | None = None
    seed: int = 0
    samples: int | None = None
    dim: int = 3
    out: str | None = None

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.resolution is not None and self.resolution < 4:
            raise InputError("grid resolution must be at least 4")
        if self.samples is not None and self.samples < 1:
            raise InputError("--samples must be positive")
        return self


class _Checks:
    """Collects (name, value, tol) triples; pass means value < tol for every entry."""

    def __init__(self, override: float | None = None):
        self.override = override
        self.items = []

    def add(self, name: str, value: float, tol: float):
        limit = self.override if self.override is not None else tol
        self.items.append({"check": name, "value": float(value), "tol": float(limit),
                           "pass": bool(np.isfinite(value) and value < limit)})

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.items)

    def table(self):
        return (["check", "value", "tol", "pass"],
                [(c["check"], c["value"], c["tol"], c["pass"]) for c in self.items])


def _finish(cfg: RunConfig, body: dict, checks: _Checks | None = None, tables: dict | None = None,
            ok: bool | None = None):
    tables = dict(tables or {})
    if checks is not None:
        body["checks"] = checks.items
        tables.setdefault("checks", checks.table())
        ok = checks.ok if ok is None else ok and checks.ok
    ok = True if ok is None else ok
    report = {"schema": REPORT_SCHEMA, "command": cfg.command,
              "config": {"inputs": cfg.inputs, "tol": cfg.tol, "seed": cfg.seed, "samples": cfg.samples,
                         "dim": cfg.dim, "resolution": cfg.resolution},
              "pass": bool(ok), **body}
    click.echo(write_report(report, cfg.out, tables, stem=cfg.command))
    return EXIT_OK if ok else EXIT_TOL


def _run(fn, cfg: RunConfig):
    """Run a command body and map exceptions to exit codes."""
    try:
        cfg.validate()
        code = fn(cfg)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        code = EXIT_PARSE
    except (GeometryError, np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        code = EXIT_NUMERIC
    sys.exit(code)


def common(samples_default: int | None = None, dim: bool = False):
    """Shared flags: --tol, --seed, --out, and optionally --samples and --dim."""
    def deco(f):
        f = click.option("--out", type=click.Path(file_okay=False), default=None,
                         help="Directory for the JSON report and CSV tables.")(f)
        f = click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")(f)
        f = click.option("--tol", type=float, default=None,
                         help="Override every checked tolerance of the command.")(f)
        if samples_default is not None:
            f = click.option("--samples", type=int, default=samples_default, show_default=True,
                             help="Number of random samples.")(f)
        if dim:
            f = click.option("--dim", type=click.Choice(["2", "3", "4"]), default="3", show_default=True,
                             help="Dimension of the hyperbolic space.")(f)
        return f
    return deco


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Numerical toolkit for hypersurfaces in hyperbolic space and their Gauss maps."""


# --- verify ---------------------------------------------------------------------------

@main.command()
@click.option("--suite", "suites", multiple=True, help="Suite to run (repeatable); default: all.")
@click.option("--list", "list_only", is_flag=True, help="List suites and the invariant each one checks.")
@common(samples_default=20, dim=True)
def verify(suites, list_only, samples, dim, tol, seed, out):
    """Run invariant suites and report a pass/fail table."""
    from .suites import REGISTRY, Context, run_suite

    if list_only:
        for s in REGISTRY.values():
            click.echo(f"{s.name:28s} {s.module:18s} {s.invariant}")
        sys.exit(EXIT_OK)
    cfg = RunConfig("verify", list(suites), tol, None, seed, samples, int(dim), out)

    def body(cfg):
        names = list(suites) or list(REGISTRY)
        unknown = [n for n in names if n not in REGISTRY]
        if unknown:
            raise InputError(f"unknown suite(s): {', '.join(unknown)}; see verify --list")
        ctx = Context(samples=cfg.samples, dim=cfg.dim, seed=cfg.seed)
        results, tables = [], {}
        for n in names:
            r = run_suite(n, ctx, cfg.tol)
            tables[n] = (r.pop("columns"), r.pop("rows"))
            results.append(r)
            click.echo(f"{'PASS' if r['pass'] else 'FAIL'}  {n:28s} {r['residual']:.3e} < {r['tol']:.1e}", err=True)
        tables["summary"] = (["suite", "module", "residual", "tol", "pass"],
                             [(r["suite"], r["module"], r["residual"], r["tol"], r["pass"]) for r in results])
        return _finish(cfg, {"results": results}, tables=tables, ok=all(r["pass"] for r in results))

    _run(body, cfg)


# --- integrate ---------------------------------------------------------------------------

def load_immersion_data(path, z_override=None):
    doc = load_json(path, DATA_SCHEMA)
    family = require(doc, "family", str, path)
    z = complex_from_json(doc.get("z", 0.0)) if z_override is None else z_override
    if family == "landslide":
        data = fi.landslide_data(z, float(doc.get("K0", 0.5)))
    elif family == "cosh":
        data = fi.cosh_data(z)
    else:
        raise InputError(f"{path}: unknown family {family!r} (expected landslide or cosh)")
    grid = require(doc, "grid", dict, path)
    xs = grid_from_json(require(grid, "x", dict, path), "grid.x")
    ys = grid_from_json(require(grid, "y", dict, path), "grid.y")
    substeps = int(doc.get("substeps", 8))
    if substeps < 1:
        raise InputError(f"{path}: substeps must be positive")
    return data, xs, ys, substeps, z


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False),
              help="Immersion-data JSON file.")
@click.option("--z", "z_text", default=None, help="Complex parameter, e.g. 0.3+0.2i (overrides the file).")
@click.option("--grid", "resolution", type=int, default=None, help="Override the grid size on both axes.")
@common()
def integrate(data_path, z_text, resolution, tol, seed, out):
    """Integrate immersion data into X_3 and check the round trip."""
    cfg = RunConfig("integrate", [data_path], tol, resolution, seed, None, 3, out)

    def body(cfg):
        z = None if z_text is None else parse_complex(z_text)
        data, xs, ys, substeps, z = load_immersion_data(data_path, z)
        if cfg.resolution is not None:
            xs = np.linspace(xs[0], xs[-1], cfg.resolution)
            ys = np.linspace(ys[0], ys[-1], cfg.resolution)
        base = (len(xs) // 2, len(ys) // 2)
        om = fi.MaurerCartanField(data, ref_point=(xs[base[0]], ys[base[1]]))
        a = fi.immersion_from_data(data, xs, ys, base=base, substeps=substeps, omega=om)
        b = fi.immersion_from_data(data, xs, ys, base=base, substeps=substeps, omega=om, order="spine-y")
        metric_res, shape_res = fi.round_trip_residuals(data, a)
        checks = _Checks(cfg.tol)
        checks.add("metric_round_trip", metric_res, 1e-4)
        checks.add("shape_round_trip", shape_res, 1e-3)
        checks.add("path_independence", float(np.abs(a.Phi - b.Phi).max()), 1e-6)
        checks.add("orthogonality_drift", fi.orthogonality_drift(a.Phi), 1e-8)
        checks.add("quadric_residual", float(np.abs((a.sigma ** 2).sum(-1) + 1).max()), 1e-8)
        S = a.sigma
        mesh = [(i, j, xs[i], ys[j], *S[i, j]) for i in range(len(xs)) for j in range(len(ys))]
        header = ["i", "j", "x", "y"] + [f"sigma{k}" for k in range(S.shape[-1])]
        body = {"family": data.name, "z": complex(z), "grid": [len(xs), len(ys)], "substeps": substeps}
        return _finish(cfg, body, checks, {"mesh": (header, mesh)})

    _run(body, cfg)


# --- reconstruct -------------------------------------------------------------------------

_SURFACES = {
    "graph": lambda: hs.graph(hs.default_graph_height),
    "r-cap": lambda: hs.r_cap(0.5),
    "plane": lambda: hs.plane(),
    "horosphere": lambda: hs.horosphere(),
}


@main.command()
@click.option("--source", type=click.Choice(sorted(_SURFACES) + ["counterexample"]), default="graph",
              show_default=True, help="Gauss map of a catalog surface, or the non-integrable curve.")
@click.option("--grid", "resolution", type=int, default=9, show_default=True, help="Grid size per axis.")
@click.option("--half-width", type=float, default=0.4, show_default=True, help="Domain is [-w, w]^2.")
@common()
def reconstruct(source, resolution, half_width, tol, seed, out):
    """Recover a hypersurface from an immersion into the space of geodesics."""
    cfg = RunConfig("reconstruct", [source], tol, resolution, seed, None, 3, out)

    def body(cfg):
        checks = _Checks(cfg.tol)
        if source == "counterexample":
            return _counterexample(cfg, checks)
        imm = _SURFACES[source]()
        G = ig.gauss_immersion(imm)
        xs = np.linspace(-half_width, half_width, cfg.resolution)
        rec = ig.reconstruct_sigma(G, xs, xs)
        ri = rec.immersion()
        rng = np.random.default_rng(cfg.seed)
        pts = rng.uniform(-0.9 * half_width, 0.9 * half_width, (10, 2))
        err = max(hs.gauss_map(ri, p).distance_to(hs.gauss_map(imm, p)) for p in pts)
        checks.add("cell_closure", float(rec.closure.max()), 1e-5)
        checks.add("gauss_map_error", err, 1e-6)
        rows = [(i, j, xs[i], xs[j], rec.tau[i, j] + rec.shift, *rec.zeta(np.array([xs[i], xs[j]])).x)
                for i in range(len(xs)) for j in range(len(xs))]
        header = ["i", "j", "x", "y", "tau"] + [f"sigma{k}" for k in range(4)]
        return _finish(cfg, {"source": source, "shift": rec.shift,
                             "min_singular_value": rec.min_singular_value()}, checks, {"mesh": (header, rows)})

    _run(body, cfg)


def _counterexample(cfg, checks):
    C = ig.CounterexampleCurve()
    co = C.speed_coefficients(np.linspace(-2, 2, 4001))
    ts = np.round(np.arange(-2, 2.0001, 0.1), 10)
    singular = [bool(C.singular_at(t, coeffs=co)) for t in ts]
    starts = np.round(np.arange(-2, 1.9001, 0.1), 10)
    shifts = [C.local_shift(a, a + 0.1) for a in starts]
    checks.add("regular_global_shifts", float(sum(not s for s in singular)), 0.5)
    checks.add("arcs_without_local_lift", float(sum(s is None for s in shifts)), 0.5)
    return _finish(cfg, {"source": "counterexample"}, checks, {
        "global": (["t", "singular"], list(zip(ts, singular))),
        "arcs": (["start", "end", "shift"], [(a, a + 0.1, "none" if s is None else s) for a, s in zip(starts, shifts)]),
    })


# --- holonomy ----------------------------------------------------------------------------

@main.command()
@click.option("--theta0", "thetas", type=float, multiple=True,
              help="Crossing angle(s) in radians; default pi/2, pi/3, 2pi/5.")
@click.option("--period", type=float, default=1.0, show_default=True, help="Deck translation length.")
@common()
def holonomy(thetas, period, tol, seed, out):
    """Holonomy of constant-angle curves by two routes, and the flux between the first two angles."""
    thetas = list(thetas) or [np.pi / 2, np.pi / 3, 2 * np.pi / 5]
    cfg = RunConfig("holonomy", [f"{t:.17g}" for t in thetas], tol, None, seed, None, 2, out)

    def body(cfg):
        checks = _Checks(cfg.tol)
        loop = ig.LoopPath.segment([0.2], [0.2 + period], deck=0)
        rows = []
        for th in thetas:
            G = ig.constant_angle_curve(th, period)
            h = ig.loop_holonomy(G, loop)
            kd = ig.kappa_difference(G, loop)
            closed = ig.constant_angle_holonomy(th, period)
            rows.append((th, h, kd, closed))
            checks.add(f"routes_agree[{th:.6g}]", abs(h - kd), 1e-5)
            checks.add(f"closed_form[{th:.6g}]", abs(h - closed), 1e-5)
        body = {"holonomy": [{"theta0": r[0], "omega_route": r[1], "kappa_route": r[2], "closed_form": r[3]}
                             for r in rows]}
        if len(thetas) >= 2:
            f = ig.flux(ig.angle_isotopy(thetas[0], thetas[1], period), loop)
            diff = rows[1][1] - rows[0][1]
            body["flux"] = {"value": f, "holonomy_difference": diff}
            checks.add("flux_equals_difference", abs(f - diff), 1e-3)
        return _finish(cfg, body, checks,
                       {"holonomy": (["theta0", "omega_route", "kappa_route", "closed_form"], rows)})

    _run(body, cfg)


# --- gauss-bonnet ------------------------------------------------------------------------

def load_metric(path):
    doc = load_json(path, METRIC_SCHEMA)
    name = require(doc, "metric", str, path)
    chi = require(doc, "euler_characteristic", int, path)
    if name == "genus2":
        q = doc.get("quadrature", {})
        return {"kind": "nodes", "metric": cm.poincare_disk(), "chi": chi,
                "nodes": cm.octagon_quadrature(int(q.get("angular", 48)), int(q.get("radial", 64))),
                "factor": cm.octagon_conformal_factor}
    builders = {"neg-sphere": cm.negative_sphere, "half-plane": cm.hyperbolic_half_plane,
                "disk": cm.poincare_disk, "neg-round": cm.negative_round_disk}
    if name not in builders:
        raise InputError(f"{path}: unknown metric {name!r}; expected one of {sorted(builders) + ['genus2']}")
    dom = require(doc, "domain", dict, path)
    try:
        lo = [float(v) for v in dom["lo"]]
        hi = [float(v) for v in dom["hi"]]
        grid = [int(v) for v in require(doc, "grid", list, path)]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: domain needs lo/hi pairs and grid two integers") from exc
    if len(lo) != 2 or len(hi) != 2 or len(grid) != 2:
        raise InputError(f"{path}: domain and grid must be two-dimensional")
    # the random conformal change must be a smooth function on the closed surface
    factor = cm.sphere_conformal_factor if name == "neg-sphere" else None
    return {"kind": "grid", "metric": builders[name](), "chi": chi, "lo": lo, "hi": hi, "grid": grid,
            "factor": factor}


def _integrate_K(spec, metric):
    if spec["kind"] == "nodes":
        P, W = spec["nodes"]
        return cm.gauss_bonnet_nodes(metric, P, W)
    return cm.gauss_bonnet_grid(metric, spec["lo"], spec["hi"], spec["grid"])


@main.command("gauss-bonnet")
@click.option("--metric", "metric_path", required=True, type=click.Path(dir_okay=False),
              help="Metric JSON file.")
@click.option("--grid", "resolution", type=int, default=None, help="Scale the first grid axis (second is half).")
@click.option("--conformal", is_flag=True, help="Also integrate after a random conformal change.")
@common()
def gauss_bonnet(metric_path, resolution, conformal, tol, seed, out):
    """Integrate K dA and compare with 2 pi times the Euler characteristic."""
    cfg = RunConfig("gauss-bonnet", [metric_path], tol, resolution, seed, None, 2, out)

    def body(cfg):
        spec = load_metric(metric_path)
        if cfg.resolution is not None and spec["kind"] == "grid":
            spec["grid"] = [cfg.resolution, max(4, cfg.resolution // 2)]
        val = _integrate_K(spec, spec["metric"])
        target = 2 * np.pi * spec["chi"]
        checks = _Checks(cfg.tol)
        checks.add("gauss_bonnet", abs(val - target), 1e-2 if spec["kind"] == "grid" else 5e-2)
        body = {"metric": spec["metric"].name, "integral": val, "target": target}
        if conformal:
            if spec["factor"] is None:
                raise InputError(f"{metric_path}: no conformal test is defined for this metric")
            rng = np.random.default_rng(cfg.seed)
            f = spec["factor"](rng)
            val2 = _integrate_K(spec, spec["metric"].scaled(f))
            body["conformal_integral"] = val2
            checks.add("conformal_drift", abs(val2 - val), 1e-2)
        return _finish(cfg, body, checks)

    _run(body, cfg)


# --- flow --------------------------------------------------------------------------------

@main.command()
@click.option("--surface", type=click.Choice(sorted(_SURFACES)), default="graph", show_default=True)
@click.option("--speed", default="kappa", show_default=True, help="'kappa' or a constant normal speed.")
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--steps", type=int, default=10, show_default=True)
@click.option("--grid", "resolution", type=int, default=21, show_default=True)
@common()
def flow(surface, speed, dt, steps, resolution, tol, seed, out):
    """Evolve a grid surface by a normal flow and check the Gauss map along the way."""
    from .flows import FlowState, flow_step, gauss_velocity_check

    cfg = RunConfig("flow", [surface, speed], tol, resolution, seed, None, 3, out)

    def body(cfg):
        if speed == "kappa":
            f = "kappa"
        else:
            try:
                f = float(speed)
            except ValueError as exc:
                raise InputError(f"--speed must be 'kappa' or a number, got {speed!r}") from exc
        if steps < 1 or not dt > 0:
            raise InputError("need --steps >= 1 and --dt > 0")
        xs = np.linspace(-0.5, 0.5, cfg.resolution)
        st = FlowState.from_immersion(_SURFACES[surface](), xs, xs)
        c = cfg.resolution // 2
        worst = 0.0
        for _ in range(steps):
            worst = max(worst, gauss_velocity_check(st, f, c, c))
            st = flow_step(st, f, dt)
            if st.halted:
                raise GeometryError(f"flow halted at t = {st.t:.4g}: {st.halted}")
        diag = st.diagnostics
        checks = _Checks(cfg.tol)
        checks.add("gauss_velocity", worst, 1e-3 if f == "kappa" else 1e-6)
        checks.add("hyperboloid", max(d["hyperboloid_residual"] for d in diag), 1e-10)
        if f == "kappa":
            checks.add("lagrangian", max(d["lagrangian_residual"] for d in diag), 1e-5)
        cols = ["t", "lambda_min", "lambda_max", "kappa_min", "kappa_max", "hyperboloid_residual",
                "lagrangian_residual"]
        return _finish(cfg, {"surface": surface, "speed": speed, "t": st.t},
                       checks, {"diagnostics": (cols, [[d[k] for k in cols] for d in diag])})

    _run(body, cfg)


# --- classify ----------------------------------------------------------------------------

def _parse_matrix(text: str) -> np.ndarray:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 4:
        raise InputError("a 2x2 matrix needs four comma-separated entries a,b,c,d")
    return np.array([parse_complex(p) for p in parts], dtype=complex).reshape(2, 2)


@main.command()
@click.option("--matrix", default=None, help="Entries a,b,c,d of an element of SL(2,C) or sl(2,C).")
@click.option("--data", "data_path", default=None, type=click.Path(dir_okay=False),
              help="Immersion-data JSON: classify its real form instead.")
@click.option("--as", "reading", type=click.Choice(["auto", "element", "tangent"]), default="auto",
              show_default=True,
              help="How to read --matrix; auto treats traceless matrices with det != 1 as tangents.")
@click.option("--z", "z_text", default=None, help="Complex parameter for --data.")
@common()
def classify(matrix, data_path, reading, z_text, tol, seed, out):
    """Classify an isometry of H^3 (or a tangent vector), or the real form of immersion data."""
    cfg = RunConfig("classify", [x for x in (matrix, data_path) if x], tol, None, seed, None, 3, out)

    def body(cfg):
        if (matrix is None) == (data_path is None):
            raise InputError("give exactly one of --matrix or --data")
        if data_path is not None:
            z = None if z_text is None else parse_complex(z_text)
            data, xs, ys, _, z = load_immersion_data(data_path, z)
            P = np.stack(np.meshgrid(xs[::4], ys[::4], indexing="ij"), -1).reshape(-1, 2)
            label, matches = fi.classify_real_form(data, P)
            return _finish(cfg, {"z": complex(z), "real_form": label, "matches": matches})
        A = _parse_matrix(matrix)
        traceless = abs(np.trace(A)) < 1e-9
        unimodular = abs(np.linalg.det(A) - 1) < 1e-9
        is_tangent = reading == "tangent" or (reading == "auto" and traceless and not unimodular)
        if is_tangent and not traceless:
            raise InputError("a tangent vector must be traceless")
        if not is_tangent and not unimodular:
            raise InputError("an element of SL(2,C) must have determinant one")
        c = sl2c.classify_tangent(A) if is_tangent else sl2c.classify_element(A)
        body = {"kind": c.kind, "boundary": c.boundary}
        if is_tangent:
            body["input"] = "tangent"
            if c.kind not in ("identity", "parabolic"):
                body["axis"] = list(sl2c.axis(A))
        else:
            body["input"] = "element"
            body["fixed_points"] = list(sl2c.boundary_fixed_points(A))
        return _finish(cfg, body)

    _run(body, cfg)


if __name__ == "__main__":  # pragma: no cover
    main()
