"""Run configuration, pipelines, finite-difference oracle and reports.

A run is described by a :class:`RunConfig` (YAML or JSON file, or a dict)
and produces a :class:`StudyReport`.  Pipelines:

* ``solve``: base scattered field, boundary Cauchy data and point values
* ``derive``: shape-derivative data and solutions up to order 2
* ``taylor``: ``derive`` plus remainder studies against direct solves
* ``verify``: acceptance checks, plus derivative norms and a
  finite-difference comparison for the configured scene if it has velocities
* ``symbolic``: boundary data generated in exterior calculus
"""

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .convergence import InsufficientDataError, fit_order
from .geometry import (GeometryError, build_grid, composed_flow_curve, curve_from_spec,
                       offset_curve, velocity_from_spec)
from .recursion import (Scene, direct_solve, mixed_remainder_study, remainder_study,
                        shape_derivative_solve)
from .solvers import BoundaryCondition, IncidentField

__all__ = ["ConfigError", "RunConfig", "StudyReport", "FDEstimate", "COMMANDS", "run",
           "fd_oracle", "richardson_table", "fit_order", "load_config"]

COMMANDS = ("solve", "derive", "taylor", "verify", "symbolic")
SIGNIFICANT = 6
# smallest acceptable remainder slope of the order-N Taylor polynomial
MIN_SLOPE = {0: 0.9, 1: 1.9, 2: 2.9}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------- config

def _finite(path, value, positive=False, nonneg=False):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if positive and x <= 0:
        raise ConfigError(path, "must be positive")
    if nonneg and x < 0:
        raise ConfigError(path, "must be non-negative")
    return x


def _int(path, value, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if not (isinstance(value, float) and value.is_integer()):
            raise ConfigError(path, f"expected an integer, got {value!r}")
    v = int(value)
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(path, f"must lie in [{lo}, {hi}]")
    return v


def _numbers(path, values):
    if isinstance(values, (str, bytes)) or not hasattr(values, "__iter__"):
        raise ConfigError(path, "expected a list of numbers")
    return [_finite(f"{path}[{i}]", x) for i, x in enumerate(values)]


_SCENE_KEYS = {"curve", "bc", "k", "alpha", "alpha_int", "lam", "incident"}
_TOP_KEYS = {"command", "scene", "velocities", "order", "t_values", "points", "solver",
             "output", "seed", "symbolic", "suite"}
_SYMBOLIC_DEFAULTS = {"bc": "dirichlet", "order": 2, "dim": 2, "degree": 0,
                      "general_velocity": True, "framing": "scattered", "level": "proxy"}


def _unknown(path, given, allowed):
    extra = sorted(set(given) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}" if path else extra[0],
                          f"unknown key; allowed: {sorted(allowed)}")


@dataclass
class RunConfig:
    """Validated run description.

    ``scene`` holds the curve spec, ``bc`` (soft, hard, impedance,
    transmission), ``k``, ``alpha`` (exterior), ``alpha_int``, ``lam`` and the
    incident-field spec.  ``to_dict`` returns the normalized tree, which
    ``from_dict`` accepts unchanged (the report's config echo).
    """

    command: str = "solve"
    scene: dict = None
    velocities: list = field(default_factory=list)
    order: int = 2
    t_values: list = field(default_factory=lambda: [0.1 / 2 ** i for i in range(7)])
    points: list = field(default_factory=list)
    solver: dict = field(default_factory=lambda: {"n_nodes": 256, "n_modes": None,
                                                  "backend": "auto"})
    output: dict = field(default_factory=lambda: {"directory": None, "formats": ["json"]})
    seed: int = 0
    symbolic: dict = field(default_factory=lambda: dict(_SYMBOLIC_DEFAULTS))
    suite: str = "all"

    @classmethod
    def from_dict(cls, tree):
        if not isinstance(tree, dict):
            raise ConfigError("<root>", "configuration must be a mapping")
        _unknown("", tree, _TOP_KEYS)
        cfg = cls()
        cfg.command = tree.get("command", "solve")
        if cfg.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {list(COMMANDS)}")
        cfg.seed = _int("seed", tree.get("seed", 0), lo=0)
        cfg.order = _int("order", tree.get("order", 2), 0, 2)
        if "t_values" in tree:
            cfg.t_values = _numbers("t_values", tree["t_values"])
            for i, t in enumerate(cfg.t_values):
                if t <= 0:
                    raise ConfigError(f"t_values[{i}]", "must be positive")
        cfg.points = []
        for i, p in enumerate(tree.get("points", []) or []):
            xy = _numbers(f"points[{i}]", p)
            if len(xy) != 2:
                raise ConfigError(f"points[{i}]", "expected [x, y]")
            cfg.points.append(xy)
        cfg.solver = cls._solver(tree.get("solver") or {})
        cfg.output = cls._output(tree.get("output") or {})
        cfg.symbolic = cls._symbolic(tree.get("symbolic") or {})
        cfg.suite = str(tree.get("suite", "all"))
        cfg.velocities = []
        for i, v in enumerate(tree.get("velocities", []) or []):
            cfg.velocities.append(cls._velocity(f"velocities[{i}]", v))
        if tree.get("scene") is not None:
            cfg.scene = cls._scene(tree["scene"])
        elif cfg.command in ("solve", "derive", "taylor"):
            raise ConfigError("scene", f"required by command {cfg.command!r}")
        if cfg.command in ("derive", "taylor") and cfg.order > 0 and not cfg.velocities:
            raise ConfigError("velocities", "at least one velocity is required")
        if cfg.command == "taylor" and len(cfg.t_values) < 4:
            raise ConfigError("t_values", "remainder fits need at least 4 values")
        if cfg.command in ("derive", "taylor") and not cfg.points:
            raise ConfigError("points", "observation points are required")
        return cfg

    @staticmethod
    def _scene(s):
        if not isinstance(s, dict):
            raise ConfigError("scene", "expected a mapping")
        _unknown("scene", s, _SCENE_KEYS)
        for key in ("curve", "bc", "k"):
            if key not in s:
                raise ConfigError(f"scene.{key}", "missing")
        out = {"curve": s["curve"], "bc": s["bc"], "k": _finite("scene.k", s["k"], positive=True),
               "alpha": _finite("scene.alpha", s.get("alpha", 1.0), positive=True),
               "alpha_int": _finite("scene.alpha_int", s.get("alpha_int", 1.0), positive=True),
               "lam": _finite("scene.lam", s.get("lam", 0.0)),
               "incident": s.get("incident", {"plane_wave": {"direction": [1.0, 0.0]}})}
        if out["bc"] not in ("soft", "hard", "impedance", "transmission"):
            raise ConfigError("scene.bc", "must be soft, hard, impedance or transmission")
        try:
            curve = curve_from_spec(out["curve"])
            out["curve"] = curve.spec()
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError("scene.curve", str(exc)) from None
        if not np.all(np.isfinite(np.concatenate([curve.x_coeffs, curve.y_coeffs]))):
            raise ConfigError("scene.curve", "coefficients must be finite")
        if out["bc"] == "transmission" and not curve.is_circle():
            raise ConfigError("scene.bc", "transmission requires a circular obstacle")
        inc = out["incident"]
        if not isinstance(inc, dict) or len(inc) != 1:
            raise ConfigError("scene.incident", "expected {plane_wave: {...}} or {point_source: {...}}")
        (kind, body), = inc.items()
        body = body or {}
        if kind == "plane_wave":
            d = _numbers("scene.incident.plane_wave.direction", body.get("direction", [1.0, 0.0]))
            if len(d) != 2 or np.hypot(*d) == 0:
                raise ConfigError("scene.incident.plane_wave.direction", "expected a nonzero [x, y]")
            out["incident"] = {"plane_wave": {"direction": d}}
        elif kind == "point_source":
            if "location" not in body:
                raise ConfigError("scene.incident.point_source.location", "missing")
            loc = _numbers("scene.incident.point_source.location", body["location"])
            if len(loc) != 2:
                raise ConfigError("scene.incident.point_source.location", "expected [x, y]")
            out["incident"] = {"point_source": {"location": loc}}
        else:
            raise ConfigError("scene.incident", f"unknown incident kind {kind!r}")
        return out

    @staticmethod
    def _velocity(path, v):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return {"const": _finite(path, v)}
        if not isinstance(v, dict):
            raise ConfigError(path, "expected a number, {const: c} or {cos: [...], sin: [...]}")
        _unknown(path, v, {"const", "cos", "sin"})
        if "const" in v:
            return {"const": _finite(f"{path}.const", v["const"])}
        return {"cos": _numbers(f"{path}.cos", v.get("cos", [0.0])),
                "sin": _numbers(f"{path}.sin", v.get("sin", []))}

    @staticmethod
    def _solver(s):
        if not isinstance(s, dict):
            raise ConfigError("solver", "expected a mapping")
        _unknown("solver", s, {"n_nodes", "n_modes", "backend"})
        n_modes = s.get("n_modes")
        out = {"n_nodes": _int("solver.n_nodes", s.get("n_nodes", 256), 16, 4096),
               "n_modes": None if n_modes is None else _int("solver.n_modes", n_modes, 1, 500),
               "backend": s.get("backend", "auto")}
        if out["backend"] not in ("auto", "series", "nystrom"):
            raise ConfigError("solver.backend", "must be auto, series or nystrom")
        return out

    @staticmethod
    def _output(o):
        if not isinstance(o, dict):
            raise ConfigError("output", "expected a mapping")
        _unknown("output", o, {"directory", "formats"})
        formats = o.get("formats", ["json"])
        if isinstance(formats, str):
            formats = [formats]
        bad = [f for f in formats if f not in ("json", "csv")]
        if bad:
            raise ConfigError("output.formats", f"unsupported format {bad[0]!r}; use json, csv")
        d = o.get("directory")
        return {"directory": None if d is None else str(d), "formats": sorted(set(formats))}

    @staticmethod
    def _symbolic(s):
        if not isinstance(s, dict):
            raise ConfigError("symbolic", "expected a mapping")
        _unknown("symbolic", s, _SYMBOLIC_DEFAULTS)
        out = {**_SYMBOLIC_DEFAULTS, **s}
        if out["bc"] not in ("dirichlet", "neumann", "impedance", "transmission"):
            raise ConfigError("symbolic.bc", "must be dirichlet, neumann, impedance or transmission")
        out["order"] = _int("symbolic.order", out["order"], 0, 8)
        out["dim"] = _int("symbolic.dim", out["dim"], 1, 8)
        out["degree"] = _int("symbolic.degree", out["degree"], 0, out["dim"] - 1)
        out["general_velocity"] = bool(out["general_velocity"])
        if out["framing"] not in ("scattered", "total"):
            raise ConfigError("symbolic.framing", "must be scattered or total")
        if out["level"] not in ("proxy", "form"):
            raise ConfigError("symbolic.level", "must be proxy or form")
        return out

    def to_dict(self):
        return {"command": self.command, "scene": self.scene, "velocities": self.velocities,
                "order": self.order, "t_values": list(self.t_values), "points": self.points,
                "solver": self.solver, "output": self.output, "seed": self.seed,
                "symbolic": self.symbolic, "suite": self.suite}

    # ---- objects

    def build_scene(self):
        s = self.scene
        bc = BoundaryCondition(s["bc"], alpha=s["alpha"], lam=s["lam"], alpha_int=s["alpha_int"])
        (kind, body), = s["incident"].items()
        if kind == "plane_wave":
            inc = IncidentField.plane_wave(s["k"], body["direction"], alpha=s["alpha"])
        else:
            inc = IncidentField.point_source(s["k"], body["location"], alpha=s["alpha"])
        backend = self.solver["backend"]
        return Scene(curve_from_spec(s["curve"]), bc, s["k"], inc,
                     n_nodes=self.solver["n_nodes"], n_modes=self.solver["n_modes"],
                     backend="series" if backend == "series" else "auto")

    def build_velocities(self):
        return [velocity_from_spec(v) for v in self.velocities]


def load_config(path):
    """Read a YAML or JSON configuration file into a :class:`RunConfig`."""
    text = Path(path).read_text()
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from None
    return RunConfig.from_dict(tree or {})


# ---------------------------------------------------------------- report

def _round(x):
    """Round floats to ``SIGNIFICANT`` digits so reports do not depend on last-bit noise."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIGNIFICANT}g}")
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.ndarray):
        return _round(x.tolist())
    return x


@dataclass
class StudyReport:
    """Result of :func:`run`.

    ``tables`` maps a quantity name to rows ``[index, theta_or_x, theta_or_y,
    re, im]``; ``remainder`` holds errors and fits (a slope is reported only
    for reliable fits); ``oracle`` holds oracle comparisons; ``checks``
    holds verification results; ``timings`` (seconds) is excluded from
    :meth:`to_json` unless requested.
    """

    command: str
    config: dict
    passed: bool = True
    boundary_data: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    remainder: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    symbolic: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def as_dict(self, timings=False):
        out = {"command": self.command, "config": self.config, "passed": self.passed,
               "boundary_data": self.boundary_data, "tables": self.tables,
               "remainder": self.remainder, "oracle": self.oracle, "checks": self.checks,
               "symbolic": self.symbolic}
        if timings:
            out["timings"] = self.timings
        return _round(out)

    def to_json(self, timings=False):
        return json.dumps(self.as_dict(timings), sort_keys=True, indent=1) + "\n"

    def write(self, directory, formats=("json",)):
        """Write ``report.json`` and/or one CSV per table plus plot data; returns paths."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = []
        if "json" in formats:
            p = d / "report.json"
            p.write_text(self.to_json())
            paths.append(p)
            p = d / "timings.json"
            p.write_text(json.dumps(_round(self.timings), sort_keys=True, indent=1) + "\n")
            paths.append(p)
        if "csv" in formats:
            for name, rows in sorted(self.tables.items()):
                p = d / f"{name}.csv"
                with p.open("w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["index", "theta_or_x", "theta_or_y", "re", "im"])
                    w.writerows(_round(rows))
                paths.append(p)
            for name, study in sorted(self.remainder.items()):
                p = d / f"remainder_{name}.csv"
                with p.open("w", newline="") as fh:
                    for order, fit in sorted(study["fits"].items()):
                        fh.write(f"# order {order}: {_fit_note(fit)}\n")
                    w = csv.writer(fh)
                    w.writerow(["t", "order", "error"])
                    for order, errs in sorted(study["errors"].items()):
                        for t, e in zip(study["ts"], errs):
                            w.writerow(_round([t, int(order), e]))
                paths.append(p)
        return paths


def _fit_note(fit):
    if fit.get("slope") is not None:
        return f"slope {fit['slope']:.4g}, residual {fit['residual']:.3g}"
    return fit.get("note", "no slope")


def _report_fit(ts, errors):
    """Fit summary; the slope is withheld unless the fit residual is below the limit."""
    try:
        f = fit_order(ts, errors)
    except InsufficientDataError as exc:
        return {"slope": None, "residual": None, "reliable": False, "note": str(exc)}
    if not f["reliable"]:
        return {"slope": None, "residual": f["residual"], "reliable": False,
                "note": "fit residual above 0.15; slope withheld"}
    return {"slope": f["slope"], "intercept": f["intercept"], "residual": f["residual"],
            "n_used": f["n_used"], "reliable": True}


def _node_rows(grid, values):
    # node rows carry (theta, arclength from theta = 0)
    s = np.concatenate([[0.0], np.cumsum(grid.weights)[:-1]])
    return [[i, float(t), float(a), float(np.real(z)), float(np.imag(z))]
            for i, (t, a, z) in enumerate(zip(grid.theta, s, values))]


def _point_rows(points, values):
    return [[i, float(p[0]), float(p[1]), float(np.real(z)), float(np.imag(z))]
            for i, (p, z) in enumerate(zip(points, values))]


def _key_name(key):
    return "d" + "".join(str(i + 1) for i in key)


# ---------------------------------------------------------------- fd oracle

@dataclass
class FDEstimate:
    """Richardson-extrapolated finite-difference estimate.

    ``error`` is the difference of the two last diagonal entries of the
    table; ``inconclusive`` is set when the diagonal does not contract or the
    error bar exceeds ``tol`` relative to the estimate.
    """

    estimate: np.ndarray
    error: float
    table: list
    steps: list
    inconclusive: bool


def richardson_table(func, h, levels=3, tol=1e-5):
    """Central-difference Richardson table of ``func(h) -> array`` at h, h/2, ...

    ``func`` must return a difference quotient with an even error expansion
    in h (leading term h^2).
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    steps = [h / 2 ** i for i in range(levels)]
    table = [[np.asarray(func(s))] for s in steps]
    for i in range(1, levels):
        for j in range(1, i + 1):
            f = 4.0 ** j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1))
    diag = [row[-1] for row in table]
    diffs = [float(np.abs(diag[i] - diag[i - 1]).max()) for i in range(1, levels)]
    est = diag[-1]
    err = diffs[-1] if diffs else math.inf
    scale = max(1.0, float(np.abs(est).max()))
    contracting = all(b <= a for a, b in zip(diffs, diffs[1:]))
    inconclusive = (not diffs) or (not contracting) or err > tol * scale
    return FDEstimate(est, err, table, steps, inconclusive)


def fd_oracle(scene, v, t_step=1e-3, richardson_levels=2, points=None, v2=None, tol=1e-5):
    """Finite-difference shape derivatives from direct solves on perturbed curves.

    Parameters
    ----------
    scene : Scene
    v : NormalSpeedField
    t_step : float
        Largest step; the table halves it ``richardson_levels - 1`` times.
    points : (m, 2) array
        Exterior observation points.
    v2 : NormalSpeedField, optional
        If given, estimates the mixed derivative delta_{v, v2} u with the
        four-point stencil [u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)] / (4 h^2)
        over composed flows; otherwise the first derivative from
        [u(h) - u(-h)] / (2 h) over normal offsets.

    Returns
    -------
    FDEstimate
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    grid = build_grid(scene.curve, scene.n_nodes)

    def field_on(curve):
        return direct_solve(scene, curve).evaluate(points)

    if v2 is None:
        def quotient(h):
            return (field_on(offset_curve(grid, v, h)) - field_on(offset_curve(grid, v, -h))) / (2 * h)
    else:
        def quotient(h):
            acc = 0.0
            for s1, s2, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                acc = acc + w * field_on(composed_flow_curve(grid, v, s1 * h, v2, s2 * h))
            return acc / (4 * h * h)
    return richardson_table(quotient, t_step, richardson_levels, tol)


# ---------------------------------------------------------------- pipelines

def _solve(cfg, report, timings):
    scene = cfg.build_scene()
    t0 = time.perf_counter()
    rec = shape_derivative_solve(scene, [], order=0)
    timings["base_solve"] = time.perf_counter() - t0
    u, un = rec.base.cauchy_data()
    report.tables["trace"] = _node_rows(rec.grid, u)
    report.tables["normal_trace"] = _node_rows(rec.grid, un)
    if cfg.points:
        pts = np.asarray(cfg.points)
        report.tables["scattered"] = _point_rows(pts, rec.base.evaluate(pts))
    report.boundary_data["base"] = {"trace_max": float(np.abs(u).max()),
                                    "normal_trace_max": float(np.abs(un).max()),
                                    "bc_residual": rec.base.bc_residual(scene.incident)}
    return rec


def _derive(cfg, report, timings):
    scene = cfg.build_scene()
    vels = cfg.build_velocities()
    t0 = time.perf_counter()
    rec = shape_derivative_solve(scene, vels, cfg.order)
    timings["derivative_solves"] = time.perf_counter() - t0
    pts = np.asarray(cfg.points)
    report.tables["scattered"] = _point_rows(pts, rec.base.evaluate(pts))
    for key in sorted(rec.derivatives, key=lambda k: (len(k), k)):
        name = _key_name(key)
        data = rec.data[key]
        arrays = data.arrays()
        labels = ["datum"] if len(arrays) == 1 else ["jump_dirichlet", "jump_neumann"]
        for lab, arr in zip(labels, arrays):
            report.tables[f"{name}_{lab}"] = _node_rows(rec.grid, arr)
        sol = rec.derivatives[key]
        report.tables[f"{name}_field"] = _point_rows(pts, sol.evaluate(pts))
        report.boundary_data[name] = {
            "order": data.order, "datum_max": data.max_norm(),
            "trace_max": float(np.abs(sol.trace()).max()),
            "field_max": float(np.abs(sol.evaluate(pts)).max()),
            "terms": dict(sorted(data.provenance.items()))}
    return rec


def _taylor(cfg, report, timings):
    rec = _derive(cfg, report, timings)
    pts = np.asarray(cfg.points)
    t0 = time.perf_counter()
    orders = tuple(range(cfg.order + 1))
    study = remainder_study(rec, cfg.t_values, pts, orders)
    report.remainder["single"] = {
        "ts": study["ts"], "errors": {str(n): e for n, e in study["errors"].items()},
        "fits": {str(n): _report_fit(study["ts"], study["errors"][n]) for n in orders}}
    if cfg.order == 2 and len(rec.velocities) >= 2:
        mixed = mixed_remainder_study(rec, cfg.t_values, pts)
        report.remainder["mixed"] = {
            "ts": mixed["taus"], "errors": {"2": mixed["envelope"]},
            "fits": {"2": _report_fit(mixed["taus"], mixed["envelope"])}}
    timings["remainder_study"] = time.perf_counter() - t0
    report.passed = all(fit["slope"] is not None and fit["slope"] >= MIN_SLOPE[int(n)]
                        for body in report.remainder.values() for n, fit in body["fits"].items())
    return rec


def _verify(cfg, report, timings, echo=None):
    from .verify import run_suite
    results = run_suite(cfg.suite, cfg.seed, echo=echo)
    for r in results:
        timings[f"check_{r.name}"] = r.seconds
    report.checks = [r.as_dict() for r in results]
    passed = all(r.passed for r in results)
    if cfg.scene is not None and cfg.velocities:
        scene = cfg.build_scene()
        vels = cfg.build_velocities()
        rec = shape_derivative_solve(scene, vels, cfg.order)
        report.boundary_data = {
            _key_name(k): {"datum_max": rec.data[k].max_norm(),
                           "trace_max": float(np.abs(rec.derivatives[k].trace()).max())}
            for k in sorted(rec.derivatives, key=lambda k: (len(k), k))}
        if cfg.points and cfg.order >= 1:
            pts = np.asarray(cfg.points)
            rows = []
            for i, v in enumerate(vels):
                fd = fd_oracle(scene, v, 1e-3, 3, pts)
                rec_val = rec.derivatives[(i,)].evaluate(pts)
                diff = float(np.abs(fd.estimate - rec_val).max())
                scale = max(float(np.abs(rec_val).max()), 1e-300)
                ok = (not fd.inconclusive) and diff <= max(1e-5 * scale, 10 * fd.error, 1e-12)
                rows.append({"velocity": i, "fd_error_bar": fd.error, "abs_diff": diff,
                             "inconclusive": fd.inconclusive, "agree": ok})
                passed &= ok
            report.oracle["first_order_fd"] = rows
    report.passed = passed


def _symbolic(cfg, report, timings):
    from .symbolic import derive
    s = cfg.symbolic
    _, text, payload = derive(s["bc"], s["order"], s["dim"], s["degree"],
                              s["general_velocity"], s["framing"], s["level"])
    report.symbolic = {"text": text, "ast": payload}


def run(config, echo=None):
    """Execute the pipeline named by ``config.command`` and return its report.

    Artifacts are written when ``config.output["directory"]`` is set.  Solver
    and geometry errors are re-raised with the command name attached.
    """
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    report = StudyReport(cfg.command, _round(cfg.to_dict()))
    timings = {}
    t0 = time.perf_counter()
    try:
        if cfg.command == "solve":
            _solve(cfg, report, timings)
        elif cfg.command == "derive":
            _derive(cfg, report, timings)
        elif cfg.command == "taylor":
            _taylor(cfg, report, timings)
        elif cfg.command == "verify":
            _verify(cfg, report, timings, echo)
        else:
            _symbolic(cfg, report, timings)
    except (GeometryError, RuntimeError) as exc:
        raise type(exc)(f"{cfg.command}: {exc}") from exc
    timings["total"] = time.perf_counter() - t0
    report.timings = timings
    if cfg.output["directory"]:
        report.write(cfg.output["directory"], cfg.output["formats"])
    return report
