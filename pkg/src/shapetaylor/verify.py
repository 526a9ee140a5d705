"""Acceptance checks, runnable one at a time or as a suite.

Each check returns a :class:`CheckResult` with its pass flag, a metric
dictionary and a one-line summary.  Wall-clock time is kept on the result
but is never part of the deterministic report.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .boundary_calculus import BoundaryJet, build_jet
from .geometry import (ClosedCurve, NormalSpeedField, build_grid, mixed_normal_closed_form,
                       normal_shape_derivative, offset_curve)
from .oracles import bessel_series
from .recursion import (Scene, mixed_remainder_study, remainder_study,
                        shape_derivative_solve)
from .solvers import BoundaryCondition, IncidentField, nystrom_scatter, series_solve

__all__ = ["CheckResult", "SUITES", "run_suite", "check"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    metrics: dict
    summary: str
    seconds: float = field(default=0.0, compare=False)

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary}"

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "metrics": self.metrics,
                "summary": self.summary}


def _rel(a, b):
    return float(np.abs(a - b).max() / np.abs(b).max())


def _runtime_ok(t0, limit):
    return time.perf_counter() - t0 < limit


# default incident wave of the numerical checks
_ANGLE = 0.3


def _plane(k, alpha=1.0):
    return IncidentField.plane_wave(k, (np.cos(_ANGLE), np.sin(_ANGLE)), alpha=alpha)


def special_functions(seed=0, samples=1000):
    """Wronskian and extended-precision comparison of J_n, Y_n for n <= 30, x in [0.1, 50]."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    orders = rng.integers(0, 31, samples)
    xs = rng.uniform(0.1, 50.0, samples)
    j0, y0 = specfun.besselj(orders, xs), specfun.bessely(orders, xs)
    j1, y1 = specfun.besselj(orders + 1, xs), specfun.bessely(orders + 1, xs)
    exact = 2.0 / (np.pi * xs)
    wronskian = float((np.abs(j1 * y0 - j0 * y1 - exact) / exact).max())
    envelope, pointwise = 0.0, 0.0
    for n, x, j, y in zip(orders, xs, j0, y0):
        rj, ry = bessel_series(int(n), float(x))
        rj, ry = float(rj), float(ry)
        scale = np.hypot(rj, ry)
        envelope = max(envelope, abs(j - rj) / scale, abs(y - ry) / scale)
        pointwise = max(pointwise, abs(j - rj) / abs(rj), abs(y - ry) / abs(ry))
    ok = wronskian <= 1e-12 and envelope <= 1e-12 and _runtime_ok(t0, 5.0)
    metrics = {"wronskian_rel": wronskian, "oracle_rel_envelope": envelope,
               "oracle_rel_pointwise": pointwise, "samples": samples}
    return ok, metrics, f"wronskian {wronskian:.1e}, oracle {envelope:.1e} (tol 1e-12)"


def solver_crossvalidation(seed=0):
    """Nystrom (n = 256) against the series solution on the unit circle."""
    t0 = time.perf_counter()
    worst, rows = 0.0, []
    angles = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    for k in (1.0, 2.0, 3.7):
        inc = _plane(k)
        for kind, lam in (("soft", 0.0), ("hard", 0.0), ("impedance", 1.0)):
            bc = BoundaryCondition(kind, lam=lam)
            ser = series_solve(1.0, bc, k, inc, n_nodes=256)
            nys = nystrom_scatter(ser.grid, bc, k, inc)
            (u, un), (w, wn) = ser.cauchy_data(), nys.cauchy_data()
            errs = {"trace": _rel(w, u), "normal_trace": _rel(wn, un),
                    "far_field": _rel(nys.far_field(angles), ser.far_field(angles))}
            rows.append({"k": k, "bc": kind, **errs})
            worst = max(worst, *errs.values())
    ok = worst <= 1e-8 and _runtime_ok(t0, 30.0)
    return ok, {"worst_rel": worst, "cases": rows}, f"worst relative {worst:.1e} (tol 1e-8)"


def boundary_jets(seed=0):
    """Spectral jets from Cauchy data against analytic jets of incident fields."""
    t0 = time.perf_counter()
    k, worst, rows = 2.0, 0.0, []
    for cname, curve in (("circle", ClosedCurve.circle(1.0)),
                         ("star", ClosedCurve.star(1.0, [0.0, 0.0, 0.1]))):
        grid = build_grid(curve, 256)
        for fname, inc in (("plane_wave", _plane(k)),
                           ("point_source", IncidentField.point_source(k, (0.1, 0.2)))):
            exact = inc.jet(grid)
            jet = build_jet(inc.cauchy(grid), grid, k)
            err = max(_rel(getattr(jet, e), getattr(exact, e)) for e in BoundaryJet.ENTRIES)
            rows.append({"curve": cname, "field": fname, "rel": err})
            worst = max(worst, err)
    ok = worst <= 1e-9 and _runtime_ok(t0, 10.0)
    return ok, {"worst_rel": worst, "cases": rows}, f"worst relative {worst:.1e} (tol 1e-9)"


def _normal_fd(grid, v, h=1e-2, levels=4):
    """Central differences of offset-curve normals with Richardson extrapolation."""
    def central(t):
        plus = build_grid(offset_curve(grid, v, t), grid.n).normal
        minus = build_grid(offset_curve(grid, v, -t), grid.n).normal
        return (plus - minus) / (2 * t)
    table = [[central(h / 2 ** i)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            f = 4.0 ** j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1))
    return table[-1][-1]


def normal_derivatives(seed=0):
    """Closed-form first variation of the normal, mixed symmetry, constant speed."""
    grid = build_grid(ClosedCurve.star(1.0, [0.0, 0.0, 0.1]), 256)
    v = NormalSpeedField([0.2, 0.0, 0.5], [0.0, 0.0, 0.3])
    fd_err = float(np.abs(_normal_fd(grid, v) - normal_shape_derivative(grid, v)).max())
    v1, v2 = NormalSpeedField.constant(1.0), NormalSpeedField.cosine(2)
    m12, _ = normal_shape_derivative(grid, v1, 2, v2)
    m21, _ = normal_shape_derivative(grid, v2, 2, v1)
    sym = float(np.abs(m12 - m21).max())
    closed = float(np.abs(m12 - mixed_normal_closed_form(grid, v1, v2)).max())
    const = float(np.abs(normal_shape_derivative(grid, NormalSpeedField.constant(1.0))).max())
    ok = fd_err <= 1e-8 and sym <= 1e-6 and const <= 1e-13
    metrics = {"first_variation_fd": fd_err, "mixed_symmetry": sym,
               "mixed_vs_closed_form": closed, "constant_speed": const}
    return ok, metrics, f"fd {fd_err:.1e}, symmetry {sym:.1e}, constant speed {const:.1e}"


_BCS = (("soft", {}), ("hard", {}), ("impedance", {"lam": 1.0}),
        ("transmission", {"alpha_int": 0.5}))


def radius_derivative_oracle(seed=0):
    """Recursion on the circle with v = 1 against radius derivatives of the series."""
    t0 = time.perf_counter()
    k = 1.0
    inc = _plane(k)
    pts = np.array([[2.0, 0.5], [-1.0, 2.5], [0.3, -3.0]])
    rows, ok = [], True
    for kind, extra in _BCS:
        bc = BoundaryCondition(kind, **extra)
        rec = shape_derivative_solve(Scene(ClosedCurve.circle(1.0), bc, k, inc),
                                     [NormalSpeedField.constant(1.0)], 2)
        ser = series_solve(1.0, bc, k, inc)
        row = {"bc": kind}
        for key, m, tol in (((0,), 1, 1e-7), ((0, 0), 2, 1e-6)):
            exact = ser.radius_derivative(m)
            err = max(_rel(rec.derivatives[key].evaluate(pts), exact.evaluate(pts)),
                      _rel(rec.derivatives[key].trace(), exact.trace()))
            row[f"order{m}_rel"] = err
            ok &= err <= tol
        rows.append(row)
    ok &= _runtime_ok(t0, 60.0)
    worst1 = max(r["order1_rel"] for r in rows)
    worst2 = max(r["order2_rel"] for r in rows)
    return ok, {"cases": rows}, f"order 1 {worst1:.1e} (tol 1e-7), order 2 {worst2:.1e} (tol 1e-6)"


TAYLOR_T = tuple(0.1 / 2 ** i for i in range(7))
SLOPE_WINDOWS = {0: (0.9, 1.3), 1: (1.9, 2.3), 2: (2.9, np.inf)}


def _ring(radius=3.0, count=8):
    th = np.linspace(0, 2 * np.pi, count, endpoint=False)
    return radius * np.c_[np.cos(th), np.sin(th)]


def taylor_cases():
    """(curve name, curve, bc kind, extra, velocity name, velocity) of the remainder sweep."""
    out = []
    for kind, extra in _BCS:
        for vname, v in (("const", NormalSpeedField.constant(1.0)),
                         ("cos2", NormalSpeedField.cosine(2))):
            out.append(("circle", ClosedCurve.circle(1.0), kind, extra, vname, v))
        if kind != "transmission":
            out.append(("star", ClosedCurve.star(1.0, [0.0, 0.0, 0.1]), kind, extra, "cos2",
                        NormalSpeedField.cosine(2)))
    return out


def slopes_ok(fits):
    """Every order's fit is reliable and its slope lies in the required window."""
    for order, (lo, hi) in SLOPE_WINDOWS.items():
        f = fits.get(order, {})
        if "slope" not in f or not f["reliable"] or not lo <= f["slope"] <= hi:
            return False
    return True


def taylor_remainder(seed=0):
    """Remainder slopes of the order 0, 1, 2 shape Taylor polynomials."""
    t0 = time.perf_counter()
    k, pts = 2.0, _ring()
    rows, ok = [], True
    for cname, curve, kind, extra, vname, v in taylor_cases():
        bc = BoundaryCondition(kind, **extra)
        rec = shape_derivative_solve(Scene(curve, bc, k, _plane(k)), [v], 2)
        study = remainder_study(rec, TAYLOR_T, pts)
        good = slopes_ok(study["fits"])
        ok &= good
        rows.append({"curve": cname, "bc": kind, "velocity": vname, "passed": good,
                     "fits": {str(o): f for o, f in study["fits"].items()}})
    ok &= _runtime_ok(t0, 600.0)
    worst2 = min(r["fits"]["2"].get("slope", -np.inf) for r in rows)
    return ok, {"cases": rows}, f"{sum(r['passed'] for r in rows)}/{len(rows)} cases, min order-2 slope {worst2:.2f}"


def mixed_remainder(seed=0):
    """Two-field remainder on the soft circle and symmetry of the mixed derivative."""
    k = 2.0
    scene = Scene(ClosedCurve.circle(1.0), BoundaryCondition("soft"), k, _plane(k))
    rec = shape_derivative_solve(scene, [NormalSpeedField.constant(1.0), NormalSpeedField.cosine(2)],
                                 2, symmetric_pairs=True)
    sym = rec.symmetry_defect(0, 1)
    study = mixed_remainder_study(rec, np.geomspace(1e-3, 5e-2, 6), _ring())
    fit = study["fit"]
    ok = fit["slope"] >= 2.8 and fit["reliable"] and sym <= 1e-7
    metrics = {"symmetry": sym, "fit": fit, "fit_all_pairs": study["fit_all_pairs"]}
    return ok, metrics, f"slope {fit['slope']:.2f} (min 2.8), symmetry {sym:.1e} (tol 1e-7)"


def symbolic_golden(seed=0):
    """Generated boundary data against the checked-in reference texts."""
    from .symbolic import GOLDEN_CASES, check_golden
    t0 = time.perf_counter()
    results = [r for name in GOLDEN_CASES for r in check_golden(name)]
    elapsed_ok = _runtime_ok(t0, 1.0)
    rows = [{"case": r.name, "dim": r.dim, "match": r.match, "missing": list(r.missing),
             "unexpected": list(r.unexpected)} for r in results]
    n_ok = sum(r.match for r in results)
    return (n_ok == len(results) and elapsed_ok, {"cases": rows},
            f"{n_ok}/{len(results)} reference texts reproduced")


def determinism(seed=0):
    """Two in-process runs of a light pipeline give byte-identical reports."""
    from .harness import RunConfig, run
    base = {"command": "derive",
            "scene": {"curve": {"star": {"a0": 1.0, "cos": [0.0, 0.0, 0.1]}}, "bc": "hard",
                      "k": 2.0, "incident": {"plane_wave": {"direction": [1.0, 0.0]}}},
            "velocities": [{"cos": [0.0, 0.0, 1.0]}], "order": 2,
            "points": [[3.0, 0.0], [0.0, -3.0]], "solver": {"n_nodes": 128}, "seed": seed}
    first = run(RunConfig.from_dict(base)).to_json()
    second = run(RunConfig.from_dict(base)).to_json()
    sym = {"command": "symbolic", "symbolic": {"bc": "neumann", "order": 2}, "seed": seed}
    s1 = run(RunConfig.from_dict(sym)).to_json()
    s2 = run(RunConfig.from_dict(sym)).to_json()
    ok = first == second and s1 == s2
    return ok, {"derive_identical": first == second, "symbolic_identical": s1 == s2}, \
        "repeated reports identical" if ok else "repeated reports differ"


SUITES = {
    "specfun": special_functions,
    "solvers": solver_crossvalidation,
    "jets": boundary_jets,
    "geometry": normal_derivatives,
    "recursion": radius_derivative_oracle,
    "taylor": taylor_remainder,
    "mixed": mixed_remainder,
    "symbolic": symbolic_golden,
    "determinism": determinism,
}


def check(name, seed=0):
    """Run one named check."""
    t0 = time.perf_counter()
    ok, metrics, summary = SUITES[name](seed=seed)
    return CheckResult(name, bool(ok), metrics, summary, time.perf_counter() - t0)


def run_suite(suite="all", seed=0, echo=None):
    """Run ``suite`` ("all" or a check name, comma-separated lists allowed)."""
    names = list(SUITES) if suite == "all" else [s.strip() for s in suite.split(",")]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {['all', *SUITES]}")
    out = []
    for name in names:
        res = check(name, seed)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
