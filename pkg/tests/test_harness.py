import csv
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shapetaylor import symbolic as sy
from shapetaylor.convergence import InsufficientDataError, fit_order
from shapetaylor.geometry import NormalSpeedField
from shapetaylor.harness import (ConfigError, RunConfig, StudyReport, fd_oracle, load_config,
                                 richardson_table, run)
from shapetaylor.recursion import shape_derivative_solve

CIRCLE = {"curve": {"circle": 1.0}, "bc": "soft", "k": 2.0,
          "incident": {"plane_wave": {"direction": [1.0, 0.0]}}}
POINTS = [[2.0, 0.5], [-1.5, 1.8]]


def config(**kw):
    tree = {"command": "derive", "scene": dict(CIRCLE), "velocities": [{"const": 1.0}],
            "order": 2, "points": POINTS, "solver": {"n_nodes": 64}}
    tree.update(kw)
    return tree


# ---- configuration

@pytest.mark.parametrize("patch, path", [
    ({"bogus": 1}, "bogus"),
    ({"command": "fly"}, "command"),
    ({"order": 3}, "order"),
    ({"t_values": [0.1, -0.1]}, "t_values[1]"),
    ({"points": [[1.0]]}, "points[0]"),
    ({"points": [[1.0, float("nan")]]}, "points[0][1]"),
    ({"velocities": []}, "velocities"),
    ({"velocities": [{"cos": [0.1, "x"]}]}, "velocities[0].cos[1]"),
    ({"solver": {"n_nodes": 4}}, "solver.n_nodes"),
    ({"solver": {"backend": "fem"}}, "solver.backend"),
    ({"output": {"formats": ["xml"]}}, "output.formats"),
    ({"scene": {**CIRCLE, "k": 0.0}}, "scene.k"),
    ({"scene": {**CIRCLE, "k": float("inf")}}, "scene.k"),
    ({"scene": {**CIRCLE, "bc": "wet"}}, "scene.bc"),
    ({"scene": {**CIRCLE, "extra": 1}}, "scene.extra"),
    ({"scene": {**CIRCLE, "curve": {"star": {"a0": 1.0, "cos": [0, 0, 0.1]}},
                "bc": "transmission"}}, "scene.bc"),
    ({"scene": {**CIRCLE, "incident": {"point_source": {}}}}, "scene.incident.point_source.location"),
    ({"scene": {**CIRCLE, "incident": {"laser": {}}}}, "scene.incident"),
    ({"scene": {k: v for k, v in CIRCLE.items() if k != "k"}}, "scene.k"),
    ({"symbolic": {"bc": "robin"}}, "symbolic.bc"),
])
def test_config_errors_name_the_field(patch, path):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_dict(config(**patch))
    assert info.value.path == path
    assert str(info.value).startswith(path + ":")


def test_taylor_needs_four_t_values():
    with pytest.raises(ConfigError, match="t_values"):
        RunConfig.from_dict(config(command="taylor", t_values=[0.1, 0.05, 0.02]))


def test_config_echo_round_trips():
    cfg = RunConfig.from_dict(config())
    tree = cfg.to_dict()
    assert RunConfig.from_dict(tree).to_dict() == tree
    assert json.loads(json.dumps(tree)) == tree


def test_load_yaml_and_json(tmp_path):
    import yaml
    tree = config()
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(tree))
    (tmp_path / "c.json").write_text(json.dumps(tree))
    a = load_config(tmp_path / "c.yaml").to_dict()
    b = load_config(tmp_path / "c.json").to_dict()
    assert a == b == RunConfig.from_dict(tree).to_dict()
    (tmp_path / "bad.yaml").write_text("scene: [unclosed")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")


# ---- convergence fits

def test_fit_order_exact_power():
    t = 0.1 / 2 ** np.arange(6)
    f = fit_order(t, 3.0 * t ** 2)
    assert abs(f["slope"] - 2) < 1e-9 and f["reliable"]


def test_fit_order_with_noise():
    rng = np.random.default_rng(0)
    t = 0.1 / 2 ** np.arange(7)
    f = fit_order(t, t ** 3 + 1e-13 * rng.random(7))
    assert 2.9 <= f["slope"] <= 3.1


def test_fit_order_needs_data():
    with pytest.raises(InsufficientDataError):
        fit_order([0.1, 0.05, 0.02], [1e-2, 1e-3, 1e-4])
    with pytest.raises(InsufficientDataError):
        fit_order([0.1, 0.05, 0.02, 0.01], [1e-2, 1e-14, 1e-15, 1e-16])


@given(st.floats(0.5, 4.0), st.floats(1e-3, 1e3))
def test_fit_order_recovers_slope(p, c):
    t = 0.2 / 2 ** np.arange(6)
    assert abs(fit_order(t, c * t ** p)["slope"] - p) < 1e-8


def test_slope_withheld_for_scattered_errors(tmp_path):
    report = run(config(command="taylor", t_values=[0.1, 0.05, 0.025, 0.0125],
                        velocities=[{"const": 0.0}]))
    fits = report.remainder["single"]["fits"]
    assert all(f["slope"] is None for f in fits.values())
    assert not report.passed


# ---- finite differences

def test_richardson_polynomial_exact():
    est = richardson_table(lambda h: np.array([1.0 + h ** 2 + h ** 4]), 0.1, levels=3, tol=1e-4)
    assert abs(est.estimate[0] - 1.0) < 1e-12 and not est.inconclusive


def test_richardson_flags_divergence():
    est = richardson_table(lambda h: np.array([np.sin(1 / h)]), 0.1, levels=3)
    assert est.inconclusive


@pytest.fixture(scope="module")
def soft_circle():
    return RunConfig.from_dict(config()).build_scene()


def test_fd_oracle_zero_velocity(soft_circle):
    fd = fd_oracle(soft_circle, NormalSpeedField.constant(0.0), points=POINTS)
    assert np.abs(fd.estimate).max() == 0.0


def test_fd_oracle_radius_derivative(soft_circle):
    v = NormalSpeedField.constant(1.0)
    rec = shape_derivative_solve(soft_circle, [v], order=1)
    fd = fd_oracle(soft_circle, v, 1e-3, 2, POINTS)
    assert np.abs(fd.estimate - rec.derivatives[(0,)].evaluate(np.array(POINTS))).max() <= 1e-6


def test_fd_oracle_mixed_with_zero_second_velocity(soft_circle):
    fd = fd_oracle(soft_circle, NormalSpeedField.constant(1.0), 1e-2, 1, POINTS,
                   v2=NormalSpeedField.constant(0.0))
    assert np.abs(fd.estimate).max() < 1e-12


# ---- pipelines and reports

def test_taylor_example_slopes():
    report = run(config(command="taylor"))
    fits = report.remainder["single"]["fits"]
    assert report.passed
    assert fits["2"]["slope"] >= 2.9 and fits["1"]["slope"] >= 1.9 and fits["0"]["slope"] >= 0.9


def test_taylor_mixed_study():
    report = run(config(command="taylor", velocities=[{"const": 1.0}, {"cos": [0.0, 0.0, 0.3]}],
                        t_values=[0.05, 0.025, 0.0125, 0.00625]))
    assert report.remainder["mixed"]["fits"]["2"]["slope"] >= 2.8


def test_symbolic_pipeline_matches_reference_text():
    report = run({"command": "symbolic", "symbolic": {"bc": "dirichlet", "order": 2}})
    assert report.symbolic["text"] == sy.golden_text("acoustic_dirichlet")
    assert report.passed


def test_verify_zero_velocity_norms():
    report = run({"command": "verify", "suite": "specfun", "scene": CIRCLE, "order": 2,
                  "velocities": [{"const": 0.0}], "solver": {"n_nodes": 64}})
    assert report.passed
    assert all(v["datum_max"] == 0 and v["trace_max"] == 0 for v in report.boundary_data.values())


def test_verify_with_fd_comparison():
    report = run({"command": "verify", "suite": "specfun", "scene": CIRCLE, "order": 1,
                  "velocities": [{"const": 1.0}], "points": POINTS, "solver": {"n_nodes": 64}})
    rows = report.oracle["first_order_fd"]
    assert report.passed and rows[0]["agree"] and not rows[0]["inconclusive"]


def test_written_artifacts(tmp_path):
    report = run(config(command="taylor", output={"directory": str(tmp_path),
                                                  "formats": ["json", "csv"]}))
    assert json.loads((tmp_path / "report.json").read_text())["passed"] is True
    assert "total" in json.loads((tmp_path / "timings.json").read_text())
    with (tmp_path / "d1_datum.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "theta_or_x", "theta_or_y", "re", "im"]
    assert len(rows) == 65 and float(rows[1][1]) == 0.0
    text = (tmp_path / "remainder_single.csv").read_text().splitlines()
    assert text[0].startswith("# order 0: slope")
    assert "t,order,error" in text
    assert set(report.tables) >= {"scattered", "d1_datum", "d1_field", "d11_datum", "d11_field"}


def test_report_json_is_deterministic():
    a = run(config()).to_json()
    b = run(config()).to_json()
    assert a == b
    assert "timings" not in json.loads(a)


def test_report_rounding():
    r = StudyReport("solve", {}, tables={"x": [[0, 0.1 + 0.2, 1 / 3, 1e-17, float("nan")]]})
    assert r.as_dict()["tables"]["x"][0] == [0, 0.3, 0.333333, 1e-17, "nan"]


def test_geometry_error_names_command():
    from shapetaylor.geometry import GeometryError
    tree = config(command="solve", scene={**CIRCLE, "curve": {"circle": 0.0}})
    with pytest.raises(GeometryError, match="^solve: "):
        run(tree)
