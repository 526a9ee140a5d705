"""Command-line entry point ``shapetaylor``.

Exit status is 0 iff every check requested by the command passes; invalid
configurations exit with status 2.
"""

import json
import sys

import click

from .harness import ConfigError, RunConfig, load_config, run
from .symbolic import FormTypeError, UnsupportedProxyError
from .verify import SUITES


def _config(path, command, **overrides):
    tree = {}
    if path:
        tree = load_config(path).to_dict()
    tree["command"] = command
    for key, value in overrides.items():
        if value is not None:
            tree[key] = value
    return RunConfig.from_dict(tree)


def _finish(report, as_json):
    if as_json:
        click.echo(report.to_json(), nl=False)
    sys.exit(0 if report.passed else 1)


def _output(directory, formats):
    if directory is None:
        return None
    return {"directory": directory, "formats": list(formats) or ["json"]}


_common = [
    click.option("--output", "-o", "directory", type=click.Path(file_okay=False),
                 help="Directory for report.json and CSV/plot data."),
    click.option("--format", "formats", type=click.Choice(["json", "csv"]), multiple=True,
                 help="Artifact formats (repeatable; default json)."),
    click.option("--json", "as_json", is_flag=True, help="Print the report JSON to stdout."),
]


def common(f):
    for opt in reversed(_common):
        f = opt(f)
    return f


@click.group()
def main():
    """Shape derivatives and shape Taylor expansions of 2D scattering problems."""


def _guard(func):
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except (UnsupportedProxyError, FormTypeError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@common
@_guard
def solve(config, directory, formats, as_json):
    """Solve the base scattering problem described by CONFIG."""
    report = run(_config(config, "solve", output=_output(directory, formats)))
    if not as_json:
        b = report.boundary_data["base"]
        click.echo(f"trace max {b['trace_max']:.6g}, boundary residual {b['bc_residual']:.2e}")
    _finish(report, as_json)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@common
@_guard
def derive(config, directory, formats, as_json):
    """Shape-derivative data and solutions for CONFIG."""
    report = run(_config(config, "derive", output=_output(directory, formats)))
    for name, info in ([] if as_json else report.boundary_data.items()):
        click.echo(f"{name}: datum max {info['datum_max']:.6g}, field max {info['field_max']:.6g}")
    _finish(report, as_json)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@common
@_guard
def taylor(config, directory, formats, as_json):
    """Taylor remainder study for CONFIG; fails unless every slope is reliable and on order."""
    report = run(_config(config, "taylor", output=_output(directory, formats)))
    for study, body in ([] if as_json else report.remainder.items()):
        for order, fit in sorted(body["fits"].items()):
            slope = "withheld" if fit["slope"] is None else f"{fit['slope']:.3f}"
            click.echo(f"{study} order {order}: slope {slope}")
    _finish(report, as_json)


@main.command()
@click.option("--suite", default="all", show_default=True,
              help="'all' or comma-separated check names: " + ", ".join(SUITES))
@click.option("--seed", type=int, default=None, help="Seed of the randomized checks (default 0).")
@click.option("--config", "config", type=click.Path(exists=True, dir_okay=False),
              help="Optional scene with velocities for derivative norms and an FD comparison.")
@common
@_guard
def verify(suite, seed, config, directory, formats, as_json):
    """Run acceptance checks."""
    cfg = _config(config, "verify", suite=suite, seed=seed, output=_output(directory, formats))
    report = run(cfg, echo=None if as_json else click.echo)
    if not as_json:
        n_ok = sum(c["passed"] for c in report.checks)
        click.echo(f"{n_ok}/{len(report.checks)} checks passed")
    _finish(report, as_json)


@main.command()
@click.option("--bc", type=click.Choice(["dirichlet", "neumann", "impedance", "transmission"]),
              required=True)
@click.option("--order", type=int, default=2, show_default=True)
@click.option("--dim", type=int, default=2, show_default=True)
@click.option("--degree", type=int, default=0, show_default=True)
@click.option("--general-velocity/--constant-speed", default=True, show_default=True,
              help="Keep terms from varying normals (general velocity fields).")
@click.option("--framing", type=click.Choice(["scattered", "total"]), default="scattered",
              show_default=True)
@click.option("--level", type=click.Choice(["proxy", "form"]), default="proxy",
              show_default=True, help="Vector-proxy text or exterior-calculus text.")
@click.option("--ast", "ast_path", type=click.Path(dir_okay=False),
              help="Write the JSON syntax tree to this file.")
@common
@_guard
def symbolic(bc, order, dim, degree, general_velocity, framing, level, ast_path,
             directory, formats, as_json):
    """Boundary data of a shape-derivative problem in exterior calculus."""
    spec = {"bc": bc, "order": order, "dim": dim, "degree": degree,
            "general_velocity": general_velocity, "framing": framing, "level": level}
    report = run(_config(None, "symbolic", symbolic=spec, output=_output(directory, formats)))
    if ast_path:
        with open(ast_path, "w") as fh:
            json.dump(report.symbolic["ast"], fh, sort_keys=True, indent=1)
    if not as_json:
        click.echo(report.symbolic["text"])
    _finish(report, as_json)


if __name__ == "__main__":
    main()
