"""Symbolic generation of shape-derivative boundary data in exterior calculus.

Typical use::

    from shapetaylor import symbolic as sy
    state = sy.generate("neumann", order=2, dim=2, degree=0)
    print(sy.render_canonical(sy.to_vector_proxy(state, 2, 0)))
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .forms import (ATOM_NAMES, METRICS, ZERO, Contract, ExtD, FormAtom, FormExpr, FormTypeError,
                    Hodge, HodgeBoundary, Jump, JumpPair, Sum, TraceD, TraceN, Vector, Wedge, add,
                    atom, cartan_equivalent, cartan_expand, cartan_rewrite, contract, delta_normal,
                    delta_omega, drop_normal_variations, expand_traces, ext_d, from_json, hodge,
                    hodge_boundary, jump, render_form, scale, simplify, to_json, trace_d, trace_n,
                    wedge)
from .proxy import (ProxyPair, UnsupportedProxyError, VectorExpr, VSum, canonical_text,
                    proxy_json, render_canonical, to_vector_proxy)
from .recurrence import (BC_KINDS, FRAMINGS, datum_degree, generate, initial_state,
                         recurrence_step)
from .reduce import evaluate_reduced, reduce_scalar_datum

__all__ = [
    "ATOM_NAMES", "BC_KINDS", "FRAMINGS", "METRICS", "ZERO", "Contract", "ExtD", "FormAtom",
    "FormExpr", "FormTypeError", "Hodge", "HodgeBoundary", "Jump", "JumpPair", "ProxyPair", "Sum",
    "TraceD", "TraceN", "UnsupportedProxyError", "VSum", "Vector", "VectorExpr", "Wedge", "add",
    "atom", "canonical_text", "cartan_equivalent", "cartan_expand", "cartan_rewrite", "contract",
    "datum_degree", "delta_normal", "delta_omega", "drop_normal_variations", "evaluate_reduced",
    "expand_traces", "ext_d", "from_json", "generate", "hodge", "hodge_boundary", "initial_state",
    "jump", "proxy_json", "recurrence_step", "reduce_scalar_datum", "render_canonical",
    "render_form", "scale", "simplify", "to_json", "to_vector_proxy", "trace_d", "trace_n",
    "wedge", "GOLDEN_CASES", "GoldenResult", "check_golden", "derive", "golden_text",
]


def derive(bc, order, dim=2, degree=0, general_velocity=True, framing="scattered", level="proxy"):
    """Generate a datum and return ``(state, text, json_ast)``.

    ``level="proxy"`` renders Euclidean vector proxies; ``level="form"``
    renders the form expression with trace shorthands expanded.
    """
    state = generate(bc, order, dim, degree, general_velocity, framing)
    if level == "proxy":
        proxy = to_vector_proxy(state, dim, degree)
        text = render_canonical(proxy)
        payload = {"form": to_json(state), "proxy": proxy_json(proxy)}
    elif level == "form":
        text = render_form(expand_traces(state))
        payload = {"form": to_json(state)}
    else:
        raise ValueError("level must be 'proxy' or 'form'")
    return state, text, payload


_SECOND = dict(order=2, general_velocity=True, framing="scattered", level="proxy")
GOLDEN_CASES = {
    "acoustic_dirichlet": dict(bc="dirichlet", degree=0, dims=(2, 3), **_SECOND),
    "acoustic_neumann": dict(bc="neumann", degree=0, dims=(2, 3), **_SECOND),
    "acoustic_impedance": dict(bc="impedance", degree=0, dims=(2, 3), **_SECOND),
    "acoustic_transmission": dict(bc="transmission", degree=0, dims=(2, 3), **_SECOND),
    "maxwell_dirichlet": dict(bc="dirichlet", degree=1, dims=(3,), **_SECOND),
    "maxwell_neumann": dict(bc="neumann", degree=1, dims=(3,), **_SECOND),
    "maxwell_impedance": dict(bc="impedance", degree=1, dims=(3,), **_SECOND),
    "maxwell_transmission": dict(bc="transmission", degree=1, dims=(3,), **_SECOND),
    "first_order_dirichlet": dict(bc="dirichlet", order=1, degree=0, dims=(2,),
                                  general_velocity=False, framing="scattered", level="form"),
    "first_order_neumann": dict(bc="neumann", order=1, degree=0, dims=(2,),
                                general_velocity=True, framing="scattered", level="form"),
    "first_order_impedance_l0": dict(bc="impedance", order=1, degree=0, dims=(2,),
                                     general_velocity=False, framing="total", level="form"),
    "first_order_impedance_l1": dict(bc="impedance", order=1, degree=1, dims=(3,),
                                     general_velocity=False, framing="total", level="form"),
    "first_order_transmission": dict(bc="transmission", order=1, degree=0, dims=(2,),
                                     general_velocity=False, framing="total", level="form"),
}


def golden_text(name):
    """Canonical text of a checked-in reference datum."""
    path = resources.files("shapetaylor") / "data" / "golden" / f"{name}.txt"
    return canonical_text(path.read_text())


@dataclass(frozen=True)
class GoldenResult:
    name: str
    dim: int
    match: bool
    missing: tuple
    unexpected: tuple

    def summary(self):
        if self.match:
            return f"{self.name} (d={self.dim}): match"
        return (f"{self.name} (d={self.dim}): {len(self.missing)} reference lines missing, "
                f"{len(self.unexpected)} generated lines unexpected")


def check_golden(name):
    """Compare generated data against a reference file for every listed dimension."""
    case = dict(GOLDEN_CASES[name])
    expected = golden_text(name)
    out = []
    for dim in case.pop("dims"):
        _, produced, _ = derive(case["bc"], case["order"], dim, case["degree"],
                                case["general_velocity"], case["framing"], case["level"])
        exp_lines, got_lines = expected.splitlines(), produced.splitlines()
        out.append(GoldenResult(
            name, dim, produced == expected,
            tuple(l for l in exp_lines if l not in got_lines),
            tuple(l for l in got_lines if l not in exp_lines)))
    return out
