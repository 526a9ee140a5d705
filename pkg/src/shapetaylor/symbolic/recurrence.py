"""Boundary data of shape derivatives of any order, generated one velocity at a time.

The datum of order N is an expression in the solution derivatives
``d_[1..k] omega`` (k < N) and the incident field ``phi``. One recurrence
step along velocity ``v_{N+1}`` produces the order N+1 datum.
"""

from __future__ import annotations

from .forms import (FormTypeError, JumpPair, Vector, ZERO, add, atom, contract,
                    delta_normal, delta_omega, ext_d, hodge, hodge_boundary, jump, scale,
                    simplify, trace_d, trace_n, Jump, Sum)

BC_KINDS = ("dirichlet", "neumann", "impedance", "transmission")
FRAMINGS = ("scattered", "total")


def _sign(k):
    return -1 if k % 2 else 1


def dirichlet_operator(m, x):
    """``*G i_m * x``: tangential trace taken with normal-like vector ``m``."""
    return hodge_boundary(contract(m, hodge(x)))


def neumann_operator(m, x):
    """``*G_alpha i_m d x``: conormal trace taken with ``m``."""
    return hodge_boundary(contract(m, ext_d(x)), "alpha")


def impedance_operator(m, x):
    """Conormal trace plus ``(-1)^l i lambda i_m * x``."""
    return add(neumann_operator(m, x),
               scale(contract(m, hodge(x)), _sign(x.degree), 1))


_OPERATORS = {"dirichlet": dirichlet_operator, "neumann": neumann_operator,
              "impedance": impedance_operator}


def datum_degree(bc, dim, degree):
    """Form degree of the boundary datum for a solution of the given degree."""
    if bc == "dirichlet":
        return degree
    if bc in ("neumann", "impedance"):
        return dim - 1 - degree
    raise ValueError(f"unknown boundary condition {bc!r}")


def _check_bc(bc):
    if bc not in BC_KINDS:
        raise ValueError(f"bc must be one of {BC_KINDS}, got {bc!r}")


def initial_state(bc, dim=2, degree=0, framing="scattered"):
    """Order-0 datum.

    ``framing="scattered"`` writes the condition for the scattered field with
    the incident field as data; ``"total"`` treats ``omega`` as the total
    field, whose order-0 datum vanishes.
    """
    _check_bc(bc)
    if framing not in FRAMINGS:
        raise ValueError(f"framing must be one of {FRAMINGS}")
    if framing == "total":
        return JumpPair(ZERO, ZERO) if bc == "transmission" else ZERO
    phi = atom("phi", degree, dim)
    if bc == "dirichlet":
        return hodge_boundary(trace_d(phi))
    if bc == "neumann":
        return trace_n(phi)
    if bc == "impedance":
        return add(trace_n(phi), scale(trace_d(phi), _sign(degree), 1))
    return JumpPair(jump(hodge_boundary(trace_d(phi))), jump(trace_n(phi)))


def _step(kind, state, j, general_velocity, dim, degree):
    sol = atom("omega", degree, dim, range(1, j))
    op = _OPERATORS[kind]
    v, n = Vector.velocity(j), Vector.normal()
    if not state.is_zero and state.degree != datum_degree(kind, dim, degree):
        raise FormTypeError(
            f"{kind} datum must have degree {datum_degree(kind, dim, degree)}, got {state.degree}")
    parts = [contract(v, ext_d(state)), delta_omega(state, j),
             scale(contract(v, ext_d(op(n, sol))), -1)]
    if general_velocity:
        parts += [delta_normal(state, j), scale(op(n.varied(j), sol), -1)]
    return add(*parts)


def _unjump(e):
    if e.is_zero:
        return e
    terms = e.terms if isinstance(e, Sum) else ((1, 0, e),)
    if not all(isinstance(t, Jump) for _, _, t in terms):
        raise FormTypeError("transmission data must be jumps")
    return add(*(scale(t.child, c, p) for c, p, t in terms))


def recurrence_step(bc, state, v_next, general_velocity=False, dim=None, degree=None):
    """Datum of order N+1 from the datum of order N.

    Parameters
    ----------
    bc : {"dirichlet", "neumann", "impedance", "transmission"}
    state : FormExpr or JumpPair
        Order-N datum; for transmission a :class:`JumpPair`.
    v_next : int
        Index N+1 of the new velocity; the solution derivative entering the
        step is ``d_[1..N] omega``.
    general_velocity : bool
        Include the terms coming from the variation of the normal. Constant
        normal speed makes them vanish.
    dim, degree : int, optional
        Ambient dimension and solution degree; inferred from the atoms of a
        nonzero state.

    Returns
    -------
    FormExpr or JumpPair, unsimplified.
    """
    _check_bc(bc)
    j = int(v_next)
    if j < 1:
        raise ValueError("velocity indices start at 1")
    dim, degree = _infer(state, dim, degree)
    if bc == "transmission":
        if not isinstance(state, JumpPair):
            raise FormTypeError("transmission state must be a JumpPair")
        return JumpPair(
            jump(_step("dirichlet", _unjump(simplify(state.dirichlet)), j, general_velocity, dim, degree)),
            jump(_step("neumann", _unjump(simplify(state.neumann)), j, general_velocity, dim, degree)))
    if isinstance(state, JumpPair):
        raise FormTypeError("JumpPair state is only valid for transmission")
    return _step(bc, state, j, general_velocity, dim, degree)


def _infer(state, dim, degree):
    from .forms import atoms
    found = atoms(state)
    if found:
        a = next(iter(found))
        dim = a.dim if dim is None else dim
        degree = a.degree if degree is None else degree
        if any(x.dim != dim or x.degree != degree for x in found):
            raise FormTypeError("state atoms disagree with the requested dimension or degree")
    if dim is None or degree is None:
        raise FormTypeError("dimension and degree are needed for a zero state")
    return dim, degree


def generate(bc, order, dim=2, degree=0, general_velocity=True, framing="scattered"):
    """Simplified datum of the given order, built by repeated recurrence steps."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    state = initial_state(bc, dim, degree, framing)
    for j in range(1, order + 1):
        state = simplify(recurrence_step(bc, state, j, general_velocity, dim, degree))
    return simplify(state)
