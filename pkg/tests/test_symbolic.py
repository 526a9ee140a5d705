import json

import pytest
from hypothesis import assume, given, strategies as st

from shapetaylor import symbolic as sy
from shapetaylor.symbolic import (BC_KINDS, FormTypeError, UnsupportedProxyError, Vector,
                                  ZERO, add, atom, contract, ext_d, hodge, hodge_boundary,
                                  render_canonical, render_form, scale, simplify,
                                  to_vector_proxy, trace_d, trace_n, wedge)

v1, v2 = Vector.velocity(1), Vector.velocity(2)


# ---- rewriting rules

def test_contraction_over_wedge_sign():
    a, b = atom("omega", 1, 3), atom("rho", 1, 3)
    got = simplify(contract(v1, wedge(a, b)))
    want = simplify(add(wedge(contract(v1, a), b), scale(wedge(a, contract(v1, b)), -1)))
    assert got == want
    assert render_form(got) == "+ (i_{v_1} omega ^ rho)\n- (omega ^ i_{v_1} rho)"


def test_exterior_derivative_twice_vanishes():
    assert simplify(ext_d(ext_d(atom("omega", 0, 3)))) == ZERO


def test_double_contraction_vanishes():
    assert simplify(contract(v1, contract(v1, atom("omega", 2, 3)))) == ZERO


def test_degree_errors():
    with pytest.raises(FormTypeError):
        add(atom("omega", 1, 3), atom("omega", 2, 3))
    with pytest.raises(FormTypeError):
        atom("omega", 4, 3)


def test_annihilation_by_degree():
    assert wedge(atom("omega", 2, 3), atom("rho", 2, 3)).is_zero
    assert contract(v1, atom("omega", 0, 3)).is_zero
    assert ext_d(atom("omega", 3, 3)).is_zero


# random well-typed expressions in d = 3
_UNARY = {"d": ext_d, "i1": lambda x: contract(v1, x), "i2": lambda x: contract(v2, x),
          "in": lambda x: contract(Vector.normal(), x), "star": hodge,
          "stara": lambda x: hodge(x, "alpha")}


@st.composite
def forms(draw, depth=3):
    x = atom(draw(st.sampled_from(["omega", "phi", "rho"])), draw(st.integers(0, 3)), 3)
    for _ in range(draw(st.integers(0, depth))):
        if x.is_zero:
            break
        choice = draw(st.sampled_from(sorted(_UNARY) + ["wedge", "sum"]))
        try:
            if choice == "wedge":
                x = wedge(x, atom("rho", draw(st.integers(0, 3 - x.degree)), 3))
            elif choice == "sum":
                x = add(x, scale(atom("phi", x.degree, 3), draw(st.integers(-2, 2)), draw(st.integers(0, 1))))
            else:
                x = _UNARY[choice](x)
        except FormTypeError:
            pass
    assume(not x.is_zero)
    return x


@given(forms())
def test_simplify_idempotent(e):
    s = simplify(e)
    assert simplify(s) == s


@given(forms())
def test_degree_of_operators(e):
    s = simplify(e)
    assume(not s.is_zero)
    d = simplify(ext_d(s))
    assert d.is_zero or d.degree == s.degree + 1
    c = simplify(contract(v1, s))
    assert c.is_zero or c.degree == s.degree - 1
    assert hodge(s).degree == 3 - s.degree


@given(forms(), forms())
def test_exterior_derivative_leibniz(a, b):
    assume(a.degree + b.degree <= 3)
    lhs = simplify(ext_d(wedge(a, b)))
    rhs = simplify(add(wedge(ext_d(a), b), scale(wedge(a, ext_d(b)), (-1) ** a.degree)))
    assert lhs == rhs


@given(forms())
def test_json_round_trip(e):
    s = simplify(e)
    assert sy.from_json(json.loads(json.dumps(sy.to_json(s)))) == s


@given(forms())
def test_cartan_rewrite_is_equivalent(e):
    e = contract(v1, ext_d(e))
    assert sy.cartan_equivalent(sy.cartan_rewrite(e), e)


# ---- recurrence

@pytest.mark.parametrize("bc", BC_KINDS)
@pytest.mark.parametrize("dim, degree", [(2, 0), (3, 0), (3, 1), (3, 2)])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_constant_speed_specialization(bc, dim, degree, order):
    general = sy.generate(bc, order, dim, degree, general_velocity=True)
    const = sy.generate(bc, order, dim, degree, general_velocity=False)
    assert simplify(sy.drop_normal_variations(general)) == simplify(const)


@pytest.mark.parametrize("bc", ["dirichlet", "neumann", "impedance"])
@pytest.mark.parametrize("dim, degree", [(2, 0), (3, 1)])
def test_datum_degree_preserved(bc, dim, degree):
    state = simplify(sy.generate(bc, 3, dim, degree))
    assert state.is_zero or state.degree == sy.datum_degree(bc, dim, degree)


def test_first_order_dirichlet_constant_speed():
    state = sy.generate("dirichlet", 1, 2, 0, general_velocity=False)
    assert render_form(sy.expand_traces(state)) == (
        "- i_{v_1} d *G i_{n} * omega\n+ i_{v_1} d *G i_{n} * phi")


@pytest.mark.parametrize("name", [n for n in sy.GOLDEN_CASES if n.startswith("first_order")
                                  and n != "first_order_impedance_l1"])
def test_first_order_references(name):
    assert all(r.match for r in sy.check_golden(name))


@pytest.mark.parametrize("name", ["acoustic_dirichlet", "maxwell_dirichlet", "maxwell_neumann",
                                  "maxwell_transmission"])
def test_second_order_references(name):
    assert all(r.match for r in sy.check_golden(name))


# reference texts whose printed signs disagree with the recurrence (see README);
# the generated data differ from them only by the sign of these terms
SIGN_CONFLICTS = {
    "acoustic_neumann": ["alpha (nabla d_1 u . d_2 n) n", "alpha (nabla d_2 u . d_1 n) n",
                         "alpha (nabla phi . d_12 n) n", "alpha (nabla u . d_12 n) n"],
    "maxwell_impedance": ["i lambda curl_1 (d_2 n x E)", "i lambda curl_1 (d_2 n x Phi)",
                          "i lambda curl_2 (d_1 n x E)", "i lambda curl_2 (d_1 n x Phi)"],
    "first_order_impedance_l1": ["i_{v_1} d *G_alpha i_{n} d omega",
                                 "i lambda i_{v_1} d i_{n} * omega"],
}
SIGN_CONFLICTS["acoustic_impedance"] = SIGN_CONFLICTS["acoustic_neumann"]
SIGN_CONFLICTS["acoustic_transmission"] = [f"[{t}]" for t in SIGN_CONFLICTS["acoustic_neumann"]]


def _flip(line):
    return ("- " if line.startswith("+ ") else "+ ") + line[2:]


@pytest.mark.parametrize("name", sorted(SIGN_CONFLICTS))
def test_reference_conflicts_are_sign_flips_only(name):
    for r in sy.check_golden(name):
        assert not r.match
        assert sorted(_flip(l) for l in r.missing) == sorted(r.unexpected)
        bodies = sorted(l[2:] for l in r.missing)
        for body in bodies:
            assert any(body.endswith(t) for t in SIGN_CONFLICTS[name]), body
        assert len(bodies) == len(SIGN_CONFLICTS[name])


# ---- proxies and rendering

def test_neumann_trace_proxy_maxwell():
    assert render_canonical(to_vector_proxy(trace_n(atom("omega", 1, 3)), 3, 1)) == \
        "- n x n x alpha nabla x E"


def test_contraction_proxy_of_two_form():
    assert render_canonical(to_vector_proxy(contract(v1, atom("omega", 2, 3)), 3, 2)) == "+ u x v_1"


def test_dirichlet_trace_proxy_scalar():
    assert render_canonical(to_vector_proxy(trace_d(atom("omega", 0, 2)), 2, 0)) == "+ u n"
    assert render_canonical(to_vector_proxy(hodge_boundary(trace_d(atom("omega", 0, 2))), 2, 0)) == "+ u"


def test_zero_renders_as_zero():
    assert render_canonical(to_vector_proxy(ZERO, 2, 0)) == "0"
    assert render_form(ZERO) == "0"


def test_sound_soft_second_order_text():
    _, text, _ = sy.derive("dirichlet", 2, 2, 0)
    assert text.splitlines() == ["- grad_1 d_2 u", "- grad_2 d_1 u", "- grad_2 grad_1 phi",
                                 "- grad_2 grad_1 u"]


def test_pmc_is_pec_with_substitution():
    import re
    _, pec, _ = sy.derive("dirichlet", 2, 3, 1)
    _, pmc, _ = sy.derive("neumann", 2, 3, 1)
    sub = re.sub(r"\b(d_\d+ |d_\d\d )?(E|Phi)\b", lambda m: f"alpha nabla x {m.group(0)}", pec)
    assert sy.canonical_text(sub) == pmc


def test_unsupported_proxy():
    with pytest.raises(UnsupportedProxyError):
        sy.derive("neumann", 1, 2, 1)
    with pytest.raises(UnsupportedProxyError):
        to_vector_proxy(atom("omega", 0, 4), 4, 0)


def test_canonical_text_sorting_and_sections():
    text = "# comment\ndirichlet:\n+ b\n- a\nneumann:\n+ c\n"
    assert sy.canonical_text(text) == "dirichlet:\n- a\n+ b\nneumann:\n+ c"


@pytest.mark.parametrize("bc", ["dirichlet", "neumann", "impedance"])
def test_reduction_to_jets_matches_numeric_formulas(bc):
    from shapetaylor.recursion import FIRST_ORDER_FORMULAS
    kind = {"dirichlet": "soft", "neumann": "hard", "impedance": "impedance"}[bc]
    state = sy.generate(bc, 1, 2, 0, general_velocity=True)
    text = sy.reduce_scalar_datum(to_vector_proxy(state, 2, 0))
    assert text == FIRST_ORDER_FORMULAS[kind]


def test_generation_is_fast():
    import time
    t0 = time.perf_counter()
    for name in sy.GOLDEN_CASES:
        sy.check_golden(name)
    assert time.perf_counter() - t0 < 1.0
