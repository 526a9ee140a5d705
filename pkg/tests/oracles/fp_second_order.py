"""Second-order boundary data from a first-principles expansion.

Frozen output of a sympy expansion of the perturbed boundary condition on
the curve s -> x(s) + (t1 v1 + t2 v2) n(s) in curvilinear coordinates
(s, nu), with second normal derivatives eliminated by the Helmholtz
equation.  The identities hold for fields that satisfy the base and
first-order boundary conditions (they use them).  U is the total field, A and B the first shape derivatives along
v1 and v2, q = k^2 / alpha.  Jets are dicts or objects with u, u_s, ...
"""


def _get(j, name):
    return j[name] if isinstance(j, dict) else getattr(j, name)


def dirichlet(U, A, B, v1, v2, kappa, q):
    """Trace datum of delta_{v1,v2} u."""
    g = lambda j, e: _get(j, e)
    return (-g(A, "u_n") * v2 - g(B, "u_n") * v1
            + v1 * v2 * (q * g(U, "u") + kappa * g(U, "u_n") + g(U, "u_ss")))


def robin(U, A, B, v1, v2, v1s, v2s, kappa, kappa_s, q, alpha, beta):
    """``alpha d_n C + beta C`` for the mixed derivative C = delta_{v1,v2} u."""
    g = lambda j, e: _get(j, e)
    cross = v1 * v2s + v1s * v2
    a_part = (q * (v2 * g(A, "u") + v1 * g(B, "u"))
              + v2s * g(A, "u_s") + v2 * g(A, "u_ss")
              + v1s * g(B, "u_s") + v1 * g(B, "u_ss")
              + q * v1 * v2 * (kappa * g(U, "u") + g(U, "u_n"))
              - kappa * cross * g(U, "u_s") - kappa_s * v1 * v2 * g(U, "u_s")
              - kappa * v1 * v2 * g(U, "u_ss")
              + v1 * v2 * g(U, "u_nss") + cross * g(U, "u_ns"))
    b_part = (-kappa * (v2 * g(A, "u") + v1 * g(B, "u"))
              - v2 * g(A, "u_n") - v1 * g(B, "u_n")
              + q * v1 * v2 * g(U, "u") - v1s * v2s * g(U, "u")
              - kappa * v1 * v2 * g(U, "u_n") + v1 * v2 * g(U, "u_ss"))
    return alpha * a_part + beta * b_part
