"""Extended-precision reference values for integer-order Bessel functions.

Power series summed in mpmath arithmetic; mpmath's own Bessel routines are
not used, so this is an independent route to :mod:`shapetaylor.specfun`.
"""

import math

import mpmath as mp


def _digits(x):
    # alternating terms peak near exp(x) while the sum is O(1): pay x / ln 10 digits
    return 40 + int(1.2 * x / math.log(10))


def bessel_series(n, x):
    """``(J_n(x), Y_n(x))`` for integer ``n >= 0`` and ``x > 0`` as mpf values.

    Uses the ascending series of J_n and the Neumann series of Y_n with
    digamma values at integers, psi(m + 1) = -gamma + H_m.
    """
    n = int(n)
    if n < 0 or x <= 0:
        raise ValueError("need n >= 0 and x > 0")
    with mp.workdps(_digits(float(x))):
        x = mp.mpf(x)
        h = x / 2
        h2 = h * h
        tol = mp.mpf(10) ** (-mp.mp.dps + 5)
        # J_n
        term = h ** n / mp.factorial(n)
        j, m = mp.mpf(0), 0
        while True:
            j += term
            m += 1
            term *= -h2 / (m * (m + n))
            if abs(term) < tol * abs(j) and m > h:
                break
        # finite part of Y_n
        finite = mp.mpf(0)
        for k in range(n):
            finite += mp.factorial(n - k - 1) / mp.factorial(k) * h ** (2 * k - n)
        # digamma series of Y_n
        harm_k, harm_nk = mp.mpf(0), sum((mp.mpf(1) / i for i in range(1, n + 1)), mp.mpf(0))
        term = h ** n / mp.factorial(n)
        tail, k = mp.mpf(0), 0
        while True:
            tail += (harm_k + harm_nk - 2 * mp.euler) * term
            k += 1
            harm_k += mp.mpf(1) / k
            harm_nk += mp.mpf(1) / (n + k)
            term *= -h2 / (k * (k + n))
            if abs(term) * (harm_k + harm_nk + 1) < tol * abs(tail) and k > h:
                break
        y = (2 * j * mp.log(h) - finite - tail) / mp.pi
        return +j, +y
