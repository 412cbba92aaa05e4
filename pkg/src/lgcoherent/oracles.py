"""Slow, independent reference implementations used by the verification suite.

Each oracle sums the defining series term by term, either in exact rational
arithmetic or in mpmath with enough working digits to absorb cancellation.
They share no code path with :mod:`lgcoherent.specfun`.
"""

import math
from fractions import Fraction

import mpmath

__all__ = ["laguerre_series", "bessel_i_series", "bessel_j_series", "ln_gamma_series"]


def laguerre_series(p, a, x):
    """``sum_i (-1)^i C(p+a, p-i) x^i / i!`` evaluated exactly.

    With ``x = M / D`` as an exact ratio of integers, ``p! D^p L_p^a(x)`` is an
    integer polynomial in ``M`` and ``D``, so the sum is formed without rounding.
    """
    num, den = Fraction(x).as_integer_ratio()
    total = 0
    for i in range(p + 1):
        coef = (-1) ** i * math.comb(p + a, p - i) * (math.factorial(p) // math.factorial(i))
        total += coef * num**i * den ** (p - i)
    return float(Fraction(total, math.factorial(p) * den**p))


def _digits_for(mag):
    # the largest term of the J/I series is about exp(|z|); keep 30 digits beyond it
    return 30 + int(mag / 2.3) + 1


def bessel_i_series(nu, x):
    """``sum_m (x/2)^(2m+nu) / (m! (m+nu)!)`` in mpmath."""
    with mpmath.workdps(_digits_for(abs(x))):
        h = mpmath.mpf(x) / 2
        q = h * h
        term = h**nu / mpmath.factorial(nu)
        total = term
        m = 0
        while True:
            m += 1
            term = term * q / (m * (m + nu))
            total += term
            if m > q and abs(term) <= abs(total) * mpmath.mpf(10) ** (-25):
                break
        return float(total)


def bessel_j_series(nu, z):
    """``sum_m (-1)^m (z/2)^(2m+nu) / (m! (m+nu)!)`` in mpmath."""
    with mpmath.workdps(_digits_for(abs(z))):
        h = mpmath.mpc(z) / 2
        q = -h * h
        term = h**nu / mpmath.factorial(nu)
        total = term
        m = 0
        while True:
            m += 1
            term = term * q / (m * (m + nu))
            total += term
            if m > abs(q) and abs(term) <= abs(total) * mpmath.mpf(10) ** (-25):
                break
        return complex(total)


def ln_gamma_series(x):
    """``ln Gamma(x)`` from the Stirling series after shifting ``x`` above 40.

    ``ln Gamma(x) = ln Gamma(x + s) - sum_{i<s} ln(x + i)``; the asymptotic
    series at ``y >= 40`` with 20 Bernoulli terms is accurate far beyond
    double precision.
    """
    with mpmath.workdps(40):
        y = mpmath.mpf(x)
        shift = mpmath.mpf(0)
        while y < 40:
            shift += mpmath.log(y)
            y += 1
        val = (y - mpmath.mpf(1) / 2) * mpmath.log(y) - y + mpmath.log(2 * mpmath.pi) / 2
        for k in range(1, 21):
            b = mpmath.bernoulli(2 * k)
            val += b / (2 * k * (2 * k - 1) * y ** (2 * k - 1))
        return float(val - shift)
