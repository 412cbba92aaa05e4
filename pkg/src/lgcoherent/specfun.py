"""Special functions used by the closed-form coherent-state wavefunctions.

All routines accept a scalar order and a scalar or array argument and return
values of the matching shape.  Orders are restricted to the integer (or, for
:func:`bessel_i`, half-odd-integer ``+-1/2``) values the wavefunctions need.
"""

import math

import numpy as np

__all__ = [
    "SpecialFunctionError",
    "DomainError",
    "RangeError",
    "ConvergenceError",
    "assoc_laguerre",
    "bessel_i",
    "bessel_j_complex",
    "ln_gamma",
    "ln_factorial",
    "I_SERIES_CROSSOVER",
    "J_MAX_ABS",
    "J_MAX_TERMS",
]

I_SERIES_CROSSOVER = 15.0
J_MAX_ABS = 60.0
J_MAX_TERMS = 500
# Above this |z| the J power series loses more than ~e^10 * eps to cancellation.
J_SERIES_RADIUS = 10.0

_RESCALE = 1e250


class SpecialFunctionError(ArithmeticError):
    """Base class for special-function evaluation failures."""


class DomainError(SpecialFunctionError, ValueError):
    """Argument or order outside the mathematical domain."""


class RangeError(SpecialFunctionError):
    """Argument outside the documented working range."""


class ConvergenceError(SpecialFunctionError):
    """Series failed to converge within its iteration cap."""


def _check_order(name, value):
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")
    return value


def _as_real(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite")
    return x


def _scalar_out(arr, like):
    return arr[()] if np.ndim(like) == 0 else arr


def assoc_laguerre(p, a, x):
    """Associated Laguerre polynomial ``L_p^a(x)`` by upward recurrence in ``p``.

    Parameters
    ----------
    p, a : int
        Degree and order, both non-negative.
    x : float or ndarray
        Finite argument.
    """
    p = _check_order("p", p)
    a = _check_order("a", a)
    x = _as_real(x)
    prev = np.ones_like(x)
    if p == 0:
        return _scalar_out(prev, x)
    cur = 1.0 + a - x
    for k in range(1, p):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return _scalar_out(cur, x)


_EULER_GAMMA = 0.57721566490153286061
# ln Gamma vanishes at 1 and 2; within this distance a Taylor series keeps
# the relative error small where the library routine only has absolute accuracy.
_LNGAMMA_TAYLOR_RADIUS = 0.25
_LNGAMMA_TAYLOR_TERMS = 40


def _zeta(k, cut=30):
    # Euler-Maclaurin: partial sum to cut-1, then integral, midpoint and three Bernoulli corrections
    head = math.fsum(n**-k for n in range(1, cut))
    n = float(cut)
    tail = n ** (1 - k) / (k - 1) + 0.5 * n**-k
    tail += k * n ** (-k - 1) / 12.0
    tail -= k * (k + 1) * (k + 2) * n ** (-k - 3) / 720.0
    tail += k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * n ** (-k - 5) / 30240.0
    return head + tail


_ZETA = [0.0, 0.0] + [_zeta(k) for k in range(2, _LNGAMMA_TAYLOR_TERMS + 2)]


def _ln_gamma_near_one(eps):
    """``ln Gamma(1 + eps) = -gamma eps + sum_k (-eps)^k zeta(k) / k``."""
    terms = [-_EULER_GAMMA * eps]
    power = -eps
    for k in range(2, _LNGAMMA_TAYLOR_TERMS + 2):
        power *= -eps
        terms.append(_ZETA[k] * power / k)
    return math.fsum(terms)


def ln_gamma(x):
    """Natural log of the Gamma function for ``x > 0``.

    Uses :func:`math.lgamma` except near the zeros at ``x = 1`` and ``x = 2``,
    where a Taylor series about 1 preserves relative accuracy.
    """
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    if abs(x - 1.0) <= _LNGAMMA_TAYLOR_RADIUS:
        return _ln_gamma_near_one(x - 1.0)
    if abs(x - 2.0) <= _LNGAMMA_TAYLOR_RADIUS:
        eps = x - 2.0
        return math.log1p(eps) + _ln_gamma_near_one(eps)
    return math.lgamma(x)


def ln_factorial(n):
    """``ln(n!)`` for a non-negative integer ``n``."""
    n = _check_order("n", n)
    return math.lgamma(n + 1)


def _i_series(nu, x):
    # (x/2)^nu / nu! * sum (x^2/4)^m / (m! (m+nu)!); all terms positive.
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    m = 0
    while True:
        m += 1
        term = term * q / (m * (m + nu))
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    if nu == 0:
        return total
    return (0.5 * x) ** nu / math.factorial(nu) * total


def _i_miller_scaled(nu, x):
    """``exp(-x) I_nu(x)`` by backward recurrence normalised with ``exp(x) = I_0 + 2 sum I_k``."""
    xmax = float(np.max(x))
    start = nu + int(xmax) + 40 + int(4 * math.sqrt(xmax))
    start += start % 2
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    result = np.zeros_like(x)
    for k in range(start, 0, -1):
        # cur holds I_k, upper holds I_{k+1}
        if k == nu:
            result = cur.copy()
        norm = norm + 2.0 * cur
        lower = (2.0 * k / x) * cur + upper
        upper, cur = cur, lower
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            cur, upper, norm, result = cur * scale, upper * scale, norm * scale, result * scale
    if nu == 0:
        result = cur
    norm = norm + cur
    return result / norm


def bessel_i(nu, x, scaled=False):
    """Modified Bessel function of the first kind ``I_nu(x)`` for ``x >= 0``.

    Integer orders use the power series up to ``x = 15`` and Miller's backward
    recurrence beyond.  The half-odd orders ``+-1/2`` are elementary and are
    evaluated in closed form.  With ``scaled=True`` the result is
    ``exp(-x) I_nu(x)``, which stays finite for large ``x``.
    """
    x = _as_real(x)
    if np.any(x < 0):
        raise DomainError("bessel_i requires x >= 0")
    if nu in (0.5, -0.5):
        return _scalar_out(_bessel_i_half(nu, x, scaled), x)
    nu = _check_order("nu", nu)
    xs = np.atleast_1d(x)
    out = np.empty_like(xs)
    small = xs <= I_SERIES_CROSSOVER
    if np.any(small):
        vals = _i_series(nu, xs[small])
        out[small] = vals * np.exp(-xs[small]) if scaled else vals
    if np.any(~small):
        vals = _i_miller_scaled(nu, xs[~small])
        out[~small] = vals if scaled else vals * np.exp(xs[~small])
    return _scalar_out(out.reshape(x.shape), x)


def _bessel_i_half(nu, x, scaled):
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = np.sqrt(2.0 / (np.pi * x))
        if nu > 0:
            # sinh(x) = x (1 + x^2/6 + ...) keeps full precision near 0 via expm1
            body = -0.5 * np.expm1(-2.0 * x) if scaled else np.sinh(x)
        else:
            body = 0.5 * (1.0 + np.exp(-2.0 * x)) if scaled else np.cosh(x)
        out = pref * body
    return np.where(x == 0, 0.0 if nu > 0 else np.inf, out)


def _j_series(nu, z):
    q = -0.25 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    for m in range(1, J_MAX_TERMS + 1):
        term = term * q / (m * (m + nu))
        total = total + term
        ratio = np.abs(q) / ((m + 1) * (m + 1 + nu))
        if np.all((np.abs(term) <= 1e-17 * np.abs(total)) & (ratio < 0.5)):
            break
    else:
        raise ConvergenceError(f"J_{nu} series did not converge in {J_MAX_TERMS} terms")
    if nu == 0:
        return total
    return (0.5 * z) ** nu / math.factorial(nu) * total


def _j_miller(nu, z):
    # Normalise with the Jacobi-Anger sum exp(-+iz) = J_0 + 2 sum (-+i)^k J_k,
    # choosing the sign whose left-hand side has modulus >= 1.
    zmax = float(np.max(np.abs(z)))
    start = nu + int(zmax) + 40 + int(6 * zmax ** (1.0 / 3.0))
    rot = np.where(z.imag >= 0, -1j, 1j)
    quarter = (1.0, rot, -1.0, -rot)
    upper = np.zeros_like(z)
    cur = np.full_like(z, 1e-30)
    norm = np.zeros_like(z)
    result = np.zeros_like(z)
    for k in range(start, 0, -1):
        if k == nu:
            result = cur.copy()
        norm = norm + 2.0 * quarter[k % 4] * cur
        lower = (2.0 * k / z) * cur - upper
        upper, cur = cur, lower
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            cur, upper, norm, result = cur * scale, upper * scale, norm * scale, result * scale
    if nu == 0:
        result = cur
    norm = norm + cur
    return result * np.exp(rot * z) / norm


def bessel_j_complex(nu, z):
    """Bessel function of the first kind ``J_nu(z)`` for complex ``z``.

    Uses the power series inside ``|z| <= 10`` and Miller's backward
    recurrence for ``10 < |z| <= 60``.  Arguments beyond ``|z| = 60`` raise
    :class:`RangeError`.
    """
    nu = _check_order("nu", nu)
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite")
    zs = np.atleast_1d(z)
    mag = np.abs(zs)
    if np.any(mag > J_MAX_ABS):
        raise RangeError(f"|z| = {mag.max():.6g} exceeds the working range {J_MAX_ABS}")
    out = np.empty_like(zs)
    near = mag <= J_SERIES_RADIUS
    if np.any(near):
        out[near] = _j_series(nu, zs[near])
    if np.any(~near):
        out[~near] = _j_miller(nu, zs[~near])
    return _scalar_out(out.reshape(z.shape), z)
