"""Closed-form Laguerre-Gauss coherent-state wavefunctions.

All evaluators take polar coordinates ``(r, phi)`` in the dimensionless
oscillator units (``r`` scalar or array, ``r >= 0``) and return complex
values of the same shape.  Coefficients are combined in log space so that
large azimuthal orders or long series neither overflow nor underflow early.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .field import sample
from .specfun import assoc_laguerre, bessel_i, bessel_j_complex, ln_factorial, ln_gamma

__all__ = [
    "Family",
    "LGIndex",
    "CoherentParam",
    "StateSpec",
    "StateError",
    "ConsistencyError",
    "TruncationError",
    "lg_mode",
    "hw_coherent",
    "radial_displacement",
    "su2_gp",
    "envelope_waist",
    "su11_gp",
    "su11_bg",
    "sub_indices",
    "su11_gp_sub",
    "su11_bg_sub",
    "series_terms",
    "evaluate",
    "state_field",
    "evolve",
    "DEFAULT_TOL",
    "MAX_SERIES_TERMS",
]

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-8
MAX_SERIES_TERMS = 400
_LN_SQRT_PI = 0.5 * math.log(math.pi)


class StateError(ValueError):
    """Invalid state parameters."""


class ConsistencyError(StateError):
    """The (n, k, sign, m) combination does not map to a valid LG index."""


class TruncationError(ArithmeticError):
    """A coherent-state series could not be certified within the term cap."""


class Family(enum.Enum):
    LG = "lg"
    HW = "hw"
    SU2_GP = "su2gp"
    SU11_GP = "su11gp"
    SU11_BG = "su11bg"
    SU11_GP_SUB = "su11gpsub"
    SU11_BG_SUB = "su11bgsub"


@dataclass(frozen=True)
class LGIndex:
    p: int
    l: int  # noqa: E741

    def __post_init__(self):
        if int(self.p) != self.p or int(self.l) != self.l:
            raise StateError(f"LG indices must be integers, got p={self.p!r}, l={self.l!r}")
        if self.p < 0:
            raise StateError(f"radial number p must be >= 0, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "l", int(self.l))


def _reduce_angle(theta):
    theta = math.fmod(float(theta), TWO_PI)
    if theta < 0:
        theta += TWO_PI
    return 0.0 if theta >= TWO_PI else theta


@dataclass(frozen=True)
class CoherentParam:
    """Polar coherent parameter ``zeta * exp(i theta)``; ``theta`` is kept in ``[0, 2 pi)``."""

    zeta: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and math.isfinite(self.theta)):
            raise StateError("coherent parameter must be finite")
        if self.zeta < 0:
            raise StateError(f"zeta must be >= 0, got {self.zeta}")
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "theta", _reduce_angle(self.theta))

    @property
    def value(self):
        return self.zeta * complex(math.cos(self.theta), math.sin(self.theta))

    @classmethod
    def from_complex(cls, z):
        return cls(abs(z), math.atan2(z.imag, z.real))


def _half_integer(name, value, minimum):
    twice = round(2 * value)
    if not math.isclose(2 * value, twice, abs_tol=1e-12) or twice < 2 * minimum:
        raise StateError(f"{name} must be a half-integer >= {minimum}, got {value!r}")
    return twice


def _check_sign(sign):
    if sign not in (1, -1):
        raise StateError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def _check_sub_k(k):
    if k not in (0.25, 0.75):
        raise StateError(f"subspace Bargmann parameter must be 1/4 or 3/4, got {k!r}")


@dataclass(frozen=True)
class StateSpec:
    """One coherent-state family together with its labels.

    Only the labels relevant to ``family`` are consulted: ``lg`` for LG,
    ``sign`` for HW and the SU(1,1) families, ``j`` for SU(2), ``k`` for the
    SU(1,1) families and ``n`` for the circular-excitation subspaces.
    """

    family: Family
    param: CoherentParam = CoherentParam()
    sign: int = 1
    j: float = 0.0
    k: float = 0.5
    n: int = 0
    lg: LGIndex = LGIndex(0, 0)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        _check_sign(self.sign)
        if fam is Family.SU2_GP:
            _half_integer("j", self.j, 0)
            if self.param.zeta > math.pi:
                raise StateError(f"SU(2) amplitude zeta must lie in [0, pi], got {self.param.zeta}")
        elif fam in (Family.SU11_GP, Family.SU11_BG):
            _half_integer("k", self.k, 0.5)
        elif fam in (Family.SU11_GP_SUB, Family.SU11_BG_SUB):
            _check_sub_k(self.k)
            if int(self.n) != self.n or self.n < 0:
                raise StateError(f"circular excitation number n must be an integer >= 0, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))

    def label(self):
        fam = self.family
        z, t = self.param.zeta, self.param.theta
        if fam is Family.LG:
            return f"lg p={self.lg.p} l={self.lg.l}"
        parts = [fam.value]
        if fam is Family.SU2_GP:
            parts.append(f"j={self.j:g}")
        if fam in (Family.SU11_GP, Family.SU11_BG, Family.SU11_GP_SUB, Family.SU11_BG_SUB):
            parts.append(f"k={self.k:g}")
        if fam in (Family.SU11_GP_SUB, Family.SU11_BG_SUB):
            parts.append(f"n={self.n}")
        if fam is not Family.SU2_GP:
            parts.append(f"sign={'+' if self.sign > 0 else '-'}")
        parts.append(f"zeta={z:g} theta={t:.6g}")
        return " ".join(parts)


# -- radial helpers ----------------------------------------------------------

_UNIQUE_CACHE = []


def _unique_radii(r):
    """Unique radii and the inverse map; cached for read-only grid arrays."""
    if not r.flags.writeable:
        for cached, u, inv in _UNIQUE_CACHE:
            if cached is r:
                return u, inv
    u, inv = np.unique(r, return_inverse=True)
    inv = inv.reshape(r.shape)
    if not r.flags.writeable:
        _UNIQUE_CACHE.insert(0, (r, u, inv))
        del _UNIQUE_CACHE[4:]
    return u, inv


def _reduce(r):
    """Distinct radii and the map back to ``r`` (identity for small inputs)."""
    if r.ndim == 0 or r.size < 4096:
        return r, None
    return _unique_radii(r)


def _expand(vals, inv):
    return vals if inv is None else vals[inv]


def _radial(fn, r):
    """Evaluate a function of ``r`` only once per distinct radius."""
    u, inv = _reduce(r)
    return _expand(fn(u), inv)


def _xlog(power, x):
    """``power * log(x)`` with ``0 * log(0) = 0``."""
    if power == 0:
        return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
    with np.errstate(divide="ignore"):
        return power * np.log(x)


def _lg_radial(p, a, log_coef, r):
    """``exp(log_coef) * r^a * exp(-r^2/2) * L_p^a(r^2)`` for ``r >= 0``."""
    expo = log_coef + _xlog(a, r) - 0.5 * r * r
    return np.exp(expo) * assoc_laguerre(p, a, r * r)


def _lg_log_norm(p, l):  # noqa: E741
    return 0.5 * (ln_factorial(p) - ln_factorial(p + abs(l))) - _LN_SQRT_PI


def _prep(r, phi):
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(r < 0):
        raise StateError("radius must be non-negative")
    return r, phi


def _out(val, r, phi):
    return val[()] if np.ndim(r) == 0 and np.ndim(phi) == 0 else val


def _sum_lg(terms, r, phi):
    """Sum ``gamma * LG_{p,l}(r, phi)`` over ``terms = [(p, l, log|gamma|, arg gamma), ...]``.

    Radial parts sharing an azimuthal order are combined on the distinct
    radii first; the orders are then summed by Horner's rule in
    ``exp(i d phi)``, ``d`` being the gcd of the order spacings.
    """
    shape = np.broadcast(r, phi).shape
    if not terms:
        return np.zeros(shape, dtype=complex)
    u, inv = _reduce(r)
    by_l = {}
    for p, l, log_mag, arg in terms:  # noqa: E741
        radial = _lg_radial(p, abs(l), log_mag + _lg_log_norm(p, l), u)
        coef = complex(math.cos(arg), math.sin(arg)) * (-1 if p % 2 else 1)
        by_l[l] = by_l.get(l, 0) + coef * radial
    orders = sorted(by_l)
    lo = orders[0]
    step = 0
    for l in orders[1:]:  # noqa: E741
        step = math.gcd(step, l - lo)
    if step and step % 2 == 0 and _is_symmetric_grid(r, phi):
        return _sum_quadrants(by_l, orders, step, inv, phi)
    return _horner(by_l, orders, step, inv, phi, shape)


def _horner(by_l, orders, step, inv, phi, shape, conjugate=False):
    """``sum_l R_l exp(+-i l phi)`` by Horner's rule in ``exp(+-i step phi)``."""
    sgn = -1 if conjugate else 1
    lo = orders[0]
    acc = np.zeros(shape, dtype=complex)
    acc += _expand(by_l[orders[-1]], inv)
    if step:
        z = np.exp(1j * sgn * step * phi)
        for l in range(orders[-1] - step, lo - 1, -step):  # noqa: E741
            acc *= z
            if l in by_l:
                acc += _expand(by_l[l], inv)
    if lo:
        acc *= np.exp(1j * sgn * lo * phi)
    return acc


def _is_symmetric_grid(r, phi):
    """True for the read-only polar arrays of a cell-centred square grid."""
    if r.ndim != 2 or r.shape != phi.shape or r.shape[0] != r.shape[1] or r.shape[0] % 2:
        return False
    if r.flags.writeable or phi.flags.writeable or r.size < 4096:
        return False
    h = r.shape[0] // 2
    q = r[h:, h:]
    return (
        np.array_equal(q, r[h:, h - 1 :: -1])
        and np.array_equal(q, r[h - 1 :: -1, h:])
        and bool(np.all((phi[h:, h:] > 0) & (phi[h:, h:] < 0.5 * np.pi)))
    )


_QUADRANT_CACHE = []


def _quadrant_layout(inv, phi):
    """Quadrant pixels reordered by radius, so radial gathers read memory in order."""
    for cached, layout in _QUADRANT_CACHE:
        if cached is phi:
            return layout
    h = phi.shape[0] // 2
    qinv = inv[h:, h:].ravel()
    order = np.argsort(qinv, kind="stable")
    layout = (order, np.ascontiguousarray(qinv[order]), np.ascontiguousarray(phi[h:, h:].ravel()[order]))
    _QUADRANT_CACHE.insert(0, (phi, layout))
    del _QUADRANT_CACHE[4:]
    return layout


def _sum_quadrants(by_l, orders, step, inv, phi):
    """Evaluate on the ``x, y > 0`` quadrant and fill the rest by reflection.

    With all orders of equal parity, ``phi -> phi + pi`` multiplies the sum by
    ``(-1)^l0`` and ``phi -> -phi`` turns it into the conjugate-phase sum, so
    two quadrant sums give the whole grid.
    """
    n = phi.shape[0]
    h = n // 2
    order, qinv, qphi = _quadrant_layout(inv, phi)
    direct = np.empty(h * h, dtype=complex)
    mirrored = np.empty(h * h, dtype=complex)
    direct[order] = _horner(by_l, orders, step, qinv, qphi, qphi.shape)
    mirrored[order] = _horner(by_l, orders, step, qinv, qphi, qphi.shape, conjugate=True)
    direct = direct.reshape(h, h)
    mirrored = mirrored.reshape(h, h)
    parity = -1 if orders[0] % 2 else 1
    out = np.empty((n, n), dtype=complex)
    out[h:, h:] = direct
    out[:h, :h] = parity * direct[::-1, ::-1]
    out[:h, h:] = mirrored[::-1, :]
    out[h:, :h] = parity * mirrored[:, ::-1]
    return out


# -- LG basis and Heisenberg-Weyl states -------------------------------------


def lg_mode(idx, r, phi):
    """Normalised Laguerre-Gauss mode ``<r, phi | p, l>``.

    ``(1/sqrt(pi)) (-1)^p sqrt(p!/(p+|l|)!) r^|l| exp(-r^2/2) L_p^|l|(r^2) exp(i l phi)``
    """
    r, phi = _prep(r, phi)
    val = _sum_lg([(idx.p, idx.l, 0.0, 0.0)], r, phi)
    return _out(val, r, phi)


def hw_coherent(sign, alpha, r, phi):
    """Glauber coherent state of one circular mode on the null-excitation subspace.

    ``(1/sqrt(pi)) exp(-|alpha|^2/2) exp(-r alpha exp(+-i phi)) exp(-r^2/2)``
    """
    sign = _check_sign(sign)
    r, phi = _prep(r, phi)
    a = alpha.value
    expo = -0.5 * alpha.zeta**2 - r * a * np.exp(1j * sign * phi) - 0.5 * r * r - _LN_SQRT_PI
    return _out(np.exp(expo), r, phi)


def radial_displacement(alpha):
    """Mean radius of the Heisenberg-Weyl density for amplitude ``|alpha|``."""
    a2 = alpha.zeta**2
    x = 0.5 * a2
    # exp(-x) I_nu(x) stays bounded for large |alpha|
    i0 = bessel_i(0, x, scaled=True)
    i1 = bessel_i(1, x, scaled=True)
    return 0.5 * math.sqrt(math.pi) * ((a2 + 1.0) * i0 + a2 * i1)


# -- SU(2) Gilmore-Perelomov -------------------------------------------------


def su2_terms(j, param):
    """LG expansion ``[(p, l, log|c|, arg c)]`` of the SU(2) state.

    The prefactor power ``j`` is merged into the sum so every parameter power
    is the non-negative integer ``s = j + m``; ``(1 + tan^2)^-j tan^s`` is
    written as ``sin^s cos^(2j-s)`` of ``zeta/2``, which is finite at ``zeta = pi``.
    """
    j2 = _half_integer("j", j, 0)
    zeta, theta = param.zeta, param.theta
    if zeta > math.pi:
        raise StateError(f"SU(2) amplitude zeta must lie in [0, pi], got {zeta}")
    sin_h, cos_h = math.sin(0.5 * zeta), math.cos(0.5 * zeta)
    if zeta == math.pi:
        cos_h = 0.0
    terms = []
    for s in range(j2 + 1):
        ms2 = 2 * s - j2  # 2m
        p = (j2 - abs(ms2)) // 2
        l = ms2  # noqa: E741
        power = _xlog(s, sin_h) + _xlog(j2 - s, cos_h)
        if power == -math.inf:
            continue
        log_mag = 0.5 * (ln_factorial(j2) - ln_factorial(s) - ln_factorial(j2 - s)) + power
        # (-1)^p converts the raw Laguerre-Gauss product to the signed LG basis
        arg = math.pi * s - theta * s + math.pi * p
        terms.append((p, l, log_mag, arg))
    return terms


def su2_gp(j, param, r, phi):
    """SU(2) Gilmore-Perelomov coherent state on the total-excitation subspace ``j``."""
    r, phi = _prep(r, phi)
    return _out(_sum_lg(su2_terms(j, param), r, phi), r, phi)


# -- SU(1,1) on constant azimuthal number -----------------------------------


def envelope_waist(param):
    """Gaussian envelope waist ``sigma^2 = cosh(zeta) - cos(theta) sinh(zeta)``.

    Evaluated as ``e^zeta sin^2(theta/2) + e^-zeta cos^2(theta/2)``, which has
    no cancellation at ``theta = 0``.
    """
    z, t = param.zeta, param.theta
    return math.exp(z) * math.sin(0.5 * t) ** 2 + math.exp(-z) * math.cos(0.5 * t) ** 2


def su11_gp(k, sign, param, r, phi):
    """SU(1,1) Gilmore-Perelomov state on the azimuthal subspace ``k``, branch ``sign``."""
    k2 = _half_integer("k", k, 0.5)
    sign = _check_sign(sign)
    r, phi = _prep(r, phi)
    nu = k2 - 1
    sigma2 = envelope_waist(param)
    swirl = math.sin(param.theta) * math.sinh(param.zeta) / sigma2
    log_norm = -0.5 * (math.log(math.pi) + ln_factorial(nu)) - 0.5 * k2 * math.log(sigma2)

    def modulus(rr):
        return np.exp(log_norm + _xlog(nu, rr) - rr * rr / (2.0 * sigma2))

    phase = sign * nu * phi - swirl * r * r
    return _out(_radial(modulus, r) * np.exp(1j * phase), r, phi)


def su11_bg(k, sign, xi, r, phi):
    """SU(1,1) Barut-Girardello state: a Bessel-Gauss mode of order ``2k - 1``.

    The global phase is fixed so that the coefficient of the base mode
    ``LG(0, +-(2k-1))`` is real and positive; this replaces the
    branch-ambiguous ``(-1)^(-k+1/2)`` and makes ``xi -> 0`` reduce exactly to
    that mode.
    """
    k2 = _half_integer("k", k, 0.5)
    sign = _check_sign(sign)
    nu = k2 - 1
    r, phi = _prep(r, phi)
    if xi.zeta == 0:
        return lg_mode(LGIndex(0, sign * nu), r, phi)
    w = 2.0 * np.sqrt(-xi.value + 0j)
    zeta = xi.zeta
    x = 2.0 * zeta
    # exp(-xi) / sqrt(pi I_nu(2 zeta)), with I scaled by exp(-2 zeta)
    pref = np.exp(-xi.value - zeta) / math.sqrt(math.pi * bessel_i(nu, x, scaled=True))
    pref *= np.exp(-1j * nu * np.angle(w))

    def radial(rr):
        return np.exp(-0.5 * rr * rr) * bessel_j_complex(nu, w * rr)

    val = pref * _radial(radial, r) * np.exp(1j * sign * nu * phi)
    return _out(val, r, phi)


# -- SU(1,1) on constant circular excitation --------------------------------


def sub_indices(n, k, sign, m):
    """LG index of the ``m``-th term on the circular-excitation subspace ``n``.

    ``l = -+ n +- 2(k + m - 1/4)``, ``p = (n + 2(k + m - 1/4) - |l|) / 2``.
    """
    sign = _check_sign(sign)
    twice = 2.0 * (k + m - 0.25)
    l = sign * (twice - n)  # noqa: E741
    p = 0.5 * (n + twice - abs(l))
    if int(n) != n or n < 0 or int(m) != m or m < 0:
        raise ConsistencyError(f"n and m must be non-negative integers, got n={n!r}, m={m!r}")
    if l != int(l) or p != int(p) or p < 0:
        raise ConsistencyError(f"(n={n}, k={k}, m={m}) gives non-integer LG index p={p}, l={l}")
    return LGIndex(int(p), int(l))


def _certify(log_bounds, log_ratio_sup, tol):
    """Number of terms ``M`` such that the neglected tail is certified below ``tol``.

    ``log_bounds(m)`` bounds ``log|term_m|`` pointwise; ``log_ratio_sup(m)``
    bounds ``log(|term_{m'+1}| / |term_m'|)`` for every ``m' >= m``.
    """
    log_tol = math.log(tol)
    running = -math.inf
    for m in range(MAX_SERIES_TERMS + 1):
        lb = log_bounds(m)
        running = max(running, lb)
        if m == 0:
            continue
        if lb == -math.inf:
            return m
        lr = log_ratio_sup(m)
        if lr < 0:
            log_tail = lb - math.log1p(-math.exp(lr))
            if lb <= log_tol + running and log_tail <= log_tol:
                return m
    raise TruncationError(f"series tail not below {tol:g} within {MAX_SERIES_TERMS} terms")


def _check_tol(tol):
    if not (0 < tol <= 1e-6):
        raise StateError(f"tol must lie in (0, 1e-6], got {tol!r}")


def series_terms(family, n, k, sign, param, tol=DEFAULT_TOL):
    """LG expansion ``[(p, l, log|c|, arg c)]`` of a subspace GP or BG state.

    The returned list is truncated so that the pointwise remainder is
    certified below ``tol`` (terms are bounded with ``|LG| <= 1/sqrt(pi)``).
    """
    family = Family(family)
    _check_sub_k(k)
    _check_tol(tol)
    sign = _check_sign(sign)
    zeta, theta = param.zeta, param.theta
    k2 = 2 * k
    if family is Family.SU11_GP_SUB:
        t = math.tanh(0.5 * zeta)
        log_t = math.log(t) if t > 0 else -math.inf
        # sqrt(2k + 1/2) / pi^(1/4) equals 1/sqrt(Gamma(2k)) for k in {1/4, 3/4}
        log_c0 = 0.5 * math.log(k2 + 0.5) - 0.25 * math.log(math.pi) - k2 * math.log(math.cosh(0.5 * zeta))

        def log_mag(m):
            if m == 0:
                return log_c0 + 0.5 * ln_gamma(k2)
            if log_t == -math.inf:
                return -math.inf
            return log_c0 + 0.5 * (ln_gamma(k2 + m) - ln_factorial(m)) + m * log_t

        def log_ratio(m):
            return log_t + 0.5 * math.log(max(1.0, (k2 + m) / (m + 1)))

        def arg(m, p):
            # (-e^{-i theta})^m, and (-1)^p since the written sum omits the LG sign
            return m * (math.pi - theta) + math.pi * p

    elif family is Family.SU11_BG_SUB:
        if zeta == 0:
            idx = sub_indices(n, k, sign, 0)
            return [(idx.p, idx.l, 0.0, 0.0)]
        log_z = math.log(zeta)
        theta_p = theta - TWO_PI if theta > math.pi else theta
        log_i = math.log(bessel_i(k2 - 1, 2 * zeta, scaled=True)) + 2 * zeta

        def log_mag(m):
            return (k - 0.5 + m) * log_z - 0.5 * (log_i + ln_factorial(m) + ln_gamma(k2 + m))

        def log_ratio(m):
            return log_z - 0.5 * math.log((m + 1) * (k2 + m))

        def arg(m, p):
            return (k - 0.5) * theta_p + m * theta

    else:
        raise StateError(f"{family} is not a circular-excitation subspace family")

    count = _certify(lambda m: log_mag(m) - _LN_SQRT_PI, log_ratio, tol)
    terms = []
    for m in range(count):
        idx = sub_indices(n, k, sign, m)
        lm = log_mag(m)
        if lm == -math.inf:
            continue
        terms.append((idx.p, idx.l, lm, arg(m, idx.p)))
    return terms


def su11_gp_sub(n, k, sign, param, r, phi, tol=DEFAULT_TOL):
    """SU(1,1) Gilmore-Perelomov state on the circular-excitation subspace ``n``, ``k`` in {1/4, 3/4}."""
    r, phi = _prep(r, phi)
    terms = series_terms(Family.SU11_GP_SUB, n, k, sign, param, tol)
    return _out(_sum_lg(terms, r, phi), r, phi)


def su11_bg_sub(n, k, sign, xi, r, phi, tol=DEFAULT_TOL):
    """SU(1,1) Barut-Girardello state on the circular-excitation subspace ``n``.

    ``xi^(k-1/2)`` uses the principal branch (``arg xi`` in ``(-pi, pi]``);
    at ``xi = 0`` the state is the ``m = 0`` base mode.
    """
    r, phi = _prep(r, phi)
    terms = series_terms(Family.SU11_BG_SUB, n, k, sign, xi, tol)
    return _out(_sum_lg(terms, r, phi), r, phi)


# -- dispatch and evolution --------------------------------------------------


def evaluate(spec, r, phi, tol=DEFAULT_TOL):
    """Wavefunction of ``spec`` at ``(r, phi)``."""
    fam = spec.family
    prm = spec.param
    if fam is Family.LG:
        return lg_mode(spec.lg, r, phi)
    if fam is Family.HW:
        return hw_coherent(spec.sign, prm, r, phi)
    if fam is Family.SU2_GP:
        return su2_gp(spec.j, prm, r, phi)
    if fam is Family.SU11_GP:
        return su11_gp(spec.k, spec.sign, prm, r, phi)
    if fam is Family.SU11_BG:
        return su11_bg(spec.k, spec.sign, prm, r, phi)
    if fam is Family.SU11_GP_SUB:
        return su11_gp_sub(spec.n, spec.k, spec.sign, prm, r, phi, tol)
    if fam is Family.SU11_BG_SUB:
        return su11_bg_sub(spec.n, spec.k, spec.sign, prm, r, phi, tol)
    raise StateError(f"unknown family {fam!r}")


def state_field(spec, grid, tol=DEFAULT_TOL):
    """Sample ``spec`` on ``grid`` as a :class:`~lgcoherent.field.ComplexField`."""
    return sample(lambda r, phi: evaluate(spec, r, phi, tol), grid)


def evolve(spec, delta):
    """Advance the coherent-parameter phase by ``delta``; LG modes are stationary."""
    if spec.family is Family.LG:
        return spec
    step = math.fmod(float(delta), TWO_PI)
    prm = spec.param
    return replace(spec, param=CoherentParam(prm.zeta, prm.theta + step))
