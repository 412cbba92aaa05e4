"""Property-lattice verification suite behind ``lgcoherent verify``.

Each check group returns :class:`~lgcoherent.analysis.ReportRow` objects;
:func:`run` executes the selected groups, optionally on a thread pool, and
returns the rows in a fixed order so the report is reproducible.
"""

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import oracles, specfun, states
from .analysis import ReportRow, align_global_phase, metrics, rotation_residual, winding_number
from .field import ComplexField, GridSpec, write_field
from .holography import HologramSpec, four_frame, interferogram, run_pipeline
from .states import CoherentParam, Family, LGIndex, StateSpec

__all__ = ["GROUPS", "VerifyContext", "run", "worker_count", "all_passed"]

PI = math.pi
MOMENT_GRID = GridSpec(1024, 8.0)
# L = 8 clips the widest lattice states (sigma^2 = e^2 at zeta=2, theta=pi holds
# 20% of the k=4 density outside it), so norms are integrated on wider windows.
# The Bessel-Gauss argument 2 sqrt(zeta) r must stay within |z| <= 60, which
# caps the window at L = 12 for the Barut-Girardello family.
NORM_GRID = GridSpec(1024, 12.0)
WIDE_NORM_GRID = GridSpec(1024, 16.0)
DISPLACEMENT_GRID = GridSpec(1024, 10.0)
LIMIT_GRID = GridSpec(256, 8.0)
WINDING_GRID = GridSpec(512, 8.0)
PIPELINE_GRID = GridSpec(512, 8.0)

ZETAS = (0.5, 1.0, 2.0)
THETAS = (0.0, 0.5 * PI, PI)
SERIES_TOL = 1e-8


@dataclass
class VerifyContext:
    """Run options: where (if anywhere) to dump the sampled fields."""

    dump_dir: str = None

    def field(self, spec, grid, tol=states.DEFAULT_TOL):
        f = states.state_field(spec, grid, tol)
        if self.dump_dir is not None:
            name = re.sub(r"[^A-Za-z0-9.+-]+", "_", f"{spec.label()} n={grid.n} L={grid.half_width:g}")
            write_field(f, os.path.join(self.dump_dir, name + ".cfld"))
        return f


def _row(family, params, metric, value, reference, passed, abs_error=None):
    if abs_error is None:
        abs_error = abs(value - reference)
    return ReportRow(family, params, metric, float(value), float(reference), float(abs_error), bool(passed))


def _le(family, params, metric, value, bound):
    return _row(family, params, metric, value, bound, value <= bound, abs_error=value)


# -- special functions --------------------------------------------------------


def _laguerre_scaled_error(rng):
    # relative error, switching to absolute error on the scale C(p+a, p) e^(x/2)
    # (a bound on |L_p^a|) where the polynomial is near a zero
    worst = 0.0
    xs = np.array([0.1, 0.5, 1.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0, 25.0])
    for p in range(31):
        for a in range(21):
            vals = specfun.assoc_laguerre(p, a, xs)
            for x, v in zip(xs, vals):
                ref = oracles.laguerre_series(p, a, float(x))
                env = math.comb(p + a, p) * math.exp(0.5 * x)
                worst = max(worst, abs(v - ref) / max(abs(ref), 1e-2 * env))
    return worst


def check_specfun(ctx):
    rng = np.random.default_rng(20240611)
    rows = [
        _le("specfun", "assoc_laguerre p<=30 a<=20 x in [0.1,25]", "max_rel_error", _laguerre_scaled_error(rng), 1e-10)
    ]

    worst = 0.0
    for nu in range(11):
        xs = np.concatenate([[0.0, 0.5, 14.9, 15.0, 15.1, 50.0], rng.uniform(0, 50, 20)])
        vals = specfun.bessel_i(nu, xs)
        for x, v in zip(xs, vals):
            ref = oracles.bessel_i_series(nu, float(x))
            worst = max(worst, abs(v - ref) / abs(ref) if ref else abs(v))
    rows.append(_le("specfun", "bessel_i nu<=10 x in [0,50]", "max_rel_error", worst, 1e-10))

    worst = 0.0
    for nu in range(11):
        mag = np.sqrt(rng.uniform(0, 1, 12)) * specfun.J_MAX_ABS
        zs = mag * np.exp(1j * rng.uniform(-PI, PI, 12))
        zs = np.concatenate([zs, [0.0, 2.0, 10.0, 10.0001j, 60.0, -60.0j]])
        vals = specfun.bessel_j_complex(nu, zs)
        for z, v in zip(zs, vals):
            ref = oracles.bessel_j_series(nu, complex(z))
            worst = max(worst, abs(v - ref) / abs(ref) if ref else abs(v))
    rows.append(_le("specfun", "bessel_j_complex nu<=10 |z|<=60", "max_rel_error", worst, 1e-10))

    worst = 0.0
    xs = np.linspace(0.0, 20.0, 41)
    for nu in range(11):
        j = specfun.bessel_j_complex(nu, 1j * xs)
        i = (1j**nu) * specfun.bessel_i(nu, xs)
        scale = np.maximum(np.abs(i), 1e-300)
        worst = max(worst, float(np.max(np.where(i == 0, np.abs(j), np.abs(j - i) / scale))))
    rows.append(_le("specfun", "J_nu(ix) = i^nu I_nu(x) nu<=10 x<=20", "max_rel_error", worst, 1e-10))

    worst = 0.0
    xs = np.concatenate(
        [10.0 ** rng.uniform(-6, 4, 150), rng.uniform(0.5, 3.0, 100), [0.5, 1.0 + 1e-9, 2.0 - 1e-7, 1e4]]
    )
    for x in xs:
        ref = oracles.ln_gamma_series(float(x))
        v = specfun.ln_gamma(float(x))
        worst = max(worst, abs(v - ref) / abs(ref))
    rows.append(_le("specfun", "ln_gamma x in (0,1e4]", "max_rel_error", worst, 1e-12))
    return rows


# -- normalisation ------------------------------------------------------------


def _norm_specs():
    out = [StateSpec(Family.LG, lg=LGIndex(p, l)) for p, l in ((0, 0), (1, 2), (3, -4), (5, 7))]
    for z in ZETAS:
        for t in THETAS:
            prm = CoherentParam(z, t)
            out += [StateSpec(Family.HW, prm, sign=s) for s in (1, -1)]
            out += [StateSpec(Family.SU2_GP, prm, j=j) for j in (0.5, 2, 4)]
            out += [StateSpec(Family.SU11_GP, prm, k=k) for k in (0.5, 2, 4)]
            out += [StateSpec(Family.SU11_BG, prm, k=k) for k in (0.5, 2, 4)]
            for fam in (Family.SU11_GP_SUB, Family.SU11_BG_SUB):
                out += [StateSpec(fam, prm, k=k, n=n) for k in (0.25, 0.75) for n in (0, 1, 3)]
    return out


def _norm_task(ctx, spec):
    series = spec.family in (Family.SU11_GP_SUB, Family.SU11_BG_SUB)
    tol = 1e-5 if series else 1e-4
    grid = WIDE_NORM_GRID if spec.family is Family.SU11_GP else NORM_GRID
    norm = metrics(ctx.field(spec, grid, SERIES_TOL)).norm
    return [_row(spec.family.value, spec.label(), "norm", norm, 1.0, abs(norm - 1.0) <= tol)]


# -- moments ------------------------------------------------------------------


def check_displacement(ctx):
    rows = []
    for amp in (0.0, 1.0, 2.0, 3.0):
        spec = StateSpec(Family.HW, CoherentParam(amp, 0.7))
        mean_r = metrics(ctx.field(spec, DISPLACEMENT_GRID)).radial_centroid
        ref = states.radial_displacement(spec.param)
        rows.append(
            _row("hw", spec.label(), "mean_radius_rel_error", mean_r, ref, abs(mean_r - ref) <= 5e-3 * ref)
        )
    r0 = states.radial_displacement(CoherentParam(0.0, 0.0))
    half_sqrt_pi = 0.5 * math.sqrt(PI)
    rows.append(_row("hw", "zeta=0", "r0_closed_form", r0, half_sqrt_pi, abs(r0 - half_sqrt_pi) <= 1e-4))
    return rows


def check_waist(ctx):
    rows = []
    for k in (0.5, 2, 4):
        for z in (0.5, 1.0):
            for t in THETAS:
                spec = StateSpec(Family.SU11_GP, CoherentParam(z, t), k=k)
                second = metrics(ctx.field(spec, MOMENT_GRID)).second_radial_moment
                ref = 2 * k * states.envelope_waist(spec.param)
                rows.append(_row("su11gp", spec.label(), "second_moment", second, ref, abs(second - ref) <= 5e-3 * ref))
    s1 = states.envelope_waist(CoherentParam(1.0, 0.0))
    rows.append(_row("su11gp", "zeta=1 theta=0", "sigma2_identity", s1, math.exp(-1), abs(s1 - math.exp(-1)) <= 1e-12))
    for z in ZETAS:
        s = states.envelope_waist(CoherentParam(z, 0.5 * PI))
        rows.append(
            _row("su11gp", f"zeta={z:g} theta=pi/2", "sigma2_identity", s, math.cosh(z), abs(s - math.cosh(z)) <= 1e-12)
        )
    return rows


# -- limits -------------------------------------------------------------------


def _limit_pairs():
    for zeta in (0.0, 1e-12):
        for theta in (0.0, 2.0):
            prm = CoherentParam(zeta, theta)
            for s in (1, -1):
                yield StateSpec(Family.HW, prm, sign=s), LGIndex(0, 0)
            for j in (0.5, 2, 4):
                yield StateSpec(Family.SU2_GP, prm, j=j), LGIndex(0, -round(2 * j))
            for k in (0.5, 2, 4):
                nu = round(2 * k) - 1
                for s in (1, -1):
                    yield StateSpec(Family.SU11_GP, prm, sign=s, k=k), LGIndex(0, s * nu)
                    yield StateSpec(Family.SU11_BG, prm, sign=s, k=k), LGIndex(0, s * nu)
            for k in (0.25, 0.75):
                for n in (0, 1, 3):
                    for s in (1, -1):
                        base = states.sub_indices(n, k, s, 0)
                        yield StateSpec(Family.SU11_GP_SUB, prm, sign=s, k=k, n=n), base
                        yield StateSpec(Family.SU11_BG_SUB, prm, sign=s, k=k, n=n), base


def check_limits(ctx):
    rows = []
    for spec, idx in _limit_pairs():
        f = ctx.field(spec, LIMIT_GRID)
        lg = states.state_field(StateSpec(Family.LG, lg=idx), LIMIT_GRID)
        err = float(np.max(np.abs(align_global_phase(lg, f).data - lg.data)))
        rows.append(_le(spec.family.value, f"{spec.label()} -> LG({idx.p},{idx.l})", "max_abs_diff", err, 1e-10))
    return rows


# -- rotation -----------------------------------------------------------------

DELTAS = (0.3, 0.5 * PI, 2.0)
SUB_ROTATION_CASES = tuple(
    (fam, k, n, s)
    for fam in (Family.SU11_GP_SUB, Family.SU11_BG_SUB)
    for s in (1, -1)
    for k in (0.25, 0.75)
    for n in (0, 1, 3)
)


def pin_subspace_rate(family, sign, k=0.75, n=1):
    """Choose the rotation rate in ``{+1/2, -1/2}`` that fits one reference state."""
    spec = StateSpec(family, CoherentParam(1.0, 0.4), sign=sign, k=k, n=n)
    residuals = {rate: rotation_residual(spec, 0.7, rate) for rate in (0.5, -0.5)}
    return min(residuals, key=residuals.get)


def check_rotation(ctx):
    rows = []
    for z in (0.5, 1.0):
        for t in (0.0, 0.5 * PI):
            prm = CoherentParam(z, t)
            for d in DELTAS:
                for s in (1, -1):
                    spec = StateSpec(Family.HW, prm, sign=s)
                    res = rotation_residual(spec, d, -s)
                    rows.append(_le("hw", f"{spec.label()} delta={d:g} rate={-s}", "rotation_residual", res, 1e-9))
                for j in (0.5, 2, 4):
                    spec = StateSpec(Family.SU2_GP, prm, j=j)
                    res = rotation_residual(spec, d, 0.5)
                    rows.append(_le("su2gp", f"{spec.label()} delta={d:g} rate=0.5", "rotation_residual", res, 1e-9))
            r, phi = LIMIT_GRID.polar()
            for fam in (Family.SU11_GP, Family.SU11_BG):
                for k in (0.5, 2, 4):
                    spec = StateSpec(fam, prm, k=k)
                    a = np.abs(states.evaluate(spec, r, phi)) ** 2
                    b = np.abs(states.evaluate(spec, r, phi + 1.234)) ** 2
                    res = float(np.max(np.abs(a - b)))
                    rows.append(_le(fam.value, spec.label(), "azimuthal_modulus_variation", res, 1e-9))

    pinned = {}
    for fam, k, n, s in SUB_ROTATION_CASES:
        if (fam, s) not in pinned:
            pinned[fam, s] = pin_subspace_rate(fam, s)
        rate = pinned[fam, s]
        spec = StateSpec(fam, CoherentParam(1.0, 0.4), sign=s, k=k, n=n)
        for d in (0.3, 2.0):
            res = rotation_residual(spec, d, rate)
            rows.append(_le(fam.value, f"{spec.label()} delta={d:g} rate={rate:g}", "rotation_residual", res, 1e-9))
    return rows


# -- topology -----------------------------------------------------------------


def check_winding(ctx):
    rows = []
    for p in range(3):
        for l in range(-3, 4):  # noqa: E741
            spec = StateSpec(Family.LG, lg=LGIndex(p, l))
            w = winding_number(ctx.field(spec, WINDING_GRID), 0.5)
            rows.append(_row("lg", spec.label(), "winding_number", w, l, w == l))
    for fam in (Family.SU11_GP, Family.SU11_BG):
        for k2 in range(1, 9):
            k = 0.5 * k2
            for t in (0.0, PI):
                for s in (1, -1):
                    spec = StateSpec(fam, CoherentParam(1.0, t), sign=s, k=k)
                    w = winding_number(ctx.field(spec, WINDING_GRID), 0.5)
                    ref = s * (k2 - 1)
                    rows.append(_row(fam.value, spec.label(), "winding_number", w, ref, w == ref))
    return rows


def check_ring(ctx):
    near = metrics(ctx.field(StateSpec(Family.SU11_BG, CoherentParam(1.0, PI), k=4), MOMENT_GRID)).radial_centroid
    far = metrics(ctx.field(StateSpec(Family.SU11_BG, CoherentParam(1.0, 0.0), k=4), MOMENT_GRID)).radial_centroid
    return [_row("su11bg", "k=4 zeta=1 theta=pi vs theta=0", "radial_centroid", near, far, near < far)]


# -- holography ---------------------------------------------------------------


def check_fourframe(ctx):
    rng = np.random.default_rng(7)
    grid = GridSpec(64, 4.0)
    qx, qy = grid.cartesian()
    ph = rng.uniform(-PI, PI, (grid.n, grid.n))
    obj = ComplexField(grid, rng.uniform(0.2, 1.0, (grid.n, grid.n)) * np.exp(1j * ph))
    ref = ComplexField(grid, 0.8 * np.exp(2j * PI * (0.3 * qx - 0.2 * qy)))
    want = np.angle(obj.data * np.conj(ref.data))
    frames = [interferogram(obj, ref, s) for s in (0.0, 0.5 * PI, PI, 1.5 * PI)]
    rows = []
    for c, d in ((1.0, 0.0), (2.5, -0.7), (0.01, 3.0)):
        scaled = [type(f)(f.spec, c * f.data + d, f.kind) for f in frames]
        got = four_frame(*scaled).data
        err = float(np.max(np.abs(np.angle(np.exp(1j * (got - want))))))
        rows.append(_le("holography", f"four_frame c={c:g} d={d:g}", "max_phase_error", err, 1e-9))
    return rows


PIPELINE_CASES = (
    StateSpec(Family.HW, CoherentParam(3.0, 0.5 * PI)),
    StateSpec(Family.SU11_GP, CoherentParam(1.0, 0.5 * PI), k=4),
    StateSpec(Family.SU11_BG, CoherentParam(1.0, 0.5 * PI), k=4),
)


def check_pipeline(ctx):
    rows = []
    h = HologramSpec.default(PIPELINE_GRID)
    for spec in PIPELINE_CASES:
        res = run_pipeline(ctx.field(spec, PIPELINE_GRID), h)
        label = f"{spec.label()} {h.encoding}"
        rows.append(_row(spec.family.value, label, "correlation", res.correlation, 0.99, res.correlation > 0.99))
        rows.append(_row(spec.family.value, label, "rms_phase_error", res.rms_phase_error, 0.05, res.rms_phase_error < 0.05))
    return rows


GROUPS = {
    "specfun": check_specfun,
    "norms": None,  # fanned out per state below
    "displacement": check_displacement,
    "waist": check_waist,
    "limits": check_limits,
    "rotation": check_rotation,
    "winding": check_winding,
    "ring": check_ring,
    "fourframe": check_fourframe,
    "pipeline": check_pipeline,
}


def worker_count():
    """Workers from ``LGC_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("LGC_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"LGC_THREADS must be a non-negative integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"LGC_THREADS must be a non-negative integer, got {raw!r}")
    return n or (os.cpu_count() or 1)


def run(only=None, ctx=None, workers=None):
    """Run the selected groups (all by default) and return their rows in group order."""
    ctx = ctx or VerifyContext()
    names = list(GROUPS) if not only else list(only)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise ValueError(f"unknown verify group(s) {unknown}; choose from {sorted(GROUPS)}")
    tasks = []
    for name in names:
        if name == "norms":
            tasks += [(lambda s=s: _norm_task(ctx, s)) for s in _norm_specs()]
        else:
            tasks.append(lambda fn=GROUPS[name]: fn(ctx))
    workers = workers or worker_count()
    if workers == 1:
        results = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: t(), tasks))
    return [row for chunk in results for row in chunk]


def all_passed(rows):
    return all(r.passed for r in rows)
