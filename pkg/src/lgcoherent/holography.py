"""Simulated multiplexed phase-only hologram, 4f order filtering and four-frame phase retrieval.

Spatial frequencies are in cycles per dimensionless length, matching
:func:`lgcoherent.field.frequencies`; one DFT bin is ``1 / (2L)``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import correlation
from .field import ComplexField, FieldError, ScalarField, dft2, frequencies

__all__ = [
    "DEFAULT_REFERENCE_AMPLITUDE",
    "ENCODINGS",
    "FOUR_FRAME_SHIFTS",
    "HologramError",
    "HologramSpec",
    "PhaseMask",
    "PipelineResult",
    "encode",
    "propagate_first_order",
    "interferogram",
    "four_frame",
    "modulation",
    "phase_error_rms",
    "run_pipeline",
]

ENCODINGS = ("phase_of_sum", "amplitude_modulated_blaze")
FOUR_FRAME_SHIFTS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
TWO_PI = 2.0 * math.pi
# Reference-to-object amplitude ratio of the multiplexed hologram.  The
# phase-only encoding distorts the object order by roughly (|psi| / A)^2, so
# A = 3 keeps the retrieved phase within a few hundredths of a radian.
DEFAULT_REFERENCE_AMPLITUDE = 3.0


class HologramError(FieldError):
    """Invalid hologram geometry or pipeline input."""


@dataclass(frozen=True)
class HologramSpec:
    """Carrier wave vectors, encoding and spectral filter of the simulated 4f system.

    ``carrier_1`` carries the object beam, ``carrier_2`` the reference.  The
    filter is a disc of ``filter_radius`` about ``filter_center``
    (defaults to ``carrier_1``).
    """

    carrier_1: tuple
    carrier_2: tuple
    filter_radius: float
    encoding: str = "phase_of_sum"
    filter_center: tuple = None
    reference_amplitude: float = DEFAULT_REFERENCE_AMPLITUDE

    def __post_init__(self):
        c1 = tuple(float(v) for v in self.carrier_1)
        c2 = tuple(float(v) for v in self.carrier_2)
        center = c1 if self.filter_center is None else tuple(float(v) for v in self.filter_center)
        object.__setattr__(self, "carrier_1", c1)
        object.__setattr__(self, "carrier_2", c2)
        object.__setattr__(self, "filter_center", center)
        if self.encoding not in ENCODINGS:
            raise HologramError(f"encoding must be one of {ENCODINGS}, got {self.encoding!r}")
        if c1 == c2:
            raise HologramError("object and reference carriers must differ")
        if not self.filter_radius > 0:
            raise HologramError(f"filter_radius must be positive, got {self.filter_radius}")
        if math.hypot(*center) <= self.filter_radius:
            raise HologramError("filter disc must exclude the zero order (|center| > radius)")
        # zero is allowed so a bare object grating can be encoded
        if not (math.isfinite(self.reference_amplitude) and self.reference_amplitude >= 0):
            raise HologramError(f"reference_amplitude must be finite and >= 0, got {self.reference_amplitude}")

    @classmethod
    def default(cls, grid, encoding="phase_of_sum", reference_amplitude=DEFAULT_REFERENCE_AMPLITUDE):
        """Carriers at ``(+-n/8, 0)`` bins with an ``n/16``-bin filter about the object order."""
        bin_width = 1.0 / (2.0 * grid.half_width)
        k = grid.n / 8 * bin_width
        return cls(
            carrier_1=(k, 0.0),
            carrier_2=(-k, 0.0),
            filter_radius=grid.n / 16 * bin_width,
            encoding=encoding,
            reference_amplitude=reference_amplitude,
        )

    def reference_filter(self):
        """The same geometry with the filter moved onto the reference order."""
        return replace(self, filter_center=self.carrier_2)


@dataclass(frozen=True, eq=False)
class PhaseMask:
    spec: object
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(self.spec.n, self.spec.n)
        if np.any(vals < 0) or np.any(vals >= TWO_PI):
            raise HologramError("phase mask values must lie in [0, 2 pi)")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def _wrap_2pi(ph):
    out = np.mod(ph, TWO_PI)
    # np.mod can round a tiny negative up to exactly 2 pi
    return np.where(out >= TWO_PI, 0.0, out)


def _carrier_phase(grid, k):
    qx, qy = grid.cartesian()
    return TWO_PI * (k[0] * qx + k[1] * qy)


def encode(target, h, shift=0.0):
    """Phase-only SLM mask for ``target``.

    ``phase_of_sum``: ``arg(psi e^{2 pi i k1.q} + A e^{-i shift} e^{2 pi i k2.q})``,
    i.e. object and reference multiplexed in one hologram, with the
    four-frame phase step applied to the reference term.

    ``amplitude_modulated_blaze``: a blazed grating ``w = (arg psi + 2 pi k1.q) mod 2pi``
    whose depth is modulated about mid-range, ``pi + M (w - pi)`` with
    ``M = |psi| / max|psi|``.  Centring the modulation keeps the phase of the
    first diffraction order independent of ``M``.
    """
    peak = np.abs(target.data).max()
    if peak == 0:
        raise HologramError("cannot encode an all-zero target")
    psi = target.data / peak
    grid = target.spec
    if h.encoding == "phase_of_sum":
        total = psi * np.exp(1j * _carrier_phase(grid, h.carrier_1))
        total = total + h.reference_amplitude * np.exp(1j * (_carrier_phase(grid, h.carrier_2) - shift))
        return PhaseMask(grid, _wrap_2pi(np.angle(total)))
    if shift != 0.0:
        raise HologramError("amplitude_modulated_blaze holograms carry no reference term to shift")
    blaze = _wrap_2pi(np.angle(psi) + _carrier_phase(grid, h.carrier_1))
    depth = np.abs(psi)
    return PhaseMask(grid, _wrap_2pi(math.pi + depth * (blaze - math.pi)))


def propagate_first_order(mask, h):
    """Field of the diffraction order selected by the 4f filter, shifted to zero frequency.

    ``exp(i mask)`` is Fourier transformed, everything outside the filter disc
    is zeroed, the disc is moved by the nearest whole number of bins onto the
    optical axis and the result is transformed back.
    """
    grid = mask.spec
    slm = ComplexField(grid, np.exp(1j * mask.values))
    spectrum = dft2(slm, "forward").data
    fx = frequencies(grid)
    cx, cy = h.filter_center
    inside = ((fx[None, :] - cx) ** 2 + (fx[:, None] - cy) ** 2) <= h.filter_radius**2
    if not np.any(inside):
        raise HologramError("filter disc contains no spectral samples")
    bin_width = 1.0 / (2.0 * grid.half_width)
    shift_x = int(round(cx / bin_width))
    shift_y = int(round(cy / bin_width))
    selected = np.roll(np.where(inside, spectrum, 0.0), (-shift_y, -shift_x), axis=(0, 1))
    return dft2(ComplexField(grid, selected), "inverse")


def _check_same(*fields):
    spec = fields[0].spec
    for f in fields[1:]:
        if f.spec != spec:
            raise HologramError(f"grid mismatch: {spec} vs {f.spec}")


def interferogram(obj, ref, shift):
    """``|obj + ref e^{-i shift}|^2`` = ``a + b cos(arg obj - arg ref + shift)``."""
    _check_same(obj, ref)
    frame = np.abs(obj.data + ref.data * complex(math.cos(shift), -math.sin(shift))) ** 2
    return ScalarField(obj.spec, frame, kind="intensity")


def four_frame(i1, i2, i3, i4, return_valid=False):
    """Wrapped phase ``atan2(I4 - I2, I1 - I3)`` from frames shifted by 0, pi/2, pi, 3pi/2.

    Pixels where both differences vanish carry no phase information; they
    are set to 0 and reported as invalid when ``return_valid`` is true.
    """
    _check_same(i1, i2, i3, i4)
    num = i4.data - i2.data
    den = i1.data - i3.data
    ph = np.arctan2(num, den)
    ph = np.where(ph == -np.pi, np.pi, ph)
    valid = (num != 0) | (den != 0)
    ph = np.where(valid, ph, 0.0)
    out = ScalarField(i1.spec, ph, kind="phase")
    return (out, valid) if return_valid else out


def modulation(i1, i2, i3, i4):
    """``|obj| |ref|`` recovered from the four frames."""
    _check_same(i1, i2, i3, i4)
    return ScalarField(i1.spec, 0.25 * np.hypot(i4.data - i2.data, i1.data - i3.data))


def phase_error_rms(recovered, target, support):
    """RMS of the wrapped difference ``recovered - arg target`` over ``support``.

    The best constant offset (circular mean of the difference) is removed
    first, since retrieval is only defined up to the reference phase.
    """
    diff = recovered[support] - np.angle(target[support])
    offset = np.angle(np.sum(np.exp(1j * diff)))
    err = np.angle(np.exp(1j * (diff - offset)))
    return float(np.sqrt(np.mean(err**2)))


@dataclass(frozen=True, eq=False)
class PipelineResult:
    masks: tuple
    frames: tuple
    object_field: ComplexField
    recovered_phase: ScalarField
    recovered_field: ComplexField
    valid: np.ndarray
    correlation: float
    rms_phase_error: float


def run_pipeline(target, h, reference="analytic", support_fraction=0.1):
    """Encode, filter, interfere at the four phase steps and retrieve the phase.

    ``reference="analytic"`` interferes the filtered object order with an
    ideal plane reference of amplitude ``A`` (tilt removed, so constant in the
    recentred frame) and applies the phase steps to it.  ``"hologram"``
    (``phase_of_sum`` only) writes the phase step into each multiplexed
    hologram and takes the reference from the second filtered order.
    """
    if reference not in ("analytic", "hologram"):
        raise HologramError(f"reference must be 'analytic' or 'hologram', got {reference!r}")
    grid = target.spec
    if h.reference_amplitude == 0:
        raise HologramError("four-frame retrieval needs a nonzero reference amplitude")
    if reference == "analytic":
        mask = encode(target, h)
        obj = propagate_first_order(mask, h)
        ref = ComplexField(grid, np.full((grid.n, grid.n), h.reference_amplitude, dtype=complex))
        masks = (mask,)
        frames = tuple(interferogram(obj, ref, s) for s in FOUR_FRAME_SHIFTS)
    else:
        if h.encoding != "phase_of_sum":
            raise HologramError("hologram-borne reference needs the phase_of_sum encoding")
        masks = tuple(encode(target, h, shift=s) for s in FOUR_FRAME_SHIFTS)
        ref_h = h.reference_filter()
        frames = []
        obj = None
        for m in masks:
            o = propagate_first_order(m, h)
            obj = o if obj is None else obj
            frames.append(interferogram(o, propagate_first_order(m, ref_h), 0.0))
        frames = tuple(frames)

    phase, valid = four_frame(*frames, return_valid=True)
    amp = modulation(*frames).data
    recovered = ComplexField(grid, amp * np.exp(1j * phase.data))
    support = np.abs(target.data) > support_fraction * np.abs(target.data).max()
    return PipelineResult(
        masks=masks,
        frames=frames,
        object_field=obj,
        recovered_phase=phase,
        recovered_field=recovered,
        valid=valid,
        correlation=correlation(target, recovered),
        rms_phase_error=phase_error_rms(phase.data, target.data, support),
    )
