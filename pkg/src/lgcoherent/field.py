"""Sampling grids, complex/real field containers, the centred unitary DFT and file I/O."""

import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldError",
    "FieldFormatError",
    "GridSpec",
    "ComplexField",
    "ScalarField",
    "sample",
    "intensity",
    "phase",
    "dft2",
    "frequencies",
    "write_pgm",
    "read_pgm",
    "write_field",
    "read_field",
]

CFLD_MAGIC = b"CFLD1"
_CFLD_HEADER = struct.Struct("<5sId")


class FieldError(ValueError):
    """Invalid grid, field contents or field operation."""


class FieldFormatError(FieldError):
    """Malformed CFLD1 or PGM file."""


@dataclass(frozen=True)
class GridSpec:
    """Cell-centred square window ``[-L, L)^2`` sampled ``n`` times per axis.

    Sample ``i`` sits at ``q = -L + (i + 0.5) * 2L/n``, so ``q = 0`` is never
    sampled for even ``n``.
    """

    n: int
    half_width: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16 or self.n % 2:
            raise FieldError(f"grid size must be an even integer >= 16, got {self.n!r}")
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise FieldError(f"half_width must be positive, got {self.half_width!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.n

    @property
    def axis(self):
        return -self.half_width + (np.arange(self.n) + 0.5) * self.spacing

    def cartesian(self):
        """Return ``(qx, qy)`` arrays indexed ``[iy, ix]``."""
        return _cartesian(self.n, self.half_width)

    def polar(self):
        """Return ``(r, phi)`` arrays indexed ``[iy, ix]``, ``phi`` in ``(-pi, pi]``."""
        return _polar(self.n, self.half_width)


@lru_cache(maxsize=8)
def _cartesian(n, half_width):
    axis = GridSpec(n, half_width).axis
    qx, qy = np.meshgrid(axis, axis)
    qx.flags.writeable = False
    qy.flags.writeable = False
    return qx, qy


@lru_cache(maxsize=8)
def _polar(n, half_width):
    qx, qy = _cartesian(n, half_width)
    r = np.hypot(qx, qy)
    phi = np.arctan2(qy, qx)
    r.flags.writeable = False
    phi.flags.writeable = False
    return r, phi


def _frozen(arr, dtype):
    arr = np.array(arr, dtype=dtype, copy=True, order="C")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples of a wavefunction on ``spec``; ``data[iy, ix]``, row-major."""

    spec: GridSpec
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = _frozen(self.data, complex)
        n = self.spec.n
        if data.size != n * n:
            raise FieldError(f"field has {data.size} samples, grid needs {n * n}")
        data = data.reshape(n, n)
        if not np.all(np.isfinite(data)):
            raise FieldError("field samples must be finite")
        object.__setattr__(self, "data", data)

    def __mul__(self, other):
        return ComplexField(self.spec, self.data * other)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples on ``spec``.  ``kind`` is ``"intensity"``, ``"phase"`` or ``"real"``."""

    spec: GridSpec
    data: np.ndarray = field(repr=False)
    kind: str = "real"

    def __post_init__(self):
        data = _frozen(self.data, float)
        n = self.spec.n
        if data.size != n * n:
            raise FieldError(f"field has {data.size} samples, grid needs {n * n}")
        object.__setattr__(self, "data", data.reshape(n, n))


def sample(evaluator, spec):
    """Evaluate ``evaluator(r, phi)`` at every cell centre of ``spec``.

    The evaluator is called once with the full ``(n, n)`` polar arrays.  If it
    raises or returns non-finite values, the first offending pixel is located
    and reported in a :class:`FieldError`.
    """
    r, phi = spec.polar()
    try:
        values = np.broadcast_to(np.asarray(evaluator(r, phi), dtype=complex), r.shape)
    except Exception as exc:
        iy, ix = _first_failing_pixel(evaluator, r, phi)
        raise FieldError(f"evaluator failed at pixel (iy={iy}, ix={ix}): {exc}") from exc
    bad = ~np.isfinite(values)
    if np.any(bad):
        iy, ix = np.argwhere(bad)[0]
        raise FieldError(f"evaluator returned non-finite value at pixel (iy={iy}, ix={ix})")
    return ComplexField(spec, values)


def _first_failing_pixel(evaluator, r, phi):
    for iy in range(r.shape[0]):
        try:
            evaluator(r[iy], phi[iy])
            continue
        except Exception:
            pass
        for ix in range(r.shape[1]):
            try:
                evaluator(r[iy, ix], phi[iy, ix])
            except Exception:
                return iy, ix
        return iy, 0
    return -1, -1


def intensity(f):
    return ScalarField(f.spec, np.abs(f.data) ** 2, kind="intensity")


def phase(f):
    """Pointwise ``arg`` in ``(-pi, pi]``; zero samples get phase 0."""
    ph = np.angle(f.data)
    # atan2 yields -pi on the negative real axis with a -0.0 imaginary part
    ph = np.where(ph == -np.pi, np.pi, ph)
    return ScalarField(f.spec, ph, kind="phase")


def _check_pow2(n):
    if n & (n - 1):
        raise FieldError(f"dft2 needs a power-of-two grid, got n={n}")


def dft2(f, direction="forward"):
    """Unitary centred 2D DFT.

    The spectrum is laid out with zero frequency at index ``(n/2, n/2)``;
    bin ``u`` corresponds to ``(u - n/2) / (2L)`` cycles per unit length.
    Forward uses ``exp(-2 pi i ...)``; a forward/inverse round trip is the
    identity.
    """
    _check_pow2(f.spec.n)
    a = np.fft.ifftshift(f.data)
    if direction == "forward":
        out = np.fft.fft2(a, norm="ortho")
    elif direction == "inverse":
        out = np.fft.ifft2(a, norm="ortho")
    else:
        raise FieldError(f"unknown DFT direction {direction!r}")
    return ComplexField(f.spec, np.fft.fftshift(out))


def frequencies(spec):
    """Spectral coordinates (cycles per unit length) of the centred DFT bins."""
    return (np.arange(spec.n) - spec.n // 2) / (2.0 * spec.half_width)


def write_pgm(s, path, normalization="minmax", value_range=None):
    """Write a 16-bit binary PGM, rows in data order.

    Phase fields always map ``(-pi, pi]`` linearly onto ``[0, 65535]``.
    ``normalization="fixed"`` maps ``value_range`` onto the full scale,
    ``"minmax"`` stretches the data range (a constant field becomes all zeros).
    """
    data = s.data
    if s.kind == "phase":
        lo, hi = -np.pi, np.pi
    elif normalization == "fixed":
        if value_range is None:
            raise FieldError("fixed normalization needs a value_range")
        lo, hi = value_range
    elif normalization == "minmax":
        lo, hi = float(data.min()), float(data.max())
    else:
        raise FieldError(f"unknown normalization {normalization!r}")
    if hi > lo:
        scaled = np.clip((data - lo) / (hi - lo), 0.0, 1.0)
    else:
        scaled = np.zeros_like(data)
    pixels = np.rint(scaled * 65535).astype(">u2")
    n = s.spec.n
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path):
    """Read a binary (P5) PGM; returns an integer array indexed ``[row, col]``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FieldFormatError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise FieldFormatError(f"{path}: not a binary PGM")
    width, height, maxval = (int(t) for t in tokens[1:])
    dtype = ">u2" if maxval > 255 else "u1"
    body = raw[pos + 1 :]
    count = width * height
    if len(body) < count * np.dtype(dtype).itemsize:
        raise FieldFormatError(f"{path}: truncated PGM data")
    return np.frombuffer(body, dtype=dtype, count=count).reshape(height, width).astype(np.int64)


def write_field(f, path):
    """Write the CFLD1 container: magic, n (u32 LE), L (f64 LE), then (re, im) f64 LE pairs."""
    n = f.spec.n
    with open(path, "wb") as fh:
        fh.write(_CFLD_HEADER.pack(CFLD_MAGIC, n, f.spec.half_width))
        fh.write(f.data.astype("<c16").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _CFLD_HEADER.size:
        raise FieldFormatError(f"{path}: truncated CFLD1 header")
    magic, n, half_width = _CFLD_HEADER.unpack_from(raw)
    if magic != CFLD_MAGIC:
        raise FieldFormatError(f"{path}: bad magic {magic!r}")
    expected = _CFLD_HEADER.size + 16 * n * n
    if len(raw) != expected:
        raise FieldFormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    try:
        spec = GridSpec(n, half_width)
    except FieldError as exc:
        raise FieldFormatError(f"{path}: {exc}") from exc
    data = np.frombuffer(raw, dtype="<c16", offset=_CFLD_HEADER.size).reshape(n, n)
    return ComplexField(spec, data)
