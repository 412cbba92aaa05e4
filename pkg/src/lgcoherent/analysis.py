"""Quadrature moments, field comparison metrics, vortex winding and rotation checks."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .field import FieldError, GridSpec
from .states import evaluate, evolve

__all__ = [
    "FieldMetrics",
    "ReportRow",
    "metrics",
    "l2_distance",
    "correlation",
    "align_global_phase",
    "winding_number",
    "rotation_residual",
    "write_report",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = ("family", "parameters", "metric", "value", "reference", "abs_error", "pass")


@dataclass(frozen=True)
class FieldMetrics:
    norm: float
    centroid: tuple
    radial_centroid: float
    second_radial_moment: float


def metrics(f):
    """Midpoint-rule moments of the density ``|psi|^2``.

    Centroid and radial moments are normalised by ``norm``.
    """
    dens = np.abs(f.data) ** 2
    cell = f.spec.spacing**2
    total = float(dens.sum())
    if total == 0:
        raise FieldError("field has zero norm")
    qx, qy = f.spec.cartesian()
    r, _ = f.spec.polar()
    return FieldMetrics(
        norm=total * cell,
        centroid=(float((qx * dens).sum() / total), float((qy * dens).sum() / total)),
        radial_centroid=float((r * dens).sum() / total),
        second_radial_moment=float((r * r * dens).sum() / total),
    )


def _check_match(a, b):
    if a.spec != b.spec:
        raise FieldError(f"grid mismatch: {a.spec} vs {b.spec}")


def l2_distance(a, b):
    _check_match(a, b)
    return float(np.linalg.norm(a.data - b.data) * a.spec.spacing)


def correlation(a, b):
    """``|<a, b>| / (||a|| ||b||)``, insensitive to a global phase of either field."""
    _check_match(a, b)
    na = np.linalg.norm(a.data)
    nb = np.linalg.norm(b.data)
    if na == 0 or nb == 0:
        raise FieldError("correlation of a zero field")
    return float(min(1.0, abs(np.vdot(a.data, b.data)) / (na * nb)))


def align_global_phase(a, b):
    """Return ``b`` multiplied by the unit phase that best matches it to ``a``."""
    _check_match(a, b)
    overlap = np.vdot(b.data, a.data)
    rot = overlap / abs(overlap) if overlap != 0 else 1.0
    return b * rot


def _bilinear(data, spec, qx, qy):
    pos_x = (qx + spec.half_width) / spec.spacing - 0.5
    pos_y = (qy + spec.half_width) / spec.spacing - 0.5
    ix = np.floor(pos_x).astype(int)
    iy = np.floor(pos_y).astype(int)
    if ix.min() < 0 or iy.min() < 0 or ix.max() + 1 >= spec.n or iy.max() + 1 >= spec.n:
        raise FieldError("winding loop leaves the sampling window")
    fx = pos_x - ix
    fy = pos_y - iy
    return (
        data[iy, ix] * (1 - fx) * (1 - fy)
        + data[iy, ix + 1] * fx * (1 - fy)
        + data[iy + 1, ix] * (1 - fx) * fy
        + data[iy + 1, ix + 1] * fx * fy
    )


def winding_number(f, radius, center=(0.0, 0.0)):
    """Topological charge enclosed by a circle of ``radius`` about ``center``.

    The complex field is bilinearly interpolated at ``max(64, ceil(2 pi R / dx))``
    points (interpolating the phase itself is unsafe across the branch cut);
    wrapped phase increments are summed and divided by ``2 pi``.
    """
    dx = f.spec.spacing
    if radius < 3 * dx:
        raise FieldError(f"radius {radius} is below 3 grid spacings ({3 * dx:g})")
    count = max(64, math.ceil(2 * math.pi * radius / dx))
    ang = 2 * math.pi * np.arange(count) / count
    vals = _bilinear(f.data, f.spec, center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang))
    amp = np.abs(vals)
    if amp.min() <= 1e-12 * np.abs(f.data).max():
        raise FieldError("winding loop crosses a zero of the field")
    steps = np.angle(np.roll(vals, -1) / vals)
    return int(round(steps.sum() / (2 * math.pi)))


_ROTATION_GRID = GridSpec(256, 8.0)


def rotation_residual(spec, delta, rate, grid=_ROTATION_GRID):
    """Max over ``grid`` of ``| |psi_{theta+delta}(r, phi)|^2 - |psi_theta(r, phi - rate*delta)|^2 |``.

    Both sides are evaluated analytically at exact coordinates.
    """
    r, phi = grid.polar()
    moved = np.abs(evaluate(evolve(spec, delta), r, phi)) ** 2
    turned = np.abs(evaluate(spec, r, phi - rate * delta)) ** 2
    return float(np.max(np.abs(moved - turned)))


@dataclass(frozen=True)
class ReportRow:
    family: str
    parameters: str
    metric: str
    value: float
    reference: float
    abs_error: float
    passed: bool

    def as_csv(self):
        return [
            self.family,
            self.parameters,
            self.metric,
            repr(float(self.value)),
            repr(float(self.reference)),
            repr(float(self.abs_error)),
            "pass" if self.passed else "fail",
        ]


def write_report(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv())
