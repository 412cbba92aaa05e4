import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgcoherent.analysis import (
    REPORT_COLUMNS,
    ReportRow,
    align_global_phase,
    correlation,
    l2_distance,
    metrics,
    rotation_residual,
    winding_number,
    write_report,
)
from lgcoherent.field import ComplexField, FieldError, GridSpec
from lgcoherent.states import CoherentParam, Family, LGIndex, StateSpec, state_field

PI = math.pi
FINE = GridSpec(1024, 8.0)
GRID = GridSpec(256, 8.0)


def lg(p, l, grid=GRID):
    return state_field(StateSpec(Family.LG, lg=LGIndex(p, l)), grid)


def test_vacuum_moments():
    m = metrics(lg(0, 0, FINE))
    assert m.norm == pytest.approx(1, abs=1e-8)
    assert abs(m.centroid[0]) < 1e-10 and abs(m.centroid[1]) < 1e-10
    assert m.radial_centroid == pytest.approx(math.sqrt(PI) / 2, abs=1e-4)
    # <r^2> = 1 for the unit Gaussian
    assert m.second_radial_moment == pytest.approx(1.0, abs=1e-6)


def test_vortex_centroid_is_origin():
    m = metrics(lg(0, 3, FINE))
    assert abs(m.centroid[0]) < 1e-10 and abs(m.centroid[1]) < 1e-10


def test_metrics_homogeneity():
    f = state_field(StateSpec(Family.HW, CoherentParam(1.5, 0.4)), GRID)
    a, b = metrics(f), metrics(f * 2)
    assert b.norm == pytest.approx(4 * a.norm, rel=1e-14)
    assert b.centroid == pytest.approx(a.centroid, rel=1e-13)
    assert b.radial_centroid == pytest.approx(a.radial_centroid, rel=1e-13)
    assert b.second_radial_moment == pytest.approx(a.second_radial_moment, rel=1e-13)


@pytest.mark.parametrize("theta", [0.0, 0.8, PI])
def test_hw_centroid_follows_parameter(theta):
    # |psi_+|^2 is a unit Gaussian centred at -zeta e^{-i theta}
    m = metrics(state_field(StateSpec(Family.HW, CoherentParam(2.0, theta)), FINE))
    assert m.centroid[0] == pytest.approx(-2 * math.cos(theta), abs=1e-8)
    assert m.centroid[1] == pytest.approx(2 * math.sin(theta), abs=1e-8)


def test_zero_field_metrics_error():
    with pytest.raises(FieldError):
        metrics(ComplexField(GRID, np.zeros((256, 256))))


def test_distance_and_correlation_examples():
    f = lg(1, 2)
    assert l2_distance(f, f) == 0
    assert correlation(f, f) == pytest.approx(1.0, abs=1e-15)
    norm = np.linalg.norm(f.data) * GRID.spacing
    assert l2_distance(f, f * -1) == pytest.approx(2 * norm, rel=1e-14)
    assert correlation(lg(0, 1), lg(0, 2)) < 1e-10


@given(st.floats(-PI, PI), st.floats(-PI, PI))
@settings(max_examples=20, deadline=None)
def test_correlation_phase_invariance(g1, g2):
    a = state_field(StateSpec(Family.SU2_GP, CoherentParam(1.0, 0.3), j=1.5), GRID)
    b = state_field(StateSpec(Family.HW, CoherentParam(0.5, 1.0)), GRID)
    ref = correlation(a, b)
    got = correlation(a * complex(math.cos(g1), math.sin(g1)), b * complex(math.cos(g2), math.sin(g2)))
    assert got == pytest.approx(ref, rel=1e-12)


def test_align_global_phase():
    f = lg(2, -1)
    turned = f * np.exp(1.9j)
    assert np.max(np.abs(align_global_phase(f, turned).data - f.data)) < 1e-14


def test_mismatched_grids_rejected():
    with pytest.raises(FieldError):
        correlation(lg(0, 0), lg(0, 0, GridSpec(128, 8.0)))
    with pytest.raises(FieldError):
        correlation(lg(0, 0), ComplexField(GRID, np.zeros((256, 256))))


@pytest.mark.parametrize("l", [1, -3, 2, 5, 0])
def test_winding_examples_and_radius_independence(l):
    f = lg(0, l, GridSpec(512, 8.0))
    for radius in np.linspace(0.5, 2.0, 7):
        assert winding_number(f, radius) == l


def test_winding_off_centre_loop_misses_vortex():
    f = lg(0, 2, GridSpec(512, 8.0))
    assert winding_number(f, 0.5, center=(1.5, 0.0)) == 0


def test_winding_errors():
    f = lg(0, 1, GridSpec(256, 8.0))
    with pytest.raises(FieldError):
        winding_number(f, 2 * f.spec.spacing)
    r, _ = f.spec.polar()
    holed = ComplexField(f.spec, np.where(np.abs(r - 1) < 0.2, 0, f.data))
    with pytest.raises(FieldError):
        winding_number(holed, 1.0)
    with pytest.raises(FieldError):
        winding_number(f, 7.99)


def test_rotation_residual_zero_shift():
    for spec in (
        StateSpec(Family.HW, CoherentParam(2.0, 0.4)),
        StateSpec(Family.SU11_BG_SUB, CoherentParam(1.0, 0.2), k=0.75, n=1),
    ):
        assert rotation_residual(spec, 0.0, 0.7) < 1e-15


@pytest.mark.parametrize("sign, rate", [(1, -1.0), (-1, 1.0)])
def test_rotation_residual_hw(sign, rate):
    spec = StateSpec(Family.HW, CoherentParam(2.0, 0.4), sign=sign)
    assert rotation_residual(spec, 0.9, rate) < 1e-10
    assert rotation_residual(spec, 0.9, -rate) > 1e-3


def test_rotation_residual_su2():
    spec = StateSpec(Family.SU2_GP, CoherentParam(1.2, 0.4), j=2)
    assert rotation_residual(spec, 1.3, 0.5) < 1e-10
    assert rotation_residual(spec, 1.3, 1.0) > 1e-3


def test_report_csv():
    rows = [
        ReportRow("hw", "zeta=1", "norm", 1.0000001, 1.0, 1e-7, True),
        ReportRow("lg", "p=0 l=0", "limit", 0.1, 0.0, 0.1, False),
    ]
    buf = io.StringIO()
    write_report(rows, buf)
    parsed = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(parsed[0]) == REPORT_COLUMNS
    assert parsed[1] == ["hw", "zeta=1", "norm", "1.0000001", "1.0", "1e-07", "pass"]
    assert parsed[2][-1] == "fail"
    assert float(parsed[1][3]) == 1.0000001
