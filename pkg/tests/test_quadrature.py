import math

import numpy as np
import pytest
from scipy.special import eval_hermite

from fockvortex import (
    InvalidParameterError,
    QuadratureField,
    QuadratureGrid,
    SqueezeParams,
    TwoModeState,
    apply_beam_splitter,
    count_vortices,
    evaluate_field,
    hermite_basis,
    hermite_function,
    make_tmss,
)

# mpmath, 40 digits
HERMITE_50_AT_3P7 = -0.05168667850813706662
HERMITE_7_AT_M1P3 = -0.40609866425190537779
PI_QUARTER_INV = 0.75112554446494248286


def test_hermite_frozen_values():
    assert hermite_function(50, 3.7) == pytest.approx(HERMITE_50_AT_3P7, abs=1e-14)
    assert hermite_function(7, -1.3) == pytest.approx(HERMITE_7_AT_M1P3, abs=1e-14)


def test_hermite_vacuum_peak():
    assert hermite_function(0, 0.0) == pytest.approx(PI_QUARTER_INV, abs=1e-15)


def test_hermite_against_scipy():
    x = np.linspace(-4.0, 4.0, 41)
    for n in range(12):
        norm = math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
        ref = eval_hermite(n, x) * np.exp(-0.5 * x * x) / norm
        assert np.max(np.abs(hermite_function(n, x) - ref)) < 1e-12


def test_hermite_orthonormal_riemann():
    x = np.linspace(-9.0, 9.0, 2001)
    dx = x[1] - x[0]
    table = hermite_basis(5, x)
    gram = table @ table.T * dx
    assert np.max(np.abs(gram - np.eye(6))) < 1e-9


def test_hermite_rejects_negative_order():
    with pytest.raises(InvalidParameterError):
        hermite_function(-1, 0.0)


def test_grid_from_spec():
    g = QuadratureGrid.from_spec("-2.0:2.0:5")
    assert g.n_x == g.n_y == 5
    assert g.x_axis()[0] == -2.0 and g.x_axis()[-1] == 2.0
    g2 = QuadratureGrid.from_spec("-1:1:3,-4:4:9")
    assert (g2.n_x, g2.n_y) == (3, 9)
    assert g2.y_axis()[0] == -4.0


@pytest.mark.parametrize("bad", ["", "1:2", "a:b:c", "1:2:0", "3:1:5"])
def test_grid_spec_validation(bad):
    with pytest.raises(InvalidParameterError):
        QuadratureGrid.from_spec(bad)


def test_vacuum_field_analytic():
    grid = QuadratureGrid.square(3.0, 31)
    fld = evaluate_field(TwoModeState({(0, 0): 1.0}, cutoff=0), grid)
    gx, gy = np.meshgrid(grid.x_axis(), grid.y_axis(), indexing="ij")
    expect = np.exp(-0.5 * (gx**2 + gy**2)) / math.sqrt(math.pi)
    assert np.max(np.abs(fld.values - expect)) < 1e-14


def test_field_riemann_norm():
    state = apply_beam_splitter(make_tmss(SqueezeParams(r=0.5, n_max=3)))
    fld = evaluate_field(state, QuadratureGrid.square(6.0, 201))
    assert fld.norm_riemann() == pytest.approx(1.0, abs=1e-3)


def test_field_csv_layout(tmp_path):
    grid = QuadratureGrid.from_spec("-1:1:2,-1:1:3")
    fld = evaluate_field(TwoModeState({(0, 0): 1.0}, cutoff=0), grid)
    path = tmp_path / "field.csv"
    fld.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "x,y,re,im,abs,arg"
    assert len(lines) == 1 + 2 * 3
    # y is the outer loop: x cycles fastest
    first_two = [line.split(",")[:2] for line in lines[1:3]]
    assert first_two[0][1] == first_two[1][1]
    assert first_two[0][0] != first_two[1][0]
    x0, y0, re0, im0, abs0, arg0 = (float(v) for v in lines[1].split(","))
    assert complex(re0, im0) == fld.values[0, 0]
    assert abs0 == abs(fld.values[0, 0])


def _synthetic(grid, charge):
    gx, gy = np.meshgrid(grid.x_axis(), grid.y_axis(), indexing="ij")
    z = gx + 1j * gy if charge > 0 else gx - 1j * gy
    return QuadratureField(grid, z ** abs(charge) * np.exp(-0.5 * (gx**2 + gy**2)))


def test_gaussian_has_no_vortices():
    fld = evaluate_field(TwoModeState({(0, 0): 1.0}, cutoff=0), QuadratureGrid.square(4.0, 101))
    report = count_vortices(fld)
    assert report.count == 0 and report.total_charge == 0


@pytest.mark.parametrize("charge", [1, -1])
def test_unit_charge_detection(charge):
    # even node count keeps the singularity strictly inside a plaquette
    report = count_vortices(_synthetic(QuadratureGrid.square(4.0, 162), charge))
    assert report.count == 1
    assert report.total_charge == charge
    v = report.vortices[0]
    assert abs(v["x"]) < 0.05 and abs(v["y"]) < 0.05
    assert v["charge"] == charge


def test_two_opposite_vortices():
    grid = QuadratureGrid.square(4.0, 162)
    gx, gy = np.meshgrid(grid.x_axis(), grid.y_axis(), indexing="ij")
    values = ((gx - 1.0) + 1j * gy) * ((gx + 1.0) - 1j * gy) * np.exp(-0.5 * (gx**2 + gy**2))
    report = count_vortices(QuadratureField(grid, values))
    assert report.count == 2
    assert report.total_charge == 0
    by_x = sorted(report.vortices, key=lambda v: v["x"])
    assert by_x[0]["charge"] == -1 and abs(by_x[0]["x"] + 1.0) < 0.05
    assert by_x[1]["charge"] == +1 and abs(by_x[1]["x"] - 1.0) < 0.05


def test_total_charge_stable_under_refinement():
    for n in (82, 122, 162, 242):
        report = count_vortices(_synthetic(QuadratureGrid.square(4.0, n), -1))
        assert report.total_charge == -1


def test_double_core_reports_one_merged_cluster():
    # a 4-corner loop resolves winding -1, 0, +1 only; the two unit cells a
    # double core produces are adjacent, and adjacent same-charge plaquettes
    # merge into a single reported vortex
    report = count_vortices(_synthetic(QuadratureGrid.square(4.0, 162), 2))
    assert report.count == 1
    assert report.vortices[0]["charge"] == 1
    assert abs(report.vortices[0]["x"]) < 0.1 and abs(report.vortices[0]["y"]) < 0.1


def test_node_on_zero_is_masked():
    # odd node count puts a lattice point exactly on the zero: the four
    # touching plaquettes have an undefined corner phase and are skipped
    report = count_vortices(_synthetic(QuadratureGrid.square(4.0, 161), 1))
    assert report.count == 0
