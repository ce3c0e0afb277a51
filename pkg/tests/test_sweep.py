import csv
import io
import math

import numpy as np
import pytest

from nilfrac.errors import InputError
from nilfrac.polyfield import PlanarVectorField
from nilfrac.sweep import (SweepConfig, Unfolding, bt_region, centre_manifold_orbit, curve_tag,
                           find_singularities, run_sweep, unfolding_field)


@pytest.mark.parametrize("b1,b2", [(-0.5, 0.3), (0.01, 0.4), (-0.9, -0.9), (0.2, -0.1)])
def test_bt_roots_closed_form(b1, b2):
    pts = find_singularities(unfolding_field(Unfolding.BT, b1, b2))
    disc = b2 * b2 - 4 * b1
    want = [] if disc < 0 else sorted({(-b2 + s * math.sqrt(disc)) / 2 for s in (1, -1)})
    got = sorted(x for x, _ in pts)
    assert len(got) == len(want)
    assert np.allclose(got, want, atol=1e-9)
    assert all(abs(y) < 1e-12 for _, y in pts)


@pytest.mark.parametrize("b1,b2", [(-0.5, 0.3), (0.4, -0.2), (0.0, 0.6)])
def test_dbt_roots_closed_form(b1, b2):
    pts = find_singularities(unfolding_field(Unfolding.DEGENERATE_BT, b1, b2))
    want = [0.0] if b1 >= 0 else [-math.sqrt(-b1), 0.0, math.sqrt(-b1)]
    assert np.allclose(sorted(x for x, _ in pts), want, atol=1e-7)


def test_double_root_found_once():
    pts = find_singularities(unfolding_field(Unfolding.BT, 0.09, -0.6))
    assert len(pts) == 1 and pts[0][0] == pytest.approx(0.3, abs=1e-7)


def test_tags_and_regions():
    assert curve_tag(Unfolding.BT, 0, 0) == "BT"
    assert curve_tag(Unfolding.BT, 0.09, -0.6) == "T-"
    assert curve_tag(Unfolding.BT, 0.09, 0.6) == "T+"
    assert curve_tag(Unfolding.BT, 0.0, -0.6) == "H"
    assert curve_tag(Unfolding.BT, 0.0, 0.6) == ""
    assert curve_tag(Unfolding.DEGENERATE_BT, -0.6, 0.0) == "H"
    assert bt_region(0.5, 0.1) == 1 and bt_region(-0.5, 0.1) == 2


def test_centre_manifold_of_simple_saddle_node():
    # x' = y, y' = -y + x^2: centre manifold y = x^2 + ..., centre flow x' ~ x^2
    f = PlanarVectorField.from_terms([(0, 1, 1)], [(0, 1, -1), (2, 0, 1)], exact=False)
    cm = centre_manifold_orbit(f, (0.0, 0.0), max_iter=3000)
    x, y = cm.orbit.x, cm.orbit.y
    assert cm.exponent == 2
    assert np.all(np.abs(np.diff(np.abs(x))) > 0)
    assert abs(x[-1]) < abs(x[0])
    small = np.abs(x) < 0.01
    assert np.allclose(y[small], x[small] ** 2, rtol=0.05)


def test_centre_manifold_rejects_non_saddle_node():
    f = PlanarVectorField.from_terms([(0, 1, 1)], [(1, 0, 1), (0, 1, -1)], exact=False)
    with pytest.raises(InputError):
        centre_manifold_orbit(f, (0.0, 0.0))


def test_small_sweep_counts():
    res = run_sweep(Unfolding.BT, SweepConfig(n1=5, n2=5, curve_samples=1, estimate_dims=False))
    for cell in res.grid:
        if cell.b1 > cell.b2 ** 2 / 4 + 1e-9:
            assert cell.n_sing == 0
        elif cell.b1 < cell.b2 ** 2 / 4 - 1e-9:
            assert cell.n_sing == 2
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    assert len(rows) == len(res.grid) + len(res.curve_points)
    assert set(rows[0]) == {"b1", "b2", "tag", "n_sing", "kinds", "dims"}
    assert res.to_json()["unfolding"] == "bt"


def test_sweep_config_validation():
    with pytest.raises(InputError):
        SweepConfig(b1_range=(-2.0, 1.0))
    with pytest.raises(InputError):
        SweepConfig(n1=1)
