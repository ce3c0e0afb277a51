import math
from fractions import Fraction

import numpy as np
import pytest

from nilfrac.boxdim import (EstimatorConfig, TheoremCase, box_count, characteristic_sets,
                            dim_orbit_2d_formula, dim_sequence_formula, dim_theorem_box,
                            estimate_dim_boxcount, estimate_dim_increment, estimate_dim_sausage,
                            estimate_increment_exponent, sausage_area_2d, sausage_length_1d,
                            scale_range)
from nilfrac.errors import EstimatorError, InputError


def power_sequence(alpha, n=100_000, x0=0.5):
    """x_{k+1} = x_k - x_k^alpha."""
    x = np.empty(n)
    x[0] = x0
    for k in range(n - 1):
        x[k + 1] = x[k] - x[k] ** alpha
    return x


def cantor(level=12):
    pts = np.array([0.0])
    for _ in range(level):
        pts = np.concatenate([pts / 3, pts / 3 + 2 / 3])
    return pts


def test_cantor_set():
    est = estimate_dim_boxcount(cantor())
    assert est.value == pytest.approx(math.log(2) / math.log(3), abs=0.03)
    est = estimate_dim_sausage(cantor())
    assert est.value == pytest.approx(math.log(2) / math.log(3), abs=0.03)


def test_harmonic_sequence():
    # {1/k} has box dimension 1/2
    pts = 1.0 / np.arange(1, 100_001)
    assert estimate_dim_boxcount(pts).value == pytest.approx(0.5, abs=0.05)
    assert estimate_dim_sausage(pts).value == pytest.approx(0.5, abs=0.05)


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_power_sequence(alpha):
    seq = power_sequence(alpha)
    got, fit = estimate_increment_exponent(seq)
    assert got == pytest.approx(alpha, abs=0.01)
    assert estimate_dim_increment(seq).value == pytest.approx(1 - 1 / alpha, abs=0.01)


def test_hyperbolic_sequence_has_dimension_zero():
    seq = 0.5 * 0.9 ** np.arange(300)
    est = estimate_dim_increment(seq)
    assert est.fit.hyperbolic and est.value == 0.0
    pts = np.column_stack([seq, 0.3 * seq])
    assert estimate_dim_boxcount(pts).value <= 0.1


def test_segment_and_square():
    t = np.linspace(0, 1, 20_000)
    seg = np.column_stack([t, 0.5 * t])
    assert estimate_dim_boxcount(seg).value == pytest.approx(1.0, abs=0.05)
    g = np.linspace(0, 1, 300)
    sq = np.array([(a, b) for a in g for b in g])
    assert estimate_dim_boxcount(sq, EstimatorConfig(min_decades=1.2)).value == \
        pytest.approx(2.0, abs=0.1)


def test_single_point():
    assert estimate_dim_boxcount(np.zeros((5, 2))).value == 0.0


def test_box_count_small():
    a = np.array([0.0, 0.1, 0.35, 0.9])
    assert box_count(a, 0.25) == 3
    assert box_count(np.array([[0, 0], [0.1, 0.1], [0.6, 0.0]]), 0.5) == 2


def test_sausage_length_brute_force():
    rng = np.random.default_rng(1)
    a = np.sort(rng.random(50))
    eps = 0.013
    grid = np.linspace(-0.1, 1.1, 1_200_001)
    covered = np.zeros_like(grid, dtype=bool)
    for v in a:
        covered |= np.abs(grid - v) <= eps
    brute = covered.mean() * 1.2
    assert sausage_length_1d(a, eps) == pytest.approx(brute, rel=1e-4)


def lens_union(r, d):
    if d >= 2 * r:
        return 2 * math.pi * r * r
    lens = 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)
    return 2 * math.pi * r * r - lens


@pytest.mark.parametrize("d", [0.5, 1.0, 1.7, 3.0])
def test_two_disk_union(d):
    pts = np.array([[0.0, 0.0], [d, 0.0]])
    area, mc = sausage_area_2d(pts, 1.0, EstimatorConfig(thin=0.0, rows_per_eps=400))
    assert not mc
    assert area == pytest.approx(lens_union(1.0, d), rel=2e-3)


def test_monte_carlo_agrees_with_raster():
    rng = np.random.default_rng(3)
    pts = np.cumsum(rng.normal(size=(400, 2)) * 0.01, axis=0)
    eps = 0.02
    exact, _ = sausage_area_2d(pts, eps, EstimatorConfig(thin=0.0, rows_per_eps=64))
    mc, used = sausage_area_2d(pts, eps, EstimatorConfig(thin=0.0, memory_bound=1,
                                                         mc_samples=400_000))
    assert used
    assert mc == pytest.approx(exact, rel=0.02)


def test_thinning_bounds_area():
    t = np.linspace(0, 1, 200_000)
    pts = np.column_stack([t, t * t])
    eps = 0.01
    full, _ = sausage_area_2d(pts, eps, EstimatorConfig(thin=0.0))
    thin, _ = sausage_area_2d(pts, eps)
    small, _ = sausage_area_2d(pts, eps * (1 - math.sqrt(2) / 32), EstimatorConfig(thin=0.0))
    assert small * 0.999 <= thin <= full * 1.001


def test_finite_stability():
    a = power_sequence(3.0, 50_000, 0.5)
    b = 2.0 + power_sequence(3.0, 50_000, 0.5)
    da = estimate_dim_boxcount(a).value
    dab = estimate_dim_boxcount(np.concatenate([a, b])).value
    assert abs(dab - da) <= 0.05


def test_projection_inequality():
    x = power_sequence(2.0, 50_000, 0.5)
    y = x ** 1.5
    planar = estimate_dim_boxcount(np.column_stack([x, y])).value
    assert planar >= max(estimate_dim_boxcount(x).value, estimate_dim_boxcount(y).value) - 0.05


def test_tail_only_adds_counts():
    x = power_sequence(3.0, 20_000)
    tail = np.linspace(0, x[-1], 5000, endpoint=False)
    lo, hi = scale_range(x)
    est = estimate_dim_boxcount(x, tail=tail)
    assert est.fit.epsilon_range[1] <= hi * (1 + 1e-12)
    with pytest.raises(InputError):
        estimate_dim_boxcount(x, tail=np.zeros((3, 2)))


def test_estimator_errors():
    with pytest.raises(EstimatorError):
        estimate_dim_boxcount(np.linspace(0, 1, 50))
    with pytest.raises(InputError):
        estimate_dim_boxcount(np.array([0.0, np.nan] * 100))
    with pytest.raises(InputError):
        estimate_dim_boxcount(np.zeros((200, 3)))
    with pytest.raises(EstimatorError):
        estimate_dim_boxcount(np.linspace(0, 1, 200), EstimatorConfig(eps_min=0.1, eps_max=0.2))
    with pytest.raises(EstimatorError):
        estimate_increment_exponent(np.arange(100.0))


def test_formulas():
    assert dim_sequence_formula(2) == Fraction(1, 2)
    assert dim_orbit_2d_formula(Fraction(3, 2), 3) == Fraction(2, 3)
    with pytest.raises(InputError):
        dim_sequence_formula(1)
    # cusp: gamma = 3/2 < sqrt(m) false, m <= n+1
    r = dim_theorem_box(2, 1, Fraction(3, 2))
    assert (r.dim_x, r.dim_y, r.dim_orbit) == (Fraction(1, 3), Fraction(1, 4), Fraction(1, 3))
    assert r.case is TheoremCase.C1I
    # node m = 5, n = 2, gamma = 3 > m? no: gamma must be below m
    r = dim_theorem_box(5, 2, 3)
    assert r.dim_orbit == Fraction(2, 3) and r.dim_x == Fraction(2, 3)
    with pytest.raises(InputError):
        dim_theorem_box(2, 1, 3)


def test_characteristic_sets():
    dc, ds = characteristic_sets(3)
    assert dc == [Fraction(4, 3), Fraction(8, 5), Fraction(12, 7)]
    assert ds[0] == Fraction(3, 2)
    with pytest.raises(InputError):
        characteristic_sets(0)
