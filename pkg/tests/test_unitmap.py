import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from scipy.integrate import solve_ivp

from nilfrac.errors import InputError, TruncationError
from nilfrac.integrate import dopri5
from nilfrac.polyfield import BiPoly, NilpotentModel, PlanarVectorField, PuiseuxSeries
from nilfrac.unitmap import (GraphManifold, Termination, iterate_orbit, numeric_unit_map,
                             picard_iterates, picard_jet, tail_completion)

X, Y = sp.symbols("x y")


def lie_series_jet(P, Q, deg):
    """Degree-deg jet of the time-one map via the Lie series sum L^k(id)/k!."""
    def trunc(e):
        p = sp.Poly(sp.expand(e), X, Y)
        return sum((c * X**i * Y**j for (i, j), c in p.terms() if i + j <= deg), sp.Integer(0))

    out = []
    for g in (X, Y):
        total, term = g, g
        for k in range(1, deg * (deg + 1) + 2):
            term = trunc(P * sp.diff(term, X) + Q * sp.diff(term, Y))
            if term == 0:
                break
            total += term / sp.factorial(k)
        out.append(sp.Poly(sp.expand(total), X, Y))
    return out


def field_sympy(f: PlanarVectorField):
    def conv(p):
        return sum((sp.Rational(c) * X**i * Y**j for (i, j), c in p.items()), sp.Integer(0))
    return conv(f.P), conv(f.Q)


@pytest.mark.parametrize("params", [(1, 2, 3, 3), (2, 3, -1, 3), (1, 4, 5, 1), (-1, 5, -4, 2)])
def test_jet_matches_lie_series(params):
    a, m, b, n = params
    f = NilpotentModel(Fraction(a), m, Fraction(b), n).to_field()
    deg = max(m, n + 1) + 1
    jet = picard_jet(f, deg)
    refx, refy = lie_series_jet(*field_sympy(f), deg)
    for got, ref in ((jet.X, refx), (jet.Y, refy)):
        want = {k: Fraction(str(c)) for k, c in ref.as_dict().items() if sum(k) <= deg}
        assert got.coeffs == want


def test_non_nilpotent_jet_uses_lie_path():
    f = PlanarVectorField.from_terms([(1, 0, -1), (2, 0, 1)], [(0, 1, 2), (1, 1, 1)])
    jet = picard_jet(f, 4)
    # linear part of the time-one map is diag(e^-1, e^2)
    assert float(jet.linear_part[0][0]) == pytest.approx(math.exp(-1), rel=1e-12)
    assert float(jet.linear_part[1][1]) == pytest.approx(math.exp(2), rel=1e-12)


def test_picard_stabilisation():
    f = NilpotentModel(Fraction(1), 3, Fraction(-2), 1).to_field()
    its = picard_iterates(f, 6)
    for k in range(1, len(its)):
        prev, cur = its[k - 1], its[k]
        deg = prev.k
        assert prev.spatial_part(deg) == cur.spatial_part(deg)


def test_jet_errors():
    f = NilpotentModel(Fraction(1), 2).to_field(trunc=4)
    with pytest.raises(TruncationError):
        picard_jet(f, 6)
    with pytest.raises(InputError):
        picard_jet(f, 0)
    with pytest.raises(InputError):
        picard_iterates(f.to_float(), 3)


def test_numeric_map_matches_scipy():
    f = NilpotentModel(Fraction(1), 3, Fraction(-1), 2).to_field()
    rhs = f.to_float().rhs
    for p in [(0.3, -0.1), (-0.2, 0.25), (0.05, 0.01)]:
        got = numeric_unit_map(f, p)
        ref = solve_ivp(lambda t, z: rhs(*z), (0, 1), p, method="DOP853", rtol=1e-12, atol=1e-14)
        assert np.allclose(got, ref.y[:, -1], rtol=1e-8, atol=1e-12)


def test_jet_error_scales_with_order():
    f = NilpotentModel(Fraction(1), 2, Fraction(-1), 1).to_field()
    jet = picard_jet(f, 4)
    errs = []
    for r in (0.02, 0.01):
        p = (r, r)
        ex = numeric_unit_map(f, p, tol=1e-13, atol=1e-16)
        errs.append(math.hypot(jet(*p)[0] - ex[0], jet(*p)[1] - ex[1]))
    # remainder is O(r^5): halving r cuts it by roughly 32
    assert 16 < errs[0] / errs[1] < 64


def test_dopri5_rotation():
    x, y, _ = dopri5(lambda x, y: (-y, x), 1.0, 0.0, 2 * math.pi, 1e-11, 1e-13)
    assert x == pytest.approx(1.0, abs=1e-9) and y == pytest.approx(0.0, abs=1e-9)


def test_orbit_terminations():
    f = NilpotentModel(Fraction(1), 3, Fraction(-1), 2).to_field()
    # stable branch of a saddle without projection drifts away
    orb = iterate_orbit(f, (0.5, -0.35), max_iter=5000)
    assert orb.termination in (Termination.LEFT_DOMAIN, Termination.MAX_ITERATIONS)
    lin = PlanarVectorField.from_terms([(1, 0, -1)], [(0, 1, -2)])
    orb = iterate_orbit(lin, (0.5, 0.5), floor=1e-6)
    assert orb.termination is Termination.REACHED_FLOOR
    assert np.hypot(*orb.points[-1]) < 1e-6
    with pytest.raises(InputError):
        iterate_orbit(lin, (0.0, 0.0))


def test_orbit_csv_header():
    lin = PlanarVectorField.from_terms([(1, 0, -1)], [(0, 1, -1)])
    orb = iterate_orbit(lin, (0.5, 0.5), floor=1e-3)
    lines = orb.to_csv().splitlines()
    assert lines[0] == "k,x,y" and len(lines) == len(orb) + 1


def test_projection_keeps_orbit_on_graph():
    # y' = -y x^2 keeps y = 0 invariant; graph y = x^2 is not, projection forces it
    f = PlanarVectorField.from_terms([(3, 0, -1)], [(2, 1, -1)])
    man = GraphManifold(PuiseuxSeries.from_terms({Fraction(2): 1.0}, 1))
    orb = iterate_orbit(f, (0.5, 0.25), max_iter=200, manifold=man)
    assert np.allclose(orb.y[1:], orb.x[1:] ** 2)


def test_tail_completion():
    f = PlanarVectorField.from_terms([(3, 0, -1)], [(0, 1, -1)])
    orb = iterate_orbit(f, (0.5, 0.0), max_iter=300)
    assert orb.termination is Termination.MAX_ITERATIONS
    tail = tail_completion(orb)
    last_step = abs(orb.x[-1] - orb.x[-2])
    assert len(tail) > 0
    assert tail[:, 0].max() < orb.x[-1]
    assert np.all(np.diff(np.sort(tail[:, 0])) <= last_step * 1.0001)
    done = iterate_orbit(f, (0.5, 0.0), max_iter=300, floor=0.1)
    assert len(tail_completion(done)) == 0
