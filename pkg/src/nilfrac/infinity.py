"""Poincare charts at infinity for the nilpotent model and their orbit dimensions.

Chart U1: x = 1/v, y = u/v.  Chart U2: x = u/v, y = 1/v.  Components are
computed as Laurent polynomials in v, multiplied by the smallest power of v
that makes them polynomial, and divided by their common monomial.  The
stored divisor is the monomial (with a possibly negative v exponent) that
multiplies the stored field to give the raw chart field.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .blowup import solve_invariant_graph
from .boxdim import (DimensionEstimate, EstimatorConfig, estimate_dim_boxcount,
                     estimate_dim_sausage)
from .errors import InputError
from .polyfield import BiPoly, NilpotentModel, PlanarVectorField, PuiseuxSeries
from .unitmap import GraphManifold, Orbit, iterate_orbit, tail_completion


class Chart(str, Enum):
    U1 = "u1"
    U2 = "u2"


@dataclass(frozen=True)
class ChartSystem:
    chart: Chart
    field: PlanarVectorField
    divisor: tuple[int, int]
    source: NilpotentModel | None = None


def _laurent_add(d: dict, k, v):
    d[k] = d.get(k, 0) + v


def chart_transform(field: PlanarVectorField, chart: Chart) -> tuple[PlanarVectorField, tuple[int, int]]:
    """Chart image of a polynomial field, denominators cleared, common monomial removed."""
    chart = Chart(chart)
    ex = field.exact
    one = Fraction(1) if ex else 1.0
    # monomial x^i y^j in chart coordinates, as (u exponent, v exponent)
    if chart is Chart.U1:
        def mono(i, j):
            return j, -(i + j)
        indep, dep = field.P, field.Q        # v' = -v^2 P, u' = v (Q - u P)
    else:
        def mono(i, j):
            return i, -(i + j)
        indep, dep = field.Q, field.P        # v' = -v^2 Q, u' = v (P - u Q)
    U: dict = {}
    V: dict = {}
    for (i, j), c in dep.coeffs.items():
        a, b = mono(i, j)
        _laurent_add(U, (a, b + 1), c * one)
    for (i, j), c in indep.coeffs.items():
        a, b = mono(i, j)
        _laurent_add(U, (a + 1, b + 1), -c * one)
        _laurent_add(V, (a, b + 2), -c * one)
    U = {k: v for k, v in U.items() if v != 0}
    V = {k: v for k, v in V.items() if v != 0}
    keys = list(U) + list(V)
    if not keys:
        return PlanarVectorField(BiPoly.zero(field.trunc, ex), BiPoly.zero(field.trunc, ex)), (0, 0)
    du = min(k[0] for k in keys)
    dv = min(k[1] for k in keys)
    U = {(a - du, b - dv): v for (a, b), v in U.items()}
    V = {(a - du, b - dv): v for (a, b), v in V.items()}
    deg = max(a + b for a, b in list(U) + list(V))
    trunc = max(field.trunc, deg)
    return PlanarVectorField(BiPoly(U, trunc, ex), BiPoly(V, trunc, ex)), (du, dv)


def compactify(model: NilpotentModel, chart: Chart) -> ChartSystem:
    f = model.to_field()
    tf, div = chart_transform(f, chart)
    return ChartSystem(Chart(chart), tf, div, model)


def transition_u1_to_u2(u: float, v: float) -> tuple[float, float]:
    """Chart change on the overlap u != 0."""
    return 1.0 / u, v / u


def predicted_dim_infinity(m: int, n: int, chart: Chart) -> Fraction:
    chart = Chart(chart)
    if chart is Chart.U1:
        if m >= n + 1:
            raise InputError("chart U1 prediction covers m < n+1 only")
        return 1 - Fraction(1, 2 * n - m + 2)
    if m <= n + 1:
        return 1 - Fraction(1, n + 1)
    return 1 - Fraction(1, m + 1)


@dataclass(frozen=True)
class InfinityOrbit:
    orbit: Orbit
    manifold: PuiseuxSeries | None
    note: str
    tail: np.ndarray


def infinity_orbit(model: NilpotentModel, chart: Chart, s0: float = 0.5,
                   max_iter: int = 100_000, terms: int = 8) -> InfinityOrbit:
    """Orbit of the unit-time map on the invariant manifold used for the chart prediction.

    U1 (m < n+1): the centre manifold u = -(a/b) v^(n+1-m) + ... of the chart
    origin, from the graph recursion with v independent.
    U2: the equator v = 0, which is invariant and carries u' ~ -b u^(n+1)
    (m <= n+1) or u' ~ -a u^(m+1) (m > n+1).
    """
    chart = Chart(chart)
    cs = compactify(model, chart)
    a, b, m, n = model.a, model.b, model.m, model.n
    if chart is Chart.U1:
        if m >= n + 1 or b == 0:
            raise InputError("chart U1 orbit needs b != 0 and m < n+1")
        sol = solve_invariant_graph(cs.field, n + 1 - m, -a / b, 1, terms, indep=1)
        man = GraphManifold(sol.series.to_float(), indep=1)
        seed = man.point(s0)
        vdot = cs.field.to_float().rhs(*seed)[1]
        reverse = vdot * s0 > 0
        orb = iterate_orbit(cs.field, seed, max_iter=max_iter, reverse=reverse,
                            manifold=man, floor=1e-12)
        return InfinityOrbit(orb, sol.series, "centre manifold of the U1 origin",
                             tail_completion(orb, man))
    seed = (s0, 0.0)
    udot = cs.field.to_float().rhs(*seed)[0]
    if udot == 0:
        raise InputError("chart U2 equator carries no dynamics for this model")
    side = s0 if udot * s0 < 0 else -s0
    seed = (side, 0.0)
    orb = iterate_orbit(cs.field, seed, max_iter=max_iter, floor=1e-12)
    return InfinityOrbit(orb, None, "equator v = 0 of chart U2", tail_completion(orb))


def verify_dim_infinity(model: NilpotentModel, chart: Chart,
                        cfg: EstimatorConfig = EstimatorConfig(),
                        max_iter: int = 100_000) -> tuple[Fraction, DimensionEstimate]:
    chart = Chart(chart)
    pred = predicted_dim_infinity(model.m, model.n, chart)
    io = infinity_orbit(model, chart, max_iter=max_iter)
    est = estimate_dim_boxcount(io.orbit.points, cfg, tail=io.tail)
    return pred, est


def verify_dim_infinity_full(model: NilpotentModel, chart: Chart,
                             cfg: EstimatorConfig = EstimatorConfig(),
                             max_iter: int = 100_000) -> dict:
    """Prediction with box-count and sausage estimates and the orbit itself."""
    chart = Chart(chart)
    pred = predicted_dim_infinity(model.m, model.n, chart)
    io = infinity_orbit(model, chart, max_iter=max_iter)
    return {
        "predicted": pred,
        "boxcount": estimate_dim_boxcount(io.orbit.points, cfg, tail=io.tail),
        "sausage": estimate_dim_sausage(io.orbit.points, cfg, tail=io.tail),
        "orbit": io.orbit,
        "note": io.note,
    }
