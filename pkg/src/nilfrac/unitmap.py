"""Unit-time map of a planar field: Taylor jet, numerical map and orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .errors import InputError, IntegrationError, TruncationError
from .integrate import dopri5
from .polyfield import BiPoly, PlanarVectorField, PuiseuxSeries

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_FLOOR = 1e-9
DEFAULT_MAX_ITER = 10**6
DOMAIN_BOUND = 10.0


@dataclass(frozen=True)
class UnitMapJet:
    X: BiPoly
    Y: BiPoly
    order: int
    linear_part: tuple

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        return self.X.compiled(x, y), self.Y.compiled(x, y)


# ---------------------------------------------------------------- Picard jet

# polynomials in (t, x, y) as {(p, i, j): c}


def _tp_add(a: dict, b: dict, s=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v != 0}


def _tp_mul(a: dict, b: dict, deg: int) -> dict:
    out: dict = {}
    for (p1, i1, j1), v1 in a.items():
        for (p2, i2, j2), v2 in b.items():
            if i1 + i2 + j1 + j2 > deg:
                continue
            k = (p1 + p2, i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def _tp_compose(N: BiPoly, X: dict, Y: dict, deg: int, one) -> dict:
    """N(X(t), Y(t)) with spatial degree truncated at deg."""
    out: dict = {}
    xp = {0: {(0, 0, 0): one}}
    yp = {0: {(0, 0, 0): one}}
    for (i, j), c in N.coeffs.items():
        if i + j > deg:
            continue
        for e, pw, base in ((i, xp, X), (j, yp, Y)):
            if e not in pw:
                top = max(pw)
                acc = pw[top]
                for q in range(top + 1, e + 1):
                    acc = _tp_mul(acc, base, deg)
                    pw[q] = acc
        term = _tp_mul(xp[i], yp[j], deg)
        for k, v in term.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def _tp_integrate(a: dict, tpow: int = 0) -> dict:
    """Integral over [0, t] of tau^tpow * a(tau)."""
    return {(p + tpow + 1, i, j): v / (p + tpow + 1) for (p, i, j), v in a.items()}


def _tp_at(a: dict, t, exact: bool, trunc: int) -> BiPoly:
    c: dict = {}
    for (p, i, j), v in a.items():
        c[(i, j)] = c.get((i, j), 0) + v * t ** p
    return BiPoly(c, trunc, exact)


def _tp_spatial(a: dict, deg: int) -> dict:
    return {k: v for k, v in a.items() if k[1] + k[2] <= deg}


@dataclass(frozen=True)
class PicardIterate:
    """k-th Picard iterate, components as polynomials in (t, x, y)."""

    k: int
    X: dict
    Y: dict

    def spatial_part(self, deg: int) -> tuple[dict, dict]:
        return _tp_spatial(self.X, deg), _tp_spatial(self.Y, deg)


def _nilpotent(A) -> bool:
    a, b = A[0]
    c, d = A[1]
    return a * a + b * c == 0 and b * (a + d) == 0 and c * (a + d) == 0 and c * b + d * d == 0


def picard_iterates(field: PlanarVectorField, k_max: int) -> list[PicardIterate]:
    """Iterates x^(k+1)(t) = e^{At}x + int_0^t e^{A(t-s)} N(x^(k)(s)) ds, k = 1..k_max.

    Requires an exact field with nilpotent linear part, so e^{At} = I + At.
    """
    if not field.exact:
        raise InputError("Picard iterates are computed in exact mode")
    A = field.jacobian()
    if not _nilpotent(A):
        raise InputError("exact Picard jet needs a nilpotent linear part")
    if field.P[(0, 0)] != 0 or field.Q[(0, 0)] != 0:
        raise InputError("origin is not a singular point")
    deg = k_max
    one = Fraction(1)
    (a11, a12), (a21, a22) = A
    # e^{At} x = (I + At) x
    X1 = {k: v for k, v in {(0, 1, 0): one, (1, 1, 0): a11, (1, 0, 1): a12}.items() if v != 0}
    Y1 = {k: v for k, v in {(0, 0, 1): one, (1, 1, 0): a21, (1, 0, 1): a22}.items() if v != 0}
    lin = BiPoly({(1, 0): a11, (0, 1): a12}, field.trunc, True)
    NP = field.P - lin
    NQ = field.Q - BiPoly({(1, 0): a21, (0, 1): a22}, field.trunc, True)
    out = [PicardIterate(1, X1, Y1)]
    X, Y = X1, Y1
    for k in range(1, k_max):
        nP = _tp_compose(NP, X, Y, deg, one)
        nQ = _tp_compose(NQ, X, Y, deg, one)
        S0P, S0Q = _tp_integrate(nP), _tp_integrate(nQ)
        S1P, S1Q = _tp_integrate(nP, 1), _tp_integrate(nQ, 1)

        def t_times(d):
            return {(p + 1, i, j): v for (p, i, j), v in d.items()}

        # (I + At) S0 - A S1
        Xn = _tp_add(X1, S0P)
        Yn = _tp_add(Y1, S0Q)
        for coef, src_t, src_1, tgt in ((a11, S0P, S1P, "X"), (a12, S0Q, S1Q, "X"),
                                        (a21, S0P, S1P, "Y"), (a22, S0Q, S1Q, "Y")):
            if coef == 0:
                continue
            delta = _tp_add({k2: coef * v for k2, v in t_times(src_t).items()},
                            {k2: coef * v for k2, v in src_1.items()}, -1)
            if tgt == "X":
                Xn = _tp_add(Xn, delta)
            else:
                Yn = _tp_add(Yn, delta)
        X, Y = _tp_spatial(Xn, deg), _tp_spatial(Yn, deg)
        out.append(PicardIterate(k + 1, X, Y))
    return out


def _lie_jet(field: PlanarVectorField, order: int) -> tuple[BiPoly, BiPoly]:
    """Float jet via the Lie series sum_k L^k(id)/k!."""
    P = field.P.to_float().with_trunc(order)
    Q = field.Q.to_float().with_trunc(order)

    def lie(g: BiPoly) -> BiPoly:
        return (g.diff(0) * P + g.diff(1) * Q).with_trunc(order)

    out = []
    for g in (BiPoly({(1, 0): 1.0}, order, False), BiPoly({(0, 1): 1.0}, order, False)):
        total = g
        term = g
        for k in range(1, 400):
            term = lie(term).scale(1.0 / k)
            total = total + term
            size = max((abs(v) for v in term.coeffs.values()), default=0.0)
            ref = max((abs(v) for v in total.coeffs.values()), default=1.0)
            if size <= 1e-18 * max(ref, 1.0):
                break
        out.append(total)
    return out[0], out[1]


def picard_jet(field: PlanarVectorField, order: int) -> UnitMapJet:
    """Taylor jet of the unit-time map at the origin up to total degree ``order``."""
    if order < 1:
        raise InputError("jet order must be at least 1")
    if order > field.trunc:
        raise TruncationError(f"order {order} exceeds field truncation {field.trunc}")
    if field.P[(0, 0)] != 0 or field.Q[(0, 0)] != 0:
        raise InputError("origin is not a singular point")
    if field.exact and _nilpotent(field.jacobian()):
        it = picard_iterates(field, order)[-1]
        X = _tp_at(it.X, Fraction(1), True, field.trunc)
        Y = _tp_at(it.Y, Fraction(1), True, field.trunc)
    else:
        X, Y = _lie_jet(field, order)
    lin = ((X[(1, 0)], X[(0, 1)]), (Y[(1, 0)], Y[(0, 1)]))
    return UnitMapJet(X, Y, order, lin)


# ---------------------------------------------------------------- numeric map


def numeric_unit_map(field: PlanarVectorField, p, tol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL, t: float = 1.0,
                     reverse: bool = False) -> tuple[float, float]:
    """phi_t(p) by adaptive integration (phi_{-t} when reverse is set)."""
    f = field.to_float().reversed().rhs if reverse else field.to_float().rhs
    x, y = float(p[0]), float(p[1])
    scale = min(1.0, max(abs(x), abs(y))) or 1.0
    xn, yn, _ = dopri5(f, x, y, t, tol, atol * scale, domain=DOMAIN_BOUND)
    return xn, yn


class Termination(str, Enum):
    REACHED_FLOOR = "ReachedFloor"
    MAX_ITERATIONS = "MaxIterations"
    LEFT_DOMAIN = "LeftDomain"
    CONVERGED = "ConvergedToFixedPoint"
    INTEGRATOR_ERROR = "IntegratorError"


@dataclass(frozen=True)
class GraphManifold:
    """Invariant curve given as a graph over one coordinate axis.

    ``indep`` 0 means y = h(x); 1 means x = h(y).  Only the side where the
    independent coordinate has sign ``side`` is represented.
    """

    series: PuiseuxSeries
    indep: int = 0
    side: int = 1

    def project(self, p: tuple[float, float]) -> tuple[float, float]:
        s = p[self.indep]
        if s * self.side <= 0:
            return p
        h = self.series(abs(s))
        return (s, h) if self.indep == 0 else (h, s)

    def point(self, s: float) -> tuple[float, float]:
        h = self.series(abs(s))
        return (s, h) if self.indep == 0 else (h, s)


@dataclass
class Orbit:
    points: np.ndarray
    termination: Termination
    seed: tuple[float, float]
    map_descriptor: str
    floor: float = DEFAULT_FLOOR
    message: str = ""
    meta: dict = dc_field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        lines = ["k,x,y"]
        lines += [f"{k},{x!r},{y!r}" for k, (x, y) in enumerate(self.points.tolist())]
        return "\n".join(lines) + "\n"


MAX_TAIL_POINTS = 2_000_000


def tail_completion(orbit: Orbit, manifold: GraphManifold | None = None,
                    limit: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """Points standing in for the part of the orbit beyond its last iterate.

    Only used when the orbit stopped at the iteration cap while still
    creeping toward ``limit``.  The unreached iterates lie on the arc from
    the last point to the limit with gaps below the last step, so at scales
    above that step their neighbourhood is the neighbourhood of the arc.  The
    arc is sampled at the last step length, along ``manifold`` if given and
    along the chord otherwise.
    """
    if orbit.termination is not Termination.MAX_ITERATIONS or len(orbit) < 2:
        return np.empty((0, 2))
    p, q = orbit.points[-1], orbit.points[-2]
    lim = np.asarray(limit, dtype=float)
    if manifold is not None:
        s_last = p[manifold.indep] - lim[manifold.indep]
        step = abs(p[manifold.indep] - q[manifold.indep])
    else:
        s_last = float(np.hypot(*(p - lim)))
        step = float(np.hypot(*(p - q)))
    if step == 0 or abs(s_last) <= step:
        return np.empty((0, 2))
    count = int(min(math.ceil(abs(s_last) / step), MAX_TAIL_POINTS))
    t = np.linspace(0.0, 1.0, count, endpoint=False)
    if manifold is None:
        return lim + np.outer(t, p - lim)
    pts = np.array([manifold.point(lim[manifold.indep] + tt * s_last) for tt in t])
    return pts


def iterate_orbit(field: PlanarVectorField, p0, floor: float = DEFAULT_FLOOR,
                  max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL, reverse: bool = False,
                  manifold: GraphManifold | None = None,
                  domain: float = DOMAIN_BOUND) -> Orbit:
    """Iterate the numeric unit-time map from p0.

    With ``manifold`` set, every image is put back on the given invariant
    graph, keeping its independent coordinate.  This removes the transverse
    error growth that makes separatrices of saddle-like points numerically
    unstable in either time direction.
    """
    x, y = float(p0[0]), float(p0[1])
    if x == 0.0 and y == 0.0:
        raise InputError("orbit seed must differ from the origin")
    ff = field.to_float()
    f = ff.reversed().rhs if reverse else ff.rhs
    pts = [(x, y)]
    h = None
    term = Termination.MAX_ITERATIONS
    msg = ""
    for _ in range(max_iter):
        scale = min(1.0, max(abs(x), abs(y)))
        try:
            xn, yn, h = dopri5(f, x, y, 1.0, tol, atol * scale, h0=h, domain=domain)
        except IntegrationError as exc:
            msg = str(exc)
            term = (Termination.LEFT_DOMAIN if "domain" in msg else Termination.INTEGRATOR_ERROR)
            break
        if manifold is not None:
            xn, yn = manifold.project((xn, yn))
        if math.hypot(xn - x, yn - y) <= 1e-15 * math.hypot(x, y):
            x, y = xn, yn
            pts.append((x, y))
            term = Termination.CONVERGED
            break
        x, y = xn, yn
        pts.append((x, y))
        r = math.hypot(x, y)
        if r < floor:
            term = Termination.REACHED_FLOOR
            break
        if r > domain:
            term = Termination.LEFT_DOMAIN
            break
    desc = f"unit-time map of {'-' if reverse else ''}F, F: {ff.P.to_str()} ; {ff.Q.to_str()}"
    return Orbit(np.array(pts, dtype=float), term, (float(p0[0]), float(p0[1])), desc,
                 floor, msg)
