"""Parameter sweeps over the two unfoldings with singularity location and dimensions.

BT:            x' = y, y' = b1 + b2 x + x^2 - x y
DegenerateBT:  x' = y, y' = b1 x + b2 y + x^3 - x^2 y
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction

import numpy as np

from .blowup import separatrix_leading, solve_invariant_graph
from .boxdim import (DimensionEstimate, EstimatorConfig, dim_theorem_box,
                     estimate_dim_boxcount, formula_estimate)
from .classify import Kind, classify_nilpotent
from .errors import InputError, NilfracError, NonTriangularError
from .polyfield import BiPoly, NilpotentModel, PlanarVectorField, PuiseuxSeries
from .unitmap import GraphManifold, Orbit, Termination, iterate_orbit, tail_completion

ZERO_TOL = 1e-9
NEWTON_TOL = 1e-12
FOLD_TOL = 1e-4
MERGE_TOL = 1e-5
SLOW_RATIO = 0.1


class Unfolding(str, Enum):
    BT = "bt"
    DEGENERATE_BT = "dbt"


# value of the centre-manifold dimension on the saddle-node curves
CURVE_DIM = {Unfolding.BT: Fraction(1, 2), Unfolding.DEGENERATE_BT: Fraction(2, 3)}
# value on the Hopf curve, carried from the literature and never estimated
HOPF_ANNOTATION = Fraction(4, 3)


def unfolding_field(unfolding: Unfolding, b1, b2, exact: bool = False) -> PlanarVectorField:
    u = Unfolding(unfolding)
    if u is Unfolding.BT:
        terms = [(0, 0, b1), (1, 0, b2), (2, 0, 1), (1, 1, -1)]
    else:
        terms = [(1, 0, b1), (0, 1, b2), (3, 0, 1), (2, 1, -1)]
    if exact:
        terms = [(i, j, Fraction(c)) for i, j, c in terms]
    return PlanarVectorField.from_terms([(0, 1, 1)], terms, exact=exact)


def saddle_node_curve(unfolding: Unfolding, b2: float) -> float:
    """b1 on the saddle-node curve T over the given b2."""
    return b2 * b2 / 4 if Unfolding(unfolding) is Unfolding.BT else 0.0


def curve_tag(unfolding: Unfolding, b1: float, b2: float, tol: float = 1e-12) -> str:
    """'T-', 'T+', 'H' or '' for a parameter point; the origin is the organising centre 'BT'."""
    u = Unfolding(unfolding)
    if abs(b1) <= tol and abs(b2) <= tol:
        return "BT"
    if abs(b1 - saddle_node_curve(u, b2)) <= tol:
        return "T-" if b2 < 0 else "T+"
    if u is Unfolding.BT and abs(b1) <= tol and b2 < 0:
        return "H"
    if u is Unfolding.DEGENERATE_BT and abs(b2) <= tol and b1 < 0:
        return "H"
    return ""


def bt_region(b1: float, b2: float) -> int:
    """1 where the BT unfolding has no singular points, otherwise 2 (split further by H and P)."""
    return 1 if b1 > b2 * b2 / 4 else 2


# ---------------------------------------------------------------- singularities


def _jac(ff: PlanarVectorField, x: float, y: float) -> np.ndarray:
    rows = [[ff.P.diff(0), ff.P.diff(1)], [ff.Q.diff(0), ff.Q.diff(1)]]
    return np.array([[d.compiled(x, y) for d in r] for r in rows], dtype=float)


def _newton(ff: PlanarVectorField, x: float, y: float, iters: int = 200):
    f = ff.rhs
    for _ in range(iters):
        F = np.array(f(x, y))
        r = float(np.max(np.abs(F)))
        if r < NEWTON_TOL:
            return x, y, r
        J = _jac(ff, x, y)
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            d = -np.linalg.lstsq(J, F, rcond=None)[0]
        t = 1.0
        while t > 1e-6:
            xn, yn = x + t * d[0], y + t * d[1]
            if float(np.max(np.abs(f(xn, yn)))) < r:
                break
            t /= 2
        x, y = xn, yn
    F = np.array(f(x, y))
    return x, y, float(np.max(np.abs(F)))


def find_singularities(field: PlanarVectorField, box: float = 3.0, n: int = 61) -> list[tuple[float, float]]:
    """Zeros of the field in [-box, box]^2 by damped Newton from a coarse grid.

    Seeds are grid cells where both components change sign, plus grid nodes
    where |F| is locally minimal (which catches double zeros without a sign
    change).
    """
    ff = field.to_float()
    g = np.linspace(-box, box, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    P = ff.P.compiled(X, Y) * np.ones_like(X)
    Q = ff.Q.compiled(X, Y) * np.ones_like(X)
    seeds = []
    sP = np.sign(P)
    sQ = np.sign(Q)

    def changes(s):
        c = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
        return (c.max(axis=0) >= 0) & (c.min(axis=0) <= 0)

    cell = changes(sP) & changes(sQ)
    for i, j in zip(*np.nonzero(cell)):
        seeds.append(((g[i] + g[i + 1]) / 2, (g[j] + g[j + 1]) / 2))
    N = np.hypot(P, Q)
    pad = np.pad(N, 1, constant_values=np.inf)
    nb = np.stack([pad[1 + di:n + 1 + di, 1 + dj:n + 1 + dj]
                   for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj])
    for i, j in zip(*np.nonzero(N <= nb.min(axis=0))):
        seeds.append((g[i], g[j]))
    found: list[tuple[float, float]] = []
    for sx, sy in seeds:
        x, y, r = _newton(ff, sx, sy)
        if r >= NEWTON_TOL or abs(x) > box or abs(y) > box:
            continue
        x, y = _polish_fold(ff, x, y)
        x, y = _refine_multiple(ff, x, y)
        # a double zero is only located to about sqrt(machine eps) by Newton
        if all(math.hypot(x - u, y - v) > MERGE_TOL for u, v in found):
            found.append((x, y))
    return sorted(found)


def _refine_multiple(ff: PlanarVectorField, x: float, y: float) -> tuple[float, float]:
    """Refine a zero of multiplicity > 2 when x' = y.

    Zeros are then (x, 0) with q(x) = Q(x, 0) = 0, and Newton on the first
    derivative of q that does not vanish at x has a simple root there.
    """
    if dict(ff.P.coeffs) != {(0, 1): 1.0} or abs(np.linalg.det(_jac(ff, x, y))) > FOLD_TOL:
        return x, y
    deg = max((i for (i, j) in ff.Q.coeffs if j == 0), default=0)
    q = np.polynomial.Polynomial([ff.Q[(i, 0)] for i in range(deg + 1)])
    # multiplicity: order of the first derivative that stays away from zero
    m = next((k for k in range(1, deg + 1) if abs(q.deriv(k)(x)) >= FOLD_TOL), deg)
    if m < 2:
        return x, y
    g, dg = q.deriv(m - 1), q.deriv(m)
    px = x
    for _ in range(50):
        d = dg(px)
        if d == 0:
            break
        step = g(px) / d
        px -= step
        if abs(step) < 1e-16:
            break
    if abs(px - x) < 1e-3 and abs(q(px)) <= abs(q(x)):
        return float(px), 0.0
    return x, y


def _polish_fold(ff: PlanarVectorField, x: float, y: float) -> tuple[float, float]:
    """Gauss-Newton on (P, Q, det J) near a singular Jacobian.

    At a fold the augmented system is regular, so this recovers the double
    zero to full precision.  The original point is kept if polishing fails.
    """
    if abs(np.linalg.det(_jac(ff, x, y))) > FOLD_TOL:
        return x, y
    P, Q = ff.P, ff.Q
    D = P.diff(0) * Q.diff(1) - P.diff(1) * Q.diff(0)
    comps = [P, Q, D]
    grads = [(c.diff(0), c.diff(1)) for c in comps]
    px, py = x, y
    for _ in range(50):
        r = np.array([c.compiled(px, py) for c in comps])
        if np.max(np.abs(r)) < NEWTON_TOL:
            return px, py
        J = np.array([[g[0].compiled(px, py), g[1].compiled(px, py)] for g in grads])
        d = np.linalg.lstsq(J, -r, rcond=None)[0]
        px, py = px + d[0], py + d[1]
        if np.hypot(*d) < 1e-16:
            break
    r = np.array([c.compiled(px, py) for c in comps])
    if np.max(np.abs(r[:2])) < NEWTON_TOL and abs(r[2]) < ZERO_TOL and np.hypot(px - x, py - y) < 1e-4:
        return px, py
    return x, y


# ---------------------------------------------------------------- centre manifolds


@dataclass
class CentreManifoldOrbit:
    orbit: Orbit
    manifold: GraphManifold
    tail: np.ndarray
    point: tuple[float, float]
    exponent: int


SNAP_TOL = 1e-10


def _snapped(f: PlanarVectorField) -> PlanarVectorField:
    """Drop coefficients at root-finder noise level after translating to a singular point."""
    def clean(p):
        return BiPoly({k: float(v) for k, v in p.coeffs.items() if abs(v) > SNAP_TOL},
                      p.trunc, exact=False)
    return PlanarVectorField(clean(f.P), clean(f.Q))


def _reflect(f: PlanarVectorField) -> PlanarVectorField:
    """The field in coordinates (-x, -y)."""
    t, ex = f.trunc, f.exact
    X = BiPoly({(1, 0): -1}, t, ex)
    Y = BiPoly({(0, 1): -1}, t, ex)
    return PlanarVectorField(-f.P.substitute(X, Y), -f.Q.substitute(X, Y))


def _centre_series(tf: PlanarVectorField, r: int, c: float, terms: int = 8) -> PuiseuxSeries:
    for k in range(terms, 0, -1):
        try:
            return solve_invariant_graph(tf, r, c, 1, k).series
        except NonTriangularError:
            continue
    return PuiseuxSeries(Fraction(r), Fraction(1), (c,))


def _optimal_sum(series: PuiseuxSeries, x: float) -> float:
    """Sum of an asymptotic series stopped before its terms start to grow."""
    total, last = 0.0, math.inf
    for e, cj in sorted(series.terms().items()):
        t = float(cj) * x ** float(e)
        if abs(t) > last:
            break
        total += t
        if t != 0:
            last = abs(t)
    return total


def centre_manifold_orbit(field: PlanarVectorField, point: tuple[float, float],
                          max_iter: int = 20_000, s0: float | None = None) -> CentreManifoldOrbit:
    """Orbit on the centre manifold of a saddle-node whose first component is y.

    In coordinates centred at the point the manifold is y = c X^r + ..., with
    q(X, 0) ~ q_r X^r, c = -q_r / lambda and lambda the nonzero eigenvalue.
    Centre-manifold series of saddle-nodes are in general divergent, so the
    orbit is not projected onto a truncated series.  Instead time runs in the
    direction where lambda contracts, which pulls iterates onto the manifold.
    If the centre flow then points away from the singular point, the orbit is
    generated outward from near the point and reversed, which gives an orbit
    of the inverse map converging to the point.
    """
    x0, y0 = point
    tf = _snapped(field.to_float().translate(x0, y0))
    if dict(tf.P.coeffs) != {(0, 1): 1.0}:
        raise InputError("centre manifold orbits need x' = y")
    lam = float(tf.Q[(0, 1)])
    if abs(lam) < ZERO_TOL:
        raise InputError("no nonzero eigenvalue")
    qx = {i: float(c) for (i, j), c in tf.Q.coeffs.items() if j == 0}
    if not qx:
        raise InputError("q(X, 0) vanishes; the centre manifold is a line of singular points")
    r = min(qx)
    if r < 2:
        raise InputError("singular point is not a saddle-node")
    c = -qx[r] / lam
    reverse = lam > 0
    sc = -c if reverse else c          # centre flow X' = sc X^r in the chosen time
    lead = GraphManifold(PuiseuxSeries(Fraction(r), Fraction(1), (c,)))
    flip = r % 2 == 0 and sc > 0
    if flip:
        tf = _reflect(tf)
        c, sc = -c, -sc
    if s0 is None:
        # centre rate a tenth of |lambda|: inside the fast-slow regime
        s0 = min(0.5, (SLOW_RATIO * abs(lam) / abs(sc)) ** (1.0 / (r - 1)))
    series = _centre_series(tf, r, c)
    if sc < 0:
        seed = (s0, _optimal_sum(series, s0))
        orb = iterate_orbit(tf, seed, max_iter=max_iter, reverse=reverse, floor=1e-12)
        pts = orb.points
        term = orb.termination
    else:
        # outward from X1 chosen so that about max_iter steps reach s0
        x1 = (s0 ** (1 - r) + (r - 1) * abs(sc) * max_iter) ** (-1.0 / (r - 1))
        seed = (x1, _optimal_sum(series, x1))
        orb = iterate_orbit(tf, seed, max_iter=3 * max_iter, reverse=reverse,
                            floor=0.0, domain=s0)
        pts = orb.points[::-1]
        term = Termination.MAX_ITERATIONS
    if flip:
        pts = -pts
    out = Orbit(np.ascontiguousarray(pts), term, tuple(pts[0]), orb.map_descriptor,
                orb.floor, orb.message, {"reversed": sc >= 0, "exponent": r})
    return CentreManifoldOrbit(out, lead, tail_completion(out, lead), (x0, y0), r)


# ---------------------------------------------------------------- sweep


@dataclass
class SingularPoint:
    x: float
    y: float
    kind: str
    det: float
    trace: float
    dim: DimensionEstimate | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "kind": self.kind, "det": self.det,
                "trace": self.trace, "dim": self.dim.to_json() if self.dim else None,
                "note": self.note}


@dataclass
class Cell:
    b1: float
    b2: float
    singularities: list[SingularPoint]
    tag: str = ""
    error: str = ""

    @property
    def n_sing(self) -> int:
        return len(self.singularities)

    def to_json(self) -> dict:
        return {"b1": self.b1, "b2": self.b2, "tag": self.tag, "error": self.error,
                "singularities": [s.to_json() for s in self.singularities]}


@dataclass(frozen=True)
class SweepConfig:
    n1: int = 41
    n2: int = 41
    b1_range: tuple[float, float] = (-1.0, 1.0)
    b2_range: tuple[float, float] = (-1.0, 1.0)
    curve_samples: int = 4
    curve_b2_min: float = 0.3
    max_iter: int = 20_000
    workers: int | None = None
    estimate_dims: bool = True

    def __post_init__(self):
        for lo, hi in (self.b1_range, self.b2_range):
            if not (-1.0 <= lo < hi <= 1.0):
                raise InputError("sweep ranges must lie in [-1, 1]")
        if self.n1 < 2 or self.n2 < 2:
            raise InputError("need at least two grid points per axis")


@dataclass
class SweepResult:
    unfolding: Unfolding
    grid: list[Cell]
    curve_points: list[Cell]
    curve_tags: dict = dc_field(default_factory=dict)
    expected: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"unfolding": self.unfolding.value,
                "expected": {k: str(v) for k, v in self.expected.items()},
                "curve_tags": self.curve_tags,
                "grid": [c.to_json() for c in self.grid],
                "curve_points": [c.to_json() for c in self.curve_points]}

    def to_csv(self) -> str:
        lines = ["b1,b2,tag,n_sing,kinds,dims"]
        for c in self.grid + self.curve_points:
            kinds = ";".join(s.kind for s in c.singularities)
            dims = ";".join("" if s.dim is None else f"{s.dim.value:.6g}" for s in c.singularities)
            lines.append(f"{c.b1!r},{c.b2!r},{c.tag},{c.n_sing},{kinds},{dims}")
        return "\n".join(lines) + "\n"


def _classify_point(unfolding: Unfolding, b1: float, b2: float, x: float, y: float,
                    estimate: bool, max_iter: int) -> SingularPoint:
    ff = unfolding_field(unfolding, b1, b2)
    J = _jac(ff, x, y)
    det, tr = float(np.linalg.det(J)), float(np.trace(J))
    if abs(det) >= ZERO_TOL:
        if det < 0:
            kind = "saddle"
        elif tr * tr >= 4 * det:
            kind = "node"
        else:
            kind = "focus" if abs(tr) >= ZERO_TOL else "centre-type"
        dim = formula_estimate(0) if kind in ("saddle", "node") else None
        return SingularPoint(x, y, kind, det, tr, dim)
    if abs(tr) >= ZERO_TOL:
        sp = SingularPoint(x, y, "saddle-node", det, tr)
        if estimate:
            try:
                cm = centre_manifold_orbit(ff, (x, y), max_iter=max_iter)
                sp.dim = estimate_dim_boxcount(cm.orbit.points, EstimatorConfig(), tail=cm.tail)
            except NilfracError as exc:
                sp.note = str(exc)
        return sp
    sp = SingularPoint(x, y, "nilpotent", det, tr)
    try:
        tf = _snapped(unfolding_field(unfolding, b1, b2).translate(x, y))
        rep = classify_nilpotent(tf)
        sp.kind = rep.kind.value
        if rep.kind is Kind.CUSP:
            model = NilpotentModel(rep.a, rep.m, rep.b or 0, rep.n or 1)
            g = separatrix_leading(model)[0].gamma
            sp.dim = formula_estimate(dim_theorem_box(rep.m, rep.n or rep.m, g).dim_orbit)
    except NilfracError as exc:
        sp.note = str(exc)
    return sp


def _run_cell(args) -> Cell:
    unfolding, b1, b2, estimate, max_iter = args
    tag = curve_tag(unfolding, b1, b2)
    try:
        pts = find_singularities(unfolding_field(unfolding, b1, b2))
    except (NilfracError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return Cell(b1, b2, [], tag, f"root finder failed: {exc}")
    sing = [_classify_point(unfolding, b1, b2, x, y, estimate, max_iter) for x, y in pts]
    return Cell(b1, b2, sing, tag)


def curve_sample_points(unfolding: Unfolding, cfg: SweepConfig) -> list[tuple[float, float]]:
    """Points placed exactly on T- and T+ (the grid rarely hits the curves)."""
    u = Unfolding(unfolding)
    k = cfg.curve_samples
    if k <= 0:
        return []
    mags = np.linspace(cfg.curve_b2_min, cfg.b2_range[1], k)
    out = []
    for b2 in list(-mags) + list(mags):
        if cfg.b2_range[0] <= b2 <= cfg.b2_range[1]:
            b1 = saddle_node_curve(u, float(b2))
            if cfg.b1_range[0] <= b1 <= cfg.b1_range[1]:
                out.append((float(b1), float(b2)))
    return out


def run_sweep(unfolding: Unfolding, cfg: SweepConfig = SweepConfig()) -> SweepResult:
    u = Unfolding(unfolding)
    b1s = np.linspace(*cfg.b1_range, cfg.n1)
    b2s = np.linspace(*cfg.b2_range, cfg.n2)
    # round grid values so that exact curve points such as b1 = 0 are hit exactly
    grid = [(round(float(b1), 12), round(float(b2), 12)) for b1 in b1s for b2 in b2s]
    curve = curve_sample_points(u, cfg)
    # only cells on a singular curve need orbit estimates
    jobs = [(u, b1, b2, cfg.estimate_dims, cfg.max_iter) for b1, b2 in grid + curve]
    workers = cfg.workers if cfg.workers is not None else min(8, os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(_run_cell, jobs, chunksize=16))
    else:
        cells = [_run_cell(j) for j in jobs]
    grid_cells, curve_cells = cells[:len(grid)], cells[len(grid):]
    tags: dict[str, int] = {}
    for c in cells:
        if c.tag:
            tags[c.tag] = tags.get(c.tag, 0) + 1
    expected = {"T": CURVE_DIM[u], "H (annotation only)": HOPF_ANNOTATION}
    return SweepResult(u, grid_cells, curve_cells, tags, expected)
