"""Named example systems with published reference values."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from .blowup import separatrix_leading, separatrix_series
from .errors import InputError
from .infinity import Chart, infinity_orbit
from .polyfield import NilpotentModel, PlanarVectorField, PuiseuxSeries
from .surd import sqrt_exact
from .saddledual import saddle_field, saddle_infinity_orbit
from .sweep import Unfolding, centre_manifold_orbit, find_singularities, unfolding_field
from .unitmap import GraphManifold, Orbit, iterate_orbit, tail_completion

ORBIT_POINTS = 100_000
SEED_X = 0.5


class PresetKind(str, Enum):
    SEPARATRIX = "separatrix"
    UNFOLDING = "unfolding"
    INFINITY = "infinity"
    DUAL = "dual"


@dataclass(frozen=True)
class Expected:
    value: Any
    citation: str
    tol: float | None = None
    annotation: bool = False

    def to_json(self) -> dict:
        return {"value": str(self.value), "citation": self.citation, "tol": self.tol,
                "annotation": self.annotation}


@dataclass(frozen=True)
class Preset:
    name: str
    kind: PresetKind
    field: PlanarVectorField | NilpotentModel
    expected: dict[str, Expected]
    params: dict = dc_field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        for k, e in self.expected.items():
            if not e.citation:
                raise InputError(f"expected value {k} of {self.name} lacks a citation")

    def vector_field(self) -> PlanarVectorField:
        return self.field.to_field() if isinstance(self.field, NilpotentModel) else self.field


def _e(value, citation, tol=None, annotation=False) -> Expected:
    return Expected(value, citation, tol, annotation)


DIM_TOL = 0.05
ALPHA_TOL = 0.02
CURVE_TOL = 0.07
F = Fraction


def _sep(name, model, branch, kind, gamma, c0, dim, cite, desc):
    return Preset(name, PresetKind.SEPARATRIX, model, {
        "kind": _e(kind, cite + ", type"),
        "gamma": _e(gamma, cite + ", separatrix exponent"),
        "c0": _e(c0, cite + ", separatrix coefficient"),
        "alpha": _e(gamma, "increment exponent of the x-projection equals the separatrix exponent",
                    ALPHA_TOL),
        "dim_boxcount": _e(dim, cite + ", box dimension of the orbit", DIM_TOL),
        "dim_sausage": _e(dim, cite + ", box dimension of the orbit", DIM_TOL),
    }, {"branch": branch}, desc)


def _unf(name, unfolding, b1, b2, kind, dim, cite, desc, annotation=False):
    exp = {"dim": _e(dim, cite, None if annotation else CURVE_TOL, annotation)}
    if kind is not None:
        exp["kind"] = _e(kind, cite + ", type")
    return Preset(name, PresetKind.UNFOLDING, unfolding_field(unfolding, b1, b2),
                  exp, {"unfolding": Unfolding(unfolding), "b1": b1, "b2": b2}, desc)


def _inf(name, m, n, chart, dim, cite):
    return Preset(name, PresetKind.INFINITY, NilpotentModel(1, m, 1, n),
                  {"dim_boxcount": _e(dim, cite, DIM_TOL),
                   "dim_sausage": _e(dim, cite, DIM_TOL)},
                  {"chart": Chart(chart)},
                  f"x' = y, y' = x^{m} + x^{n} y at infinity, chart {chart.upper()}")


def _dual(name, k, dim, dual, cite):
    return Preset(name, PresetKind.DUAL, saddle_field(k), {
        "dim_boxcount": _e(dim, cite + ", v-axis orbit at infinity", DIM_TOL),
        "alpha": _e(2 * k, "increment exponent of v - v^(2k)", 0.05),
        "dual_dim": _e(dual, cite + ", dual box dimension"),
    }, {"k": k}, f"x' = y + (x^2 - y^2)^{k}, y' = x + (x^2 - y^2)^{k}")


_PRESETS = [
    _sep("cusp-BT", NilpotentModel(1, 2, -1, 1), 1, "Cusp", F(3, 2), -sqrt_exact(F(2, 3)), F(1, 3),
         "published value, cusp of the Bogdanov-Takens normal form",
         "x' = y, y' = x^2 - x y at the origin, stable separatrix"),
    _unf("BT-Tminus", "bt", 0.09, -0.6, "saddle-node", F(1, 2),
         "published value, Bogdanov-Takens unfolding on curve T-",
         "saddle-node on T-, centre manifold orbit"),
    _unf("BT-H", "bt", 0.0, -0.6, None, F(4, 3),
         "cited literature value on the Hopf curve (annotation only)",
         "weak focus on H, not estimated", annotation=True),
    _unf("BT-Tplus", "bt", 0.09, 0.6, "saddle-node", F(1, 2),
         "published value, Bogdanov-Takens unfolding on curve T+",
         "saddle-node on T+, centre manifold orbit"),
    _sep("nilpotent-saddle", NilpotentModel(1, 3, -1, 2), 1, "Saddle", F(2), -sqrt_exact(F(1, 2)),
         F(1, 2), "published value, nilpotent saddle of the degenerate unfolding",
         "x' = y, y' = x^3 - x^2 y at the origin, stable separatrix"),
    _unf("DBT-Tminus", "dbt", 0.0, -0.6, "saddle-node", F(2, 3),
         "published value, degenerate unfolding on curve T-",
         "saddle-node on T-, centre manifold orbit"),
    _unf("DBT-H", "dbt", -0.6, 0.0, None, F(4, 3),
         "cited literature value on the Hopf curve (annotation only)",
         "weak focus on H, not estimated", annotation=True),
    _unf("DBT-Tplus", "dbt", 0.0, 0.6, "saddle-node", F(2, 3),
         "published value, degenerate unfolding on curve T+",
         "saddle-node on T+, centre manifold orbit"),
    _sep("saddle-node", NilpotentModel(1, 4, 1, 1), 0, "SaddleNode", F(2), F(1, 2), F(3, 5),
         "published value, saddle-node example",
         "x' = y, y' = x^4 + x y, unstable separatrix y ~ x^2/2 in reverse time"),
    _sep("node", NilpotentModel(-1, 5, -4, 2), 0, "Node", F(3), F(-1, 3), F(2, 3),
         "published value, node example",
         "x' = y, y' = -x^5 - 4 x^2 y, branch y ~ -x^3/3"),
    _sep("elliptic-hyperbolic", NilpotentModel(-1, 3, 3, 1), 0, "EllipticHyperbolic", F(2), F(1),
         F(1, 2), "published value, example with elliptic and hyperbolic sectors",
         "x' = y, y' = -x^3 + 3 x y, branch y ~ x^2 in reverse time"),
    _inf("infinity-u1-m2n2", 2, 2, "u1", F(3, 4), "published value, chart U1 with m = n = 2"),
    _inf("infinity-u1-m2n3", 2, 3, "u1", F(5, 6), "published value, chart U1 with m = 2, n = 3"),
    _inf("infinity-u2-m2n2", 2, 2, "u2", F(2, 3), "published value, chart U2 with m = n = 2"),
    _inf("infinity-u2-m2n3", 2, 3, "u2", F(3, 4), "published value, chart U2 with m = 2, n = 3"),
    _dual("dual-k1", 1, F(1, 2), F(4, 3), "published value, weak saddle k = 1"),
    _dual("dual-k2", 2, F(3, 4), F(8, 5), "published value, weak saddle k = 2"),
]

PRESETS: dict[str, Preset] = {}
for _p in _PRESETS:
    if _p.name in PRESETS:
        raise RuntimeError(f"duplicate preset {_p.name}")
    PRESETS[_p.name] = _p


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


# ---------------------------------------------------------------- orbits


@dataclass
class PresetOrbit:
    orbit: Orbit
    tail: np.ndarray
    curve: np.ndarray | None = None
    series: PuiseuxSeries | None = None
    note: str = ""


def _curve(man: GraphManifold, s_max: float, n: int = 400) -> np.ndarray:
    s = np.linspace(0.0, s_max, n)
    return np.array([man.point(v) for v in s])


def separatrix_orbit(model: NilpotentModel, branch: int, x0: float = SEED_X,
                     max_iter: int = ORBIT_POINTS, terms: int = 8) -> PresetOrbit:
    """Orbit of the unit-time map along a separatrix branch on the side x > 0.

    Separatrices of these points attract in one time direction along the
    curve but repel transversally, so every image is put back on the series.
    """
    branches = separatrix_leading(model)
    if not 0 <= branch < len(branches):
        raise InputError(f"branch index {branch} out of range (0..{len(branches) - 1})")
    br = branches[branch]
    sb = separatrix_series(model, br, terms)
    man = GraphManifold(sb.series.to_float())
    reverse = br.c0 > 0
    orb = iterate_orbit(model.to_field(), man.point(x0), max_iter=max_iter,
                        reverse=reverse, manifold=man)
    note = f"branch {branch}: y ~ {br.c0} x^{br.gamma}, {'reverse' if reverse else 'forward'} time"
    return PresetOrbit(orb, tail_completion(orb, man), _curve(man, x0), sb.series, note)


def preset_orbit(p: Preset, max_iter: int | None = None) -> PresetOrbit | None:
    """The orbit behind a preset's numerical values (None for annotation-only presets)."""
    if p.kind is PresetKind.SEPARATRIX:
        return separatrix_orbit(p.field, p.params["branch"], max_iter=max_iter or ORBIT_POINTS)
    if p.kind is PresetKind.UNFOLDING:
        if any(e.annotation for e in p.expected.values()):
            return None
        f = p.field
        pts = find_singularities(f)
        if len(pts) != 1:
            raise InputError(f"{p.name}: expected one singular point, found {len(pts)}")
        cm = centre_manifold_orbit(f, pts[0], max_iter=max_iter or 20_000)
        return PresetOrbit(cm.orbit, cm.tail, None, None,
                           f"centre manifold of the saddle-node at {pts[0]}")
    if p.kind is PresetKind.INFINITY:
        io = infinity_orbit(p.field, p.params["chart"], max_iter=max_iter or ORBIT_POINTS)
        return PresetOrbit(io.orbit, io.tail, None, io.manifold, io.note)
    orb = saddle_infinity_orbit(p.params["k"], max_iter=max_iter or ORBIT_POINTS)
    return PresetOrbit(orb, tail_completion(orb), None, None, "invariant axis u = 0")
