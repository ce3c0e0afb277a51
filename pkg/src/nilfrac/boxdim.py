"""Box dimension: closed forms and numerical estimators.

Estimators work on finite point sets (shape (N,) for sequences on a line,
(N, 2) for planar orbits).  All fits are least squares in log-log
coordinates over a trimmed window of log-spaced scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import linregress

from .errors import EstimatorError, InputError
from .surd import Surd


class Method(str, Enum):
    FORMULA_LEMMA2 = "FormulaLemma2"
    FORMULA_THEOREM4 = "FormulaTheorem4"
    BOX_COUNT = "BoxCount"
    SAUSAGE = "Sausage"
    INCREMENT_REGRESSION = "IncrementRegression"


NUMERICAL = {Method.BOX_COUNT, Method.SAUSAGE, Method.INCREMENT_REGRESSION}


@dataclass(frozen=True)
class Fit:
    epsilon_range: tuple[float, float]
    n_scales: int
    slope_stderr: float
    r_squared: float
    slope: float = float("nan")
    intercept: float = float("nan")
    hyperbolic: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {
            "epsilon_range": list(self.epsilon_range),
            "n_scales": self.n_scales,
            "slope_stderr": self.slope_stderr,
            "r_squared": self.r_squared,
            "slope": self.slope,
            "intercept": self.intercept,
            "hyperbolic": self.hyperbolic,
            "note": self.note,
        }


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    method: Method
    fit: Fit | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 2.0:
            raise ValueError("dimension outside [0, 2]")
        if (self.fit is not None) != (self.method in NUMERICAL):
            raise ValueError("fit diagnostics must accompany numerical methods only")

    def to_json(self) -> dict:
        return {"value": self.value, "method": self.method.value,
                "fit": None if self.fit is None else self.fit.to_json()}


@dataclass(frozen=True)
class EstimatorConfig:
    eps_min: float | None = None
    eps_max: float | None = None
    n_scales: int = 24
    trim: float = 0.1
    min_scales: int = 8
    min_decades: float = 2.5
    memory_bound: int = 20_000_000     # raster intervals per scale
    mc_samples: int = 10_000_000
    seed: int = 0
    rows_per_eps: int = 8
    thin: float = 1 / 32               # cell side for thinning, in units of eps


# ---------------------------------------------------------------- formulas


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def dim_sequence_formula(alpha) -> Fraction:
    alpha = _q(alpha)
    if alpha <= 1:
        raise InputError("increment exponent must exceed 1")
    return 1 - 1 / alpha


def dim_orbit_2d_formula(alpha, beta) -> Fraction:
    alpha, beta = _q(alpha), _q(beta)
    if alpha <= 1 or beta <= 1:
        raise InputError("increment exponents must exceed 1")
    return 1 - 1 / alpha if alpha >= beta else 1 - 1 / beta


class TheoremCase(str, Enum):
    C1I = "C1i"
    C1II = "C1ii"
    C2I = "C2i"
    C2II = "C2ii"


@dataclass(frozen=True)
class TheoremBoxResult:
    dim_orbit: Fraction
    dim_x: Fraction
    dim_y: Fraction
    case: TheoremCase

    def to_json(self) -> dict:
        return {"dim_orbit": str(self.dim_orbit), "dim_x": str(self.dim_x),
                "dim_y": str(self.dim_y), "case": self.case.value}


def dim_theorem_box(m: int, n: int, gamma) -> TheoremBoxResult:
    """Orbit and projection dimensions for a separatrix y ~ x^gamma, 1 < gamma < m."""
    g = _q(gamma)
    if not 1 < g < m:
        raise InputError("gamma must lie strictly between 1 and m")
    dim_x = 1 - 1 / g
    if m <= n + 1:
        dim_y = 1 - g / m
        first = g * g >= m
        case = TheoremCase.C1I if first else TheoremCase.C1II
    else:
        dim_y = 1 - g / (n + g)
        # gamma >= (1 + sqrt(1+4n))/2  <=>  gamma^2 - gamma >= n
        first = g * g - g >= n
        case = TheoremCase.C2I if first else TheoremCase.C2II
    return TheoremBoxResult(dim_x if first else dim_y, dim_x, dim_y, case)


def characteristic_sets(k_max: int) -> tuple[list[Fraction], list[Fraction]]:
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    D_c = [Fraction(4 * k, 2 * k + 1) for k in range(1, k_max + 1)]
    D_s = [2 - Fraction(1, k + 1) for k in range(1, k_max + 1)]
    return D_c, D_s


# ---------------------------------------------------------------- helpers


def _as_points(points) -> np.ndarray:
    a = np.asarray(points, dtype=float)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim not in (1, 2) or (a.ndim == 2 and a.shape[1] != 2):
        raise InputError("points must have shape (N,) or (N, 2)")
    if not np.all(np.isfinite(a)):
        raise InputError("points must be finite")
    return a


def _unique_points(a: np.ndarray) -> np.ndarray:
    return np.unique(a) if a.ndim == 1 else np.unique(a, axis=0)


def _nn_distances(a: np.ndarray) -> np.ndarray:
    if a.ndim == 1:
        s = np.sort(a)
        g = np.diff(s)
        left = np.concatenate([[np.inf], g])
        right = np.concatenate([g, [np.inf]])
        return np.minimum(left, right)
    d, _ = cKDTree(a).query(a, k=2)
    return d[:, 1]


def _diameter(a: np.ndarray) -> float:
    return float(np.ptp(a)) if a.ndim == 1 else float(np.max(np.ptp(a, axis=0)))


def scale_range(points, cfg: EstimatorConfig = EstimatorConfig()) -> tuple[float, float]:
    """Default scales: from a few smallest spacings up to the largest spacing.

    The top is also capped at a quarter of the diameter.  Above the largest
    nearest-neighbour distance the set cannot be told apart from a continuum,
    so larger scales carry no information about the accumulation.  The
    spacing cap is skipped when it would leave fewer than ``min_decades``.
    """
    a = _unique_points(_as_points(points))
    nn = _nn_distances(a)
    nn = nn[np.isfinite(nn) & (nn > 0)]
    lo = cfg.eps_min if cfg.eps_min is not None else 4.0 * float(np.min(nn))
    if cfg.eps_max is not None:
        return lo, cfg.eps_max
    hi = _diameter(a) / 4.0
    # evenly spread sets (segments, Cantor sets) have no isolated part to cap at
    cap = float(np.max(nn))
    if cap < hi and cap >= lo * 10 ** cfg.min_decades:
        hi = cap
    return lo, hi


def _scales(points, cfg: EstimatorConfig) -> np.ndarray:
    lo, hi = scale_range(points, cfg)
    if not (lo > 0 and hi > lo) or math.log10(hi / lo) < cfg.min_decades:
        raise EstimatorError(f"scale range [{lo:.3g}, {hi:.3g}] spans fewer than "
                             f"{cfg.min_decades} decades")
    if cfg.n_scales < cfg.min_scales:
        raise EstimatorError(f"need at least {cfg.min_scales} scales")
    return np.geomspace(lo, hi, cfg.n_scales)


def _window(n: int, trim: float) -> slice:
    k = int(math.floor(n * trim))
    return slice(k, n - k)


def _fit(logx: np.ndarray, logy: np.ndarray, eps: np.ndarray, trim: float):
    w = _window(len(logx), trim)
    lx, ly, e = logx[w], logy[w], eps[w]
    if len(lx) < 3:
        raise EstimatorError("too few scales left after trimming")
    res = linregress(lx, ly)
    return res, (float(e.min()), float(e.max())), len(lx)


def _trivial(a: np.ndarray, method: Method) -> DimensionEstimate | None:
    u = _unique_points(a)
    if len(u) == 1:
        return DimensionEstimate(0.0, method, Fit((0.0, 0.0), 0, 0.0, 1.0, 0.0, 0.0,
                                                  note="single point"))
    if len(a) < 100:
        raise EstimatorError("need at least 100 points")
    return None


def _clip(v: float) -> float:
    return float(min(2.0, max(0.0, v)))


# ---------------------------------------------------------------- box count


def box_count(a: np.ndarray, eps: float) -> int:
    """Number of grid cells of side eps (anchored at the minimum corner) hit by the set."""
    if a.ndim == 1:
        return int(np.unique(np.floor((a - a.min()) / eps)).size)
    q = np.floor((a - a.min(axis=0)) / eps)
    if q.max() < 2**31:
        k = q[:, 0].astype(np.int64) * np.int64(2**31) + q[:, 1].astype(np.int64)
        return int(np.unique(k).size)
    return int(np.unique(q, axis=0).shape[0])


def _with_tail(a: np.ndarray, tail) -> np.ndarray:
    if tail is None or len(tail) == 0:
        return a
    t = _as_points(tail)
    if t.ndim != a.ndim:
        raise InputError("tail must have the same shape as the points")
    return np.concatenate([a, t])


def estimate_dim_boxcount(points, cfg: EstimatorConfig = EstimatorConfig(),
                          tail=None) -> DimensionEstimate:
    """Box-count dimension; ``tail`` adds points counted but not used to pick scales."""
    a = _as_points(points)
    t = _trivial(a, Method.BOX_COUNT)
    if t is not None:
        return t
    eps = _scales(a, cfg)
    a = _with_tail(a, tail)
    counts = np.array([box_count(a, e) for e in eps], dtype=float)
    res, rng, k = _fit(np.log(1 / eps), np.log(counts), eps, cfg.trim)
    fit = Fit(rng, k, float(res.stderr), float(res.rvalue ** 2), float(res.slope),
              float(res.intercept))
    return DimensionEstimate(_clip(res.slope), Method.BOX_COUNT, fit)


# ---------------------------------------------------------------- sausage


def sausage_length_1d(a: np.ndarray, eps: float) -> float:
    """Exact length of the union of intervals [x - eps, x + eps]."""
    s = np.sort(a)
    g = np.diff(s)
    return float(2 * eps + np.minimum(g, 2 * eps).sum())


def _union_length_rows(row: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """Total length of per-row unions of intervals [lo, hi]."""
    order = np.lexsort((lo, row))
    row, lo, hi = row[order], lo[order], hi[order]
    # running max of interval ends within each row, via integer ranks so that
    # the max never leaks from one row into the next
    hs = np.sort(hi)
    rank = np.searchsorted(hs, hi)
    key = row.astype(np.int64) * np.int64(len(hs) + 1) + rank
    cm = np.maximum.accumulate(key)
    prev = np.empty_like(cm)
    prev[0] = -1
    prev[1:] = cm[:-1]
    same = np.zeros(len(row), dtype=bool)
    same[1:] = row[1:] == row[:-1]
    prev_end = np.where(same, hs[np.clip(prev - row.astype(np.int64) * np.int64(len(hs) + 1),
                                         0, len(hs) - 1)], -np.inf)
    start = np.maximum(lo, prev_end)
    return float(np.clip(hi - start, 0.0, None).sum())


def _raster_area(pts: np.ndarray, rows_per_eps: int) -> float:
    """Area of the union of unit disks, rows of height 1/rows_per_eps, exact in x."""
    h = 1.0 / rows_per_eps
    y0 = pts[:, 1].min() - 1.0
    kmin = np.ceil((pts[:, 1] - 1.0 - y0) / h - 0.5).astype(np.int64)
    kmax = np.floor((pts[:, 1] + 1.0 - y0) / h - 0.5).astype(np.int64)
    span = kmax - kmin + 1
    idx = np.repeat(np.arange(len(pts)), span)
    offs = np.arange(span.sum()) - np.repeat(np.cumsum(span) - span, span)
    row = kmin[idx] + offs
    yc = y0 + (row + 0.5) * h
    dy = yc - pts[idx, 1]
    half = np.sqrt(np.clip(1.0 - dy * dy, 0.0, None))
    x = pts[idx, 0]
    return _union_length_rows(row, x - half, x + half) * h


def _thin(pts: np.ndarray, h: float) -> np.ndarray:
    """One point per grid cell of side h (in units of eps).

    Every dropped point lies within h*sqrt(2) of a kept one, so the area sits
    between the areas at radii 1 - h*sqrt(2) and 1: a fixed factor in scale
    that leaves the log-log slope alone.
    """
    if h <= 0:
        return pts
    _, keep = np.unique(np.floor(pts / h), axis=0, return_index=True)
    return pts[np.sort(keep)]


def _mc_area(pts: np.ndarray, samples: int, seed: int) -> float:
    """Monte Carlo union area of unit disks: sum of areas times E[1/coverage]."""
    rng = np.random.default_rng(seed)
    tree = cKDTree(pts)
    acc = 0.0
    done = 0
    chunk = 1_000_000
    while done < samples:
        k = min(chunk, samples - done)
        i = rng.integers(0, len(pts), k)
        r = np.sqrt(rng.random(k))
        th = rng.random(k) * 2 * np.pi
        q = pts[i] + np.column_stack([r * np.cos(th), r * np.sin(th)])
        cover = tree.query_ball_point(q, 1.0, return_length=True)
        acc += float(np.sum(1.0 / np.maximum(cover, 1)))
        done += k
    return len(pts) * np.pi * acc / samples


def sausage_area_2d(a: np.ndarray, eps: float, cfg: EstimatorConfig = EstimatorConfig(),
                    nn: np.ndarray | None = None) -> tuple[float, bool]:
    """Area of the eps-neighbourhood of a planar point set; second value flags Monte Carlo."""
    if nn is None:
        nn = _nn_distances(a)
    iso = nn >= 2 * eps
    area = float(iso.sum()) * math.pi * eps * eps
    rest = a[~iso]
    if len(rest) == 0:
        return area, False
    pts = _thin((rest - rest.min(axis=0)) / eps, cfg.thin)
    cost = len(pts) * (2 * cfg.rows_per_eps + 1)
    if cost > cfg.memory_bound:
        return area + _mc_area(pts, cfg.mc_samples, cfg.seed) * eps * eps, True
    return area + _raster_area(pts, cfg.rows_per_eps) * eps * eps, False


def estimate_dim_sausage(points, cfg: EstimatorConfig = EstimatorConfig(),
                         tail=None) -> DimensionEstimate:
    """Sausage dimension; ``tail`` as for the box count."""
    a = _as_points(points)
    t = _trivial(a, Method.SAUSAGE)
    if t is not None:
        return t
    eps = _scales(_unique_points(a), cfg)
    a = _unique_points(_with_tail(a, tail))
    used_mc = False
    if a.ndim == 1:
        areas = np.array([sausage_length_1d(a, e) for e in eps])
        ambient = 1
    else:
        nn = _nn_distances(a)
        vals = [sausage_area_2d(a, e, cfg, nn) for e in eps]
        areas = np.array([v for v, _ in vals])
        used_mc = any(m for _, m in vals)
        ambient = 2
    res, rng, k = _fit(np.log(eps), np.log(areas), eps, cfg.trim)
    fit = Fit(rng, k, float(res.stderr), float(res.rvalue ** 2), float(res.slope),
              float(res.intercept), note="monte carlo" if used_mc else "")
    return DimensionEstimate(_clip(ambient - res.slope), Method.SAUSAGE, fit)


# ---------------------------------------------------------------- increments


def estimate_increment_exponent(seq, head: float = 0.1, tail: float = 0.0,
                                hyperbolic_tol: float = 0.05) -> tuple[float, Fit]:
    """Fit x_k - x_{k+1} ~ x_k^alpha on a decreasing positive sequence."""
    x = np.asarray(seq, dtype=float).ravel()
    if len(x) < 50:
        raise EstimatorError("sequence too short (need at least 50 terms)")
    if np.any(x <= 0):
        raise EstimatorError("sequence must be positive")
    d = x[:-1] - x[1:]
    if np.any(d <= 0):
        raise EstimatorError("sequence must be strictly decreasing")
    n = len(d)
    w = slice(int(n * head), n - int(n * tail))
    lx, ld = np.log(x[:-1][w]), np.log(d[w])
    if len(lx) < 3:
        raise EstimatorError("fit window is empty")
    res = linregress(lx, ld)
    alpha = float(res.slope)
    hyper = abs(alpha - 1.0) < hyperbolic_tol
    fit = Fit((float(x[:-1][w].min()), float(x[:-1][w].max())), len(lx), float(res.stderr),
              float(res.rvalue ** 2), alpha, float(res.intercept), hyperbolic=hyper,
              note="hyperbolic: increments proportional to x_k" if hyper else "")
    return alpha, fit


def estimate_dim_increment(seq, **kw) -> DimensionEstimate:
    """Dimension 1 - 1/alpha of a sequence from its increment exponent (0 if hyperbolic)."""
    alpha, fit = estimate_increment_exponent(seq, **kw)
    val = 0.0 if fit.hyperbolic or alpha <= 1 else 1 - 1 / alpha
    return DimensionEstimate(_clip(val), Method.INCREMENT_REGRESSION, fit)


def formula_estimate(value, method: Method = Method.FORMULA_THEOREM4) -> DimensionEstimate:
    return DimensionEstimate(float(value), method, None)
