"""Quasihomogeneous blow-up and Puiseux expansions of separatrices.

Separatrix coefficients come from a triangular recursion on the invariance
condition h'(x) P(x, h) = Q(x, h) of a graph y = h(x).  The blow-up charts are
kept as an independent route used for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from .errors import InputError, MonodromicInputError, NonTriangularError
from .polyfield import (BiPoly, NilpotentModel, PlanarVectorField, PuiseuxSeries,
                        _substitute)
from .surd import Surd, sqrt_exact

DEFAULT_TERMS = 8


class Stability(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    CENTER = "Center"


class CaseTag(str, Enum):
    CASE_1A = "Case1A"   # m < 2n+1 (or b = 0), m even
    CASE_1B = "Case1B"   # m < 2n+1 (or b = 0), m odd
    CASE_2 = "Case2"     # m > 2n+1
    CASE_3 = "Case3"     # m = 2n+1


@dataclass(frozen=True)
class BlowupChart:
    weights: tuple[int, int]
    transformed: PlanarVectorField
    divisor: tuple[int, int]   # exponents of u, ybar; u may carry a negative power


def blow_up(field: PlanarVectorField, weights: tuple[int, int]) -> BlowupChart:
    """Substitute x = u^p, y = u^q ybar and remove the common power of u."""
    p, q = int(weights[0]), int(weights[1])
    if p <= 0 or q <= 0:
        raise InputError("blow-up weights must be positive")
    ex = field.exact
    one = Fraction(1) if ex else 1.0
    ud: dict = {}
    yd: dict = {}
    for (i, j), c in field.P.coeffs.items():
        e = p * i + q * j
        # u' = P / (p u^(p-1))
        k = (e - p + 1, j)
        ud[k] = ud.get(k, 0) + c * one / p
        # ybar' gets -(q/p) ybar P / u^p
        k = (e - p, j + 1)
        yd[k] = yd.get(k, 0) - c * one * q / p
    for (i, j), c in field.Q.coeffs.items():
        k = (p * i + q * j - q, j)
        yd[k] = yd.get(k, 0) + c
    ud = {k: v for k, v in ud.items() if v != 0}
    yd = {k: v for k, v in yd.items() if v != 0}
    keys = list(ud) + list(yd)
    e0 = min((k[0] for k in keys), default=0)
    ud = {(a - e0, b): v for (a, b), v in ud.items()}
    yd = {(a - e0, b): v for (a, b), v in yd.items()}
    deg = max((a + b for a, b in list(ud) + list(yd)), default=0)
    trunc = max(field.trunc, deg)
    tf = PlanarVectorField(BiPoly(ud, trunc, ex), BiPoly(yd, trunc, ex))
    return BlowupChart((p, q), tf, (e0, 0))


def chart_singularities(chart: BlowupChart) -> list[float]:
    """Real zeros of ybar' on the exceptional line u = 0."""
    import numpy as np

    Q = chart.transformed.Q
    coeffs: dict = {}
    for (i, j), c in Q.coeffs.items():
        if i == 0:
            coeffs[j] = coeffs.get(j, 0) + float(c)
    if not coeffs:
        return []
    deg = max(coeffs)
    poly = [coeffs.get(k, 0.0) for k in range(deg, -1, -1)]
    roots = np.roots(poly) if deg > 0 else []
    real = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-12)
    if Q.coeffs.get((0, 0), 0) == 0 and 0.0 not in real:
        real = sorted(real + [0.0])
    return real


# ---------------------------------------------------------------- leading data


@dataclass(frozen=True)
class LeadingTerm:
    gamma: Fraction
    c0: Any
    case_tag: CaseTag
    stability: Stability
    step: Fraction
    weights: tuple[int, int]

    def to_json(self) -> dict:
        return {"gamma": str(self.gamma), "c0": str(self.c0), "c0_float": float(self.c0),
                "case": self.case_tag.value, "stability": self.stability.value}


def _direction(c0) -> Stability:
    # x' = y ~ c0 x^gamma on x > 0
    return Stability.STABLE if c0 < 0 else Stability.UNSTABLE


def _sqrt(q, exact: bool):
    if exact:
        return sqrt_exact(q)
    return float(q) ** 0.5


def separatrix_case(model: NilpotentModel) -> CaseTag:
    m, n, b = model.m, model.n, model.b
    if b == 0 or m < 2 * n + 1:
        return CaseTag.CASE_1A if m % 2 == 0 else CaseTag.CASE_1B
    if m > 2 * n + 1:
        return CaseTag.CASE_2
    return CaseTag.CASE_3


def separatrix_leading(model: NilpotentModel) -> list[LeadingTerm]:
    """Leading exponent and coefficient of every real branch on x > 0."""
    a, m, b, n = model.a, model.m, model.b, model.n
    ex = model.exact
    tag = separatrix_case(model)
    out: list[LeadingTerm] = []
    if tag in (CaseTag.CASE_1A, CaseTag.CASE_1B):
        gamma = Fraction(m + 1, 2)
        if a < 0:
            if m % 2 == 1:
                raise MonodromicInputError("m odd and a < 0 below 2n+1: center or focus")
            raise InputError("m even with a < 0: the separatrices lie in x < 0 only")
        c = _sqrt(Fraction(2) * a / (m + 1) if ex else 2 * a / (m + 1), ex)
        if tag is CaseTag.CASE_1A:
            step, w = Fraction(1, 2), (2, m + 1)
        else:
            step, w = Fraction(1), (1, (m + 1) // 2)
        for c0 in (c, -c):
            out.append(LeadingTerm(gamma, c0, tag, _direction(c0), step, w))
        return out
    w = (1, n + 1)
    if tag is CaseTag.CASE_2:
        c1 = b / (n + 1)
        out.append(LeadingTerm(Fraction(n + 1), c1, tag, _direction(c1), Fraction(1), w))
        out.append(LeadingTerm(Fraction(m - n), -a / b, tag, Stability.CENTER, Fraction(1), w))
        return out
    disc = b * b + 4 * a * (n + 1)
    if disc < 0:
        raise MonodromicInputError("b^2 + 4a(n+1) < 0: center or focus")
    r = _sqrt(disc, ex)
    roots = [(b + r) / (2 * (n + 1))]
    if disc != 0:
        roots.append((b - r) / (2 * (n + 1)))
    for c0 in roots:
        out.append(LeadingTerm(Fraction(n + 1), c0, tag, _direction(c0), Fraction(1), w))
    return out


# ---------------------------------------------------------------- recursion


@dataclass(frozen=True)
class GraphSolution:
    series: PuiseuxSeries
    resonances: tuple[int, ...]


def _is_small(c, exact: bool, scale: float = 1.0) -> bool:
    return c == 0 if exact else abs(c) <= 1e-11 * max(scale, 1.0)


def _residual(field: PlanarVectorField, terms: dict, gamma, step, indep: int) -> PuiseuxSeries:
    """h'(s) * P_indep(s, h) - P_dep(s, h) for the finite series h."""
    h = PuiseuxSeries.from_terms(terms, step, None, base=gamma)
    comp_i, comp_d = (field.P, field.Q) if indep == 0 else (field.Q, field.P)
    sub = 1 if indep == 0 else 0
    A = _substitute(comp_i, h, sub)
    B = _substitute(comp_d, h, sub)
    return h.derivative() * A - B


def _lowest(s: PuiseuxSeries, exact: bool):
    keys = [e for e, c in s.terms().items() if not _is_small(c, exact)]
    return min(keys) if keys else None


def _operator_shift(field: PlanarVectorField, gamma, c0, step, indep: int):
    """Exponent shift d of the linearised residual: x^e enters first at x^(e+d)."""
    ex = field.exact
    h0 = PuiseuxSeries.from_terms({gamma: c0}, step, None, base=gamma)
    comp_i, comp_d = (field.P, field.Q) if indep == 0 else (field.Q, field.P)
    sub = 1 if indep == 0 else 0
    dep_var = 1 - indep
    cands = []
    o = _lowest(_substitute(comp_i, h0, sub), ex)
    if o is not None:
        cands.append(o - 1)
    if gamma != 0:
        o = _lowest(h0.derivative() * _substitute(comp_i.diff(dep_var), h0, sub), ex)
        if o is not None:
            cands.append(o)
    o = _lowest(_substitute(comp_d.diff(dep_var), h0, sub), ex)
    if o is not None:
        cands.append(o)
    if not cands:
        raise NonTriangularError(0, gamma)
    return min(cands)


def solve_invariant_graph(field: PlanarVectorField, gamma, c0, step, n_terms: int,
                          indep: int = 0) -> GraphSolution:
    """Coefficients of an invariant graph dep = sum c_j s^(gamma + j*step).

    The unknown c_j first enters the residual at exponent e_j + d, with d the
    shift of the linearised operator.  There the residual must be linear in
    c_j; the linear coefficient is read off the symmetric difference of two
    trial residuals.  A vanishing linear coefficient with vanishing residual
    is a resonance (coefficient left free and set to zero); otherwise the
    recursion stops.
    """
    gamma, step = Fraction(gamma), Fraction(step)
    ex = field.exact
    one = Fraction(1) if ex else 1.0
    d = _operator_shift(field, gamma, c0, step, indep)
    terms = {gamma: c0}
    resonances = []
    for j in range(1, n_terms):
        e = gamma + j * step
        w = e + d
        R0 = _residual(field, terms, gamma, step, indep).terms()
        Rp = _residual(field, {**terms, e: one}, gamma, step, indep).terms()
        Rm = _residual(field, {**terms, e: -one}, gamma, step, indep).terms()
        zero = 0 * one
        low = [k for k, v in R0.items() if k < w and not _is_small(v, ex)]
        low += [k for k in set(Rp) | set(Rm)
                if k < w and not _is_small(Rp.get(k, zero) - Rm.get(k, zero), ex)]
        if low:
            raise NonTriangularError(j, min(low))
        rw = R0.get(w, zero)
        lw = (Rp.get(w, zero) - Rm.get(w, zero)) / 2
        quad = (Rp.get(w, zero) + Rm.get(w, zero)) / 2 - rw
        if not _is_small(quad, ex):
            raise NonTriangularError(j, w)
        if _is_small(lw, ex):
            if _is_small(rw, ex, 1.0):
                resonances.append(j)
                continue
            raise NonTriangularError(j, w)
        c = -rw / lw
        if not _is_small(c, ex):
            terms[e] = c
    series = PuiseuxSeries.from_terms(terms, step, None, base=gamma)
    if len(series.coeffs) < n_terms:
        series = PuiseuxSeries(series.gamma, step,
                               series.coeffs + (0 * one,) * (n_terms - len(series.coeffs)))
    return GraphSolution(series, tuple(resonances))


def invariance_residual(field: PlanarVectorField, series: PuiseuxSeries, indep: int = 0) -> PuiseuxSeries:
    return _residual(field, series.terms(), series.gamma, series.step, indep)


# ---------------------------------------------------------------- branches


@dataclass(frozen=True)
class SeparatrixBranch:
    series: PuiseuxSeries
    stability: Stability
    case_tag: CaseTag
    source_singularity: tuple
    resonances: tuple[int, ...] = ()

    @property
    def gamma(self) -> Fraction:
        return self.series.gamma

    @property
    def c0(self):
        return self.series.coeffs[0]

    def to_json(self) -> dict:
        return {
            "gamma": str(self.series.gamma),
            "step": str(self.series.step),
            "stability": self.stability.value,
            "case": self.case_tag.value,
            "chart_point": [str(v) for v in self.source_singularity],
            "coefficients": [
                {"exponent": str(e), "value": str(c), "float": float(c)}
                for e, c in zip(self.series.exponents(), self.series.coeffs)
            ],
            "resonances": list(self.resonances),
        }


def separatrix_series(model: NilpotentModel | PlanarVectorField, branch: LeadingTerm,
                      K: int = DEFAULT_TERMS, field: PlanarVectorField | None = None) -> SeparatrixBranch:
    """K-term Puiseux expansion of one branch from separatrix_leading.

    ``model`` may also be a full field in the form x' = y + A, y' = B whose
    leading data agree with ``branch``.
    """
    if K < 1:
        raise InputError("need at least one term")
    if field is None:
        field = model if isinstance(model, PlanarVectorField) else model.to_field()
    sol = solve_invariant_graph(field, branch.gamma, branch.c0, branch.step, K)
    p, q = branch.weights
    chart_pt = (0, branch.c0) if branch.stability is not Stability.CENTER else (0, 0)
    return SeparatrixBranch(sol.series, branch.stability, branch.case_tag, chart_pt,
                            sol.resonances)


def blow_down_series(chart_series: PuiseuxSeries, weights: tuple[int, int]) -> PuiseuxSeries:
    """Turn ybar = sum a_k u^k into y = sum a_k x^((q+k)/p) under x = u^p, y = u^q ybar."""
    p, q = weights
    terms = {(q + e) / Fraction(p): c for e, c in chart_series.terms().items()}
    base = (q + chart_series.gamma) / Fraction(p)
    return PuiseuxSeries.from_terms(terms, chart_series.step / p, None, base=base)


def chart_branch_series(field: PlanarVectorField, branch: LeadingTerm, K: int) -> PuiseuxSeries:
    """Separatrix through the chart point, computed in blow-up coordinates."""
    chart = blow_up(field, branch.weights)
    p, q = branch.weights
    # exponent of the branch in the chart: y = c x^gamma  ->  ybar = c u^(p*gamma - q)
    g = branch.gamma * p - q
    sol = solve_invariant_graph(chart.transformed, g, branch.c0, Fraction(1), K)
    return blow_down_series(sol.series, branch.weights)
