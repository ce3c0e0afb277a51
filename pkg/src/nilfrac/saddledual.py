"""Weak saddles, dual box dimension and the saddle's singular points at infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boxdim import (DimensionEstimate, EstimatorConfig, estimate_dim_boxcount,
                     estimate_increment_exponent)
from .errors import InputError
from .infinity import Chart, chart_transform
from .polyfield import BiPoly, DEFAULT_TRUNC, PlanarVectorField
from .unitmap import Orbit, iterate_orbit, tail_completion


@dataclass(frozen=True)
class SaddleNormalForm:
    """x' = sum h^i (a_i x + b_i y), y' = sum h^i (b_i x + a_i y), h = x^2 - y^2."""

    k: int
    a_coeffs: tuple
    b_coeffs: tuple

    def __post_init__(self):
        a = tuple(Fraction(v) for v in self.a_coeffs)
        b = tuple(Fraction(v) for v in self.b_coeffs)
        if len(a) != len(b) or not a:
            raise InputError("a and b coefficient lists must have equal nonzero length")
        if a[-1] == 0:
            raise InputError("leading coefficient a_n must be nonzero")
        if self.k < 1:
            raise InputError("saddle order k must be at least 1")
        first = next(i for i, v in enumerate(a) if v != 0)
        if first != self.k:
            raise InputError(f"first nonzero saddle quantity is a_{first}, not a_{self.k}")
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "b_coeffs", b)

    @classmethod
    def example(cls, k: int) -> "SaddleNormalForm":
        """a_k = b_0 = 1, all other coefficients zero."""
        return cls(k, (0,) * k + (1,), (1,) + (0,) * k)

    @property
    def n(self) -> int:
        return len(self.a_coeffs) - 1

    def to_field(self, trunc: int | None = None) -> PlanarVectorField:
        t = trunc if trunc is not None else max(DEFAULT_TRUNC, 2 * self.n + 1)
        h = BiPoly({(2, 0): 1, (0, 2): -1}, t)
        x = BiPoly({(1, 0): 1}, t)
        y = BiPoly({(0, 1): 1}, t)
        P = BiPoly.zero(t)
        Q = BiPoly.zero(t)
        for i, (ai, bi) in enumerate(zip(self.a_coeffs, self.b_coeffs)):
            hi = h ** i
            P = P + hi * (x.scale(ai) + y.scale(bi))
            Q = Q + hi * (x.scale(bi) + y.scale(ai))
        return PlanarVectorField(P, Q)


def hyperbolic_rates(field: PlanarVectorField, r: float, phi: float) -> tuple[float, float]:
    """(r', phi') for x = r cosh(phi), y = r sinh(phi)."""
    x, y = r * math.cosh(phi), r * math.sinh(phi)
    xd, yd = field.to_float().rhs(x, y)
    return (x * xd - y * yd) / r, (x * yd - y * xd) / (r * r)


def saddle_field(k: int) -> PlanarVectorField:
    """x' = y + (x^2 - y^2)^k, y' = x + (x^2 - y^2)^k."""
    if k < 1:
        raise InputError("k must be at least 1")
    t = max(DEFAULT_TRUNC, 2 * k)
    h = BiPoly({(2, 0): 1, (0, 2): -1}, t) ** k
    return PlanarVectorField(BiPoly({(0, 1): 1}, t) + h, BiPoly({(1, 0): 1}, t) + h)


def saddle_infinity_chart(k: int) -> PlanarVectorField:
    """Chart U1 image of saddle_field(k), shifted so the singular point (1, 0) sits at the origin."""
    tf, _ = chart_transform(saddle_field(k), Chart.U1)
    return tf.translate(1, 0)


@dataclass(frozen=True)
class DualDimensionResult:
    k: int
    dual_dim: Fraction
    infinity_dim: Fraction

    def to_json(self) -> dict:
        return {"k": self.k, "dual_dim": str(self.dual_dim),
                "infinity_dim": str(self.infinity_dim)}


def dual_box_dimension(k: int) -> DualDimensionResult:
    if k < 1:
        raise InputError("k must be at least 1")
    return DualDimensionResult(k, Fraction(4 * k, 2 * k + 1), 1 - Fraction(1, 2 * k))


def saddle_infinity_orbit(k: int, v0: float = 0.5, max_iter: int = 100_000) -> Orbit:
    """Unit-time orbit on the invariant axis u = 0 of the chart at infinity."""
    return iterate_orbit(saddle_infinity_chart(k), (0.0, v0), max_iter=max_iter, floor=1e-12)


def verify_saddle_infinity(k: int, cfg: EstimatorConfig = EstimatorConfig(),
                           max_iter: int = 100_000) -> tuple[Fraction, DimensionEstimate]:
    orb = saddle_infinity_orbit(k, max_iter=max_iter)
    est = estimate_dim_boxcount(orb.y, cfg, tail=tail_completion(orb)[:, 1])
    return dual_box_dimension(k).infinity_dim, est


def saddle_increment_exponent(k: int, max_iter: int = 100_000) -> float:
    orb = saddle_infinity_orbit(k, max_iter=max_iter)
    return estimate_increment_exponent(np.asarray(orb.y))[0]
