"""Topological type of a nilpotent singular point at the origin.

The field must have the shape x' = y + A(x, y), y' = B(x, y) with A and B of
order at least two.  With y = f(x) solving y + A(x, y) = 0 we form
F(x) = B(x, f(x)) and G(x) = (A_x + B_y)(x, f(x)) and read the type off the
leading terms a x^m of F and b x^n of G.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from .errors import NotNilpotentError, UndecidableJetError
from .polyfield import BiPoly, PlanarVectorField

FLOAT_ZERO = 1e-13


class Kind(str, Enum):
    SADDLE = "Saddle"
    CENTER_OR_FOCUS = "CenterOrFocus"
    CUSP = "Cusp"
    SADDLE_NODE = "SaddleNode"
    ELLIPTIC_HYPERBOLIC = "EllipticHyperbolic"
    NODE = "Node"


@dataclass(frozen=True)
class ClassificationReport:
    kind: Kind
    m: int
    a: Any
    n: int | None
    b: Any | None
    monodromic: bool
    f_series: BiPoly
    F_series: BiPoly
    G_series: BiPoly
    stability: str | None = None   # "attracting" / "repelling" for nodes
    case_label: str = ""

    @property
    def label(self) -> str:
        if self.kind is Kind.NODE:
            return f"Node({self.stability})"
        return self.kind.value

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "stability": self.stability,
            "label": self.label,
            "case": self.case_label,
            "m": self.m,
            "a": str(self.a),
            "n": self.n,
            "b": None if self.b is None else str(self.b),
            "monodromic": self.monodromic,
            "f": self.f_series.to_terms(),
            "F": self.F_series.to_terms(),
            "G": self.G_series.to_terms(),
        }


def _sign(c) -> int:
    return (c > 0) - (c < 0)


def theorem_kind(m: int, a, n: int | None = None, b=None) -> tuple[Kind, str | None, str]:
    """Case table for leading data a x^m of F and b x^n of G (b None when G vanishes)."""
    if b is None or b == 0:
        if m % 2 == 1:
            if a > 0:
                return Kind.SADDLE, None, "(3)(i)"
            return Kind.CENTER_OR_FOCUS, None, "(3)(i)"
        return Kind.CUSP, None, "(3)(ii)"
    if m % 2 == 0:
        if m < 2 * n + 1:
            return Kind.CUSP, None, "(4)(i1)"
        return Kind.SADDLE_NODE, None, "(4)(i2)"
    if a > 0:
        return Kind.SADDLE, None, "(4)(ii)"
    disc = b * b + 4 * a * (n + 1)
    if m < 2 * n + 1 or (m == 2 * n + 1 and disc < 0):
        return Kind.CENTER_OR_FOCUS, None, "(4)(iii1)"
    if n % 2 == 1:
        return Kind.ELLIPTIC_HYPERBOLIC, None, "(4)(iii2)"
    return Kind.NODE, ("repelling" if b > 0 else "attracting"), "(4)(iii3)"


def _check_shape(field: PlanarVectorField):
    P, Q = field.P, field.Q
    lin_q = (Q[(0, 0)], Q[(1, 0)], Q[(0, 1)])
    lin_p = (P[(0, 0)], P[(1, 0)], P[(0, 1)])
    if lin_q[0] != 0 or lin_p[0] != 0:
        raise NotNilpotentError("origin is not a singular point")
    J = [[lin_p[1], lin_p[2]], [lin_q[1], lin_q[2]]]
    tr = J[0][0] + J[1][1]
    det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
    if tr != 0 or det != 0 or all(v == 0 for row in J for v in row):
        raise NotNilpotentError("linear part is not nilpotent")
    if lin_p[1] != 0 or lin_p[2] != 1 or lin_q[1] != 0 or lin_q[2] != 0:
        raise NotNilpotentError("field is not of the form x' = y + A, y' = B with j1 A = j1 B = 0")


def solve_implicit_f(field: PlanarVectorField, order: int | None = None) -> BiPoly:
    """Series f(x) with y + A(x, f(x)) = O(x^(order+1))."""
    P = field.P
    if P[(0, 1)] != 1 or P[(0, 0)] != 0 or P[(1, 0)] != 0:
        raise NotNilpotentError("P is not of the form y + higher order terms")
    order = field.trunc if order is None else order
    A = (P - BiPoly({(0, 1): 1}, P.trunc, P.exact)).with_trunc(order)
    X = BiPoly({(1, 0): 1}, order, P.exact)
    f = BiPoly.zero(order, P.exact)
    # each pass fixes one more order since A has no linear part
    for _ in range(order + 1):
        nxt = -A.substitute(X, f)
        if nxt == f:
            break
        f = nxt
    return f


def _leading(p: BiPoly, exact: bool):
    """Lowest-degree nonzero x^k coefficient of a univariate polynomial."""
    for (i, _), c in sorted(p.coeffs.items()):
        if exact or abs(c) > FLOAT_ZERO:
            return i, c
    return None


def classify_nilpotent(field: PlanarVectorField, order: int | None = None) -> ClassificationReport:
    _check_shape(field)
    order = field.trunc if order is None else order
    ex = field.exact
    f = solve_implicit_f(field, order)
    X = BiPoly({(1, 0): 1}, order, ex)
    A = field.P - BiPoly({(0, 1): 1}, field.trunc, ex)
    B = field.Q
    F = B.with_trunc(order).substitute(X, f)
    div = (A.diff(0) + B.diff(1)).with_trunc(order)
    G = div.substitute(X, f)
    lead_F = _leading(F, ex)
    if lead_F is None:
        raise UndecidableJetError(f"F vanishes identically up to order {order}")
    m, a = lead_F
    lead_G = _leading(G, ex)
    n, b = lead_G if lead_G is not None else (None, None)
    if m < 2 and b is not None:
        raise UndecidableJetError("F has a linear term; outside the nilpotent cases")
    kind, stab, label = theorem_kind(m, a, n, b)
    return ClassificationReport(
        kind=kind, m=m, a=a, n=n, b=b,
        monodromic=kind is Kind.CENTER_OR_FOCUS,
        f_series=f, F_series=F, G_series=G,
        stability=stab, case_label=label,
    )
