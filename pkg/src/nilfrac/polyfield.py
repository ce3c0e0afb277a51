"""Truncated bivariate polynomials, planar vector fields and Puiseux series.

Coefficients are either exact (Fraction, or Surd for quadratic radicals) or
binary floats.  The mode is fixed when a polynomial is built and products of
an exact and a float polynomial are refused.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

from .errors import InputError, ModeMismatchError, TruncationError
from .surd import Surd

DEFAULT_TRUNC = 12


def to_coeff(c, exact: bool):
    """Normalise a scalar to the requested mode."""
    if exact:
        if isinstance(c, (Fraction, Surd)):
            return c
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, str):
            return Fraction(c.strip())
        if isinstance(c, float):
            return Fraction(c).limit_denominator(10**12)
        raise InputError(f"cannot use {c!r} as an exact coefficient")
    if isinstance(c, str):
        return float(Fraction(c.strip()))
    return float(c)


def _is_zero(c) -> bool:
    return c == 0


class BiPoly:
    """Polynomial sum c_ij x^i y^j with terms of degree > trunc dropped.

    ``truncated`` records whether an operation actually dropped terms.
    Instances are treated as immutable.
    """

    __slots__ = ("_c", "trunc", "exact", "truncated", "__dict__")

    def __init__(self, coeffs: Mapping[tuple[int, int], Any] | None = None,
                 trunc: int = DEFAULT_TRUNC, exact: bool = True, truncated: bool = False):
        c = {}
        dropped = truncated
        for (i, j), v in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise InputError(f"negative exponent in monomial ({i}, {j})")
            v = to_coeff(v, exact)
            if _is_zero(v):
                continue
            if i + j > trunc:
                dropped = True
                continue
            c[(int(i), int(j))] = v
        self._c = c
        self.trunc = int(trunc)
        self.exact = bool(exact)
        self.truncated = dropped

    # constructors

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int, Any]], trunc=DEFAULT_TRUNC, exact=True):
        acc: dict = {}
        for i, j, c in terms:
            c = to_coeff(c, exact)
            acc[(i, j)] = acc.get((i, j), 0) + c
        return cls(acc, trunc, exact)

    @classmethod
    def monomial(cls, i: int, j: int, c=1, trunc=DEFAULT_TRUNC, exact=True):
        return cls({(i, j): c}, trunc, exact)

    @classmethod
    def zero(cls, trunc=DEFAULT_TRUNC, exact=True):
        return cls({}, trunc, exact)

    def _new(self, coeffs, truncated=False):
        return BiPoly(coeffs, self.trunc, self.exact, truncated or self.truncated)

    # accessors

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))

    def __getitem__(self, ij: tuple[int, int]):
        return self._c.get(ij, 0.0 if not self.exact else Fraction(0))

    def coefficient(self, i: int, j: int):
        return self[(i, j)]

    def __len__(self):
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self._c), default=-1)

    @property
    def order(self) -> int:
        """Lowest total degree present (-1 for the zero polynomial)."""
        return min((i + j for i, j in self._c), default=-1)

    def jet(self, k: int) -> "BiPoly":
        return BiPoly({ij: v for ij, v in self._c.items() if sum(ij) <= k}, self.trunc, self.exact)

    def homogeneous(self, k: int) -> "BiPoly":
        return BiPoly({ij: v for ij, v in self._c.items() if sum(ij) == k}, self.trunc, self.exact)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.exact == other.exact and self._c == other._c

    def __hash__(self):
        return hash((self.exact, frozenset(self._c.items())))

    def __repr__(self):
        return f"BiPoly({self.to_str()}, trunc={self.trunc}, exact={self.exact})"

    def to_str(self, names=("x", "y")) -> str:
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in self.items():
            mono = "*".join(
                f"{nm}^{e}" if e > 1 else nm for nm, e in zip(names, (i, j)) if e > 0
            )
            parts.append(f"({v})*{mono}" if mono else f"({v})")
        return " + ".join(parts)

    # arithmetic

    def _check(self, other: "BiPoly"):
        if self.exact != other.exact:
            raise ModeMismatchError("cannot combine exact and float polynomials")

    def __add__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly({(0, 0): other}, self.trunc, self.exact)
        self._check(other)
        c = dict(self._c)
        for ij, v in other._c.items():
            c[ij] = c.get(ij, 0) + v
        trunc = min(self.trunc, other.trunc)
        return BiPoly(c, trunc, self.exact, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self._new({ij: -v for ij, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "BiPoly":
        s = to_coeff(s, self.exact) if not isinstance(s, (Fraction, Surd)) else s
        return self._new({ij: v * s for ij, v in self._c.items()})

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return self.scale(other)
        return poly_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = BiPoly({(0, 0): 1}, self.trunc, self.exact)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def diff(self, var: int) -> "BiPoly":
        """Partial derivative; var 0 is x, var 1 is y."""
        c = {}
        for (i, j), v in self._c.items():
            e = (i, j)[var]
            if e == 0:
                continue
            c[(i - 1, j) if var == 0 else (i, j - 1)] = v * e
        return self._new(c)

    def substitute(self, X: "BiPoly", Y: "BiPoly") -> "BiPoly":
        """Return p(X(x,y), Y(x,y)), truncated at self.trunc."""
        out = BiPoly.zero(self.trunc, self.exact)
        xp = {0: BiPoly({(0, 0): 1}, self.trunc, self.exact)}
        yp = {0: BiPoly({(0, 0): 1}, self.trunc, self.exact)}
        for (i, j), v in self._c.items():
            if i not in xp:
                xp[i] = X ** i
            if j not in yp:
                yp[j] = Y ** j
            out = out + (xp[i] * yp[j]).scale(v)
        return out

    def __call__(self, x, y):
        total = 0
        for (i, j), v in self._c.items():
            total = total + v * x ** i * y ** j
        return total

    def to_float(self) -> "BiPoly":
        return BiPoly({ij: float(v) for ij, v in self._c.items()}, self.trunc, False, self.truncated)

    def with_trunc(self, trunc: int) -> "BiPoly":
        return BiPoly(self._c, trunc, self.exact, self.truncated)

    @cached_property
    def compiled(self) -> Callable[[float, float], float]:
        """Plain float evaluator built once per polynomial."""
        if not self._c:
            return lambda x, y: 0.0
        terms = []
        for (i, j), v in self._c.items():
            mono = [repr(float(v))]
            if i:
                mono.append("x" if i == 1 else f"x**{i}")
            if j:
                mono.append("y" if j == 1 else f"y**{j}")
            terms.append("*".join(mono))
        return eval("lambda x, y: " + " + ".join(terms))  # noqa: S307 - generated from numbers only

    def to_terms(self) -> list:
        return [[i, j, str(v) if self.exact else repr(float(v))] for (i, j), v in self.items()]


def poly_mul(p: BiPoly, q: BiPoly) -> BiPoly:
    """Product truncated at the smaller of the two truncation degrees."""
    p._check(q)
    trunc = min(p.trunc, q.trunc)
    c: dict = {}
    dropped = p.truncated or q.truncated
    for (i1, j1), v1 in p._c.items():
        for (i2, j2), v2 in q._c.items():
            i, j = i1 + i2, j1 + j2
            if i + j > trunc:
                dropped = True
                continue
            c[(i, j)] = c.get((i, j), 0) + v1 * v2
    return BiPoly(c, trunc, p.exact, dropped)


# ---------------------------------------------------------------- fields


@dataclass(frozen=True)
class PlanarVectorField:
    """x' = P(x, y), y' = Q(x, y)."""

    P: BiPoly
    Q: BiPoly

    def __post_init__(self):
        if self.P.exact != self.Q.exact:
            raise ModeMismatchError("field components must share one coefficient mode")
        if self.P.trunc != self.Q.trunc:
            t = min(self.P.trunc, self.Q.trunc)
            object.__setattr__(self, "P", self.P.with_trunc(t))
            object.__setattr__(self, "Q", self.Q.with_trunc(t))

    @classmethod
    def from_terms(cls, P, Q, trunc=DEFAULT_TRUNC, exact=True):
        return cls(BiPoly.from_terms(P, trunc, exact), BiPoly.from_terms(Q, trunc, exact))

    @property
    def exact(self) -> bool:
        return self.P.exact

    @property
    def trunc(self) -> int:
        return self.P.trunc

    @property
    def degree(self) -> int:
        return max(self.P.degree, self.Q.degree)

    def jacobian(self) -> list[list]:
        """Jacobian at the origin."""
        return [[self.P[(1, 0)], self.P[(0, 1)]], [self.Q[(1, 0)], self.Q[(0, 1)]]]

    def to_float(self) -> "PlanarVectorField":
        return PlanarVectorField(self.P.to_float(), self.Q.to_float())

    def reversed(self) -> "PlanarVectorField":
        return PlanarVectorField(-self.P, -self.Q)

    def with_trunc(self, trunc: int) -> "PlanarVectorField":
        return PlanarVectorField(self.P.with_trunc(trunc), self.Q.with_trunc(trunc))

    def translate(self, x0, y0) -> "PlanarVectorField":
        """Field in coordinates centred at (x0, y0)."""
        ex, t = self.exact, self.trunc
        X = BiPoly({(1, 0): 1, (0, 0): x0}, t, ex)
        Y = BiPoly({(0, 1): 1, (0, 0): y0}, t, ex)
        return PlanarVectorField(self.P.substitute(X, Y), self.Q.substitute(X, Y))

    @cached_property
    def rhs(self) -> Callable[[float, float], tuple[float, float]]:
        fp, fq = self.P.compiled, self.Q.compiled
        return lambda x, y: (fp(x, y), fq(x, y))

    def __call__(self, x, y):
        return self.P(x, y), self.Q(x, y)

    def to_json(self) -> dict:
        return {"P": self.P.to_terms(), "Q": self.Q.to_terms(), "trunc": self.trunc}

    @classmethod
    def from_json(cls, obj: dict | str, exact: bool = True) -> "PlanarVectorField":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            trunc = int(obj.get("trunc", DEFAULT_TRUNC))
            P = [(int(i), int(j), str(c)) for i, j, c in obj["P"]]
            Q = [(int(i), int(j), str(c)) for i, j, c in obj["Q"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed field JSON: {exc}") from exc
        try:
            return cls.from_terms(P, Q, trunc, exact)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad coefficient in field JSON: {exc}") from exc

    def __str__(self):
        return f"x' = {self.P.to_str()}\ny' = {self.Q.to_str()}"


def poly_divide_monomial(v: PlanarVectorField) -> tuple[PlanarVectorField, tuple[int, int]]:
    """Remove the greatest monomial x^i y^j dividing both components."""
    mons = list(v.P._c) + list(v.Q._c)
    if not mons:
        return v, (0, 0)
    i0 = min(i for i, _ in mons)
    j0 = min(j for _, j in mons)
    if (i0, j0) == (0, 0):
        return v, (0, 0)

    def shift(p: BiPoly) -> BiPoly:
        return BiPoly({(i - i0, j - j0): c for (i, j), c in p._c.items()}, p.trunc, p.exact, p.truncated)

    return PlanarVectorField(shift(v.P), shift(v.Q)), (i0, j0)


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class NilpotentModel:
    """x' = y, y' = a x^m + b x^n y + tail."""

    a: Any
    m: int
    b: Any = Fraction(0)
    n: int = 1
    tail: BiPoly | None = None

    def __post_init__(self):
        exact = not isinstance(self.a, float) and not isinstance(self.b, float)
        object.__setattr__(self, "a", to_coeff(self.a, exact))
        object.__setattr__(self, "b", to_coeff(self.b, exact))
        if self.a == 0:
            raise InputError("model coefficient a must be nonzero")
        if self.m < 2:
            raise InputError("model exponent m must be >= 2")
        if self.b != 0 and self.n < 1:
            raise InputError("model exponent n must be >= 1")
        if self.tail is not None:
            for (i, j) in self.tail._c:
                if j == 0 and i <= self.m:
                    raise InputError(f"tail term x^{i} is not o(x^{self.m})")
                if j == 1 and (self.b == 0 or i <= self.n):
                    raise InputError(f"tail term x^{i}y is not y*o(x^n)")

    @property
    def exact(self) -> bool:
        return not isinstance(self.a, float)

    def to_field(self, trunc: int = DEFAULT_TRUNC, exact: bool | None = None) -> PlanarVectorField:
        ex = self.exact if exact is None else exact
        q = {(self.m, 0): self.a}
        if self.b != 0:
            q[(self.n, 1)] = self.b
        Q = BiPoly(q, trunc, ex)
        if self.tail is not None:
            t = self.tail if self.tail.exact == ex else (self.tail.to_float() if not ex else self.tail)
            Q = Q + t.with_trunc(trunc)
        return PlanarVectorField(BiPoly({(0, 1): 1}, trunc, ex), Q)


# ---------------------------------------------------------------- Puiseux


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class PuiseuxSeries:
    """Sum c_j x^(gamma + j*step), j = 0..K, plus an optional O(x^order) tail.

    An empty coefficient tuple is the zero series.  ``order`` is None for an
    exact finite sum.
    """

    gamma: Fraction
    step: Fraction
    coeffs: tuple
    order: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frac(self.gamma))
        object.__setattr__(self, "step", _frac(self.step))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.order is not None:
            object.__setattr__(self, "order", _frac(self.order))
        if self.step <= 0:
            raise InputError("Puiseux step must be positive")
        if self.coeffs and _is_zero(self.coeffs[0]):
            raise InputError("leading Puiseux coefficient must be nonzero")
        if self.order is not None and self.coeffs and self.order <= self.exponent(len(self.coeffs) - 1):
            raise InputError("remainder order must exceed the last kept exponent")

    # construction

    @classmethod
    def from_terms(cls, terms: Mapping[Fraction, Any], step, order=None, base=None) -> "PuiseuxSeries":
        """Build from {exponent: coeff}; exponents must share one ladder base + step*Z."""
        step = _frac(step)
        nz = {(_frac(e)): c for e, c in terms.items() if not _is_zero(c)}
        if order is not None:
            order = _frac(order)
            nz = {e: c for e, c in nz.items() if e < order}
        if not nz:
            g = _frac(base) if base is not None else Fraction(0)
            return cls(g, step, (), order)
        g = min(nz)
        if base is not None and (g - _frac(base)) % step != 0:
            raise InputError("exponent off the series ladder")
        coeffs = []
        last = max(nz)
        nsteps = (last - g) / step
        if nsteps.denominator != 1:
            raise InputError("mixed-denominator exponents in one series")
        for k in range(int(nsteps) + 1):
            e = g + k * step
            coeffs.append(nz.pop(e, 0))
        if nz:
            raise InputError("mixed-denominator exponents in one series")
        return cls(g, step, tuple(coeffs), order)

    # accessors

    def exponent(self, j: int) -> Fraction:
        return self.gamma + j * self.step

    def exponents(self) -> list[Fraction]:
        return [self.exponent(j) for j in range(len(self.coeffs))]

    def terms(self) -> dict:
        return {self.exponent(j): c for j, c in enumerate(self.coeffs) if not _is_zero(c)}

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction | None:
        """Leading exponent, or the remainder order for a zero series."""
        return self.gamma if self.coeffs else self.order

    def coefficient(self, e) -> Any:
        e = _frac(e)
        if self.order is not None and e >= self.order:
            raise TruncationError(f"exponent {e} is beyond the known order {self.order}")
        return self.terms().get(e, 0)

    def __call__(self, x: float) -> float:
        if x == 0:
            return 0.0
        s = 0.0
        for j, c in enumerate(self.coeffs):
            if not _is_zero(c):
                s += float(c) * x ** float(self.exponent(j))
        return s

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, order) -> "PuiseuxSeries":
        order = _frac(order)
        if self.order is not None:
            order = min(order, self.order)
        return PuiseuxSeries.from_terms(self.terms(), self.step, order, base=self.gamma)

    # arithmetic

    def _ladder(self, other: "PuiseuxSeries") -> Fraction:
        if self.step != other.step:
            raise InputError("series with different steps cannot be combined")
        if (self.gamma - other.gamma) % self.step != 0:
            raise InputError("series on different exponent ladders")
        return self.step

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        step = self._ladder(other)
        t = self.terms()
        for e, c in other.terms().items():
            t[e] = t.get(e, 0) + c
        order = _min_order(self.order, other.order)
        return PuiseuxSeries.from_terms(t, step, order, base=self.gamma)

    def __neg__(self):
        return PuiseuxSeries(self.gamma, self.step, tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "PuiseuxSeries":
        if _is_zero(s):
            return PuiseuxSeries(self.gamma, self.step, (), self.order)
        return PuiseuxSeries(self.gamma, self.step, tuple(c * s for c in self.coeffs), self.order)

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by x^e."""
        e = _frac(e)
        order = None if self.order is None else self.order + e
        return PuiseuxSeries(self.gamma + e, self.step, self.coeffs, order)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        step = self._ladder(other)
        # (A + O(p))(B + O(q)) = AB + O(min(p + ord B, q + ord A))
        order = None
        if self.order is not None:
            lo = other.leading if other.leading is not None else Fraction(0)
            order = self.order + lo
        if other.order is not None:
            lo = self.leading if self.leading is not None else Fraction(0)
            order = _min_order(order, other.order + lo)
        t: dict = {}
        for e1, c1 in self.terms().items():
            for e2, c2 in other.terms().items():
                e = e1 + e2
                if order is not None and e >= order:
                    continue
                t[e] = t.get(e, 0) + c1 * c2
        return PuiseuxSeries.from_terms(t, step, order, base=self.gamma + other.gamma)

    __rmul__ = scale

    def __pow__(self, k: int):
        if k == 0:
            return PuiseuxSeries.from_terms({Fraction(0): _one_like(self)}, self.step, None, base=Fraction(0))
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def derivative(self) -> "PuiseuxSeries":
        t = {e - 1: c * e for e, c in self.terms().items() if e != 0}
        order = None if self.order is None else self.order - 1
        return PuiseuxSeries.from_terms(t, self.step, order, base=self.gamma - 1)

    def to_float(self) -> "PuiseuxSeries":
        return PuiseuxSeries(self.gamma, self.step, tuple(float(c) for c in self.coeffs), self.order)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.terms() == other.terms() and self.order == other.order

    def __hash__(self):
        return hash((tuple(self.terms().items()), self.order))

    def __str__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({c})*x^({e})" for e, c in self.terms().items())
        return body if self.order is None else f"{body} + O(x^({self.order}))"


def _min_order(p, q):
    if p is None:
        return q
    if q is None:
        return p
    return min(p, q)


def _one_like(s: PuiseuxSeries):
    if s.coeffs and isinstance(s.coeffs[0], float):
        return 1.0
    return Fraction(1)


def monomial_series(e, c, step, order=None) -> PuiseuxSeries:
    return PuiseuxSeries.from_terms({_frac(e): c}, step, order, base=_frac(e))


def poly_compose_series(p: BiPoly, s: PuiseuxSeries, var: str = "y",
                        order=None) -> PuiseuxSeries:
    """Substitute the series for one variable of p.

    var='y' gives p(x, s(x)); var='x' gives p(s(y), y) as a series in y.
    The result is exact below the smallest exponent at which the unknown
    tail of s (or dropped terms of p) can contribute; asking for more
    raises TruncationError.
    """
    if s.is_zero() or s.gamma <= 0:
        raise InputError("series must have a positive leading exponent")
    if (s.gamma % s.step) != 0 or (1 % s.step) != 0:
        raise InputError("series ladder must contain the integers")
    step = s.step
    sub_idx = 1 if var == "y" else 0
    # validity bound of the composition
    bound = None
    if s.order is not None:
        tail_gap = s.order - s.gamma
        for ij in p._c:
            j = ij[sub_idx]
            i = ij[1 - sub_idx]
            if j >= 1:
                bound = _min_order(bound, i + (j - 1) * s.gamma + s.gamma + tail_gap)
    if p.truncated:
        bound = _min_order(bound, Fraction(p.trunc + 1) * min(Fraction(1), s.gamma))
    if order is not None:
        order = _frac(order)
        if bound is not None and order > bound:
            raise TruncationError(f"requested order {order} exceeds determined order {bound}")
        bound = order
    return _substitute(p, s, sub_idx, bound)


def _substitute(p: BiPoly, s: PuiseuxSeries, sub_idx: int, bound=None) -> PuiseuxSeries:
    """Term-by-term substitution below ``bound`` (no validity checks)."""
    step = s.step
    src = s.to_float() if not p.exact else s
    powers: dict = {}
    out = PuiseuxSeries(Fraction(0), step, (), bound)
    for ij, c in p._c.items():
        j = ij[sub_idx]
        i = ij[1 - sub_idx]
        if bound is not None and i + j * s.gamma >= bound:
            continue
        if j == 0:
            term = monomial_series(i, c, step)
        else:
            if j not in powers:
                pw = src ** j
                powers[j] = pw.truncate(bound) if bound is not None else pw
            term = powers[j].shift(i).scale(c)
        out = out + term
    return out
