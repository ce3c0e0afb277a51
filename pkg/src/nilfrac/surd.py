"""Exact numbers of the form a + b*sqrt(d) with a, b rational and d squarefree.

Separatrix coefficients such as sqrt(2/3) or (1 + sqrt(17))/8 live in a
single quadratic field, so one radicand per number is enough.  Mixing two
different radicands raises ValueError.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, d) with n = s*s*d and d squarefree."""
    s, d, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    return s, d * n


class Surd:
    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)
        if self.d < 2:
            raise ValueError("radicand must be a squarefree integer >= 2")

    # construction helpers

    @staticmethod
    def make(a, b, d: int):
        """Collapse to a Fraction when the irrational part vanishes."""
        if b == 0:
            return Fraction(a)
        return Surd(a, b, d)

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ValueError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction, Rational)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) + other
            return NotImplemented
        return Surd.make(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) - other
            return NotImplemented
        return Surd.make(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) * other
            return NotImplemented
        c, e = o
        return Surd.make(self.a * c + self.b * e * self.d, self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def _norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        nrm = self._norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero surd")
        return Surd.make(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other.inverse()
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, (int, Fraction, Rational)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Surd.make(self.a / Fraction(other), self.b / Fraction(other), self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out

    # comparison

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare squares
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else sb

    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        if isinstance(other, Surd) and other.d != self.d:
            return self.b == 0 and other.b == 0 and self.a == other.a
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o[0] and self.b == o[1]

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        if isinstance(other, float):
            x = float(self)
            return (x > other) - (x < other)
        diff = self - other
        if isinstance(diff, Surd):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        rad = f"sqrt({self.d})"
        if self.b == 1:
            irr = rad
        elif self.b == -1:
            irr = f"-{rad}"
        else:
            irr = f"{self.b}*{rad}"
        if self.a == 0:
            return irr
        if irr.startswith("-"):
            return f"{self.a} - {irr[1:]}"
        return f"{self.a} + {irr}"


def sqrt_exact(q):
    """Square root of a non-negative rational, exact when possible."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    if q == 0:
        return Fraction(0)
    # sqrt(p/r) = sqrt(p*r)/r
    s, d = _squarefree_split(q.numerator * q.denominator)
    coef = Fraction(s, q.denominator)
    if d == 1:
        return coef
    return Surd(0, coef, d)


def is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, Surd))
