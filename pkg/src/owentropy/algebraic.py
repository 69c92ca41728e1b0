"""Exact arithmetic in the real quadratic field Q(sqrt 5).

Numbers are stored as ``r + s*sqrt(5)`` with ``r, s`` Fractions.  Ordering
is decided with integer comparisons only, so window membership for the
Fibonacci model set never touches floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["Sqrt5", "TAU", "SQRT5", "sign", "as_exact"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Sqrt5:
    """Element ``r + s*sqrt(5)`` of Q(sqrt 5).

    Compares and hashes equal to the plain Fraction ``r`` when ``s == 0`` so
    mixed containers of rationals and quadratic numbers behave.
    """

    __slots__ = ("r", "s")

    def __init__(self, r=0, s=0):
        object.__setattr__(self, "r", _frac(r))
        object.__setattr__(self, "s", _frac(s))

    def __setattr__(self, name, value):
        raise AttributeError("Sqrt5 is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, Sqrt5):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return Sqrt5(other, 0)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Sqrt5(self.r + o.r, self.s + o.s)

    __radd__ = __add__

    def __neg__(self):
        return Sqrt5(-self.r, -self.s)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Sqrt5(self.r - o.r, self.s - o.s)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Sqrt5(self.r * o.r + 5 * self.s * o.s, self.r * o.s + self.s * o.r)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``r^2 - 5 s^2``."""
        return self.r * self.r - 5 * self.s * self.s

    def conjugate(self) -> "Sqrt5":
        return Sqrt5(self.r, -self.s)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        num = self * o.conjugate()
        return Sqrt5(num.r / n, num.s / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __abs__(self):
        return -self if sign(self) < 0 else self

    # comparison
    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare Sqrt5 with {type(other).__name__}")
        return sign(self - o)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.r == o.r and self.s == o.s

    def __hash__(self):
        if self.s == 0:
            return hash(self.r)
        return hash((self.r, self.s))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.r) + float(self.s) * math.sqrt(5.0)

    def __bool__(self):
        return bool(self.r) or bool(self.s)

    def is_rational(self) -> bool:
        return self.s == 0

    def floor(self) -> int:
        """Exact floor."""
        guess = math.floor(float(self))
        while Sqrt5(guess) > self:
            guess -= 1
        while Sqrt5(guess + 1) <= self:
            guess += 1
        return guess

    def ceil(self) -> int:
        return -((-self).floor())

    def __repr__(self):
        return f"Sqrt5({self.r}, {self.s})"

    def __str__(self):
        if self.s == 0:
            return str(self.r)
        return f"{self.r}+{self.s}*sqrt5"


def sign(x) -> int:
    """Sign of a rational or ``r + s*sqrt5`` using integer comparisons only."""
    if not isinstance(x, Sqrt5):
        x = _frac(x)
        return (x > 0) - (x < 0)
    r, s = x.r, x.s
    sr = (r > 0) - (r < 0)
    ss = (s > 0) - (s < 0)
    if ss == 0:
        return sr
    if sr == 0 or sr == ss:
        return ss
    # opposite signs: compare r^2 with 5 s^2
    d = r * r - 5 * s * s
    if d == 0:
        return 0  # unreachable for rational r, s != 0; kept for totality
    return sr if d > 0 else ss


def as_exact(x):
    """Canonical exact form: Fraction when rational, Sqrt5 otherwise."""
    if isinstance(x, Sqrt5):
        return x.r if x.s == 0 else x
    return _frac(x)


SQRT5 = Sqrt5(0, 1)
TAU = Sqrt5(Fraction(1, 2), Fraction(1, 2))
