"""Exact numbers (a + b sqrt3) + i (c + d sqrt3) with rational a, b, c, d."""

from __future__ import annotations

from fractions import Fraction
import math


def _q(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact scalars need int/Fraction/str components, got {type(x).__name__}")


class ExactScalar:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        object.__setattr__(self, "a", _q(a))
        object.__setattr__(self, "b", _q(b))
        object.__setattr__(self, "c", _q(c))
        object.__setattr__(self, "d", _q(d))

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def coerce(cls, x):
        if isinstance(x, ExactScalar):
            return x
        return cls(_q(x))

    @property
    def parts(self):
        return (self.a, self.b, self.c, self.d)

    def is_zero(self):
        return not (self.a or self.b or self.c or self.d)

    def is_real(self):
        return not (self.c or self.d)

    def is_rational(self):
        return not (self.b or self.c or self.d)

    def __eq__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __add__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        o = ExactScalar.coerce(other)
        return ExactScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        o = ExactScalar.coerce(other)
        # (p + i r)(s + i t) with p, r, s, t in Q[sqrt3]
        p, r = (self.a, self.b), (self.c, self.d)
        s, t = (o.a, o.b), (o.c, o.d)
        re = _sub3(_mul3(p, s), _mul3(r, t))
        im = _add3(_mul3(p, t), _mul3(r, s))
        return ExactScalar(re[0], re[1], im[0], im[1])

    __rmul__ = __mul__

    def conj(self):
        return ExactScalar(self.a, self.b, -self.c, -self.d)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        p, r = (self.a, self.b), (self.c, self.d)
        n = _add3(_mul3(p, p), _mul3(r, r))  # |z|^2 in Q[sqrt3]
        ni = _inv3(n)
        re = _mul3(p, ni)
        im = _mul3((-r[0], -r[1]), ni)
        return ExactScalar(re[0], re[1], im[0], im[1])

    def __truediv__(self, other):
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __complex__(self):
        s3 = math.sqrt(3.0)
        return complex(float(self.a) + float(self.b) * s3, float(self.c) + float(self.d) * s3)

    def __repr__(self):
        return f"ExactScalar({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        atoms = []
        for val, tag in ((self.a, ""), (self.b, "*sqrt3"), (self.c, "*i"), (self.d, "*sqrt3*i")):
            if val:
                atoms.append(f"{val}{tag}")
        return " + ".join(atoms) if atoms else "0"


def _scalar_like(x):
    return isinstance(x, (ExactScalar, int, Fraction))


def _mul3(x, y):
    return (x[0] * y[0] + 3 * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _add3(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _sub3(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _inv3(x):
    den = x[0] * x[0] - 3 * x[1] * x[1]
    if den == 0:
        raise ZeroDivisionError("inverse of zero in Q[sqrt3]")
    return (x[0] / den, -x[1] / den)


ZERO = ExactScalar()
ONE = ExactScalar(1)
I = ExactScalar(0, 0, 1)
SQRT3 = ExactScalar(0, 1)


def q(num, den=1):
    return ExactScalar(Fraction(num, den))
