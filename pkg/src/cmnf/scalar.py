"""Complex scalars over exact rationals or big floats.

A scalar is stored as a pair of real field elements.  In exact mode the
pair holds ``gmpy2.mpq`` values (Gaussian rationals); in float mode it holds
``gmpy2.mpfr`` values at a fixed working precision.  Series code works on
the raw pairs in its inner loops, and ``Scalar`` wraps a pair for the
public API.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

MIN_PRECISION = 64

ZERO_Q = mpq(0)
ONE_Q = mpq(1)


class ModeMismatch(ValueError):
    """Raised when exact and float data (or two float precisions) meet."""


class FloatModeRequired(ArithmeticError):
    """Raised when an exact computation needs an irrational root."""


def precision_context(prec):
    """Context manager that sets the mpfr working precision (no-op if exact)."""
    if prec is None:
        return contextlib.nullcontext()
    return gmpy2.context(precision=prec)


def join_prec(a, b):
    if a != b:
        raise ModeMismatch(f"cannot combine precision {a!r} with {b!r}")
    return a


def real(x, prec=None):
    """Convert ``x`` (int, Fraction, str, mpq, mpfr, float) to a field element."""
    if prec is None:
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        if isinstance(x, str):
            return mpq(x.strip())
        if isinstance(x, float):
            return mpq(Fraction(x))
        if type(x).__name__ == "mpfr":
            raise ModeMismatch("float value in exact mode")
        return mpq(x)
    with precision_context(prec):
        if isinstance(x, Fraction):
            return mpfr(mpq(x.numerator, x.denominator))
        if isinstance(x, str):
            s = x.strip()
            return mpfr(mpq(s)) if "/" in s else mpfr(s)
        return mpfr(x)


def pair(x, prec=None):
    """Convert a number (possibly complex or Scalar) to a raw (re, im) pair."""
    if isinstance(x, Scalar):
        if x.prec != prec:
            return x.to_mode(prec).pair
        return x.pair
    if isinstance(x, tuple):
        return (real(x[0], prec), real(x[1], prec))
    if isinstance(x, complex):
        return (real(x.real, prec), real(x.imag, prec))
    return (real(x, prec), real(0, prec))


def is_zero(p):
    return not p[0] and not p[1]


def cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def cmul(a, b):
    ar, ai = a
    br, bi = b
    return (ar * br - ai * bi, ar * bi + ai * br)


def cconj(a):
    return (a[0], -a[1])


def cneg(a):
    return (-a[0], -a[1])


def cabs2(a):
    return a[0] * a[0] + a[1] * a[1]


def cinv(a):
    n = cabs2(a)
    if not n:
        raise ZeroDivisionError("division by zero scalar")
    return (a[0] / n, -a[1] / n)


def cdiv(a, b):
    return cmul(a, cinv(b))


def exact_sqrt(q):
    """Square root of a nonnegative mpq, or None when it is irrational."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


def exact_root(q, k):
    """Exact k-th root of a positive mpq, or None."""
    n, d = q.numerator, q.denominator
    rn, okn = gmpy2.iroot(n, k)
    rd, okd = gmpy2.iroot(d, k)
    if okn and okd:
        return mpq(rn, rd)
    return None


def csqrt_exact(a):
    """Gaussian-rational square root with nonnegative real part, or None."""
    x, y = a
    m = exact_sqrt(x * x + y * y)
    if m is None:
        return None
    p = exact_sqrt((m + x) / 2)
    if p is None:
        return None
    if p:
        return (p, y / (2 * p))
    q = exact_sqrt((m - x) / 2)
    if q is None:
        return None
    return (p, q if y >= 0 else -q)


def csqrt_float(a):
    """Principal square root of a float pair (run inside a precision context)."""
    x, y = a
    m = gmpy2.sqrt(x * x + y * y)
    p = gmpy2.sqrt((m + x) / 2)
    q = gmpy2.sqrt((m - x) / 2)
    if y < 0:
        q = -q
    return (p, q)


def fmt_real(x, prec=None):
    if prec is None:
        return str(x)
    if not x:
        return "0.0e0"
    digits = math.ceil(prec * math.log10(2)) + 2
    mant, exp, _ = x.digits(10, digits)
    if mant.startswith("-"):
        return f"-0.{mant[1:]}e{exp}"
    return f"0.{mant}e{exp}"


class Scalar:
    """Immutable complex scalar: Gaussian rational (``prec=None``) or big float."""

    __slots__ = ("re", "im", "prec")

    def __init__(self, re=0, im=0, prec=None):
        if prec is not None and prec < MIN_PRECISION:
            raise ValueError(f"precision must be >= {MIN_PRECISION} bits")
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "re", real(re, prec))
        object.__setattr__(self, "im", real(im, prec))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def from_pair(cls, p, prec=None):
        s = object.__new__(cls)
        object.__setattr__(s, "re", p[0])
        object.__setattr__(s, "im", p[1])
        object.__setattr__(s, "prec", prec)
        return s

    @classmethod
    def coerce(cls, x, prec=None):
        if isinstance(x, Scalar):
            if x.prec != prec:
                raise ModeMismatch(f"scalar precision {x.prec!r} vs {prec!r}")
            return x
        return cls.from_pair(pair(x, prec), prec)

    @property
    def pair(self):
        return (self.re, self.im)

    @property
    def is_exact(self):
        return self.prec is None

    def to_mode(self, prec):
        if prec == self.prec:
            return self
        with precision_context(prec):
            if prec is None:
                return Scalar.from_pair((mpq(self.re), mpq(self.im)))
            return Scalar.from_pair((mpfr(self.re), mpfr(self.im)), prec)

    def _other(self, other):
        if isinstance(other, Scalar):
            join_prec(self.prec, other.prec)
            return other.pair
        return pair(other, self.prec)

    def _wrap(self, p):
        return Scalar.from_pair(p, self.prec)

    def __add__(self, other):
        with precision_context(self.prec):
            return self._wrap(cadd(self.pair, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        with precision_context(self.prec):
            return self._wrap(csub(self.pair, self._other(other)))

    def __rsub__(self, other):
        with precision_context(self.prec):
            return self._wrap(csub(self._other(other), self.pair))

    def __mul__(self, other):
        with precision_context(self.prec):
            return self._wrap(cmul(self.pair, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        with precision_context(self.prec):
            return self._wrap(cdiv(self.pair, self._other(other)))

    def __rtruediv__(self, other):
        with precision_context(self.prec):
            return self._wrap(cdiv(self._other(other), self.pair))

    def __neg__(self):
        with precision_context(self.prec):
            return self._wrap(cneg(self.pair))

    def conj(self):
        with precision_context(self.prec):
            return self._wrap(cconj(self.pair))

    def abs2(self):
        with precision_context(self.prec):
            return Scalar.from_pair((cabs2(self.pair), self.re * 0), self.prec)

    def __abs__(self):
        with precision_context(self.prec):
            if self.prec is None:
                return math.sqrt(float(cabs2(self.pair)))
            return gmpy2.sqrt(cabs2(self.pair))

    def __bool__(self):
        return not is_zero(self.pair)

    def __eq__(self, other):
        try:
            o = self._other(other)
        except (ModeMismatch, TypeError, ValueError):
            return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im, self.prec))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        re, im = fmt_real(self.re, self.prec), fmt_real(self.im, self.prec)
        if not self.im:
            return re
        if not self.re:
            return f"{im}i"
        sign = "" if im.startswith("-") else "+"
        return f"{re}{sign}{im}i"
