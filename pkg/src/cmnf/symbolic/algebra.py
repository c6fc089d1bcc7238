"""Gaussian rationals and sparse polynomials that are at most linear in a
distinguished class of symbols.

A ``Poly`` is a map ``(vmono, sym) -> GQ``.  ``vmono`` is a sorted tuple of
``(vsym, power)`` pairs over the commuting "value" symbols (jets, lifted
invariants); ``sym`` is either ``None`` or a single linear symbol (a vector
field jet, a Maurer-Cartan form, a horizontal form).  Products are allowed
only when at most one factor carries a linear symbol.
"""

from __future__ import annotations

from gmpy2 import mpq

_ZERO = mpq(0)


class GQ:
    """Gaussian rational re + i*im."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO) else mpq(re)
        self.im = im if type(im) is type(_ZERO) else mpq(im)

    def __add__(self, o):
        o = gq(o)
        return GQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = gq(o)
        return GQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return gq(o) - self

    def __neg__(self):
        return GQ(-self.re, -self.im)

    def __mul__(self, o):
        o = gq(o)
        return GQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = gq(o)
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("GQ division by zero")
        return GQ((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return gq(o) / self

    def conj(self):
        return GQ(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = gq(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GQ({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return "i" if self.im == 1 else "-i" if self.im == -1 else f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        im = abs(self.im)
        return f"({self.re}{sign}{'' if im == 1 else str(im) + '*'}i)"


I = GQ(0, 1)


def gq(x):
    if isinstance(x, GQ):
        return x
    if isinstance(x, complex):
        raise TypeError("float complex values are not exact")
    return GQ(x, 0)


# ------------------------------------------------------------------ monomials


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


class Poly:
    __slots__ = ("t",)

    def __init__(self, t=None):
        self.t = t if t is not None else {}

    # -- constructors
    @staticmethod
    def const(c):
        c = gq(c)
        return Poly({((), None): c} if c else {})

    @staticmethod
    def var(vsym):
        return Poly({(((vsym, 1),), None): GQ(1)})

    @staticmethod
    def lin(sym, c=1):
        c = gq(c)
        return Poly({((), sym): c} if c else {})

    # -- arithmetic
    def copy(self):
        return Poly(dict(self.t))

    def __add__(self, o):
        o = _lift(o)
        t = dict(self.t)
        for k, c in o.t.items():
            v = t.get(k)
            v = c if v is None else v + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return Poly(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -c for k, c in self.t.items()})

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) - self

    def scale(self, c):
        c = gq(c)
        if not c:
            return Poly()
        return Poly({k: v * c for k, v in self.t.items()})

    def __mul__(self, o):
        if isinstance(o, (int, GQ)) or type(o) is type(_ZERO):
            return self.scale(o)
        o = _lift(o)
        t = {}
        for (m1, s1), c1 in self.t.items():
            for (m2, s2), c2 in o.t.items():
                if s1 is not None and s2 is not None:
                    raise ValueError("product of two linear symbols")
                k = (mono_mul(m1, m2), s1 if s1 is not None else s2)
                v = t.get(k)
                v = c1 * c2 if v is None else v + c1 * c2
                if v:
                    t[k] = v
                else:
                    t.pop(k, None)
        return Poly(t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = gq(c)
        return self.scale(GQ(1) / c)

    def __pow__(self, n):
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.t)

    def __eq__(self, o):
        if not isinstance(o, Poly):
            try:
                o = _lift(o)
            except TypeError:
                return NotImplemented
        return self.t == o.t

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    # -- structure
    def linear_symbols(self):
        return {s for (_, s) in self.t if s is not None}

    def value_symbols(self):
        return {v for (m, _) in self.t for v, _ in m}

    def coeff(self, sym):
        """The value polynomial multiplying the linear symbol ``sym``."""
        return Poly({(m, None): c for (m, s), c in self.t.items() if s == sym})

    def drop(self, syms):
        return Poly({k: c for k, c in self.t.items() if k[1] not in syms})

    def keep(self, pred):
        return Poly({k: c for k, c in self.t.items() if k[1] is not None and pred(k[1])})

    def is_constant(self):
        return all(not m and s is None for (m, s) in self.t)

    def constant(self):
        return self.t.get(((), None), GQ(0))

    def linear_parts(self):
        out = {}
        for (m, s), c in self.t.items():
            out.setdefault(s, {})[(m, None)] = c
        return {s: Poly(d) for s, d in out.items()}

    def max_value_degree(self):
        return max((mono_degree(m) for (m, _) in self.t), default=0)

    # -- substitution
    def subs_values(self, mapping):
        """Replace value symbols by value polynomials (``mapping[vsym]``)."""
        if not any(v in mapping for (m, _) in self.t for v, _ in m):
            return self
        cache = {}
        out = Poly()
        acc = {}
        for (m, s), c in self.t.items():
            term = Poly({((), s): c})
            rest = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = mapping[v] ** e
                    term = term * cache[key]
                else:
                    rest.append((v, e))
            if rest:
                term = term * Poly({(tuple(rest), None): GQ(1)})
            for k, val in term.t.items():
                w = acc.get(k)
                w = val if w is None else w + val
                if w:
                    acc[k] = w
                else:
                    acc.pop(k, None)
        out.t = acc
        return out

    def subs_linear(self, mapping):
        """Replace linear symbols by polynomials (``mapping[sym]``)."""
        if not any(s in mapping for (_, s) in self.t):
            return self
        acc = {}
        for (m, s), c in self.t.items():
            if s in mapping:
                part = mapping[s]
                items = ((mono_mul(m, m2), s2, c * c2) for (m2, s2), c2 in part.t.items())
            else:
                items = ((m, s, c),)
            for mm, ss, cc in items:
                k = (mm, ss)
                w = acc.get(k)
                w = cc if w is None else w + cc
                if w:
                    acc[k] = w
                else:
                    acc.pop(k, None)
        return Poly(acc)

    def conj(self, vconj, sconj):
        """Complex conjugate given symbol conjugation maps.

        ``vconj(v)`` returns the conjugate value symbol; ``sconj(s)`` returns
        ``(factor, symbol)`` so that real splittings can carry a sign.
        """
        acc = {}
        for (m, s), c in self.t.items():
            mm = tuple(sorted((vconj(v), e) for v, e in m))
            f, ss = (GQ(1), None) if s is None else sconj(s)
            k = (mm, ss)
            w = acc.get(k)
            w = c.conj() * f if w is None else w + c.conj() * f
            if w:
                acc[k] = w
            else:
                acc.pop(k, None)
        return Poly(acc)

    def __repr__(self):
        return f"Poly({self.t!r})"


def _lift(o):
    if isinstance(o, Poly):
        return o
    return Poly.const(o)
