"""Hypersurface germs v = f(z, zbar, u), formal biholomorphisms and their action."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .scalar import Scalar, join_prec, pair, precision_context, real
from .series import HoloSeries2, Series3, SeriesParseError, graded_key, invert_map, weight


class GraphConditionError(ValueError):
    """The image of a germ is not a graph over (Z, Zbar, U)."""


class NotRealError(ValueError):
    pass


def _float_tol(prec):
    return 2.0 ** (-(prec * 3) // 4)


class Hypersurface:
    """Germ of the real hypersurface v = f(z, zbar, u) at the origin."""

    __slots__ = ("f",)

    def __init__(self, f, check=True):
        if check:
            if f.coeffs.get((0, 0, 0)):
                raise ValueError("defining function must vanish at the origin")
            cf = f.conj_real()
            if f.prec is None:
                if cf != f:
                    raise NotRealError("defining function is not real")
            else:
                if not f.agrees(cf, tol=_float_tol(f.prec)):
                    raise NotRealError("defining function is not real")
                f = f.real_part()
        object.__setattr__(self, "f", f)

    def __setattr__(self, name, value):
        raise AttributeError("Hypersurface is immutable")

    @property
    def trunc(self):
        return self.f.trunc

    @property
    def prec(self):
        return self.f.prec

    def to_mode(self, prec):
        return Hypersurface(self.f.to_mode(prec), check=False)

    def __eq__(self, other):
        return isinstance(other, Hypersurface) and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __repr__(self):
        return f"Hypersurface(v = {self.f!r})"

    @classmethod
    def heisenberg(cls, trunc=12, prec=None):
        return cls(Series3({(1, 1, 0): 1}, trunc, prec))


def levi(M):
    """Coefficient of z zbar in the defining function."""
    return M.f[(1, 1, 0)]


def recenter(M, z0, u0):
    """Re-base the germ at the parameter point (z0, u0).

    The defining function is treated as an exact polynomial, so the result is
    the translate of that polynomial; for truncated expansions of analytic
    surfaces, expand the closed form at the new point instead.
    """
    f = M.f
    prec = f.prec
    T = f.trunc
    with precision_context(prec):
        z0 = Scalar.coerce(z0, prec) if isinstance(z0, Scalar) else Scalar.from_pair(pair(z0, prec), prec)
        u0 = Scalar.coerce(u0, prec) if isinstance(u0, Scalar) else Scalar.from_pair(pair(u0, prec), prec)
        if u0.im:
            raise ValueError("u0 must be real")
        one = Series3.constant(1, T, prec)
        sz = Series3.var("z", T, prec) + one.scale(z0)
        szb = Series3.var("zbar", T, prec) + one.scale(z0.conj())
        su = Series3.var("u", T, prec) + one.scale(u0)
        pz, pzb, pu = [one], [one], [one]
        out = Series3.zero(T, prec)
        for (j, k, l), c in f.items():
            while len(pz) <= j:
                pz.append(pz[-1] * sz)
            while len(pzb) <= k:
                pzb.append(pzb[-1] * szb)
            while len(pu) <= l:
                pu.append(pu[-1] * su)
            out = out + (pz[j] * pzb[k] * pu[l]).scale(c)
        v0 = out.get_pair((0, 0, 0))
        if v0[1]:
            raise NotRealError("defining function is not real at the new point")
        d = dict(out.coeffs)
        d.pop((0, 0, 0), None)
        return Hypersurface(Series3._raw(d, T, prec))


@dataclass(frozen=True)
class Biholomorphism:
    """Formal holomorphic map (z, w) -> (F, Phi) fixing the origin."""

    F: HoloSeries2
    Phi: HoloSeries2

    def __post_init__(self):
        join_prec(self.F.prec, self.Phi.prec)
        for s in (self.F, self.Phi):
            if (0, 0, 0) in s.coeffs:
                raise ValueError("biholomorphism must fix the origin")
        a, b = self.F[(1, 0)], self.F[(0, 1)]
        c, d = self.Phi[(1, 0)], self.Phi[(0, 1)]
        if not (a * d - b * c):
            raise ValueError("linear part is not invertible")

    @property
    def prec(self):
        return self.F.prec

    @property
    def trunc(self):
        ts = [t for t in (self.F.trunc, self.Phi.trunc) if t is not None]
        return min(ts) if ts else None

    @classmethod
    def identity(cls, prec=None):
        return cls(HoloSeries2.var("z", prec), HoloSeries2.var("w", prec))

    @classmethod
    def linear(cls, a, b, c, d, prec=None):
        """Z = a z + b w, W = c z + d w."""
        return cls(HoloSeries2({(1, 0): a, (0, 1): b}, None, prec), HoloSeries2({(1, 0): c, (0, 1): d}, None, prec))

    @classmethod
    def scaling(cls, lam, prec=None):
        """Z = lam z, W = |lam|^2 w (an isotropy of the Heisenberg sphere)."""
        lam = Scalar.coerce(lam, prec) if isinstance(lam, Scalar) else Scalar.from_pair(pair(lam, prec), prec)
        return cls.linear(lam, 0, 0, lam.abs2(), prec)

    @classmethod
    def heisenberg_isotropy(cls, lam, a, r, trunc, prec=None):
        """Z = lam (z + a w)/delta, W = |lam|^2 w/delta with
        delta = 1 - 2i conj(a) z - (r + i|a|^2) w, expanded to weight ``trunc``."""
        with precision_context(prec):
            lam = Scalar.from_pair(pair(lam, prec), prec)
            a = Scalar.from_pair(pair(a, prec), prec)
            r = Scalar.from_pair(pair(r, prec), prec)
            i = Scalar(0, 1, prec)
            one_minus_delta = HoloSeries2(
                {(1, 0): 2 * i * a.conj(), (0, 1): r + i * a.abs2()}, None, prec
            ).truncate(trunc)
            inv = HoloSeries2({(0, 0): 1}, trunc, prec)
            p = inv
            for _ in range(trunc):
                p = p * one_minus_delta
                if not p.coeffs:
                    break
                inv = inv + p
            F = (HoloSeries2({(1, 0): lam, (0, 1): lam * a}, trunc, prec) * inv)
            Phi = HoloSeries2({(0, 1): lam.abs2()}, trunc, prec) * inv
            return cls(_drop_const(F), _drop_const(Phi))

    def compose(self, inner, cap=None):
        """self o inner, truncated at weight ``cap`` when given."""
        if cap is None and self.trunc is None and inner.trunc is None:
            cap = max(self.F.degree(), self.Phi.degree(), 1) * max(inner.F.degree(), inner.Phi.degree(), 1)
        return Biholomorphism(self.F.compose(inner.F, inner.Phi, cap), self.Phi.compose(inner.F, inner.Phi, cap))

    def truncate(self, n):
        return Biholomorphism(self.F.truncate(n), self.Phi.truncate(n))

    def to_mode(self, prec):
        return Biholomorphism(self.F.to_mode(prec), self.Phi.to_mode(prec))

    def dumps(self):
        lines = [f"order {'exact' if self.trunc is None else self.trunc}"]
        from .scalar import fmt_real

        for name, s in (("F", self.F), ("Phi", self.Phi)):
            lines.append(f"section {name}")
            for (a, b), c in s.items():
                lines.append(f"coeff {a} {b} {fmt_real(c.re, s.prec)} {fmt_real(c.im, s.prec)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text, prec=None):
        trunc = "missing"
        sections = {}
        cur = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = re.split(r"\s+", line)
            try:
                if parts[0] == "order" and len(parts) == 2:
                    trunc = None if parts[1] == "exact" else int(parts[1])
                elif parts[0] == "section" and len(parts) == 2 and parts[1] in ("F", "Phi"):
                    cur = sections.setdefault(parts[1], {})
                elif parts[0] == "coeff" and len(parts) == 5 and cur is not None:
                    cur[(int(parts[1]), int(parts[2]))] = (real(parts[3], prec), real(parts[4], prec))
                else:
                    raise ValueError(f"unrecognized line: {line!r}")
            except (ValueError, ZeroDivisionError) as exc:
                raise SeriesParseError(f"line {lineno}: {exc}") from None
        if trunc == "missing" or set(sections) != {"F", "Phi"}:
            raise SeriesParseError("biholomorphism needs an order line and F, Phi sections")
        return cls(HoloSeries2(sections["F"], trunc, prec), HoloSeries2(sections["Phi"], trunc, prec))


def _drop_const(h):
    d = dict(h.coeffs)
    d.pop((0, 0, 0), None)
    return HoloSeries2._raw(d, h.trunc, h.prec)


@dataclass(frozen=True)
class TangentField:
    """Real vector field 2 Re(xi d/dz + theta d/dw) with holomorphic coefficients."""

    xi: HoloSeries2
    theta: HoloSeries2

    @classmethod
    def from_dicts(cls, xi, theta, prec=None):
        return cls(HoloSeries2(xi, None, prec), HoloSeries2(theta, None, prec))


def _surface_coords(f):
    T, prec = f.trunc, f.prec
    z = Series3.var("z", T, prec)
    w = Series3.var("u", T, prec) + f.scale((real(0, prec), real(1, prec)))
    return z, w


def pushforward(M, g):
    """Image of the germ M under the biholomorphism g, again as a graph."""
    f = M.f
    prec = join_prec(f.prec, g.prec)
    with precision_context(prec):
        z, w = _surface_coords(f)
        Zs = g.F.on_surface(z, w)
        Ws = g.Phi.on_surface(z, w)
        U = Ws.real_part()
        V = Ws.imag_part()
        try:
            n = invert_map((Zs, Zs.conj_real(), U))
        except ArithmeticError as exc:
            raise GraphConditionError(str(exc)) from None
        ft = V.substitute(*n)
        if prec is not None:
            ft = ft.real_part()
        d = dict(ft.coeffs)
        if d.pop((0, 0, 0), None) is not None:
            raise GraphConditionError("image germ does not pass through the origin")
        return Hypersurface(Series3._raw(d, ft.trunc, prec), check=prec is None)


def field_on_germ(X, M):
    """The function X(v - f) restricted to the graph, as a real Series3."""
    f = M.f
    prec = join_prec(f.prec, X.xi.prec)
    with precision_context(prec):
        z, w = _surface_coords(f)
        xi = X.xi.on_surface(z, w)
        th = X.theta.on_surface(z, w)
        fz = f.derivative(0)
        fu = f.derivative(2)
        return th.imag_part() - (xi * fz).real_part().scale(2) - th.real_part() * fu


def is_tangent(X, M, tol=None):
    """True when the real field of X annihilates v - f on the graph (to truncation)."""
    r = field_on_germ(X, M)
    if tol is None and M.prec is None:
        return r.is_zero()
    tol = tol if tol is not None else _float_tol(M.prec)
    return r.max_abs() <= tol


def v_table(f):
    """Nonzero lifted values V_{jkl} = j! k! l! c_{jkl} in graded-lex order."""
    from math import factorial

    out = []
    for idx in sorted(f.coeffs, key=graded_key):
        j, k, l = idx
        out.append((idx, f[idx] * (factorial(j) * factorial(k) * factorial(l))))
    return out
