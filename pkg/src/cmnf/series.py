"""Sparse truncated power series in (z, zbar, u) and holomorphic series in (z, w).

Truncation uses the weighted grading where z and zbar have weight 1 and
u (and w) has weight 2.  Coefficients are stored as raw (re, im) pairs, see
``cmnf.scalar``.  Composition tracks an honest truncation order: the result
is only claimed up to the weight where the inputs determine it.
"""

from __future__ import annotations

import math
import re

from .scalar import (
    ModeMismatch,
    Scalar,
    cadd,
    cconj,
    cinv,
    cmul,
    cneg,
    fmt_real,
    is_zero,
    join_prec,
    pair,
    precision_context,
    real,
)

WEIGHTS = (1, 1, 2)


def weight(idx):
    return idx[0] + idx[1] + 2 * idx[2]


def plain_degree(idx):
    return idx[0] + idx[1] + idx[2]


def graded_key(idx):
    """Graded-lex order: weighted degree, then larger z, zbar, u exponents first."""
    return (weight(idx), -idx[0], -idx[1], -idx[2])


def _min_weight(d):
    return min((weight(i) for i in d), default=math.inf)


def _prune(d):
    return {k: v for k, v in d.items() if v[0] or v[1]}


# ---------------------------------------------------------------- kernels


def _mul_raw(a, b, cap):
    """Product of two coefficient dicts keeping weights <= cap."""
    if len(a) > len(b):
        a, b = b, a
    buckets = {}
    for (j, k, l), v in b.items():
        w = j + k + 2 * l
        if w <= cap:
            buckets.setdefault(w, []).append((j, k, l, v[0], v[1]))
    order = sorted(buckets)
    out = {}
    get = out.get
    for (j, k, l), (ar, ai) in a.items():
        rem = cap - (j + k + 2 * l)
        if rem < 0:
            continue
        for w in order:
            if w > rem:
                break
            if ai:
                for j2, k2, l2, br, bi in buckets[w]:
                    key = (j + j2, k + k2, l + l2)
                    acc = get(key)
                    if acc is None:
                        out[key] = [ar * br - ai * bi, ar * bi + ai * br]
                    else:
                        acc[0] += ar * br - ai * bi
                        acc[1] += ar * bi + ai * br
            else:
                for j2, k2, l2, br, bi in buckets[w]:
                    key = (j + j2, k + k2, l + l2)
                    acc = get(key)
                    if acc is None:
                        out[key] = [ar * br, ar * bi]
                    else:
                        acc[0] += ar * br
                        acc[1] += ar * bi
    return {k: (v[0], v[1]) for k, v in out.items() if v[0] or v[1]}


def _axpy(out, c, d, cap):
    """out += c * d restricted to weight <= cap (in place)."""
    cr, ci = c
    get = out.get
    for key, (dr, di) in d.items():
        if key[0] + key[1] + 2 * key[2] > cap:
            continue
        acc = get(key)
        if ci:
            re, im = cr * dr - ci * di, cr * di + ci * dr
        else:
            re, im = cr * dr, cr * di
        if acc is None:
            out[key] = [re, im]
        else:
            acc[0] += re
            acc[1] += im


def _add_into(out, d, cap):
    get = out.get
    for key, v in d.items():
        if key[0] + key[1] + 2 * key[2] > cap:
            continue
        acc = get(key)
        if acc is None:
            out[key] = [v[0], v[1]]
        else:
            acc[0] += v[0]
            acc[1] += v[1]


def _freeze(out):
    return {k: (v[0], v[1]) for k, v in out.items() if v[0] or v[1]}


def _restrict(d, cap):
    return {k: v for k, v in d.items() if weight(k) <= cap}


def compose_raw(fd, ftrunc, gs, cap=None):
    """Compose the coefficient dict ``fd`` with three substitutions.

    ``gs`` is a sequence of three ``(dict, trunc)`` pairs for z, zbar, u; a
    trunc of ``None`` means the series is an exact polynomial, and so does
    ``ftrunc=None``.  Returns ``(dict, trunc)`` where ``trunc`` is the largest
    weight up to which the result is determined by the inputs (never more
    than ``cap``).
    """
    mins = []
    for (d, t), w in zip(gs, WEIGHTS):
        if d and min(_min_weight(d), math.inf if t is None else t + 1) < 1:
            raise ValueError("substituted series must have zero constant term")
        mins.append(min(_min_weight(d), math.inf if t is None else t + 1))
    used = [False, False, False]
    for idx in fd:
        for i in range(3):
            if idx[i]:
                used[i] = True
    bound = math.inf if cap is None else cap
    if ftrunc is not None:
        # a missing term of f of weight > ftrunc lands at image weight >= r * (ftrunc + 1)
        r = min(mins[i] / WEIGHTS[i] for i in range(3))
        if r != math.inf:
            bound = min(bound, math.ceil(r * (ftrunc + 1)) - 1)
    for i in range(3):
        t = gs[i][1]
        if not used[i] or t is None:
            continue
        d_i = math.inf
        for idx in fd:
            if idx[i]:
                img = sum(idx[m] * mins[m] for m in range(3)) - mins[i]
                d_i = min(d_i, img)
        bound = min(bound, t + d_i)
    if bound == math.inf:
        ts = [t for (_, t) in gs if t is not None]
        if not ts:
            raise ValueError("composition of exact polynomials needs an explicit cap")
        bound = min(ts)
    N = int(bound)
    if N < 0:
        return {}, N
    mx, my, mt = mins
    # group f as sum_j x^j sum_k y^k sum_l c t^l, then Horner in x and y
    groups = {}
    for (j, k, l), c in fd.items():
        groups.setdefault(j, {}).setdefault(k, []).append((l, c))
    gx, gy, gt = (_restrict(g[0], N) for g in gs)
    maxl = max((l for (_, _, l) in fd), default=0)
    tpow = [{(0, 0, 0): _one_like(fd)}]
    for _ in range(maxl):
        tpow.append(_mul_raw(tpow[-1], gt, N))
    acc = {}
    for j in range(max(groups, default=0), -1, -1):
        level = _level(N, j, mx)
        if acc:
            acc = _mul_raw(acc, gx, level) if level >= 0 else {}
        if j in groups and level >= 0:
            a_j = _inner_y(groups[j], gy, my, tpow, level)
            out = {k: [v[0], v[1]] for k, v in acc.items()}
            _add_into(out, a_j, level)
            acc = _freeze(out)
    return acc, N


def _level(n, j, m):
    if j == 0:
        return n
    if m == math.inf:
        return -1
    return n - j * m


def _one_like(fd):
    for v in fd.values():
        return (v[0] ** 0, v[0] * 0)
    return (real(1), real(0))


def _inner_y(kgroups, gy, my, tpow, level):
    acc = {}
    for k in range(max(kgroups), -1, -1):
        lev = _level(level, k, my)
        if acc:
            acc = _mul_raw(acc, gy, lev) if lev >= 0 else {}
        if k in kgroups and lev >= 0:
            out = {kk: [v[0], v[1]] for kk, v in acc.items()}
            for l, c in kgroups[k]:
                _axpy(out, c, tpow[l], lev)
            acc = _freeze(out)
    return acc


# ---------------------------------------------------------------- Series3


_LINE = re.compile(r"\s+")


class Series3:
    """Truncated series in (z, zbar, u); immutable after construction.

    ``coeffs`` maps exponent triples (j, k, l) of z, zbar, u to coefficients.
    Every stored index has weighted degree j + k + 2l <= ``trunc``.
    """

    __slots__ = ("coeffs", "trunc", "prec")

    def __init__(self, coeffs=None, trunc=12, prec=None):
        if trunc is None or trunc < 0:
            raise ValueError("trunc must be a nonnegative integer")
        d = {}
        with precision_context(prec):
            for idx, c in (coeffs or {}).items():
                idx = tuple(int(e) for e in idx)
                if len(idx) != 3 or min(idx) < 0:
                    raise ValueError(f"bad index {idx}")
                if weight(idx) > trunc:
                    continue
                p = pair(c, prec)
                if p[0] or p[1]:
                    d[idx] = p
        self._set(d, trunc, prec)

    def _set(self, d, trunc, prec):
        object.__setattr__(self, "coeffs", d)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("Series3 is immutable")

    @classmethod
    def _raw(cls, d, trunc, prec):
        s = object.__new__(cls)
        s._set(d, trunc, prec)
        return s

    @classmethod
    def zero(cls, trunc=12, prec=None):
        return cls._raw({}, trunc, prec)

    @classmethod
    def constant(cls, c, trunc=12, prec=None):
        return cls({(0, 0, 0): c}, trunc, prec)

    @classmethod
    def var(cls, name, trunc=12, prec=None):
        idx = {"z": (1, 0, 0), "zbar": (0, 1, 0), "u": (0, 0, 1)}[name]
        return cls({idx: 1}, trunc, prec)

    @classmethod
    def monomial(cls, idx, c=1, trunc=12, prec=None):
        return cls({idx: c}, trunc, prec)

    # -- access
    def __getitem__(self, idx):
        p = self.coeffs.get(tuple(idx))
        if p is None:
            return Scalar(0, 0, self.prec)
        return Scalar.from_pair(p, self.prec)

    def get_pair(self, idx):
        p = self.coeffs.get(idx)
        if p is None:
            z = real(0, self.prec)
            return (z, z)
        return p

    def items(self):
        """(index, Scalar) pairs in graded-lex order."""
        for idx in sorted(self.coeffs, key=graded_key):
            yield idx, Scalar.from_pair(self.coeffs[idx], self.prec)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(sorted(self.coeffs, key=graded_key))

    def min_weight(self):
        return _min_weight(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    # -- mode handling
    def _check(self, other):
        if not isinstance(other, Series3):
            raise TypeError("expected Series3")
        return join_prec(self.prec, other.prec)

    def to_mode(self, prec):
        if prec == self.prec:
            return self
        if prec is None and self.prec is not None:
            raise ModeMismatch("refusing to convert float data to exact mode")
        with precision_context(prec):
            d = {k: (real(v[0], prec), real(v[1], prec)) for k, v in self.coeffs.items()}
        return Series3._raw(d, self.trunc, prec)

    def truncate(self, n):
        n = min(n, self.trunc)
        return Series3._raw(_restrict(self.coeffs, n), n, self.prec)

    def homogeneous(self, w):
        """Weight-``w`` part (trunc unchanged)."""
        return Series3._raw({k: v for k, v in self.coeffs.items() if weight(k) == w}, self.trunc, self.prec)

    def with_trunc(self, n):
        """Re-declare the truncation order (for exact polynomials)."""
        return Series3._raw(_restrict(self.coeffs, n), n, self.prec)

    # -- arithmetic
    def __add__(self, other):
        prec = self._check(other)
        n = min(self.trunc, other.trunc)
        with precision_context(prec):
            out = {}
            _add_into(out, self.coeffs, n)
            _add_into(out, other.coeffs, n)
            return Series3._raw(_freeze(out), n, prec)

    def __neg__(self):
        with precision_context(self.prec):
            return Series3._raw({k: cneg(v) for k, v in self.coeffs.items()}, self.trunc, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Series3):
            return self.scale(other)
        prec = self._check(other)
        n = min(self.trunc, other.trunc)
        with precision_context(prec):
            return Series3._raw(_mul_raw(self.coeffs, other.coeffs, n), n, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        with precision_context(self.prec):
            c = Scalar.coerce(c, self.prec).pair if isinstance(c, Scalar) else pair(c, self.prec)
            if is_zero(c):
                return Series3.zero(self.trunc, self.prec)
            return Series3._raw(_prune({k: cmul(c, v) for k, v in self.coeffs.items()}), self.trunc, self.prec)

    def __truediv__(self, c):
        if isinstance(c, Series3):
            raise TypeError("division by a series is not supported")
        with precision_context(self.prec):
            return self.scale(Scalar.from_pair(cinv(pair(c, self.prec)), self.prec))

    def __pow__(self, n):
        out = Series3.constant(1, self.trunc, self.prec)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self, var):
        """Partial derivative in z (0), zbar (1) or u (2)."""
        out = {}
        with precision_context(self.prec):
            for idx, (re_, im_) in self.coeffs.items():
                e = idx[var]
                if e:
                    new = list(idx)
                    new[var] -= 1
                    out[tuple(new)] = (re_ * e, im_ * e)
        return Series3._raw(out, max(self.trunc - WEIGHTS[var], 0), self.prec)

    def conj_real(self):
        with precision_context(self.prec):
            d = {(k, j, l): cconj(v) for (j, k, l), v in self.coeffs.items()}
        return Series3._raw(d, self.trunc, self.prec)

    def real_part(self):
        """(f + conj_real f) / 2."""
        with precision_context(self.prec):
            return (self + self.conj_real()).scale((real("1/2", self.prec), real(0, self.prec)))

    def imag_part(self):
        """(f - conj_real f) / (2i)."""
        with precision_context(self.prec):
            return (self - self.conj_real()).scale((real(0, self.prec), real("-1/2", self.prec)))

    def substitute(self, gz, gzbar, gu, cap=None):
        """Formal composition f(gz, gzbar, gu) with honest truncation."""
        prec = self.prec
        for g in (gz, gzbar, gu):
            prec = join_prec(prec, g.prec)
        with precision_context(prec):
            d, n = compose_raw(
                self.coeffs,
                self.trunc,
                [(gz.coeffs, gz.trunc), (gzbar.coeffs, gzbar.trunc), (gu.coeffs, gu.trunc)],
                cap,
            )
        return Series3._raw(d, max(n, 0), prec)

    # -- comparison
    def __eq__(self, other):
        if not isinstance(other, Series3):
            return NotImplemented
        return self.prec == other.prec and self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.trunc, self.prec, frozenset(self.coeffs.items())))

    def agrees(self, other, upto=None, tol=None):
        """True when coefficients agree up to weight ``upto`` (default: min trunc).

        ``tol`` is a relative tolerance for float data, scaled by the largest
        coefficient magnitude of either series.
        """
        n = min(self.trunc, other.trunc) if upto is None else upto
        keys = {k for k in self.coeffs if weight(k) <= n} | {k for k in other.coeffs if weight(k) <= n}
        if tol is None:
            return all(self.get_pair(k) == other.get_pair(k) for k in keys)
        return self.max_diff(other, n) <= tol * max(1, self.max_abs(n), other.max_abs(n))

    def max_abs(self, upto=None):
        n = self.trunc if upto is None else upto
        with precision_context(self.prec or 64):
            return max((abs(complex(*map(float, v))) if self.prec is None else float(abs(Scalar.from_pair(v, self.prec)))
                        for k, v in self.coeffs.items() if weight(k) <= n), default=0.0)

    def max_diff(self, other, upto=None):
        prec = self.prec if self.prec is not None else other.prec
        a = self.to_mode(prec) if self.prec is None else self
        b = other.to_mode(prec) if other.prec is None else other
        join_prec(a.prec, b.prec)
        n = min(a.trunc, b.trunc) if upto is None else upto
        keys = {k for k in a.coeffs if weight(k) <= n} | {k for k in b.coeffs if weight(k) <= n}
        worst = 0
        with precision_context(prec):
            for k in keys:
                d = Scalar.from_pair(a.get_pair(k), prec) - Scalar.from_pair(b.get_pair(k), prec)
                worst = max(worst, abs(d))
        return float(worst)

    def __repr__(self):
        terms = " + ".join(f"({c})*{_mono(i)}" for i, c in list(self.items())[:8])
        more = " + ..." if len(self) > 8 else ""
        return f"Series3[{self.trunc}]({terms or '0'}{more})"

    # -- text format
    def dumps(self):
        lines = [f"order {self.trunc}"]
        for (j, k, l) in self:
            re_, im_ = self.coeffs[(j, k, l)]
            lines.append(f"coeff {j} {k} {l} {fmt_real(re_, self.prec)} {fmt_real(im_, self.prec)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text, prec=None):
        trunc = None
        coeffs = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = _LINE.split(line)
            try:
                if parts[0] == "order" and len(parts) == 2:
                    trunc = int(parts[1])
                elif parts[0] == "coeff" and len(parts) == 6:
                    idx = tuple(int(p) for p in parts[1:4])
                    if idx in coeffs:
                        raise ValueError(f"duplicate coefficient {idx}")
                    coeffs[idx] = (real(parts[4], prec), real(parts[5], prec))
                else:
                    raise ValueError(f"unrecognized line: {line!r}")
            except (ValueError, ZeroDivisionError) as exc:
                raise SeriesParseError(f"line {lineno}: {exc}") from None
        if trunc is None:
            raise SeriesParseError("missing 'order' line")
        for idx in coeffs:
            if min(idx) < 0 or weight(idx) > trunc:
                raise SeriesParseError(f"index {idx} exceeds order {trunc}")
        return cls(coeffs, trunc, prec)


class SeriesParseError(ValueError):
    pass


def _mono(idx):
    names = ("z", "zb", "u")
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, idx) if e]
    return "*".join(parts) or "1"


# ---------------------------------------------------------------- HoloSeries2


class HoloSeries2:
    """Holomorphic series in (z, w); ``trunc=None`` marks an exact polynomial.

    Internally a monomial z^a w^b is keyed like the Series3 index (a, 0, b),
    which has the same weight a + 2b.
    """

    __slots__ = ("coeffs", "trunc", "prec")

    def __init__(self, coeffs=None, trunc=None, prec=None):
        d = {}
        with precision_context(prec):
            for (a, b), c in (coeffs or {}).items():
                if a < 0 or b < 0:
                    raise ValueError("negative exponent")
                if trunc is not None and a + 2 * b > trunc:
                    continue
                p = pair(c, prec)
                if p[0] or p[1]:
                    d[(int(a), 0, int(b))] = p
        object.__setattr__(self, "coeffs", d)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("HoloSeries2 is immutable")

    @classmethod
    def _raw(cls, d, trunc, prec):
        s = object.__new__(cls)
        object.__setattr__(s, "coeffs", d)
        object.__setattr__(s, "trunc", trunc)
        object.__setattr__(s, "prec", prec)
        return s

    @classmethod
    def var(cls, name, prec=None):
        return cls({(1, 0) if name == "z" else (0, 1): 1}, None, prec)

    def __getitem__(self, ab):
        p = self.coeffs.get((ab[0], 0, ab[1]))
        return Scalar(0, 0, self.prec) if p is None else Scalar.from_pair(p, self.prec)

    def items(self):
        for idx in sorted(self.coeffs, key=graded_key):
            yield (idx[0], idx[2]), Scalar.from_pair(self.coeffs[idx], self.prec)

    def min_weight(self):
        return _min_weight(self.coeffs)

    def to_mode(self, prec):
        if prec == self.prec:
            return self
        if prec is None:
            raise ModeMismatch("refusing to convert float data to exact mode")
        with precision_context(prec):
            d = {k: (real(v[0], prec), real(v[1], prec)) for k, v in self.coeffs.items()}
        return HoloSeries2._raw(d, self.trunc, prec)

    def truncate(self, n):
        n = n if self.trunc is None else min(n, self.trunc)
        return HoloSeries2._raw(_restrict(self.coeffs, n), n, self.prec)

    def __add__(self, other):
        prec = join_prec(self.prec, other.prec)
        ts = [t for t in (self.trunc, other.trunc) if t is not None]
        n = min(ts) if ts else None
        with precision_context(prec):
            out = {}
            _add_into(out, self.coeffs, math.inf if n is None else n)
            _add_into(out, other.coeffs, math.inf if n is None else n)
            return HoloSeries2._raw(_freeze(out), n, prec)

    def __neg__(self):
        with precision_context(self.prec):
            return HoloSeries2._raw({k: cneg(v) for k, v in self.coeffs.items()}, self.trunc, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        with precision_context(self.prec):
            c = pair(c, self.prec)
            return HoloSeries2._raw(_prune({k: cmul(c, v) for k, v in self.coeffs.items()}), self.trunc, self.prec)

    def __mul__(self, other):
        if not isinstance(other, HoloSeries2):
            return self.scale(other)
        prec = join_prec(self.prec, other.prec)
        ts = [t for t in (self.trunc, other.trunc) if t is not None]
        if not ts:
            cap = max(self.degree(), 0) + max(other.degree(), 0)
            n = None
        else:
            cap = n = min(ts)
        with precision_context(prec):
            return HoloSeries2._raw(_mul_raw(self.coeffs, other.coeffs, cap), n, prec)

    def degree(self):
        return max((weight(k) for k in self.coeffs), default=-1)

    def compose(self, F, Phi, cap=None):
        """self(F(z,w), Phi(z,w)) as a HoloSeries2."""
        prec = join_prec(join_prec(self.prec, F.prec), Phi.prec)
        with precision_context(prec):
            d, n = compose_raw(self.coeffs, self.trunc, [(F.coeffs, F.trunc), ({}, None), (Phi.coeffs, Phi.trunc)], cap)
        return HoloSeries2._raw(d, n, prec)

    def on_surface(self, z, w, cap=None):
        """Evaluate at Series3 arguments z, w (e.g. w = u + i f)."""
        prec = join_prec(join_prec(self.prec, z.prec), w.prec)
        with precision_context(prec):
            d, n = compose_raw(self.coeffs, self.trunc, [(z.coeffs, z.trunc), ({}, None), (w.coeffs, w.trunc)], cap)
        return Series3._raw(d, max(n, 0), prec)

    def __eq__(self, other):
        if not isinstance(other, HoloSeries2):
            return NotImplemented
        return (self.prec, self.trunc, self.coeffs) == (other.prec, other.trunc, other.coeffs)

    def __hash__(self):
        return hash((self.trunc, self.prec, frozenset(self.coeffs.items())))

    def __repr__(self):
        terms = " + ".join(f"({c})*z^{a}w^{b}" for (a, b), c in list(self.items())[:6])
        return f"HoloSeries2[{self.trunc}]({terms or '0'})"


# ---------------------------------------------------------------- inversion


class SingularLinearPart(ArithmeticError):
    pass


def _solve_complex(mat, rhs_cols):
    """Invert a small complex matrix of raw pairs by Gauss-Jordan elimination."""
    n = len(mat)
    a = [list(row) + [r[i] for r in rhs_cols] for i, row in enumerate(mat)]
    for c in range(n):
        piv = None
        best = None
        for r in range(c, n):
            v = a[r][c]
            if v[0] or v[1]:
                size = abs(complex(float(v[0]), float(v[1])))
                if best is None or size > best:
                    piv, best = r, size
        if piv is None:
            raise SingularLinearPart("linear part of the map is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = cinv(a[c][c])
        a[c] = [cmul(inv, x) for x in a[c]]
        for r in range(n):
            if r != c and (a[r][c][0] or a[r][c][1]):
                f = a[r][c]
                a[r] = [(x[0] - (f[0] * y[0] - f[1] * y[1]), x[1] - (f[0] * y[1] + f[1] * y[0])) for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


_UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def invert_map(m):
    """Formal inverse of the map (z, zbar, u) -> (m[0], m[1], m[2]).

    Returns a triple ``n`` with m(n(X)) = X to the honest truncation order.
    """
    prec = m[0].prec
    for s in m:
        prec = join_prec(prec, s.prec)
    with precision_context(prec):
        return _invert(m, prec)


def _lin(d, idx):
    return d.get(idx, None)


def _invert(m, prec):
    zero = real(0, prec)
    one = real(1, prec)
    for s in m:
        if (0, 0, 0) in s.coeffs:
            raise ValueError("map must fix the origin")
    t_cap = min(s.trunc for s in m)
    graded = not any(idx in m[2].coeffs for idx in ((1, 0, 0), (0, 1, 0)))
    if graded:
        return _invert_graded(m, prec, t_cap)
    # general case: plain linear part, one plain degree gained per sweep
    lin = [[m[i].coeffs.get(e, (zero, zero)) for e in _UNIT] for i in range(3)]
    ident = [[(one, zero) if i == j else (zero, zero) for i in range(3)] for j in range(3)]
    inv = _solve_complex(lin, ident)  # rows: inverse matrix
    nonlin = [{k: v for k, v in s.coeffs.items() if plain_degree(k) >= 2} for s in m]
    linv_u_has_z = any(inv[2][j][0] or inv[2][j][1] for j in (0, 1))
    r = 0.5 if linv_u_has_z else 1.0
    target = min(t_cap, math.ceil(r * (t_cap + 1)) - 1)
    X = [{e: (one, zero)} for e in _UNIT]

    def apply_inv(ys, cap):
        out = []
        for i in range(3):
            acc = {}
            for j in range(3):
                if inv[i][j][0] or inv[i][j][1]:
                    _axpy(acc, inv[i][j], ys[j], cap)
            out.append(_freeze(acc))
        return out

    n = apply_inv(X, target)
    ntr = [target] * 3
    tau = 1
    while tau < target:
        tau += 1
        ys = []
        for i in range(3):
            comp, ct = compose_raw(nonlin[i], m[i].trunc, list(zip(n, ntr)), min(tau, target))
            acc = {k: [v[0], v[1]] for k, v in X[i].items()}
            _axpy(acc, (-one, zero), comp, ct)
            ys.append(_freeze(acc))
        n = apply_inv(ys, min(tau, target))
        ntr = [min(tau, target)] * 3
    return tuple(Series3._raw(d, target, prec) for d in n)


def _invert_graded(m, prec, t_cap):
    zero = real(0, prec)
    one = real(1, prec)
    # weight-preserving part: z-slots linear in (z, zbar); u-slot c*u + q(z, zbar)
    a = [[m[i].coeffs.get(e, (zero, zero)) for e in _UNIT[:2]] for i in range(2)]
    ident = [[(one, zero), (zero, zero)], [(zero, zero), (one, zero)]]
    ainv = _solve_complex(a, ident)
    c = m[2].coeffs.get((0, 0, 1), (zero, zero))
    if not (c[0] or c[1]):
        raise SingularLinearPart("u-component has no u term")
    cinv_ = cinv(c)
    q = {k: v for k, v in m[2].coeffs.items() if k[2] == 0 and weight(k) == 2}
    rest = []
    for i, s in enumerate(m):
        slot_w = WEIGHTS[i]
        if i < 2:
            rest.append({k: v for k, v in s.coeffs.items() if weight(k) > 1})
        else:
            rest.append({k: v for k, v in s.coeffs.items() if weight(k) > 2})
    gains = []
    for i in range(3):
        if rest[i]:
            gains.append(_min_weight(rest[i]) - WEIGHTS[i])
    s_gain = max(1, min(gains)) if gains else math.inf

    def apply_l0inv(ys, caps):
        zc = []
        for i in range(2):
            acc = {}
            for j in range(2):
                if ainv[i][j][0] or ainv[i][j][1]:
                    _axpy(acc, ainv[i][j], ys[j], caps[i])
            zc.append(_freeze(acc))
        acc = {k: [v[0], v[1]] for k, v in ys[2].items() if weight(k) <= caps[2]}
        if q:
            qv, _ = compose_raw(q, None, [(zc[0], caps[0]), (zc[1], caps[1]), ({}, None)], caps[2])
            _axpy(acc, (-one, zero), qv, caps[2])
        uc = {k: cmul(cinv_, (v[0], v[1])) for k, v in acc.items()}
        return [zc[0], zc[1], _prune(uc)]

    X = [{e: (one, zero)} for e in _UNIT]
    if s_gain == math.inf:
        n = apply_l0inv(X, [t_cap] * 3)
        return tuple(Series3._raw(d, t_cap, prec) for d in n)
    rho = min(s_gain, t_cap)
    caps = [rho, rho, min(rho + 1, t_cap)]
    n = apply_l0inv(X, caps)
    while rho < t_cap:
        rho = min(rho + s_gain, t_cap)
        caps_new = [rho, rho, min(rho + 1, t_cap)]
        ys = []
        for i in range(3):
            if rest[i]:
                comp, _ = compose_raw(rest[i], m[i].trunc, list(zip(n, caps)), caps_new[i])
            else:
                comp = {}
            acc = {k: [v[0], v[1]] for k, v in X[i].items()}
            _axpy(acc, (-one, zero), comp, caps_new[i])
            ys.append(_freeze(acc))
        n = apply_l0inv(ys, caps_new)
        caps = caps_new
    return tuple(Series3._raw(_restrict(d, t_cap), t_cap, prec) for d in n)
