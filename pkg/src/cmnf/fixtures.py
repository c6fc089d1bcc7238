"""Germ generators for the standard test surfaces.

Every generator returns a ``Hypersurface`` based at the origin.  Tube and
projective surfaces are recentred at a chosen base point; tubes keep their
raw graph (linear terms included), projective surfaces are first moved by
an affine complex map that makes the tangent plane ``v = 0``.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

from .hypersurface import Hypersurface
from .scalar import Scalar, pair, precision_context, real
from .series import Series3

DEFAULT_TRUNC = 12


def _q(x):
    return Fraction(x) if not isinstance(x, Fraction) else x


def heisenberg(trunc=DEFAULT_TRUNC, prec=None):
    return Hypersurface.heisenberg(trunc, prec)


def sphere(trunc=DEFAULT_TRUNC, prec=None):
    """v = 1 - sqrt(1 - z zbar - u^2): the unit sphere through the origin."""
    s = Series3({(1, 1, 0): 1, (0, 0, 2): 1}, trunc, prec)
    out = Series3.zero(trunc, prec)
    p = Series3.constant(1, trunc, prec)
    coef = Fraction(1)  # binom(1/2, n) (-1)^n, accumulated
    for n in range(1, trunc // 2 + 1):
        coef *= (Fraction(1, 2) - (n - 1)) / n
        p = p * s
        out = out + p.scale(-coef * (-1) ** n)
    return Hypersurface(out)


def std_nonumbilic(trunc=DEFAULT_TRUNC, c=None, prec=None):
    """v = z zbar + z^4 zbar^2 + z^2 zbar^4, optionally + c z^5 zbar^2 + conj."""
    d = {(1, 1, 0): 1, (4, 2, 0): 1, (2, 4, 0): 1}
    if c is not None:
        cp = pair(c, None) if not isinstance(c, Scalar) else c.pair
        d[(5, 2, 0)] = cp
        d[(2, 5, 0)] = (cp[0], -cp[1])
    return Hypersurface(Series3(d, trunc).to_mode(prec))


def generic_su(trunc=DEFAULT_TRUNC, prec=None):
    return Hypersurface(Series3({(1, 1, 0): 1, (5, 2, 0): 1, (2, 5, 0): 1}, trunc, prec))


def circ44(trunc=DEFAULT_TRUNC, prec=None):
    """v = z zbar + (z zbar)^4 / (4!)^2, so that V at z^4 zbar^4 is 1."""
    return Hypersurface(Series3({(1, 1, 0): 1, (4, 4, 0): Fraction(1, 576)}, trunc, prec))


# ------------------------------------------------------------------- tubes


def _tube_germ(coeffs, trunc, prec):
    """v = sum_{n>=1} coeffs[n-1] y^n with y = (z - zbar)/(2i)."""
    with precision_context(prec):
        half = real(Fraction(1, 2), prec)
        zero = real(0, prec)
        Y = Series3({(1, 0, 0): (zero, -half), (0, 1, 0): (zero, half)}, trunc, prec)
        out = Series3.zero(trunc, prec)
        for c in reversed(coeffs[:trunc]):
            out = (out + Series3.constant((c, zero), trunc, prec)) * Y
        return Hypersurface(out)


def tube_t1(lam=4, y0=1, trunc=DEFAULT_TRUNC, prec=None):
    """v = y^lam based at y = y0 (exact when lam is an integer and y0 rational)."""
    lam, y0 = _q(lam), _q(y0)
    exact = prec is None
    if exact and lam.denominator != 1:
        raise ValueError("non-integer exponent needs float mode")
    coeffs = []
    binom = Fraction(1)
    for n in range(1, trunc + 1):
        binom = binom * (lam - (n - 1)) / n
        if exact:
            coeffs.append(mpq(binom * y0 ** int(lam - n)))
        else:
            with precision_context(prec):
                coeffs.append(mpfr(mpq(binom)) * mpfr(mpq(y0)) ** mpfr(mpq(lam - n)))
    return _tube_germ(coeffs, trunc, prec)


def tube_t2(y0=1, trunc=DEFAULT_TRUNC, prec=None):
    """v = y log y based at y = y0 (exact at y0 = 1)."""
    y0 = _q(y0)
    coeffs = []
    if prec is None:
        if y0 != 1:
            raise ValueError("tube_t2 is rational only at y0 = 1")
        # (1 + Y) log(1 + Y) = Y + sum_{n>=2} (-1)^n Y^n / (n (n - 1))
        coeffs.append(mpq(1))
        for n in range(2, trunc + 1):
            coeffs.append(mpq((-1) ** n, n * (n - 1)))
        return _tube_germ(coeffs, trunc, prec)
    with precision_context(prec):
        y = mpfr(mpq(y0))
        # Y log y0 + (y0 + Y) log(1 + Y/y0)
        coeffs.append(gmpy2.log(y) + 1)
        for n in range(2, trunc + 1):
            coeffs.append(mpfr((-1) ** n) / (n * (n - 1)) / y ** (n - 1))
    return _tube_germ(coeffs, trunc, prec)


def _reverse(ys, n):
    """Coefficients b_1.. of psi(Y) with Y = sum ys[k-1] psi^k."""
    b = [ys[0] * 0] * n
    b[0] = 1 / ys[0]
    for _ in range(n):
        # psi = (Y - sum_{k>=2} ys_k psi^k) / ys_1
        powers = _powers(b, n)
        new = [ys[0] * 0] * n
        new[0] = 1 / ys[0]
        for k in range(2, n + 1):
            for i, c in enumerate(powers[k]):
                new[i] -= ys[k - 1] * c / ys[0]
        b = new
    return b


def _powers(b, n):
    """powers[k][i] = coefficient of Y^(i+1) in psi(Y)^k (k <= n)."""
    zero = b[0] * 0
    out = [None, list(b)]
    for k in range(2, n + 1):
        prev = out[-1]
        cur = [zero] * n
        for i, p in enumerate(prev):
            if not p:
                continue
            for j, q in enumerate(b):
                if i + j + 1 < n:
                    cur[i + j + 1] += p * q
        out.append(cur)
    return out


def tube_t3(a=1, phi0=0, trunc=DEFAULT_TRUNC, prec=None):
    """r = e^(a phi) with y + iv = r e^(i phi), based at angle phi0.

    y + iv = exp((a + i) phi); the graph v(y) is read off from the series in
    psi = phi - phi0 by reversion.  Exact when a is rational and phi0 = 0.
    """
    a = _q(a)
    n = trunc
    if prec is None:
        if phi0 != 0:
            raise ValueError("tube_t3 is rational only at phi0 = 0")
        C = (mpq(1), mpq(0))
        ai = (mpq(a), mpq(1))
        fact = mpq(1)
    else:
        with precision_context(prec):
            p = mpfr(mpq(_q(phi0)))
            e = gmpy2.exp(mpfr(mpq(a)) * p)
            C = (e * gmpy2.cos(p), e * gmpy2.sin(p))
            ai = (mpfr(mpq(a)), mpfr(1))
            fact = mpfr(1)
    with precision_context(prec):
        ys, vs = [], []
        term = C
        for k in range(1, n + 1):
            term = (term[0] * ai[0] - term[1] * ai[1], term[0] * ai[1] + term[1] * ai[0])
            fact = fact * k
            ys.append(term[0] / fact)
            vs.append(term[1] / fact)
        if not ys[0]:
            raise ValueError("the surface is not a graph over y at this point")
        b = _reverse(ys, n)
        powers = _powers(b, n)
        coeffs = [sum((vs[k - 1] * powers[k][i] for k in range(1, n + 1)), ys[0] * 0) for i in range(n)]
    return _tube_germ(coeffs, trunc, prec)


# -------------------------------------------------------------- projective


def _proj_rho(kind, a):
    s = {"p1": (1, 1, 1), "p2": (1, 1, -1), "p3": (-1, 1, 1)}[kind]

    def rho(Z, Zb, W, Wb, one):
        c0, cz, cw = s
        lhs = one.scale(c0) + (Z * Zb).scale(cz) + (W * Wb).scale(cw)
        q = one.scale(c0) + (Z * Z).scale(cz) + (W * W).scale(cw)
        qb = one.scale(c0) + (Zb * Zb).scale(cz) + (Wb * Wb).scale(cw)
        return lhs * lhs - (q * qb).scale(a * a)

    return rho, s


PROJ_DEFAULTS = {
    "p1": (2, ((1, 1), (0, 1))),
    "p2": (2, ((Fraction(-1, 2), 1), (Fraction(1, 2), 0))),
    "p3": (Fraction(1, 2), ((Fraction(-1, 2), 0), (0, Fraction(3, 2)))),
}


def projective(kind="p1", a=None, point=None, trunc=DEFAULT_TRUNC, prec=None):
    """Germ of a projective surface at ``point = ((Re z, Im z), (Re w, Im w))``.

    The surface rho = 0 is moved by z' = z - z0, w' = 2i (rho_z (z - z0) +
    rho_w (w - w0)), which makes its tangent plane v' = 0, and the graph is
    extracted by fixed-point iteration on v'.
    """
    da, dp = PROJ_DEFAULTS[kind]
    a = _q(da if a is None else a)
    point = dp if point is None else point
    rho, sig = _proj_rho(kind, a)
    T = trunc
    with precision_context(prec):
        c0, cz, cw = sig
        lhs_sign = a
        z0 = Scalar.from_pair(pair(tuple(point[0]), prec), prec)
        w0 = Scalar.from_pair(pair(tuple(point[1]), prec), prec)
        one = Series3.constant(1, T, prec)
        zs = Series3.var("z", T, prec)
        zbs = Series3.var("zbar", T, prec)
        Z0, Zb0 = one.scale(z0), one.scale(z0.conj())
        W0, Wb0 = one.scale(w0), one.scale(w0.conj())
        base = rho(Z0, Zb0, W0, Wb0, one)
        if base.coeffs:
            raise ValueError("base point is not on the surface")
        lhs = c0 + cz * z0.abs2().re + cw * w0.abs2().re
        if lhs * lhs_sign < 0:
            raise ValueError("base point lies on the companion sheet of the surface")
        rz = rho(Z0 + zs, Zb0 + zbs, W0, Wb0, one)[(1, 0, 0)]
        rw = rho(Z0, Zb0, W0 + zs, Wb0 + zbs, one)[(1, 0, 0)]
        if not rw:
            raise ValueError("surface is not a graph in the chosen chart at this point")
        i2inv = Scalar(0, Fraction(-1, 2), prec)  # 1/(2i)
        u = Series3.var("u", T, prec)
        v = Series3.zero(T, prec)
        for _ in range(T + 2):
            w = u + v.scale(Scalar(0, 1, prec))
            h2 = (w.scale(i2inv) - zs.scale(rz)).scale(1 / rw)
            G = rho(Z0 + zs, Zb0 + zbs, W0 + h2, Wb0 + h2.conj_real(), one)
            new = v - G
            if prec is None and new == v:
                break
            v = new if prec is None else new.real_part()
        return Hypersurface(v)


def proj_p1(a=2, point=None, trunc=DEFAULT_TRUNC, prec=None):
    return projective("p1", a, point, trunc, prec)


def proj_p2(a=2, point=None, trunc=DEFAULT_TRUNC, prec=None):
    return projective("p2", a, point, trunc, prec)


def proj_p3(a=Fraction(1, 2), point=None, trunc=DEFAULT_TRUNC, prec=None):
    return projective("p3", a, point, trunc, prec)


P1_POINTS = (((1, 1), (0, 1)), ((0, 1), (1, 1)), ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(-1, 2))))
