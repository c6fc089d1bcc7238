"""Reference computations written independently of the package internals.

Polynomials here are dicts from exponent triples (z, zbar, u) to complex
rationals stored as ``(Fraction, Fraction)``, truncated by weight
z, zbar -> 1 and u -> 2.  Nothing in this module calls ``compose_raw`` or
``invert_map``.
"""

from __future__ import annotations

import random
from fractions import Fraction

import gmpy2

from cmnf.hypersurface import Biholomorphism, Hypersurface
from cmnf.series import HoloSeries2, Series3

W = (1, 1, 2)


def wt(idx):
    return sum(a * b for a, b in zip(idx, W))


def cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def cinv(a):
    n = a[0] * a[0] + a[1] * a[1]
    return (a[0] / n, -a[1] / n)


def padd(p, q):
    out = dict(p)
    for k, v in q.items():
        s = cadd(out.get(k, (Fraction(0), Fraction(0))), v)
        if s[0] or s[1]:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def pscale(p, c):
    return {k: cmul(v, c) for k, v in p.items() if cmul(v, c) != (0, 0)}


def pmul(p, q, cap):
    out = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
            if wt(k) > cap:
                continue
            out[k] = cadd(out.get(k, (Fraction(0), Fraction(0))), cmul(v1, v2))
    return {k: v for k, v in out.items() if v[0] or v[1]}


def pcompose(f, gs, cap):
    """f(g0, g1, g2) truncated at weight ``cap``; slow and obvious."""
    pows = [[{(0, 0, 0): (Fraction(1), Fraction(0))}] for _ in gs]
    out = {}
    for key, v in f.items():
        term = {(0, 0, 0): v}
        for i, (g, e) in enumerate(zip(gs, key)):
            while len(pows[i]) <= e:
                pows[i].append(pmul(pows[i][-1], g, cap))
            term = pmul(term, pows[i][e], cap)
        out = padd(out, term)
    return out


def ptrunc(p, n):
    return {k: v for k, v in p.items() if wt(k) <= n}


def solve2(mat, rhs):
    (a, b), (c, d) = mat
    det = cadd(cmul(a, d), cmul((-b[0], -b[1]), c))
    di = cinv(det)
    x = cmul(cadd(cmul(d, rhs[0]), cmul((-b[0], -b[1]), rhs[1])), di)
    y = cmul(cadd(cmul(a, rhs[1]), cmul((-c[0], -c[1]), rhs[0])), di)
    return x, y


def invert_oracle(m, n):
    """Inverse of a weight-graded map by solving for coefficients weight by weight.

    m[0], m[1] = A (z, zbar) + higher, m[2] = c u + q(z, zbar) + higher.
    Sweep s fixes weight s of the inverse:
    inv_z = A^-1 (X - higher(inv)), inv_u = (u - q(inv_z) - higher(inv)) / c.
    """
    zero = (Fraction(0), Fraction(0))
    lin_keys = ((1, 0, 0), (0, 1, 0))
    A = [[m[i].get(e, zero) for e in lin_keys] for i in range(2)]
    c = m[2].get((0, 0, 1), zero)
    q = {k: v for k, v in m[2].items() if wt(k) == 2 and k[2] == 0}
    high = [{k: v for k, v in m[i].items() if wt(k) > (1 if i < 2 else 2)} for i in range(3)]
    high[2] = {k: v for k, v in m[2].items() if k != (0, 0, 1) and k not in q}
    X = [{(1, 0, 0): (Fraction(1), Fraction(0))}, {(0, 1, 0): (Fraction(1), Fraction(0))},
         {(0, 0, 1): (Fraction(1), Fraction(0))}]
    inv = [{}, {}, {}]
    neg = (Fraction(-1), Fraction(0))
    # a u term in the z slots couples the slots at equal weight; two passes settle it
    for sweep in (s for s in range(1, n + 1) for _ in (0, 1)):
        # inv is exact below this weight, so only this weight changes
        r = [padd(X[i], pscale(pcompose(high[i], inv, sweep), neg)) for i in range(2)]
        keys = set(r[0]) | set(r[1])
        z0, z1 = {}, {}
        for k in keys:
            x, y = solve2(A, [r[0].get(k, zero), r[1].get(k, zero)])
            if x != zero:
                z0[k] = x
            if y != zero:
                z1[k] = y
        ru = padd(X[2], pscale(pcompose(q, [z0, z1, {}], sweep), neg))
        ru = padd(ru, pscale(pcompose(high[2], inv, sweep), neg))
        inv = [z0, z1, pscale(ru, cinv(c))]
    return [ptrunc(p, n) for p in inv]


# ----------------------------------------------------------------- random maps


def rq(rng, num=3, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rc(rng):
    return (rq(rng), rq(rng))


def random_graded_map(rng, n=8, density=0.35):
    """Random weight-graded map (z, zbar, u) -> (Z, Zbar-like, U), exact.

    z slots: invertible 2x2 linear block plus higher terms; u slot:
    c*u + quadratic in (z, zbar) + higher terms.  The slots are not
    required to be conjugate, so this exercises the general inverse.
    """
    zero = (Fraction(0), Fraction(0))
    while True:
        blk = [[rc(rng) for _ in range(2)] for _ in range(2)]
        det = cadd(cmul(blk[0][0], blk[1][1]), cmul((-blk[0][1][0], -blk[0][1][1]), blk[1][0]))
        if det != zero:
            break
    c = zero
    while c == zero:
        c = rc(rng)
    m = [{(1, 0, 0): blk[0][0], (0, 1, 0): blk[0][1]},
         {(1, 0, 0): blk[1][0], (0, 1, 0): blk[1][1]},
         {(0, 0, 1): c}]
    for key in ((2, 0, 0), (1, 1, 0), (0, 2, 0)):
        if rng.random() < 0.7:
            m[2][key] = rc(rng)
    idxs = [(j, k, l) for j in range(n + 1) for k in range(n + 1) for l in range(n // 2 + 1)
            if 2 <= wt((j, k, l)) <= n]
    for i in range(3):
        floor = 2 if i < 2 else 3
        for key in idxs:
            if wt(key) >= floor and rng.random() < density / (1 + wt(key) - floor):
                v = rc(rng)
                if v != zero:
                    m[i][key] = v
    return [{k: v for k, v in p.items() if v != zero} for p in m]


def to_series(p, n):
    return Series3(p, n)


def from_series(s):
    out = {}
    for k, v in s.coeffs.items():
        out[k] = (Fraction(int(v[0].numerator), int(v[0].denominator)),
                  Fraction(int(v[1].numerator), int(v[1].denominator)))
    return out


def random_biholomorphism(rng, extra=((2, 0), (1, 1), (0, 2))):
    """Exact polynomial map Z = lam z + b w + ..., W = rho w + ... with rho > 0.

    The linear part keeps the tangent plane v = 0, so images of graph
    germs stay graphs without linear terms and keep their order.
    """
    lam = (Fraction(0), Fraction(0))
    while lam == (0, 0):
        lam = rc(rng)
    F = {(1, 0): lam, (0, 1): rc(rng)}
    P = {(0, 1): Fraction(rng.randint(1, 3), rng.randint(1, 2))}
    for ab in extra:
        F[ab] = rc(rng)
        P[ab] = rc(rng)
    return Biholomorphism(HoloSeries2(F, None), HoloSeries2(P, None))


def random_nonumbilic(seed, trunc=10):
    """z zbar + z^4 zbar^2 + z^2 zbar^4 plus seeded real terms of weight 7..10, u terms included."""
    rng = seeded(seed)
    d = {(1, 1, 0): 1, (4, 2, 0): 1, (2, 4, 0): 1}
    for idx in ((5, 2, 0), (4, 3, 0), (5, 3, 0), (4, 2, 1), (6, 2, 0), (4, 4, 0), (5, 2, 1), (3, 3, 2)):
        a, b = rq(rng), rq(rng)
        j, k, l = idx
        if j == k:
            b = 0
        d[idx] = (a, b)
        d[(k, j, l)] = (a, -b)
    return Hypersurface(Series3(d, trunc))


def seeded(seed):
    return random.Random(seed)


# ------------------------------------------------------------- evaluation


def eval_series(s, z, u, prec):
    """Sum of coefficients times z^j conj(z)^k u^l at 256-bit style precision."""
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        zb = gmpy2.mpc(z.real, -z.imag)
        acc = gmpy2.mpc(0)
        for (j, k, l), v in s.coeffs.items():
            c = gmpy2.mpc(gmpy2.mpfr(v[0]), gmpy2.mpfr(v[1]))
            acc += c * z ** j * zb ** k * u ** l
        return acc


def eval_holo(h, z, w, prec):
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        acc = gmpy2.mpc(0)
        for (a, _, b), v in h.coeffs.items():
            c = gmpy2.mpc(gmpy2.mpfr(v[0]), gmpy2.mpfr(v[1]))
            acc += c * z ** a * w ** b
        return acc
