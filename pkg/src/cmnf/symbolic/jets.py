"""Jet symbols, the determining-equation rewrite system and prolongation.

Symbols
-------
``('v', j, k, l)``            jet v_J of the graph, J = z^j zbar^k u^l
``('z',) ('zb',) ('u',)``     base variables
``('F', c, a, b, p, q)``      vector field jet c_{z^a zbar^b u^p v^q},
                              c in xi | xib | eta | phi

The infinitesimal generator is xi d_z + xib d_zbar + eta d_u + phi d_v with
xi holomorphic in (z, w = u + iv) and eta + i phi holomorphic as well.
"""

from __future__ import annotations

from functools import lru_cache

from .algebra import GQ, I, Poly, mono_mul

DIRS = ("z", "zb", "u")
_DIR_INDEX = {"z": 0, "zb": 1, "u": 2}


def vjet(j, k, l):
    return ("v", j, k, l)


def field(comp, a=0, b=0, p=0, q=0):
    return ("F", comp, a, b, p, q)


def shift(idx, d):
    out = list(idx)
    out[_DIR_INDEX[d]] += 1
    return tuple(out)


# -------------------------------------------------------------- rewriting
# Each rule maps a field jet to None (not applicable) or (factor, jet), with
# jet None meaning the symbol vanishes.


def _r_xi_zb(s):
    if s[1] == "xi" and s[3]:
        return GQ(0), None


def _r_xi_v(s):
    c, a, b, p, q = s[1:]
    if c == "xi" and q:
        return I, field(c, a, b, p + 1, q - 1)


def _r_xib_z(s):
    if s[1] == "xib" and s[2]:
        return GQ(0), None


def _r_xib_v(s):
    c, a, b, p, q = s[1:]
    if c == "xib" and q:
        return -I, field(c, a, b, p + 1, q - 1)


def _r_phi_z(s):
    c, a, b, p, q = s[1:]
    if c == "phi" and a:
        return -I, field("eta", a, b, p, q)


def _r_phi_zb(s):
    c, a, b, p, q = s[1:]
    if c == "phi" and b:
        return I, field("eta", a, b, p, q)


def _r_phi_u(s):
    c, a, b, p, q = s[1:]
    if c == "phi" and p:
        return GQ(-1), field("eta", a, b, p - 1, q + 1)


def _r_phi_v(s):
    c, a, b, p, q = s[1:]
    if c == "phi" and q:
        return GQ(1), field("eta", a, b, p + 1, q - 1)


def _r_eta_mixed(s):
    if s[1] == "eta" and s[2] and s[3]:
        return GQ(0), None


def _r_eta_zv(s):
    c, a, b, p, q = s[1:]
    if c == "eta" and a and q:
        return I, field(c, a, b, p + 1, q - 1)


def _r_eta_zbv(s):
    c, a, b, p, q = s[1:]
    if c == "eta" and b and q:
        return -I, field(c, a, b, p + 1, q - 1)


def _r_eta_vv(s):
    c, a, b, p, q = s[1:]
    if c == "eta" and q >= 2:
        return GQ(-1), field(c, a, b, p + 2, q - 2)


RULES = (
    _r_xi_zb, _r_xi_v, _r_xib_z, _r_xib_v,
    _r_phi_z, _r_phi_zb, _r_phi_u, _r_phi_v,
    _r_eta_mixed, _r_eta_zv, _r_eta_zbv, _r_eta_vv,
)


def is_reduced(s):
    return all(rule(s) is None for rule in RULES)


def _rewrite(s, rules):
    factor = GQ(1)
    while True:
        for rule in rules:
            hit = rule(s)
            if hit is not None:
                f, s = hit
                factor = factor * f
                if s is None:
                    return GQ(0), None
                break
        else:
            return factor, s


@lru_cache(maxsize=None)
def _reduce_cached(s):
    return _rewrite(s, RULES)


def reduce_field_jet(s, rng=None):
    """Canonical form of a field jet as a one-term ``Poly`` (or zero).

    With ``rng`` the rules are tried in a shuffled order at every step;
    the result must not depend on it.
    """
    if rng is None:
        f, t = _reduce_cached(s)
    else:
        f, t = GQ(1), s
        while True:
            order = list(RULES)
            rng.shuffle(order)
            hit = next((h for h in (r(t) for r in order) if h is not None), None)
            if hit is None:
                break
            g, t = hit
            f = f * g
            if t is None:
                break
    if t is None or not f:
        return Poly()
    return Poly.lin(t, f)


# -------------------------------------------------------- total derivative


def _d_value(vs, d):
    """D_d of a value symbol, as a Poly (no linear part)."""
    if vs[0] == "v":
        return Poly.var(("v",) + shift(vs[1:], d))
    if vs[0] == d:
        return Poly.const(1)
    if vs[0] in DIRS:
        return Poly()
    raise ValueError(f"cannot differentiate {vs!r}")


@lru_cache(maxsize=None)
def _d_field(s, d):
    comp, a, b, p, q = s[1:]
    idx = {"z": (a + 1, b, p), "zb": (a, b + 1, p), "u": (a, b, p + 1)}[d]
    direct = reduce_field_jet(field(comp, *idx, q))
    via_v = reduce_field_jet(field(comp, a, b, p, q + 1)) * Poly.var(("v",) + shift((0, 0, 0), d))
    return direct + via_v


def total_derivative(d, p):
    """D_d p for d in z | zb | u, acting on jets, base variables and field jets."""
    if d not in DIRS:
        raise ValueError(f"unknown direction {d!r}")
    acc = {}

    def add(poly, c, rest, s):
        for (m2, s2), c2 in poly.t.items():
            if s is not None and s2 is not None:
                raise ValueError("product of two linear symbols")
            k = (mono_mul(rest, m2), s if s2 is None else s2)
            w = acc.get(k)
            w = c * c2 if w is None else w + c * c2
            if w:
                acc[k] = w
            else:
                acc.pop(k, None)

    for (m, s), c in p.t.items():
        for i, (vs, e) in enumerate(m):
            dv = _d_value(vs, d)
            if not dv:
                continue
            rest = list(m)
            if e == 1:
                rest.pop(i)
            else:
                rest[i] = (vs, e - 1)
            add(dv, c * e, tuple(rest), s)
        if s is not None and s[0] == "F":
            add(_d_field(s, d), c, m, None)
    return Poly(acc)


# ------------------------------------------------------------ prolongation

XI, XIB, ETA, PHI = field("xi"), field("xib"), field("eta"), field("phi")


def _peel(J):
    j, k, l = J
    if l:
        return (j, k, l - 1), "u"
    if k:
        return (j, k - 1, l), "zb"
    return (j - 1, k, l), "z"


@lru_cache(maxsize=None)
def prolong(J):
    """phi^J by the recursive prolongation formula, fully reduced."""
    J = tuple(J)
    if J == (0, 0, 0):
        return Poly.lin(PHI)
    K, d = _peel(J)
    prev = prolong(K)
    out = total_derivative(d, prev)
    for comp, e in ((XI, "z"), (XIB, "zb"), (ETA, "u")):
        coef = Poly.var(("v",) + shift(K, e))
        out = out - coef * total_derivative(d, Poly.lin(comp))
    return out


def characteristic():
    """phi - v_z xi - v_zb xib - v_u eta."""
    q = Poly.lin(PHI)
    for comp, e in ((XI, "z"), (XIB, "zb"), (ETA, "u")):
        q = q - Poly.var(("v",) + shift((0, 0, 0), e)) * Poly.lin(comp)
    return q


def prolong_closed(J):
    """phi^J = D_J(characteristic) + v_{J,z} xi + v_{J,zb} xib + v_{J,u} eta."""
    p = characteristic()
    for d, n in zip(DIRS, J):
        for _ in range(n):
            p = total_derivative(d, p)
    for comp, e in ((XI, "z"), (XIB, "zb"), (ETA, "u")):
        p = p + Poly.var(("v",) + shift(tuple(J), e)) * Poly.lin(comp)
    return p


def random_field_jet(rng, max_order=8):
    comp = rng.choice(("xi", "xib", "eta", "phi"))
    n = rng.randint(0, max_order)
    cuts = sorted(rng.randint(0, n) for _ in range(3))
    a, b, p, q = cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], n - cuts[2]
    return field(comp, a, b, p, q)


__all__ = [
    "DIRS",
    "RULES",
    "characteristic",
    "field",
    "is_reduced",
    "prolong",
    "prolong_closed",
    "random_field_jet",
    "reduce_field_jet",
    "total_derivative",
    "vjet",
]
