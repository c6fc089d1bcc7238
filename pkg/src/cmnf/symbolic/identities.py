"""Built-in table of moving-frame identities and the checker behind ``verify``.

Each identity compares two symbolic quantities in a state of the
normalization schedule:

``full``   both sides reduced in the state and every varpi_J expanded
``mod``    both sides reduced, horizontal forms (w, varpi) dropped
``value``  value polynomials compared directly
``jets``   prolonged coefficients compared before any invariantization
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable

from .algebra import GQ, I, Poly
from .engine import (
    V,
    W,
    derive_commutators,
    derive_invariant_derivatives,
    format_poly,
    mu,
    mub,
    normalization_orders,
    nuU,
    nuUV,
    nuZ,
    nuZb,
    omega,
    psi,
    re_mu,
    im_mu,
    recurrence,
    run_schedule,
    structure_equations,
    varpi,
)
from .jets import field, prolong

FREE = {"partial": {("mu", 0, 1), ("mub", 0, 1), ("mu", 1, 0), ("mub", 1, 0), ("Rmu", 1, 1)}, "non_umbilic": set()}


@dataclass(frozen=True)
class Identity:
    name: str
    anchor: str
    branch: str  # 'jets' | 'partial' | 'non_umbilic'
    when: object  # snapshot key, or None for the final state
    mode: str  # 'full' | 'mod' | 'value' | 'jets'
    lhs: Callable
    rhs: Callable
    min_order: int = 0


@dataclass(frozen=True)
class IdentityResult:
    name: str
    anchor: str
    passed: bool
    difference: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        tail = f"  diff: {self.difference}" if not self.passed else ""
        return f"{self.name:<34} {self.anchor:<34} {status}{tail}"


def q(a, b=1):
    return GQ(a) / b


def _const(x):
    return Poly.const(x)


def _v(name, *idx):
    return Poly.var(("v",) + idx)


def J_():
    return V(5, 2, 0).scale(q(1, 240))


def Jb_():
    return V(2, 5, 0).scale(q(1, 240))


def K_():
    return W(4, 2, 1).scale(q(1, 48))


def L_():
    return V(4, 4, 0)


# ---------------------------------------------------------------- prolongation


def _jet_identities():
    vz, vzb, vu = _v("", 1, 0, 0), _v("", 0, 1, 0), _v("", 0, 0, 1)
    xi_u, xib_u, eta_v = Poly.lin(field("xi", 0, 0, 1)), Poly.lin(field("xib", 0, 0, 1)), Poly.lin(field("eta", 0, 0, 0, 1))
    xi_z = Poly.lin(field("xi", 1))
    eta_z, eta_u = Poly.lin(field("eta", 1)), Poly.lin(field("eta", 0, 0, 1))
    one = _const(1)
    # phi^u and phi^z, written out by hand
    phi_u = -(vz * (one + vu.scale(I)) * xi_u) - vzb * (one - vu.scale(I)) * xib_u - (one + vu * vu) * eta_v
    phi_z = (eta_z.scale(-I) + vz * eta_u - vz * xi_z - vz * vz * xi_u.scale(I)
             + (vz * vzb * xib_u).scale(I) - vu * eta_z - (vz * vu) * eta_v)

    def p_coef(J, sym):
        return lambda _: prolong(J).coeff(sym)

    vzu, vzz = _v("", 1, 0, 1), _v("", 2, 0, 0)
    # P_{zzu}: the xi_{zu} coefficient of phi^{zzu}, with the i-multiplied
    # convention that strips the leading linear part
    xi_zu = field("xi", 1, 0, 1)

    def p_zzu(_):
        c = prolong((2, 0, 1)).coeff(xi_zu)
        return (c + vzz.scale(2)).scale(I)

    out = [
        Identity("prolong phi^u", "order-1 prolonged coefficients", "jets", None, "jets",
                 lambda _: prolong((0, 0, 1)), lambda _: phi_u),
        Identity("prolong phi^z", "order-1 prolonged coefficients", "jets", None, "jets",
                 lambda _: prolong((1, 0, 0)), lambda _: phi_z),
        Identity("prolong P_zzu", "xi_zu coefficient of phi^zzu", "jets", None, "jets",
                 p_zzu, lambda _: (vz * vzu).scale(4) + (vu * vzz).scale(2)),
        Identity("prolong P_zbzbu", "xi_zu coefficient of phi^zbzbu", "jets", None, "jets",
                 p_coef((0, 2, 1), xi_zu), lambda _: Poly()),
    ]
    return out


# ----------------------------------------------------- partial normalization


def _rec(J):
    return lambda st: recurrence(J, st)


def _sym(p):
    return lambda st: p


def _partial_identities():
    P = "partial"
    out = []

    def add(name, anchor, when, mode, lhs, rhs, min_order=0):
        idx = when[1] if isinstance(when, tuple) and when[0] == "after" else when
        if isinstance(idx, tuple):
            min_order = max(min_order, sum(idx))
        out.append(Identity(name, anchor, P, when, mode, lhs, rhs, min_order))

    # order 0 and 1
    add("rec dZ", "order-0 recurrence", "Z", "full",
        _rec("Z"), _sym(omega("Z") + mu(0, 0)))
    add("rec dV", "order-0 recurrence", (0, 0, 0), "full",
        _rec((0, 0, 0)), _sym(varpi(0, 0, 0) + psi()))
    vz, vzb, vu = V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)
    one = _const(1)
    dVz = (varpi(1, 0, 0) - vz * mu(1, 0) - (vz * vz * mu(0, 1)).scale(I) + (vz * vzb * mub(0, 1)).scale(I)
           - (one.scale(I) + vu) * nuZ(1, 0) + vz * nuU(1) - vz * vu * nuUV(0))
    dVzb = (varpi(0, 1, 0) - vzb * mub(1, 0) + (vzb * vzb * mub(0, 1)).scale(I) - (vz * vzb * mu(0, 1)).scale(I)
            + (one.scale(I) - vu) * nuZb(1, 0) + vzb * nuU(1) - vzb * vu * nuUV(0))
    dVu = (varpi(0, 0, 1) - vz * (one + vu.scale(I)) * mu(0, 1) - vzb * (one - vu.scale(I)) * mub(0, 1)
           - (one + vu * vu) * nuUV(0))
    add("rec dV_Z", "order-1 recurrences", (0, 0, 1), "full", _rec((1, 0, 0)), _sym(dVz))
    add("rec dV_Zb", "order-1 recurrences", (0, 0, 1), "full", _rec((0, 1, 0)), _sym(dVzb))
    add("rec dV_U", "order-1 recurrences", (0, 0, 1), "full", _rec((0, 0, 1)), _sym(dVu))

    after1 = (0, 0, 2)
    for name, sym, val in (
        ("solve mu", ("mu", 0, 0), -omega("Z")),
        ("solve mubar", ("mub", 0, 0), -omega("Zb")),
        ("solve nu", ("nU", 0), -omega("U")),
        ("solve psi", ("psi",), Poly()),
        ("solve nu_Z", ("nZ", 1, 0), varpi(1, 0, 0).scale(-I)),
        ("solve nu_Zb", ("nZb", 1, 0), varpi(0, 1, 0).scale(I)),
        ("solve nu_V", ("nUV", 0), varpi(0, 0, 1)),
    ):
        add(name, "order-0/1 MC solves", after1, "full", _sym(Poly.lin(sym)), _sym(val))

    # order 2
    add("rec dV_ZZb", "Levi recurrence", (1, 1, 0), "full", _rec((1, 1, 0)),
        _sym(varpi(1, 1, 0) + V(1, 1, 0) * (nuU(1) - mu(1, 0) - mub(1, 0))))
    add("solve nu_U", "Levi normalization solve", ("after", (1, 1, 0)), "full", _sym(nuU(1)),
        _sym(-varpi(1, 1, 0) + mu(1, 0) + mub(1, 0)))
    # order 3
    v21, v12 = V(2, 1, 0), V(1, 2, 0)
    d21 = ((V(3, 1, 0) - v21 * v21) * omega("Z") + (V(2, 2, 0) - v12 * v21) * omega("Zb")
           + V(2, 1, 1) * omega("U") - mu(2, 0) + mub(0, 1).scale(4 * I) - v21 * mu(1, 0))
    add("rec dV_Z^2Zb", "order-3 recurrence", (2, 1, 0), "full", _rec((2, 1, 0)), _sym(d21))
    add("solve mu_Z^2", "order-3 solves", ("after", (1, 2, 0)), "full", _sym(mu(2, 0)),
        _sym(varpi(2, 1, 0) + mub(0, 1).scale(4 * I)))
    add("solve mubar_Zb^2", "order-3 solves", ("after", (1, 2, 0)), "full", _sym(mub(2, 0)),
        _sym(varpi(1, 2, 0) - mu(0, 1).scale(4 * I)))
    # orders 4 and 5
    v22 = V(2, 2, 0)
    add("rec dV_Z^2Zb^2", "order-4/5 recurrences", (2, 2, 0), "full", _rec((2, 2, 0)),
        _sym(varpi(2, 2, 0) - v22 * (mu(1, 0) + mub(1, 0)) - (mu(1, 1) - mub(1, 1)).scale(4 * I)))
    add("rec dV_Z^3Zb^2", "order-4/5 recurrences", (3, 2, 0), "full", _rec((3, 2, 0)),
        _sym(varpi(3, 2, 0) - V(3, 2, 0) * (mu(1, 0).scale(2) + mub(1, 0)) + mub(0, 2).scale(24)))
    add("rec dV_Z^2Zb^3", "order-4/5 recurrences", (2, 3, 0), "full", _rec((2, 3, 0)),
        _sym(varpi(2, 3, 0) - V(2, 3, 0) * (mu(1, 0) + mub(1, 0).scale(2)) + mu(0, 2).scale(24)))
    # order 6
    add("rec dV_Z^3Zb^3", "order-6 recurrences", (3, 3, 0), "full", _rec((3, 3, 0)),
        _sym(varpi(3, 3, 0) + (mu(1, 2) + mub(1, 2)).scale(12) - V(3, 3, 0) * (mu(1, 0) + mub(1, 0)).scale(2)),
        min_order=6)
    add("rec dV_Z^4Zb^2", "order-6 recurrences", None, "full", _rec((4, 2, 0)),
        _sym(varpi(4, 2, 0) - V(4, 2, 0) * (mu(1, 0).scale(3) + mub(1, 0))), min_order=7)
    return out


def _pattern_identities(max_order):
    """Maurer-Cartan forms of the partial frame modulo horizontal forms."""
    orders = normalization_orders("partial", max_order)
    free = FREE["partial"]
    out = []

    def avail(s):
        return s in free or (s in orders and orders[s] <= max_order)

    def add(tag, name, lhs, rhs, needs=None):
        syms = lhs.linear_symbols() | rhs.linear_symbols() if needs is None else lhs.linear_symbols() | set(needs)
        if all(avail(s) for s in syms):
            out.append(Identity(name, f"partial frame pattern, {tag} family", "partial", None, "mod", _sym(lhs), _sym(rhs)))

    N = max_order
    zero = Poly()
    for name, sym in (("mu", mu(0, 0)), ("mubar", mub(0, 0)), ("nu", nuU(0)), ("psi", psi()),
                      ("nu_Z", nuZ(1, 0)), ("nu_Zb", nuZb(1, 0)), ("nu_V", nuUV(0))):
        add("zero", f"pattern[zero] {name}", sym, zero)

    def S(l, a, b):
        """sum_{j=1}^{l+1} binom(l+1, j) V_{a, b, l+1-j} (mu_{U^j} | mubar_{U^j})."""
        acc = Poly()
        for j in range(1, l + 2):
            acc = acc + (V(*a, l + 1 - j) * b(0, j)).scale(comb(l + 1, j))
        return acc

    def S43(l):
        return S(l, (4, 3), mu) + S(l, (3, 4), mub)

    for l in range(N + 1):
        add("nuUV", f"pattern[nuUV] nu_U^{l}V", nuUV(l), zero)
        add("ImZU", f"pattern[ImZU] Im mu_ZU^{l + 1}", im_mu(1, l + 1), zero)
        add("nuZ", f"pattern[nuZ] nu_ZU^{l}", nuZ(1, l), mub(0, l).scale(I))
        add("nuZ", f"pattern[nuZ] nu_ZbU^{l}", nuZb(1, l), mu(0, l).scale(-I))
        add("muZ", f"pattern[muZ] mu_Z^2U^{l}", mu(2, l), mub(0, l + 1).scale(4 * I))
        add("muZ", f"pattern[muZ] mubar_Zb^2U^{l}", mub(2, l), mu(0, l + 1).scale(-4 * I))
        add("muZ", f"pattern[muZ] mu_Z^3U^{l}", mu(3, l), zero)
        add("muZ", f"pattern[muZ] mubar_Zb^3U^{l}", mub(3, l), zero)
        add("nuU", f"pattern[nuU] nu_U^{l + 4}", nuU(l + 4), mu(1, l + 3).scale(2),
            needs=[("Imu", 1, l + 3)])
        add("nuU", f"pattern[nuU] mu_ZU^{l + 3} (x2)", mu(1, l + 3).scale(2), S43(l).scale(q(1, 12)))
        add("muZU", f"pattern[muZU] mu_ZU^{l + 3}", mu(1, l + 3), S43(l).scale(q(1, 24)))
        add("muZU", f"pattern[muZU] mubar_ZbU^{l + 3}", mub(1, l + 3), S43(l).scale(q(1, 24)))
        add("muU", f"pattern[muU] mu_U^{l + 3}", mu(0, l + 3), S(l, (2, 4), mub).scale(q(1, 24)))
        add("muU", f"pattern[muU] mubar_U^{l + 3}", mub(0, l + 3), S(l, (4, 2), mu).scale(q(1, 24)))
        for k in range(N + 1):
            add("nuZ", f"pattern[nuZ] nu_Z^{k + 2}U^{l}", nuZ(k + 2, l), zero)
            add("nuZ", f"pattern[nuZ] nu_Zb^{k + 2}U^{l}", nuZb(k + 2, l), zero)
            if l == 0:
                add("muZ", f"pattern[muZ] mu_Z^{k + 4}", mu(k + 4, 0), zero)
                add("muZ", f"pattern[muZ] mubar_Zb^{k + 4}", mub(k + 4, 0), zero)
            add("muZ", f"pattern[muZ] mu_Z^{k + 4}U^{l + 1}", mu(k + 4, l + 1), -S(l, (k + 4, 2), mub))
            add("muZ", f"pattern[muZ] mubar_Zb^{k + 4}U^{l + 1}", mub(k + 4, l + 1), -S(l, (2, k + 4), mu))
    add("nuU", "pattern[nuU] nu_U", nuU(1), mu(1, 0) + mub(1, 0))
    add("nuU", "pattern[nuU] nu_U^2", nuU(2), mu(1, 1).scale(2), needs=[("Imu", 1, 1)])
    add("nuU", "pattern[nuU] nu_U^3", nuU(3), zero, needs=[("mu", 1, 2)])
    add("nuU", "pattern[nuU] mu_ZU^2 (x2)", mu(1, 2).scale(2), zero)
    add("muZU", "pattern[muZU] mu_ZU^2", mu(1, 2), zero)
    add("muZU", "pattern[muZU] mubar_ZbU^2", mub(1, 2), zero)
    add("muU", "pattern[muU] mu_U^2", mu(0, 2), zero)
    add("muU", "pattern[muU] mubar_U^2", mub(0, 2), zero)
    return out


# ------------------------------------------------------------ non-umbilic


def _nonumbilic_identities():
    NU = "non_umbilic"
    out = []

    def add(name, anchor, when, mode, lhs, rhs, min_order=7):
        out.append(Identity(name, anchor, NU, when, mode, lhs, rhs, min_order))

    w42, w24 = varpi(4, 2, 0), varpi(2, 4, 0)
    add("solve mu_Z", "non-umbilic order-6 solves", None, "full", _sym(mu(1, 0)),
        _sym((w42.scale(3) - w24).scale(q(1, 384))))
    add("solve mubar_Zb", "non-umbilic order-6 solves", None, "full", _sym(mub(1, 0)),
        _sym((w24.scale(3) - w42).scale(q(1, 384))))
    v421, v52, v43, v25, v34 = V(4, 2, 1), V(5, 2, 0), V(4, 3, 0), V(2, 5, 0), V(3, 4, 0)
    add("rec dV_Z^4Zb^2U", "non-umbilic order-7 recurrences", (4, 3, 0), "full", _rec((4, 2, 1)),
        _sym(varpi(4, 2, 1) - (v421 * (w24 + w42.scale(5))).scale(q(1, 192)) - (v52 * mu(0, 1) + v43 * mub(0, 1))
             - re_mu(1, 1).scale(192)))
    add("rec dV_Z^4Zb^3", "non-umbilic order-7 recurrences", (4, 3, 0), "full", _rec((4, 3, 0)),
        _sym(varpi(4, 3, 0) - (v43 * (w24.scale(3) + w42.scale(7))).scale(q(1, 384))
             - (v421 * omega("Z")).scale(7 * I) - mu(0, 1).scale(96 * I)))
    im421 = W(4, 2, 1)
    add("solve mu_U", "non-umbilic order-7 solves", None, "full", _sym(mu(0, 1)),
        _sym(varpi(4, 3, 0).scale(-I / 96) - (im421.scale(I) * omega("Z")).scale(q(7, 96))))
    add("solve mubar_U", "non-umbilic order-7 solves", None, "full", _sym(mub(0, 1)),
        _sym(varpi(3, 4, 0).scale(I / 96) - (im421.scale(-I) * omega("Zb")).scale(q(7, 96))))
    re_zu = ((varpi(4, 2, 1) + varpi(2, 4, 1)).scale(q(1, 384))
             + (v52 * varpi(4, 3, 0) - v25 * varpi(3, 4, 0)).scale(I / 36864)
             + (im421 * (v52 * omega("Z") - v25 * omega("Zb"))).scale(5 * I / 36864)
             + (im421 * im421 * omega("U")).scale(q(1, 9216)))
    add("solve Re mu_ZU", "non-umbilic order-7 solves", None, "full", _sym(re_mu(1, 1)), _sym(re_zu))
    add("solve Im mu_ZU", "non-umbilic order-7 solves", None, "mod", _sym(im_mu(1, 1)), _sym(Poly()))
    return out


def _derivative_identities():
    NU = "non_umbilic"
    J, Jb, K, L = J_(), Jb_(), K_(), L_()
    i = I
    table = {
        ("J", "Z"): V(6, 2, 0).scale(q(1, 240)) + L.scale(q(1, 48)) - (J * J).scale(q(55, 8)),
        ("J", "Zb"): V(5, 3, 0).scale(q(1, 240)) + V(3, 5, 0).scale(q(1, 48)) + (J * Jb).scale(q(5, 8)) + K.scale(8),
        ("J", "U"): V(5, 2, 1).scale(q(1, 240)) + V(3, 4, 1).scale(q(1, 48)) - (J * K).scale(q(3, 2) * i),
        ("Jbar", "Zb"): V(2, 6, 0).scale(q(1, 240)) + L.scale(q(1, 48)) - (Jb * Jb).scale(q(55, 8)),
        ("Jbar", "Z"): V(3, 5, 0).scale(q(1, 240)) + V(5, 3, 0).scale(q(1, 48)) + (J * Jb).scale(q(5, 8)) + K.scale(8),
        ("Jbar", "U"): V(2, 5, 1).scale(q(1, 240)) + V(4, 3, 1).scale(q(1, 48)) + (Jb * K).scale(q(3, 2) * i),
        ("K", "Z"): (V(5, 2, 1).scale(-i) + V(3, 4, 1).scale(i)).scale(q(1, 96))
        + (J * V(5, 3, 0) + Jb * L).scale(q(5, 192)) + (J * K).scale(5),
        ("K", "Zb"): (V(2, 5, 1).scale(i) - V(4, 3, 1).scale(i)).scale(q(1, 96))
        + (Jb * V(3, 5, 0) + J * L).scale(q(5, 192)) + (Jb * K).scale(5),
        ("K", "U"): (V(4, 2, 2).scale(-i) + V(2, 4, 2).scale(i)).scale(q(1, 96))
        + (J * V(4, 3, 1) + Jb * V(3, 4, 1)).scale(q(5, 192)),
    }
    out = []
    for (inv, d), rhs in table.items():
        out.append(Identity(f"D_{d} {inv}", "invariant derivatives", NU, None, "value",
                            (lambda key: lambda st: _derived(st)[key])((inv, d)), _sym(rhs), min_order=8))

    # commutators [D_a, D_b] = sum_k C^k_ab D_k
    comm = {
        ("Z", "Zb"): {"Z": Jb.scale(q(-5, 8)), "Zb": J.scale(q(5, 8)), "U": _const(-2 * i)},
        ("Z", "U"): {"Z": (V(5, 3, 0).scale(q(1, 96)) + K.scale(4)).scale(i), "Zb": L.scale(-i / 96), "U": J.scale(q(-5, 4))},
        ("Zb", "U"): {"Z": L.scale(i / 96), "Zb": (V(3, 5, 0).scale(q(1, 96)) + K.scale(4)).scale(-i), "U": Jb.scale(q(-5, 4))},
    }
    for pair, row in comm.items():
        for k, rhs in row.items():
            out.append(Identity(f"[D_{pair[0]},D_{pair[1]}] coeff D_{k}", "invariant operator commutators", NU, None,
                                "value", (lambda p, kk: lambda st: _commutators(st)[p][kk])(pair, k), _sym(rhs),
                                min_order=8))

    # structure equations for the horizontal forms
    struct = {
        "Z": {("Z", "Zb"): Jb.scale(q(5, 8)), ("Z", "U"): (V(5, 3, 0).scale(q(1, 96)) + K.scale(4)).scale(-i),
              ("Zb", "U"): L.scale(-i / 96)},
        "U": {("Z", "Zb"): _const(2 * i), ("Z", "U"): J.scale(q(5, 4)), ("Zb", "U"): Jb.scale(q(5, 4))},
    }
    for k, row in struct.items():
        for pair, rhs in row.items():
            out.append(Identity(f"d w^{k} coeff w^{pair[0]}^w^{pair[1]}", "horizontal structure equations", NU, None,
                                "value", (lambda kk, p: lambda st: _structure(st)[kk].get(p, Poly()))(k, pair),
                                _sym(rhs), min_order=8))
    return out


_DERIVED_CACHE = {}


def _cached(kind, st, fn):
    key = (kind, id(st))
    hit = _DERIVED_CACHE.get(key)
    if hit is None or hit[0] is not st:
        hit = (st, fn(st))
        _DERIVED_CACHE[key] = hit
    return hit[1]


def _derived(st):
    return _cached("deriv", st, derive_invariant_derivatives)


def _commutators(st):
    return _cached("comm", st, derive_commutators)


def _structure(st):
    return _cached("struct", st, structure_equations)


# ------------------------------------------------------------------- checker


def identity_table(max_order=9):
    """All identities applicable at ``max_order``."""
    rows = _jet_identities() + _partial_identities() + _pattern_identities(max_order)
    rows += _nonumbilic_identities() + _derivative_identities()
    return [r for r in rows if r.min_order <= max_order]


def _difference(row, st):
    a, b = row.lhs(st), row.rhs(st)
    if row.mode == "jets":
        return a - b
    if row.mode == "value":
        return st.reduce(a) - st.reduce(b)
    if row.mode == "full":
        return st.expand(a) - st.expand(b)
    d = st.reduce(a) - st.reduce(b)
    return d.drop({s for s in d.linear_symbols() if s[0] in ("w", "pi")})


def states_for(rows, max_order):
    """Run each needed schedule once, collecting the requested snapshots."""
    states = {}
    for branch in ("partial", "non_umbilic"):
        want = {r.when for r in rows if r.branch == branch and r.when is not None}
        if not any(r.branch == branch for r in rows):
            continue
        final, snaps = run_schedule(branch, max_order, snapshots=want | {"__none__"})
        snaps[None] = final
        states[branch] = snaps
    return states


def check_identities(max_order=9, rows=None):
    """Evaluate every identity; returns a list of ``IdentityResult``."""
    rows = identity_table(max_order) if rows is None else rows
    states = states_for(rows, max_order)
    out = []
    for r in rows:
        st = None if r.branch == "jets" else states[r.branch][r.when]
        d = _difference(r, st)
        out.append(IdentityResult(r.name, r.anchor, not d, "" if not d else format_poly(d)))
    return out


def report(results):
    lines = [r.line() for r in results]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines)


__all__ = ["Identity", "IdentityResult", "check_identities", "identity_table", "report", "states_for"]
