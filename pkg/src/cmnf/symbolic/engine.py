"""Symbolic recurrence relations and the normalization schedule.

Form symbols
------------
``('w', 'Z' | 'Zb' | 'U')``      invariant horizontal forms
``('pi', j, k, l)``              varpi_J = V_{J,Z} w^Z + V_{J,Zb} w^Zb + V_{J,U} w^U
``('mu', k, l)`` ``('mub', k, l)``                mu_{Z^k U^l}, mubar_{Zb^k U^l}
``('nZ', k, l)`` ``('nZb', k, l)`` (k >= 1)       nu_{Z^k U^l}, nu_{Zb^k U^l}
``('nU', l)`` ``('nUV', l)`` ``('psi',)``         nu_{U^l}, nu_{U^l V}, psi
``('Rmu', k, l)`` ``('Imu', k, l)``               real and imaginary parts of mu_{Z^k U^l}

Value symbols are ``('V', j, k, l)`` for lifted invariants and ``('W', j, k, l)``
for the imaginary part of a V whose real part has been normalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import factorial

from .algebra import GQ, I, Poly
from .jets import prolong

HORIZONTAL = (("w", "Z"), ("w", "Zb"), ("w", "U"))
DIRECTIONS = {"Z": (1, 0, 0), "Zb": (0, 1, 0), "U": (0, 0, 1)}
FREE_PARTIAL = {("mu", 0, 1), ("mub", 0, 1), ("mu", 1, 0), ("mub", 1, 0), ("Rmu", 1, 1)}


class TargetNotSolvable(ArithmeticError):
    """The chosen Maurer-Cartan target has no constant nonzero coefficient."""


# ------------------------------------------------------------------ symbols


def V(j, k, l):
    return Poly.var(("V", j, k, l))


def W(j, k, l):
    return Poly.var(("W", j, k, l))


def mu(k, l):
    return Poly.lin(("mu", k, l))


def mub(k, l):
    return Poly.lin(("mub", k, l))


def nuZ(k, l):
    return Poly.lin(("nZ", k, l))


def nuZb(k, l):
    return Poly.lin(("nZb", k, l))


def nuU(l):
    return Poly.lin(("nU", l))


def nuUV(l):
    return Poly.lin(("nUV", l))


def psi():
    return Poly.lin(("psi",))


def varpi(j, k, l):
    return Poly.lin(("pi", j, k, l))


def omega(d):
    return Poly.lin(("w", d))


def re_mu(k, l):
    return Poly.lin(("Rmu", k, l))


def im_mu(k, l):
    return Poly.lin(("Imu", k, l))


def order(idx):
    return sum(idx)


def conj_index(idx):
    j, k, l = idx
    return (k, j, l)


def vconj(v):
    if v[0] == "V":
        return ("V", v[2], v[1], v[3])
    return v  # W symbols are real


_SWAP = {"mu": "mub", "mub": "mu", "nZ": "nZb", "nZb": "nZ"}


def sconj(s):
    tag = s[0]
    if tag in _SWAP:
        return GQ(1), (_SWAP[tag],) + s[1:]
    if tag == "w":
        return GQ(1), ("w", {"Z": "Zb", "Zb": "Z", "U": "U"}[s[1]])
    if tag == "pi":
        return GQ(1), ("pi", s[2], s[1], s[3])
    return GQ(1), s


def conj(p):
    return p.conj(vconj, sconj)


def field_to_mc(s):
    comp, a, b, p, q = s[1:]
    if comp == "xi":
        return ("mu", a, p)
    if comp == "xib":
        return ("mub", b, p)
    if comp == "phi":
        return ("psi",)
    if a:
        return ("nZ", a, p)
    if b:
        return ("nZb", b, p)
    return ("nUV", p) if q else ("nU", p)


def is_mc(s):
    return s is not None and s[0] not in ("w", "pi")


# -------------------------------------------------------------------- state


@dataclass(frozen=True)
class Step:
    index: object  # (j, k, l), or 'Z' | 'Zb' | 'U' for the base point
    value: Poly
    target: tuple
    part: str = "full"  # 'full' or 're' (only the real part of V is fixed)

    def label(self):
        tgt = symbol_name(self.target)
        if isinstance(self.index, str):
            return f"{self.index}=0 -> {tgt}"
        pre = "Re " if self.part == "re" else ""
        return f"{pre}{vname(self.index)}={_fmt_value(self.value)} -> {tgt}"


@dataclass
class NormalizationState:
    max_order: int
    branch: str = "partial"
    phantom: dict = dc_field(default_factory=dict)
    solved: dict = dc_field(default_factory=dict)
    splits: dict = dc_field(default_factory=dict)
    base: set = dc_field(default_factory=set)
    steps: list = dc_field(default_factory=list)

    def copy(self):
        return NormalizationState(self.max_order, self.branch, dict(self.phantom), dict(self.solved),
                                  dict(self.splits), set(self.base), list(self.steps))

    # -- substitutions
    def value_map(self, syms):
        out = {}
        for v in syms:
            if v[0] == "v":
                idx = v[1:]
                out[v] = self.phantom.get(idx, V(*idx))
            elif v[0] == "V" and v[1:] in self.phantom:
                out[v] = self.phantom[v[1:]]
        return out

    def reduce(self, form):
        """Substitute phantoms, real splittings and solved forms."""
        form = form.subs_values(self.value_map(form.value_symbols()))
        if self.splits:
            form = form.subs_linear(self.splits)
        if self.solved:
            form = form.subs_linear(self.solved)
        return form

    def expand(self, form):
        """``reduce`` followed by writing every varpi_J in horizontal forms."""
        form = self.reduce(form)
        pis = {s for s in form.linear_symbols() if s[0] == "pi"}
        if not pis:
            return form
        mapping = {}
        for s in pis:
            idx = s[1:]
            acc = Poly()
            for d, e in DIRECTIONS.items():
                nxt = tuple(a + b for a, b in zip(idx, e))
                acc = acc + self.phantom.get(nxt, V(*nxt)) * omega(d)
            mapping[s] = acc
        return form.subs_linear(mapping)

    def unsolved(self):
        """MC symbols still appearing in the solved table."""
        out = set()
        for f in self.solved.values():
            out |= {s for s in f.linear_symbols() if is_mc(s)}
        return out

    # -- updates
    def _assign(self, idx, value):
        self.phantom[idx] = value
        self.solved = {k: f.subs_values({("V",) + idx: value}) for k, f in self.solved.items()}

    def _split(self, k, l):
        key = ("mu", k, l)
        if key in self.splits:
            return
        r, i = re_mu(k, l), im_mu(k, l)
        sp = {key: r + i.scale(I), ("mub", k, l): r - i.scale(I)}
        self.splits.update(sp)
        self.solved = {s: f.subs_linear(sp) for s, f in self.solved.items()}

    def _record(self, target, expr):
        sub = {target: expr}
        self.solved = {s: f.subs_linear(sub) for s, f in self.solved.items()}
        self.solved[target] = expr


def vname(idx):
    j, k, l = idx
    parts = [f"Z{'' if j == 1 else '^' + str(j)}" if j else "",
             f"Zb{'' if k == 1 else '^' + str(k)}" if k else "",
             f"U{'' if l == 1 else '^' + str(l)}" if l else ""]
    return "V_" + ("".join(parts) or "0")


def _mc_index(base, k, l):
    parts = [f"{base}{'' if k == 1 else '^' + str(k)}" if k else "", f"U{'' if l == 1 else '^' + str(l)}" if l else ""]
    return "".join(parts)


def symbol_name(s):
    tag = s[0]
    if tag == "w":
        return f"w^{s[1]}"
    if tag == "pi":
        return "varpi" + vname(s[1:])[1:]
    if tag in ("mu", "Rmu", "Imu"):
        name = "mu_" + (_mc_index("Z", s[1], s[2]) or "0")
        return {"mu": name, "Rmu": f"Re {name}", "Imu": f"Im {name}"}[tag]
    if tag == "mub":
        return "mubar_" + (_mc_index("Zb", s[1], s[2]) or "0")
    if tag == "nZ":
        return "nu_" + _mc_index("Z", s[1], s[2])
    if tag == "nZb":
        return "nu_" + _mc_index("Zb", s[1], s[2])
    if tag == "nU":
        return "nu_" + (_mc_index("U", s[1], 0) or "0")
    if tag == "nUV":
        return "nu_" + _mc_index("U", s[1], 0) + "V"
    if tag == "psi":
        return "psi"
    if tag == "V":
        return vname(s[1:])
    if tag == "W":
        return "Im " + vname(s[1:])
    return repr(s)


def _fmt_value(p):
    if p.is_constant():
        return str(p.constant())
    return format_poly(p)


def format_poly(p):
    """Deterministic human-readable rendering."""
    if not p:
        return "0"

    def mkey(item):
        (m, s), _ = item
        return (s is not None, s or (), m)

    out = []
    for (m, s), c in sorted(p.t.items(), key=mkey):
        factors = [symbol_name(v) + (f"^{e}" if e > 1 else "") for v, e in m]
        if s is not None:
            factors.append(symbol_name(s))
        body = "*".join(factors)
        coef = str(c)
        if body and coef == "1":
            out.append(body)
        elif body and coef == "-1":
            out.append("-" + body)
        else:
            out.append(coef + ("*" + body if body else ""))
    return " + ".join(out).replace("+ -", "- ")


# --------------------------------------------------------------- recurrence


def invariantize(p, st):
    """Jets to lifted invariants (or phantom constants), field jets to MC forms."""
    lin = {s: Poly.lin(field_to_mc(s)) for s in p.linear_symbols() if s[0] == "F"}
    return st.reduce(p.subs_linear(lin))


def recurrence(J, st):
    """dV_J = varpi_J + iota(phi^J), reduced in the state (varpi kept symbolic)."""
    if isinstance(J, str):
        mc = {"Z": mu(0, 0), "Zb": mub(0, 0), "U": nuU(0)}[J]
        return st.reduce(omega(J) + mc)
    J = tuple(J)
    return varpi(*J) + invariantize(prolong(J), st)


def solve_phantom(st, J, value, target, part="full"):
    """Normalize V_J (or its real part) to ``value`` and solve dV_J = 0 for ``target``.

    ``target`` is an MC symbol, or ('Re', k, l) / ('Im', k, l) for a part of
    mu_{Z^k U^l}.  Returns a new state.
    """
    st = st.copy()
    value = value if isinstance(value, Poly) else Poly.const(value)
    if isinstance(J, str):
        st.base.add(J)
    elif part == "re":
        if not value.is_constant() or not value.constant().is_real():
            raise ValueError("real-part normalization needs a real constant")
        J = tuple(J)
        w = W(*J)
        st._assign(J, value + w.scale(I))
        st._assign(conj_index(J), value - w.scale(I))
    else:
        st._assign(tuple(J), value)
    if target[0] in ("Re", "Im"):
        st._split(target[1], target[2])
        target = ("Rmu" if target[0] == "Re" else "Imu", target[1], target[2])
    eq = recurrence(J, st)
    if part == "re":
        eq = (eq + conj(eq)).scale(GQ(1, 0) / 2)
    eq = st.reduce(eq)
    c = eq.coeff(target)
    if not c or not c.is_constant():
        raise TargetNotSolvable(f"{symbol_name(target)} has coefficient {format_poly(c)} in d{_jname(J)}")
    c = c.constant()
    expr = (eq - Poly.lin(target, c)).scale(GQ(-1) / c)
    st._record(target, expr)
    st.steps.append(Step(J, value, target, part))
    return st


def _jname(J):
    return J if isinstance(J, str) else vname(J)


# ------------------------------------------------------------------ schedule


def schedule(branch, max_order):
    """Ordered normalization steps, grouped by jet order."""
    if branch not in ("partial", "non_umbilic"):
        raise ValueError(f"unknown branch {branch!r}")
    steps = [("Z", 0, ("mu", 0, 0), "full"), ("Zb", 0, ("mub", 0, 0), "full"),
             ("U", 0, ("nU", 0), "full"), ((0, 0, 0), 0, ("psi",), "full")]
    for n in range(1, max_order + 1):
        lvl = [((0, 0, n), 0, ("nUV", n - 1), "full")]
        for k in range(1, n + 1):
            lvl.append(((k, 0, n - k), 0, ("nZ", k, n - k), "full"))
            lvl.append(((0, k, n - k), 0, ("nZb", k, n - k), "full"))
        if n == 2:
            lvl.append(((1, 1, 0), 1, ("nU", 1), "full"))
        elif n >= 3:
            lvl.append(((1, 1, n - 2), 0, ("nU", n - 1), "full"))
        for k in range(0, n - 2):
            l = n - 3 - k
            lvl.append(((k + 2, 1, l), 0, ("mu", k + 2, l), "full"))
            lvl.append(((1, k + 2, l), 0, ("mub", k + 2, l), "full"))
        if n >= 4:
            lvl.append(((2, 2, n - 4), 0, ("Im", 1, n - 3), "full"))
        if n >= 5:
            lvl.append(((3, 2, n - 5), 0, ("mub", 0, n - 3), "full"))
            lvl.append(((2, 3, n - 5), 0, ("mu", 0, n - 3), "full"))
        if n >= 6:
            lvl.append(((3, 3, n - 6), 0, ("Re", 1, n - 4), "full"))
        if branch == "non_umbilic" and n == 6:
            lvl += [((4, 2, 0), 48, ("mu", 1, 0), "full"), ((2, 4, 0), 48, ("mub", 1, 0), "full")]
        if branch == "non_umbilic" and n == 7:
            lvl += [((4, 3, 0), 0, ("mu", 0, 1), "full"), ((3, 4, 0), 0, ("mub", 0, 1), "full"),
                    ((4, 2, 1), 0, ("Re", 1, 1), "re")]
        steps += lvl
    return steps


def run_schedule(branch="partial", max_order=9, stop_before=None, snapshots=()):
    """Execute the schedule.

    ``snapshots`` lists step indices J (state just before the step) or
    ``('after', J)`` keys; when given, ``(state, {key: state})`` is returned.
    """
    st = NormalizationState(max_order, branch)
    snaps = {}
    want = set(snapshots)
    for idx, value, target, part in schedule(branch, max_order):
        if idx == stop_before:
            break
        if idx in want:
            snaps[idx] = st.copy()
        st = solve_phantom(st, idx, value, target, part)
        if ("after", idx) in want:
            snaps[("after", idx)] = st.copy()
    return (st, snaps) if snapshots else st


def normalization_orders(branch, max_order):
    """MC symbol -> order of the phantom that normalizes it (within a margin
    past ``max_order``).  A complex mu_{Z U^m} counts once both parts are."""
    out = {}
    for idx, _, target, _ in schedule(branch, max_order + 6):
        n = 0 if isinstance(idx, str) else order(idx)
        if target[0] in ("Re", "Im"):
            k, l = target[1:]
            out[("Rmu" if target[0] == "Re" else "Imu", k, l)] = n
            for s in (("mu", k, l), ("mub", k, l)):
                out[s] = max(out.get(s, 0), n)
        else:
            out[target] = n
    return out


def free_symbols(st):
    """Unsolved MC symbols that no phantom of any order normalizes."""
    orders = normalization_orders(st.branch, st.max_order)
    return {s for s in st.unsolved() if s not in orders}


# ------------------------------------------------------ invariant structure


def _horizontal(st, form):
    form = st.expand(form)
    left = {s for s in form.linear_symbols() if s[0] != "w"}
    if left:
        names = ", ".join(sorted(symbol_name(s) for s in left))
        raise ValueError(f"form is not horizontal in this state: {names}")
    return form


def derive_invariant_derivatives(st):
    """Invariant derivatives of J, Jbar, K along w^Z, w^Zb, w^U.

    J = V_{Z^5Zb^2}/240 and K = Im V_{Z^4Zb^2U}/48; the results are value
    polynomials in the V and W symbols.
    """
    if st.branch != "non_umbilic" or st.max_order < 8:
        raise ValueError("invariant derivatives need the non-umbilic state to order 8")
    dJ = _horizontal(st, recurrence((5, 2, 0), st)).scale(GQ(1, 0) / 240)
    dJb = _horizontal(st, recurrence((2, 5, 0), st)).scale(GQ(1, 0) / 240)
    dK = _horizontal(st, recurrence((4, 2, 1), st) - recurrence((2, 4, 1), st)).scale(GQ(1) / GQ(0, 96))
    out = {}
    for name, form in (("J", dJ), ("Jbar", dJb), ("K", dK)):
        for d in DIRECTIONS:
            out[(name, d)] = form.coeff(("w", d))
    return out


_ORDER = ("Z", "Zb", "U")


def wedge(alpha, d):
    """alpha ^ w^d for a horizontal one-form alpha, as {(a, b): coeff} with a < b."""
    out = {}
    for s, c in alpha.linear_parts().items():
        if s is None:
            raise ValueError("wedge of a non-form")
        a = s[1]
        if a == d:
            continue
        ia, ib = _ORDER.index(a), _ORDER.index(d)
        key, sign = ((a, d), 1) if ia < ib else ((d, a), -1)
        out[key] = out.get(key, Poly()) + c.scale(sign)
    return out


def _add2(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, Poly()) + v
    return {k: v for k, v in out.items() if v}


def structure_equations(st):
    """d w^Z, d w^Zb, d w^U after substituting the normalized MC forms."""
    h = lambda f: _horizontal(st, f)  # noqa: E731
    dZ = _add2(wedge(h(mu(1, 0)), "Z"), wedge(h(mu(0, 1)), "U"))
    dZb = _add2(wedge(h(mub(1, 0)), "Zb"), wedge(h(mub(0, 1)), "U"))
    dU = _add2(_add2(wedge(h(nuZ(1, 0)), "Z"), wedge(h(nuZb(1, 0)), "Zb")), wedge(h(nuU(1)), "U"))
    return {"Z": dZ, "Zb": dZb, "U": dU}


def derive_commutators(st):
    """[D_a, D_b] = sum_k C^k_ab D_k with C^k_ab = -(coefficient of w^a ^ w^b in d w^k)."""
    eqs = structure_equations(st)
    out = {}
    for pair in (("Z", "Zb"), ("Z", "U"), ("Zb", "U")):
        out[pair] = {k: -eqs[k].get(pair, Poly()) for k in _ORDER}
    return out


def index_factorial(idx):
    out = 1
    for n in idx:
        out *= factorial(n)
    return out


__all__ = [
    "FREE_PARTIAL",
    "NormalizationState",
    "Step",
    "TargetNotSolvable",
    "conj",
    "derive_commutators",
    "derive_invariant_derivatives",
    "format_poly",
    "free_symbols",
    "normalization_orders",
    "invariantize",
    "recurrence",
    "run_schedule",
    "schedule",
    "solve_phantom",
    "structure_equations",
    "symbol_name",
]
