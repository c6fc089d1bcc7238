import dataclasses
import random
from fractions import Fraction
from math import factorial

import pytest
import sympy as sp

from cmnf import fixtures
from cmnf.normalform import full_normal_form, partial_normal_form
from cmnf.symbolic.algebra import GQ, I, Poly
from cmnf.symbolic.engine import (
    FREE_PARTIAL,
    NormalizationState,
    TargetNotSolvable,
    V,
    conj,
    derive_commutators,
    derive_invariant_derivatives,
    format_poly,
    free_symbols,
    mu,
    mub,
    omega,
    recurrence,
    run_schedule,
    schedule,
    solve_phantom,
)
from cmnf.symbolic.identities import check_identities, identity_table, report
from cmnf.symbolic.jets import (
    field,
    is_reduced,
    prolong,
    prolong_closed,
    random_field_jet,
    reduce_field_jet,
    total_derivative,
    vjet,
)


@pytest.fixture(scope="module")
def partial7():
    return run_schedule("partial", 7)


@pytest.fixture(scope="module")
def nu8():
    return run_schedule("non_umbilic", 8)


# ------------------------------------------------------------- rewriting


def test_rewrite_is_confluent():
    rng = random.Random(0)
    for _ in range(100):
        s = random_field_jet(rng)
        ref = reduce_field_jet(s)
        for k in range(5):
            assert reduce_field_jet(s, random.Random(1000 * k + 7)) == ref
        for sym in ref.linear_symbols():
            assert is_reduced(sym)


Z, ZB, U, VV = sp.symbols("z zb u v")


def _holo(rng, n):
    return {(a, b): sp.Rational(rng.randint(-3, 3), rng.randint(1, 3)) + sp.I * sp.Rational(rng.randint(-3, 3), 2)
            for a in range(n) for b in range(n) if a + b < n}


def _field_components(seed):
    """A random holomorphic field written in (z, zbar, u, v)."""
    rng = random.Random(seed)
    P, Q = _holo(rng, 5), _holo(rng, 5)
    w, wb = U + sp.I * VV, U - sp.I * VV
    xi = sum(c * Z ** a * w ** b for (a, b), c in P.items())
    xib = sum(sp.conjugate(c) * ZB ** a * wb ** b for (a, b), c in P.items())
    th = sum(c * Z ** a * w ** b for (a, b), c in Q.items())
    thb = sum(sp.conjugate(c) * ZB ** a * wb ** b for (a, b), c in Q.items())
    comps = {"xi": xi, "xib": xib, "eta": (th + thb) / 2, "phi": (th - thb) / (2 * sp.I)}
    return {k: sp.Poly(sp.expand(v), Z, ZB, U, VV) for k, v in comps.items()}


def _jet_value(comps, s):
    comp, a, b, p, q = s[1:]
    c = comps[comp].coeff_monomial(Z ** a * ZB ** b * U ** p * VV ** q)
    return c * factorial(a) * factorial(b) * factorial(p) * factorial(q)


def _gq(c):
    return sp.Rational(str(c.re)) + sp.I * sp.Rational(str(c.im))


@pytest.mark.parametrize("seed", range(3))
def test_rewrite_rules_hold_for_holomorphic_fields(seed):
    comps = _field_components(seed)
    rng = random.Random(seed)
    for _ in range(60):
        s = random_field_jet(rng, 4)
        red = reduce_field_jet(s)
        lhs = _jet_value(comps, s)
        if not red:
            assert sp.simplify(lhs) == 0
            continue
        ((_, t), c), = red.t.items()
        assert sp.simplify(lhs - _gq(c) * _jet_value(comps, t)) == 0


# ---------------------------------------------------------- prolongation


def test_total_derivative_examples():
    assert total_derivative("z", Poly.var(vjet(1, 0, 0))) == Poly.var(vjet(2, 0, 0))
    assert total_derivative("u", Poly.var(("z",))) == Poly()
    assert total_derivative("z", Poly.var(("z",)) * Poly.var(("z",))) == Poly.var(("z",)).scale(2)
    # D_z xi = xi_z + xi_v v_z, and xi_v = i xi_u
    got = total_derivative("z", Poly.lin(field("xi")))
    want = Poly.lin(field("xi", 1)) + Poly.var(vjet(1, 0, 0)) * Poly.lin(field("xi", 0, 0, 1), I)
    assert got == want
    with pytest.raises(ValueError):
        total_derivative("w", Poly.var(vjet(0, 0, 0)))


JETS = [(j, k, l) for j in range(5) for k in range(5) for l in range(3) if 1 <= j + k + l <= 5]


@pytest.mark.parametrize("J", JETS, ids=str)
def test_recursive_and_closed_prolongation_agree(J):
    assert prolong(J) == prolong_closed(J)


def test_prolongation_of_v_itself():
    assert prolong((0, 0, 0)) == Poly.lin(field("phi"))


# ------------------------------------------------------------ recurrence


def test_base_recurrence():
    st = NormalizationState(3)
    assert recurrence("Z", st) == omega("Z") + mu(0, 0)
    assert recurrence("Zb", st) == omega("Zb") + mub(0, 0)


def test_phantom_solve_and_record():
    st = NormalizationState(3)
    for step in schedule("partial", 3)[:4]:
        st = solve_phantom(st, *step)
    assert st.phantom[(0, 0, 0)] == Poly()
    assert ("psi",) in st.solved
    assert [s.label() for s in st.steps][-1].startswith("V_0=0")


def test_unsolvable_target_is_reported():
    st = NormalizationState(3)
    with pytest.raises(TargetNotSolvable):
        solve_phantom(st, (2, 0, 0), 0, ("mu", 5, 0))


def test_real_part_step_needs_real_value():
    with pytest.raises(ValueError):
        solve_phantom(NormalizationState(7), (4, 2, 1), GQ(0, 1), ("Re", 1, 1), "re")


def test_unknown_branch():
    with pytest.raises(ValueError):
        schedule("umbilic", 5)


def test_free_symbols_partial(partial7):
    assert free_symbols(partial7) == FREE_PARTIAL


def test_free_symbols_nonumbilic(nu8):
    assert free_symbols(nu8) == set()


def test_solved_forms_are_conjugation_symmetric(partial7):
    for s, f in partial7.solved.items():
        if s[0] == "mu" and ("mub",) + s[1:] in partial7.solved:
            assert partial7.solved[("mub",) + s[1:]] == conj(f)


def test_invariant_derivative_table_is_conjugation_symmetric(nu8):
    d = derive_invariant_derivatives(nu8)
    assert d[("Jbar", "Zb")] == conj(d[("J", "Z")])
    assert d[("Jbar", "Z")] == conj(d[("J", "Zb")])
    assert d[("Jbar", "U")] == conj(d[("J", "U")])
    assert d[("K", "Zb")] == conj(d[("K", "Z")])
    assert d[("K", "U")] == conj(d[("K", "U")])


def test_commutator_table_is_conjugation_symmetric(nu8):
    c = derive_commutators(nu8)
    swap = {"Z": "Zb", "Zb": "Z", "U": "U"}
    for k in ("Z", "Zb", "U"):
        assert c[("Zb", "U")][swap[k]] == conj(c[("Z", "U")][k])
        # [D_Zb, D_Z] = -[D_Z, D_Zb]
        assert c[("Z", "Zb")][swap[k]] == -conj(c[("Z", "Zb")][k])


def test_invariant_derivatives_need_nonumbilic_state(partial7):
    with pytest.raises(ValueError):
        derive_invariant_derivatives(partial7)


def test_phantoms_match_numeric_normal_form(nu8):
    N = full_normal_form(partial_normal_form(fixtures.std_nonumbilic(12, Fraction(1, 10))))
    checked = 0
    for idx, val in nu8.phantom.items():
        if sum(idx) > 7 or not val.is_constant():
            continue
        c = val.constant()
        got = N.v(idx)
        assert (got.re, got.im) == (c.re, c.im), idx
        checked += 1
    # the real-part step leaves Im V_{Z^4 Zb^2 U} free, so only its real part is pinned
    assert N.v((4, 2, 1)).re == 0
    assert N.v((4, 2, 0)) == 48 and checked > 20


def test_format_poly_is_deterministic():
    a = V(2, 1, 0) * V(1, 1, 1) + mu(1, 0).scale(GQ(0, 3)) + Poly.const(Fraction(1, 2))
    b = Poly.const(Fraction(1, 2)) + mu(1, 0).scale(GQ(0, 3)) + V(1, 1, 1) * V(2, 1, 0)
    assert format_poly(a) == format_poly(b)
    assert format_poly(Poly()) == "0"
    assert "3*i*mu_Z" in format_poly(a)


# ------------------------------------------------------------- identities


def test_identity_table_grows_with_order():
    sizes = [len(identity_table(n)) for n in (1, 3, 5, 7, 9)]
    assert sizes == sorted(sizes) and sizes[0] > 0
    names = [r.name for r in identity_table(9)]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_identities_pass_at_low_order(n):
    res = check_identities(n)
    assert res and all(r.passed for r in res), report([r for r in res if not r.passed])


def _perturb(row, delta):
    lhs = row.lhs
    return dataclasses.replace(row, lhs=lambda st: lhs(st) + delta)


def test_perturbed_identities_fail():
    rows = identity_table(8)
    picked = {}
    for r in rows:
        picked.setdefault((r.anchor, r.mode), r)
    bad = [_perturb(r, Poly.const(Fraction(1, 1000))) for r in picked.values()]
    res = check_identities(8, bad)
    assert res and not any(r.passed for r in res)
    assert all(r.difference for r in res)


def test_perturbed_symbolic_coefficient_fails():
    rows = [r for r in identity_table(8) if r.mode in ("full", "mod") and r.branch == "partial"]
    bad = [_perturb(r, mu(1, 0).scale(GQ(Fraction(1, 384)))) for r in rows[:6]]
    res = check_identities(8, bad)
    assert not any(r.passed for r in res)
