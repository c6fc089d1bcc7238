from fractions import Fraction

import pytest

from cmnf import fixtures
from cmnf.hypersurface import Biholomorphism, is_tangent, pushforward
from cmnf.invariants import (
    InsufficientTruncation,
    InvariantSet,
    WrongBranch,
    cartan_curvature,
    chern_moser_invariants,
    equivalent,
    invariants_of,
    polynomial_symmetries,
    syzygy_residual,
)
from cmnf.normalform import full_normal_form, partial_normal_form
from cmnf.scalar import Scalar

import oracles as O


def test_cartan_curvature_examples():
    assert cartan_curvature(partial_normal_form(fixtures.std_nonumbilic())) == 8
    assert cartan_curvature(partial_normal_form(fixtures.generic_su())) == 0


def test_invariants_of_standard_fixtures():
    inv = invariants_of(fixtures.std_nonumbilic())
    assert (inv.R, inv.J, inv.K, inv.L) == (8, 0, 0, 0)
    inv = invariants_of(fixtures.std_nonumbilic(12, Fraction(1, 10)))
    assert inv.J == Scalar(Fraction(1, 10))


def test_invariants_need_nonumbilic_branch():
    N = full_normal_form(partial_normal_form(fixtures.generic_su()))
    with pytest.raises(WrongBranch):
        chern_moser_invariants(N)


def test_invariants_refuse_short_normal_forms():
    # raw tube graphs lose half their order to the linear terms
    with pytest.raises(InsufficientTruncation):
        invariants_of(fixtures.tube_t1(4, 1, 12, 256))


@pytest.mark.parametrize("J,K,L,expected", [
    (0, 8, 24, 0),
    (0, 0, 0, -192),
    (Fraction(1, 10), 1, 1, (1 - Fraction(25, 2400)) * (1 - Fraction(75, 200)) - 192),
])
def test_syzygy_residual_examples(J, K, L, expected):
    inv = InvariantSet(Scalar(8), Scalar(J), Scalar(K), Scalar(L), 1)
    assert syzygy_residual(inv) == Scalar(expected)


def test_syzygy_residual_uses_real_part_of_j_squared():
    inv = InvariantSet(Scalar(8), Scalar(0, 1), Scalar(0), Scalar(0), 1)
    # (0 - 25/24)(0 + 75/2) - 192
    assert syzygy_residual(inv) == Scalar(Fraction(-25, 24) * Fraction(75, 2) - 192)


@pytest.mark.parametrize("seed", range(2))
def test_invariants_survive_biholomorphisms(seed):
    M = fixtures.std_nonumbilic(12, Fraction(1, 10))
    g = O.random_biholomorphism(O.seeded(seed))
    a, b = invariants_of(M), invariants_of(pushforward(M, g))
    assert (a.J, a.K, a.L) == (b.J, b.K, b.L)


def test_equivalence_verdicts():
    assert equivalent(fixtures.heisenberg(), fixtures.sphere()).kind == "Congruent"
    assert equivalent(fixtures.std_nonumbilic(), fixtures.generic_su()).kind == "Distinct"
    assert equivalent(fixtures.std_nonumbilic(), fixtures.std_nonumbilic(12, Fraction(1, 10))).kind == "Distinct"
    assert equivalent(fixtures.circ44(), fixtures.generic_su()).kind == "Distinct"


def test_flip_is_detected():
    M = fixtures.std_nonumbilic(12, Fraction(1, 10))
    assert equivalent(M, pushforward(M, Biholomorphism.scaling(-1))).kind == "Congruent"


def test_symmetry_basis_is_tangent():
    M = fixtures.heisenberg(10)
    res = polynomial_symmetries(M, 2)
    assert res.dim == 8
    assert all(is_tangent(X, M) for X in res.basis)


@pytest.mark.parametrize("make,degree,dim", [
    (lambda: fixtures.std_nonumbilic(10), 2, 1),  # only d/du
    (lambda: fixtures.tube_t1(4, 1, 17), 1, 3),
    (lambda: fixtures.tube_t1(4, 1, 17, 256), 1, 3),
    (lambda: fixtures.heisenberg(10, 256), 2, 8),
])
def test_symmetry_dimensions(make, degree, dim):
    assert polynomial_symmetries(make(), degree).dim == dim


@pytest.mark.parametrize("seed", range(3))
def test_random_nonumbilic_germ_has_no_symmetries(seed):
    assert polynomial_symmetries(O.random_nonumbilic(seed), 2).dim == 0
