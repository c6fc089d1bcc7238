from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmnf.scalar import ModeMismatch, Scalar
from cmnf.series import HoloSeries2, Series3, SeriesParseError, SingularLinearPart, invert_map

import oracles as O

T = 6
small = st.fractions(min_value=-3, max_value=3, max_denominator=5)
cplx = st.tuples(small, small)
idx = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2)).filter(lambda i: O.wt(i) <= T)
series = st.dictionaries(idx, cplx, max_size=6).map(lambda d: Series3(d, T))


@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Series3.zero(T)
    assert a * Series3.constant(1, T) == a


@given(series, series)
def test_conj_is_an_involution_and_multiplicative(a, b):
    assert a.conj_real().conj_real() == a
    assert (a * b).conj_real() == a.conj_real() * b.conj_real()
    re = a.real_part()
    assert re.conj_real() == re


@given(series, series)
def test_product_matches_oracle(a, b):
    ref = O.pmul(O.from_series(a), O.from_series(b), T)
    assert O.from_series(a * b) == ref


def test_weighted_truncation_drops_heavy_terms():
    s = Series3({(2, 0, 0): 1, (0, 0, 2): 1, (1, 0, 2): 1}, 4)
    assert (1, 0, 2) not in s.coeffs
    assert set((s * s).coeffs) == {(4, 0, 0)}  # z^2 u^2 and u^4 exceed weight 4
    assert Series3.var("u", 4).trunc == 4


def test_mixed_sum_takes_smaller_order():
    a = Series3({(1, 1, 0): 1}, 8)
    b = Series3({(3, 3, 0): 1}, 5)
    assert (a + b).trunc == 5
    assert (3, 3, 0) not in (a + b).coeffs


def test_mode_mismatch_is_refused():
    a = Series3({(1, 0, 0): 1}, 4)
    b = a.to_mode(128)
    with pytest.raises(ModeMismatch):
        a + b
    with pytest.raises(ModeMismatch):
        b.to_mode(None)


def test_derivative_examples():
    s = Series3({(3, 1, 2): 2, (0, 0, 1): 1}, 10)
    assert s.derivative(0) == Series3({(2, 1, 2): 6}, 9)
    assert s.derivative(2) == Series3({(3, 1, 1): 4, (0, 0, 0): 1}, 8)


def test_text_round_trip_exact_and_float():
    s = Series3({(1, 1, 0): 1, (2, 1, 1): (Fraction(1, 3), Fraction(-2, 7))}, 9)
    assert Series3.loads(s.dumps()) == s
    f = s.to_mode(256)
    g = Series3.loads(f.dumps(), 256)
    assert g.max_diff(f) < 1e-70


@pytest.mark.parametrize("text", [
    "coeff 1 1 0 1 0\n",                       # no order line
    "order 4\ncoeff 1 1 0 1\n",                # short line
    "order 4\ncoeff 3 3 0 1 0\n",              # above order
    "order 4\ncoeff 1 1 0 1 0\ncoeff 1 1 0 2 0\n",
    "order 4\ncoeff 1 1 0 1/0 0\n",
])
def test_parse_errors(text):
    with pytest.raises(SeriesParseError):
        Series3.loads(text)


@pytest.mark.parametrize("n", [6, 9, 12])
def test_inverse_of_quadratic_map_has_catalan_coefficients(n):
    # z -> z + z^2 inverts to sum (-1)^(k-1) C_(k-1) z^k
    m = (Series3({(1, 0, 0): 1, (2, 0, 0): 1}, n),
         Series3({(0, 1, 0): 1, (0, 2, 0): 1}, n),
         Series3.var("u", n))
    inv = invert_map(m)
    for k in range(1, n + 1):
        cat = comb(2 * (k - 1), k - 1) // k
        assert inv[0][(k, 0, 0)] == Scalar((-1) ** (k - 1) * cat)
        assert inv[1][(0, k, 0)] == Scalar((-1) ** (k - 1) * cat)
    assert inv[2] == Series3.var("u", inv[2].trunc)


@pytest.mark.parametrize("seed", range(5))
def test_inverse_round_trip_via_substitute(seed):
    rng = O.seeded(100 + seed)
    m = [O.to_series(p, 7) for p in O.random_graded_map(rng, 7, 0.25)]
    inv = invert_map(m)
    for i, comp in enumerate(m):
        back = comp.substitute(*inv)
        assert back == Series3.var(("z", "zbar", "u")[i], back.trunc)


def test_singular_linear_part():
    m = (Series3.var("z", 6), Series3.var("zbar", 6), Series3({(1, 1, 0): 1}, 6))
    with pytest.raises(SingularLinearPart):
        invert_map(m)


@given(series, series)
def test_exact_and_float_agree(a, b):
    exact = (a * b + a).to_mode(256)
    flt = a.to_mode(256) * b.to_mode(256) + a.to_mode(256)
    assert exact.max_diff(flt) < 1e-60


def test_holo_series_on_surface():
    h = HoloSeries2({(1, 0): 1, (0, 1): 2}, None)
    z = Series3.var("z", 6)
    w = Series3.var("u", 6) + Series3({(1, 1, 0): (0, 1)}, 6)
    assert h.on_surface(z, w) == Series3({(1, 0, 0): 1, (0, 0, 1): 2, (1, 1, 0): (0, 2)}, 6)
