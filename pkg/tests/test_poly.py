from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matquad import poly as P

frac = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))
polys = st.lists(frac, max_size=6).map(P.trim)
nonzero = polys.filter(bool)
roots = st.lists(st.integers(-4, 4).map(Fraction), min_size=1, max_size=5)


def test_examples():
    assert P.mul([1, 1], [-1, 1]) == [-1, 0, 1]
    assert P.from_roots([Fraction(2)] * 3) == [-8, 12, -6, 1]
    assert P.shift([0, 0, 1], 1) == [1, 2, 1]
    assert P.format_poly([Fraction(-1, 10), 0, Fraction(1, 10), 1]) == "x^3 + 1/10*x^2 - 1/10"
    assert P.format_poly([]) == "0"


@settings(max_examples=100, deadline=None)
@given(polys, nonzero)
def test_divmod_round_trip(a, b):
    q, r = P.divmod_poly(a, b)
    assert P.add(P.mul(q, b), r) == P.trim(a)
    assert len(r) < len(b)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        P.divmod_poly([1], [])


@settings(max_examples=100, deadline=None)
@given(nonzero, nonzero, nonzero)
def test_gcd_recovers_common_factor(a, b, c):
    g = P.gcd(P.mul(a, c), P.mul(b, c))
    assert P.divmod_poly(g, P.monic(c))[1] == []
    assert P.divmod_poly(P.mul(a, c), g)[1] == []


@settings(max_examples=100, deadline=None)
@given(roots, st.integers(-3, 3))
def test_order_at_counts_planted_root(rs, t):
    t = Fraction(t)
    a = P.from_roots(rs)
    k, cof = P.order_at(a, t)
    assert k == rs.count(t)
    assert P.evaluate(cof, t) != 0
    assert P.mul(P.power([-t, 1], k), cof) == a


@settings(max_examples=100, deadline=None)
@given(roots)
def test_square_free_reconstruction(rs):
    a = P.from_roots(rs)
    parts = P.square_free_decomposition(a)
    acc = [Fraction(1)]
    for f, mult in parts:
        assert P.gcd(f, P.derivative(f)) == [1]
        acc = P.mul(acc, P.power(f, mult))
    assert acc == a
    for r in set(rs):
        hit = [mult for f, mult in parts if P.evaluate(f, r) == 0]
        assert hit == [rs.count(r)]


@settings(max_examples=100, deadline=None)
@given(polys, frac, frac)
def test_shift_composes_and_evaluates(a, s, t):
    assert P.shift(P.shift(a, s), t) == P.shift(a, s + t)
    x = Fraction(3, 7)
    assert P.evaluate(P.shift(a, t), x) == P.evaluate(a, x + t)


@settings(max_examples=60, deadline=None)
@given(nonzero)
def test_interpolation_reproduces(a):
    xs = [Fraction(k, 2) for k in range(len(a))]
    assert P.interpolate(xs, [P.evaluate(a, x) for x in xs]) == a


def test_matrix_det_with_fractions():
    half = Fraction(1, 2)
    assert P.matrix_det([[[0, half], []], [[], [0, 2]]]) == [0, 0, 1]
    assert P.matrix_det([]) == [1]


def test_to_integer():
    ints, den = P.to_integer([Fraction(1, 2), Fraction(2, 3)])
    assert (ints, den) == ([3, 4], 6)
