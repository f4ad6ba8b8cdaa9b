from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlgft.scalars import LaurentPoly, RationalFn, T, eval_at_one, h_expand, parse_laurent

coeffs = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))
polys = st.dictionaries(st.integers(-6, 6), coeffs, max_size=4).map(LaurentPoly)
nonzero = st.builds(lambda p, e: p if p else LaurentPoly.monomial(e), polys, st.integers(-6, 6))


def t(n):
    return LaurentPoly.monomial(n)


def test_difference_of_squares():
    assert (T + t(-1)) * (T - t(-1)) == t(2) - t(-2)


def test_square_of_quantum_dimension():
    d = t(2) + t(-2)
    assert d * d == t(4) + 2 + t(-4)


def test_unit_is_identity():
    p = parse_laurent("3*t^-2 - 1/2 + t^5")
    assert LaurentPoly.const(1) * p == p


@pytest.mark.parametrize("p, value", [(t(2) + t(-2), 2), (t(3), 1), (LaurentPoly.const(0), 0)])
def test_eval_at_one(p, value):
    assert eval_at_one(p) == value


def test_h_expansion_of_t4():
    s = h_expand(t(4), 1)
    assert s.coeffs == (1, 1)


def test_h_expansion_of_constant_and_dimension():
    assert h_expand(LaurentPoly.const(1), 3).coeffs == (1, 0, 0, 0)
    assert h_expand(t(2) + t(-2), 2).coeffs == (2, 0, Fraction(1, 4))


def test_negative_truncation_order_rejected():
    with pytest.raises(ValueError):
        h_expand(T, -1)


def test_rendering_is_canonical():
    assert str(parse_laurent("t^2 + t^-2")) == "t^-2 + t^2"
    assert str(LaurentPoly.const(0)) == "0"


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentPoly.const(0)


@given(polys)
def test_parse_inverts_rendering(p):
    assert parse_laurent(str(p)) == p


@given(polys, polys)
def test_classical_limit_is_a_ring_map(a, b):
    assert eval_at_one(a * b) == eval_at_one(a) * eval_at_one(b)
    assert eval_at_one(a + b) == eval_at_one(a) + eval_at_one(b)


@given(polys, polys)
def test_bar_is_an_involutive_ring_map(a, b):
    assert (a * b).bar() == a.bar() * b.bar()
    assert a.bar().bar() == a


@settings(max_examples=50)
@given(polys, polys)
def test_h_expansion_is_multiplicative(a, b):
    assert h_expand(a * b, 4) == h_expand(a, 4) * h_expand(b, 4)


@given(polys, nonzero)
def test_rational_functions_cancel(a, b):
    r = RationalFn(a) / RationalFn(b)
    assert r * RationalFn(b) == RationalFn(a)
