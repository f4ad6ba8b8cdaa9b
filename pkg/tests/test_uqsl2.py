from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qlgft.scalars import LaurentPoly, RationalFn
from qlgft.uqsl2 import (
    FUND,
    E,
    F,
    K,
    Kinv,
    UqElement,
    antipode,
    coproduct_power,
    counit,
    fundamental_tensor,
    matrix_antipode,
    one,
    parse_uq,
    pbw_normalize,
    quantum_ch_residual,
    rho,
    trace,
    universal_r,
)

t = LaurentPoly.monomial


def lp_matrix(rows):
    return np.array([[LaurentPoly.coerce(c) for c in r] for r in rows], dtype=object)


def mat_eq(A, B):
    return all(LaurentPoly.coerce(RationalFn.coerce(a).as_laurent()) == LaurentPoly.coerce(RationalFn.coerce(b).as_laurent())
               for a, b in zip(np.ravel(A), np.ravel(B)))


letters = st.lists(st.sampled_from(["E", "F", "K", "K^-1"]), max_size=4)
words = st.lists(st.tuples(st.integers(-2, 2), letters), min_size=1, max_size=3).map(pbw_normalize)


def test_normalize_unit():
    assert pbw_normalize(["1"]) == one()


def test_commutator_relation():
    q = RationalFn(t(2))
    rhs = F * E + UqElement.scalar(RationalFn(1) / (q - q.inverse())) * (K - Kinv)
    assert E * F == rhs


def test_k_conjugation():
    assert K * E * Kinv == UqElement.scalar(t(4)) * E


def test_k_is_grouplike():
    (key, c), = coproduct_power(K, 2).items()
    assert key == ((0, 1, 0), (0, 1, 0)) and c == 1


def test_first_coproduct_power_is_identity():
    x = parse_uq("(t^2)*K*E + F")
    assert coproduct_power(x, 1) == {(m,): c for m, c in x.terms.items()}


def test_antipode_of_unit_and_k():
    assert antipode(one()) == one()
    assert antipode(K) == Kinv


def test_fundamental_tensors():
    assert mat_eq(fundamental_tensor(E, 1), lp_matrix([[0, 1], [0, 0]]))
    assert mat_eq(fundamental_tensor(one(), 2), lp_matrix(np.eye(4, dtype=int).tolist()))
    want = np.diag([t(4), t(0), t(0), t(-4)])
    assert mat_eq(fundamental_tensor(K, 2), want)


def test_ribbon_constants():
    assert FUND.theta == t(-3)
    assert mat_eq(FUND.k, np.diag([t(2), t(-2)]))
    assert FUND.quantum_dimension == t(2) + t(-2)


def test_universal_r_matches_fundamental_r():
    assert mat_eq(universal_r(1, 1), FUND.R)


def test_ch_on_identities():
    I = lp_matrix([[1, 0], [0, 1]])
    assert quantum_ch_residual(I, I).is_zero()
    # both sides are t tr(1) + t^-1 tr(S(1)) = 2t + 2t^-1
    assert t(1) * 2 + t(-1) * 2 == t(1) * trace(I) + t(-1) * trace(matrix_antipode(I))


def test_ch_classical_example():
    A = np.array([[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]], dtype=object)
    B = np.array([[Fraction(1), Fraction(0)], [Fraction(1), Fraction(1)]], dtype=object)
    Ainv = np.array([[1, -1], [0, 1]], dtype=object)
    assert (np.trace(A.dot(B)), np.trace(Ainv.dot(B))) == (3, 1)
    assert np.trace(A.dot(B)) + np.trace(Ainv.dot(B)) == np.trace(A) * np.trace(B)


def test_parse_matches_constructors():
    assert parse_uq("(t^2)*K*E + F") == UqElement.scalar(t(2)) * K * E + F


@settings(max_examples=40, deadline=None)
@given(words, words)
def test_representation_is_multiplicative(x, y):
    assert mat_eq(rho(x * y), rho(x).dot(rho(y)))


@settings(max_examples=40, deadline=None)
@given(words)
def test_matrix_antipode_matches_algebra_antipode(x):
    assert mat_eq(rho(antipode(x)), matrix_antipode(rho(x)))


@settings(max_examples=30, deadline=None)
@given(words)
def test_counit_law(x):
    acc = UqElement()
    for (m1, m2), c in coproduct_power(x, 2).items():
        acc = acc + UqElement.scalar(c * counit(UqElement.monomial(*m1))) * UqElement.monomial(*m2)
    assert acc == x


@settings(max_examples=30, deadline=None)
@given(words, words)
def test_antipode_reverses_products(x, y):
    assert antipode(x * y) == antipode(y) * antipode(x)
