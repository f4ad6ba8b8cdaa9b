import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qlgft.scalars import LaurentPoly
from qlgft.tensor import LabeledTensor, contract, self_trace


def arr(values, shape):
    return np.array([LaurentPoly({e: c}) for e, c in values], dtype=object).reshape(shape)


entries = st.lists(st.tuples(st.integers(-3, 3), st.integers(-4, 4)), min_size=8, max_size=8)


@settings(max_examples=30, deadline=None)
@given(entries, entries, entries, st.integers(0, 1000))
def test_contraction_order_does_not_change_the_result(a, b, c, seed):
    net = [
        LabeledTensor(arr(a, (2, 2, 2)), ("i", "j", "k")),
        LabeledTensor(arr(b, (2, 2, 2)), ("j", "l", "m")),
        LabeledTensor(arr(c, (2, 2, 2)), ("k", "l", "n")),
    ]
    greedy = contract(net, ("i", "m", "n"))
    shuffled = contract(net, ("i", "m", "n"), order=seed)
    assert (greedy == shuffled).all()


@settings(max_examples=30, deadline=None)
@given(entries, entries)
def test_matrix_product_as_contraction(a, b):
    A, B = arr(a[:4], (2, 2)), arr(b[:4], (2, 2))
    got = contract([LabeledTensor(A, ("i", "j")), LabeledTensor(B, ("j", "k"))], ("i", "k"))
    assert (got == A.dot(B)).all()


def test_self_trace_is_the_matrix_trace():
    A = arr([(1, 1), (0, 2), (0, 3), (-1, 4)], (2, 2))
    out = self_trace(LabeledTensor(A, ("i", "i")))
    assert out.labels == () and out.data == A[0, 0] + A[1, 1]


def test_disconnected_pieces_form_an_outer_product():
    u = arr([(0, 1), (0, 2)], (2,))
    v = arr([(1, 3), (0, 1)], (2,))
    got = contract([LabeledTensor(u, ("a",)), LabeledTensor(v, ("b",))], ("a", "b"))
    assert (got == np.multiply.outer(u, v)).all()
