import random

from hypothesis import given, settings
from hypothesis import strategies as st

from qlgft import skein
from qlgft.lattice import Lattice
from qlgft.scalars import LaurentPoly
from qlgft.skein import SkeinDiagram, SkeinElement, kink_factor, skein_product, skein_reduce, state_sum_bracket, zeta, zeta_compare
from qlgft.uqsl2 import E, F, K
from qlgft.wilson import QTangle, random_qtangle

t = LaurentPoly.monomial
DIM = t(2) + t(-2)
DISK = Lattice.build({"u": ["a"], "w": ["-a"]})
ANNULUS = Lattice.build({"v": ["-e", "e"]})
TORUS = Lattice.build({"v": ["a", "b", "-a", "-b"]})
TREFOIL = QTangle.loop("a.1 -a.2 a.3 -a.4", {"w": [-1, 2, 2]})
MIRROR = QTangle.loop("a.1 -a.2 a.3 -a.4", {"w": [1, -2, -2]})


def single_key(lat, word):
    (key, _, _), = skein_reduce(QTangle.loop(word), lat).terms
    return key


def test_contractible_circle():
    assert skein_reduce(QTangle.loop("a -a"), DISK).coefficient(()) == -DIM


def test_kink_factor():
    assert kink_factor() == t(3)


def test_trefoil_matches_textbook_bracket():
    # <trefoil> = (-A^5 - A^-3 + A^-7) <O>, <O> = -A^2 - A^-2, at A = -t
    A = LaurentPoly.monomial(1, -1)
    Ainv = LaurentPoly.monomial(-1, -1)
    circle = -(A * A) - Ainv * Ainv
    left = (-(A ** 5) - Ainv ** 3 + Ainv ** 7) * circle
    right = (-(Ainv ** 5) - A ** 3 + A ** 7) * circle
    got = {skein_reduce(TREFOIL, DISK).coefficient(()), skein_reduce(MIRROR, DISK).coefficient(())}
    assert got == {left, right}
    assert skein_reduce(TREFOIL, DISK).coefficient(()) != skein_reduce(MIRROR, DISK).coefficient(())


def test_trefoil_matches_state_sum():
    for L in (TREFOIL, MIRROR):
        assert skein_reduce(L, DISK).coefficient(()) == state_sum_bracket(SkeinDiagram.from_qtangle(DISK, L))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_disk_diagrams_match_state_sum(seed):
    L = random_qtangle(DISK, random.Random(seed), 4, 3, components=1)
    red = skein_reduce(L, DISK)
    assert [k for k, _, _ in red.terms] in ([()], [])
    assert red.coefficient(()) == state_sum_bracket(SkeinDiagram.from_qtangle(DISK, L))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 50))
def test_resolution_order_is_irrelevant(seed, order):
    lat = [ANNULUS, TORUS][seed % 2]
    L = random_qtangle(lat, random.Random(seed), 3, 3)
    assert skein_reduce(L, lat, order=order).same_as(skein_reduce(L, lat))


def test_core_powers_add():
    z = skein_reduce(QTangle.loop("e"), ANNULUS)
    z2 = skein_product(z, z)
    assert z2.same_as(skein_reduce(QTangle.of({"A": "e.1", "B": "e.2"}), ANNULUS))
    assert skein_product(z, z2).same_as(skein_product(z2, z))
    assert skein_product(z, z2).same_as(skein_reduce(QTangle.of({"A": "e.1", "B": "e.2", "C": "e.3"}), ANNULUS))


def test_empty_is_the_unit():
    a = skein_reduce(QTangle.loop("a"), TORUS)
    one = SkeinElement.empty(TORUS)
    assert skein_product(one, a).same_as(a) and skein_product(a, one).same_as(a)


def test_torus_curves_do_not_commute():
    """a*b and b*a swap the weights -t, -t^-1 on the two diagonal curves."""
    a, b = skein_reduce(QTangle.loop("a"), TORUS), skein_reduce(QTangle.loop("b"), TORUS)
    ab, ba = skein_product(a, b), skein_product(b, a)
    d1, d2 = single_key(TORUS, "-a -b"), single_key(TORUS, "-a b")
    assert {(ab.coefficient(d1), ab.coefficient(d2)), (ba.coefficient(d1), ba.coefficient(d2))} == {(-t(-1), -t(1)), (-t(1), -t(-1))}
    assert not ab.same_as(ba)


def test_zeta_on_small_cases():
    assert zeta(QTangle.loop("a -a"), DISK, {}) == -DIM
    assert zeta_compare(QTangle.loop("a -a"), {}, DISK).ok
    assert zeta(QTangle(()), DISK, {}) == 1


def conn(lat, rng):
    return {e: K ** rng.randint(-2, 2) + rng.randint(-2, 2) * E + rng.randint(-2, 2) * F for e in lat.oriented_edges()}


def crossing_diagrams(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        lat = [ANNULUS, TORUS][len(out) % 2]
        L = random_qtangle(lat, rng, 3, 2, components=rng.choice([1, 2]))
        if L.crossing_count():
            out.append((lat, L, conn(lat, rng)))
    return out


def test_zeta_agrees_on_crossing_diagrams():
    for lat, L, c in crossing_diagrams(12, 3):
        assert zeta_compare(L, c, lat).ok


def test_flipped_smoothing_convention_is_detected(monkeypatch):
    monkeypatch.setattr(skein, "T1", t(-1))
    monkeypatch.setattr(skein, "TINV", t(1))
    bad = sum(not zeta_compare(L, c, lat).ok for lat, L, c in crossing_diagrams(12, 3))
    assert bad > 0
