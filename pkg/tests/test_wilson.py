import random

import pytest

from qlgft.connection import ConnectionState, evaluate_multitangle
from qlgft.finite_hopf import Group, build_drinfeld_double, build_group_algebra, rational_characters
from qlgft.lattice import Lattice, compose_multitangle, paper_example_lattice
from qlgft.scalars import LaurentPoly
from qlgft.skein import skein_reduce
from qlgft.uqsl2 import E, F, K
from qlgft.wilson import (
    ColorMismatch,
    MalformedTangle,
    QTangle,
    canonical_word,
    compile_multitangle,
    compile_qtangle,
    eval_wilson,
    evaluate_multitangle_fundamental,
    format_tangle,
    parse_tangle,
    random_qtangle,
    reverse_component,
    stack_product,
    star_value,
)

t = LaurentPoly.monomial
DIM = t(2) + t(-2)
DISK = Lattice.build({"u": ["a"], "w": ["-a"]})
ANNULUS = Lattice.build({"v": ["-e", "e"]})
TORUS = Lattice.build({"v": ["a", "b", "-a", "-b"]})
S3 = Group.symmetric(3)
KS3 = build_group_algebra(S3)
BOWTIE = QTangle.loop("e4.1 -e5.2 e6.1 e4.2 -e5.1 e6.2 e1 e2 e3", {"c": [2, -4]})


def W(lat, L, conn=None, mode="uq"):
    return eval_wilson(compile_qtangle(lat, L), conn or {}, mode)


def test_bowtie_word():
    prog = compile_qtangle(paper_example_lattice(), BOWTIE)
    assert prog.word("L") == "t1 x4' k S(x5''k) k x6' k t2 x4'' k S(x5'k) k x6'' S^2(s2) k s1 x1 x2 x3"
    word, blocks = canonical_word(prog)
    assert word == "t1 X' k t2 X'' k s2 s1 Y"
    assert blocks == {"X": "x4 S(x5) k x6", "Y": "x1 x2 x3"}


def test_crossingless_loop_is_a_plain_product():
    prog = compile_qtangle(paper_example_lattice(), QTangle.loop("e1 e2 e3"))
    assert prog.word("L") == "x1 x2 x3"


def test_annulus_core_charm_depends_on_cilium_side():
    conn = {"e": K + E}
    assert W(ANNULUS, QTangle.loop("e"), conn) == t(2) + t(-2)  # tr(K)
    assert W(ANNULUS, QTangle.loop("e")) == 2
    flipped = Lattice.build({"v": ["e", "-e"]})
    assert compile_qtangle(flipped, QTangle.loop("e")).word("L") == "x[e] k"
    assert W(flipped, QTangle.loop("e")) == DIM


def test_unknot_and_kinks():
    assert W(DISK, QTangle.loop("a -a")) == DIM
    assert W(DISK, QTangle.loop("a -a", {"w": [-1]})) == t(3) * DIM
    assert W(DISK, QTangle.loop("a -a", {"w": [1]})) == t(-3) * DIM


def test_character_color_on_group_algebra():
    chars = rational_characters(S3)
    lat = TORUS
    L = QTangle.loop("-a -b a b", color="chi_2")
    for ga in range(6):
        for gb in range(6):
            w = S3.mul(S3.mul(S3.inv(ga), S3.inv(gb)), S3.mul(ga, gb))
            assert W(lat, L, {"a": {ga: 1}, "b": {gb: 1}}, KS3) == chars[2][w]


def test_character_color_needs_a_group_algebra():
    with pytest.raises(ColorMismatch):
        W(TORUS, QTangle.loop("a", color="chi_1"), {}, build_drinfeld_double(Group.cyclic(2)))


def test_reversal():
    L = QTangle.loop("a -a")
    R = reverse_component(DISK, L, "L")
    assert W(DISK, R) == DIM
    assert format_tangle(reverse_component(DISK, R, "L")) == format_tangle(L)
    for g in range(6):
        for h in range(6):
            conn = {"a": {g: 1}, "b": {h: 1}}
            T = QTangle.loop("a b", color="chi_2")
            chi = rational_characters(S3)[2]
            assert W(TORUS, T, conn, KS3) == chi[S3.mul(g, h)]
            assert W(TORUS, reverse_component(TORUS, T, "L"), conn, KS3) == chi[S3.inv(S3.mul(g, h))]


def test_stack_with_empty_tangle_is_identity():
    L = QTangle.loop("-a -b a b")
    empty = QTangle(())
    conn = {"a": K + E, "b": K ** -1 + F}
    assert W(TORUS, stack_product(TORUS, L, empty), conn) == W(TORUS, L, conn)
    assert W(TORUS, stack_product(TORUS, empty, L), conn) == W(TORUS, L, conn)


def test_core_times_core_is_two_parallel_cores():
    core = QTangle.loop("e")
    two = QTangle.of({"A": "e.1", "B": "e.2"})
    assert skein_reduce(stack_product(ANNULUS, core, core), ANNULUS).same_as(skein_reduce(two, ANNULUS))


def uq_conn(lat, rng):
    return {e: K ** rng.randint(-2, 2) + rng.randint(-1, 1) * E + rng.randint(-1, 1) * F for e in lat.oriented_edges()}


@pytest.mark.parametrize("lat", [DISK, ANNULUS, TORUS, paper_example_lattice()], ids=["disk", "annulus", "torus", "bowtie"])
def test_traversal_matches_diagram_chain_quantum(lat):
    rng = random.Random(11)
    for _ in range(6):
        L = random_qtangle(lat, rng, 3, 2, components=rng.choice([1, 2]))
        conn = uq_conn(lat, rng)
        mt = compose_multitangle(lat, compile_multitangle(lat, L))
        assert W(lat, L, conn) == evaluate_multitangle_fundamental(mt, conn), format_tangle(L)


@pytest.mark.parametrize("H", [KS3, build_drinfeld_double(Group.cyclic(2))], ids=lambda H: H.name)
def test_traversal_matches_diagram_chain_finite(H):
    rng = random.Random(12)
    for lat in (ANNULUS, TORUS):
        for _ in range(5):
            L = random_qtangle(lat, rng, 3, 1)
            conn = {e: {rng.randrange(H.dim): 1} for e in lat.oriented_edges()}
            mt = compose_multitangle(lat, compile_multitangle(lat, L, H))
            chain = evaluate_multitangle(mt, ConnectionState.simple(lat, H, conn)).data.get((), 0)
            assert W(lat, L, conn, H) == chain, format_tangle(L)


@pytest.mark.parametrize("lat", [ANNULUS, TORUS], ids=["annulus", "torus"])
def test_stacking_is_the_star_product(lat):
    rng = random.Random(5)
    for _ in range(3):
        L, Lp = random_qtangle(lat, rng, 2, 1), random_qtangle(lat, rng, 2, 1)
        conn = uq_conn(lat, rng)
        assert W(lat, stack_product(lat, L, Lp), conn) == star_value(lat, L, Lp, conn)
        g = {e: {rng.randrange(6): 1} for e in lat.oriented_edges()}
        assert W(lat, stack_product(lat, L, Lp), g, KS3) == star_value(lat, L, Lp, g, KS3)


def test_contraction_order_is_irrelevant():
    lat = paper_example_lattice()
    prog = compile_qtangle(lat, BOWTIE)
    conn = {e: K + E for e in lat.oriented_edges()}
    base = eval_wilson(prog, conn)
    for seed in range(4):
        assert eval_wilson(prog, conn, order=seed) == base


def test_tangle_file_round_trip():
    text = format_tangle(BOWTIE)
    assert format_tangle(parse_tangle(text, paper_example_lattice())) == text


def test_unknown_edge_rejected():
    with pytest.raises(MalformedTangle):
        parse_tangle("component L closed : q\n", ANNULUS)


def test_walk_must_be_connected():
    with pytest.raises(MalformedTangle):
        compile_qtangle(TORUS, QTangle.loop("a a -b"))
