import pytest

from qlgft import moves
from qlgft.connection import ConnectionState, evaluate_multitangle
from qlgft.finite_hopf import Group, build_drinfeld_double, build_group_algebra
from qlgft.lattice import Lattice, compose_multitangle, cross

DS3 = build_drinfeld_double(Group.symmetric(3))
KS3 = build_group_algebra(Group.symmetric(3))
LEG = Lattice.build({"u": ("a",), "w": ("-a",)})


def test_every_move_has_cases():
    for name in moves.MOVES:
        assert moves.move_cases(name), name


def test_yang_baxter_over_double():
    rep = moves.move_invariance_check("R1", DS3, samples=20)
    assert rep.ok, str(rep)
    assert rep.evaluations > 0


def test_parallel_crossing_slide_on_group_algebra():
    assert moves.move_invariance_check("A2", KS3).ok


@pytest.mark.parametrize("kink", [moves.right_kink, moves.left_kink])
@pytest.mark.parametrize("sign", [1, -1])
def test_kinks_multiply_by_the_ribbon_element(kink, sign):
    mt = compose_multitangle(LEG, kink(LEG, "a", sign, "c"))
    assert mt.range.same_as(LEG)
    twist = DS3.theta_inv if sign > 0 else DS3.theta
    for x in ConnectionState.sample_basis(LEG, DS3, 25, seed=4):
        ((k,), _), = x.data.items()
        want = {(i,): c for i, c in DS3.mul({k: 1}, twist).items()}
        assert evaluate_multitangle(mt, x).data == want


def test_harness_detects_a_false_move(monkeypatch):
    """Replacing a crossing by its inverse is not a valid move over D(S3)."""

    def wrong(lat):
        for v, i, (h1, h2) in moves._adjacent(lat, 2):
            yield f"{v}:{h1},{h2}", [cross(1, h1, h2)], [cross(-1, h1, h2)], {}

    monkeypatch.setitem(moves.MOVES, "WRONG", wrong)
    assert not moves.move_invariance_check("WRONG", DS3, samples=10).ok
    assert moves.move_invariance_check("WRONG", KS3, samples=10).ok
