import itertools
import random

import pytest

from qlgft import connection as cx
from qlgft.connection import ConnectionState, GaugeElement, GaugeField
from qlgft.finite_hopf import Group, build_drinfeld_double, build_group_algebra
from qlgft.lattice import Lattice, compose_multitangle, cross, stump, switch

S3, Z3 = Group.symmetric(3), Group.cyclic(3)
KS3, KZ3 = build_group_algebra(S3), build_group_algebra(Z3)
DZ2, DS3 = build_drinfeld_double(Group.cyclic(2)), build_drinfeld_double(S3)
LOOP = Lattice.build({"v": ("e", "-e")})


def state(lat, H, **values):
    return ConnectionState.basis(lat, H, values)


def test_gauge_action_conjugates_a_loop():
    for g, x in itertools.product(range(6), repeat=2):
        y = GaugeElement.at(LOOP, KS3, "v", {g: 1})
        out = cx.gauge_act(y, state(LOOP, KS3, e=x))
        assert out.same_as(state(LOOP, KS3, e=S3.mul(S3.mul(g, x), S3.inv(g))))


def test_unit_gauge_acts_trivially():
    for x in ConnectionState.all_basis(LOOP, DZ2):
        assert cx.gauge_act(GaugeElement.at(LOOP, DZ2, "v", DZ2.unit), x).same_as(x)


def test_integral_projects_onto_invariants():
    f = GaugeField.coordinate(LOOP, DZ2, (1,))
    p = cx.project_observable(f)
    assert cx.is_observable(p)
    assert cx.project_observable(p) == p


def test_switch_inverts_group_elements():
    lat = Lattice.build({"u": ("a",), "w": ("-a",)})
    mt = compose_multitangle(lat, [switch("a")])
    for g in range(6):
        out = cx.evaluate_multitangle(mt, state(lat, KS3, a=g))
        assert out.data == {(S3.inv(g),): 1}


def test_stump_removes_edge_with_counit():
    lat = Lattice.build({"u": ("a", "b"), "w": ("-a", "-b")})
    mt = compose_multitangle(lat, [stump("a")])
    out = cx.evaluate_multitangle(mt, state(lat, KS3, a=3, b=4))
    assert out.edges == ("b",) and out.data == {(4,): 1}


def test_crossing_on_group_algebra_only_reorders_strands():
    lat = Lattice.build({"u": ("a", "b"), "w": ("-a", "-b")})
    mt = compose_multitangle(lat, [cross(1, "a", "b")])
    assert mt.range.vertex("u") == ("b", "a")
    for x in ConnectionState.all_basis(lat, KS3):
        assert cx.evaluate_multitangle(mt, x).data == x.reorder(cx.evaluate_multitangle(mt, x).edges).data


def test_nabla_on_smallest_loop_lattice():
    kinds = [s.kind for s in cx.nabla(LOOP).steps]
    assert kinds.count("triad") == 1 and kinds.count("cut") == 1
    assert {s.args[0] for s in cx.nabla(LOOP).steps if s.kind == "cross"} == {1}


def test_nabla_copies_group_elements():
    lat = Lattice.build({"v": ("a", "b", "-a", "-b")})
    N = cx.nabla(lat)
    for x in ConnectionState.sample_basis(lat, KS3, 10, seed=1):
        (key,) = x.data
        out = cx.evaluate_multitangle(N, x).reorder(("a'", "b'", "a''", "b''"))
        assert out.data == {key + key: 1}


@pytest.mark.parametrize("H", [KS3, DZ2], ids=lambda H: H.name)
def test_coalgebra_laws_on_a_torus(H):
    lat = Lattice.build({"v": ("a", "b", "-a", "-b")})
    for x in ConnectionState.sample_basis(lat, H, 12, seed=2):
        assert cx.counit_defect(lat, x) is None
        assert cx.coassociativity_defect(lat, x) is None


def random_field(lat, H, rng):
    return GaugeField(lat, H, lat.oriented_edges(), {k: rng.randint(-2, 2) for k in itertools.product(range(H.dim), repeat=len(lat.oriented_edges()))})


def test_counit_is_unit_for_star():
    rng = random.Random(0)
    f = random_field(LOOP, DZ2, rng)
    assert cx.star(cx.counit_field(LOOP, DZ2), f) == f
    assert cx.star(f, cx.counit_field(LOOP, DZ2)) == f


def test_star_is_pointwise_on_group_algebra():
    rng = random.Random(1)
    f, g = random_field(LOOP, KS3, rng), random_field(LOOP, KS3, rng)
    h = cx.star(f, g)
    for x in ConnectionState.all_basis(LOOP, KS3):
        assert h(x) == f(x) * g(x)


def test_star_is_associative_over_the_double():
    rng = random.Random(2)
    f, g, h = (cx.project_observable(random_field(LOOP, DZ2, rng)) for _ in range(3))
    assert cx.star(cx.star(f, g), h) == cx.star(f, cx.star(g, h))


def test_class_function_is_observable():
    chi = GaugeField.from_function(LOOP, KZ3, lambda x: 1 if next(iter(x.data)) == (1,) else 0)
    assert cx.is_observable(chi)


def test_coordinate_on_non_singleton_orbit_is_not_observable():
    transposition = S3.index("213")
    assert not cx.is_observable(GaugeField.coordinate(LOOP, KS3, (transposition,)))


def test_gauge_equivalence():
    x = state(LOOP, KS3, e=S3.index("213"))
    assert cx.gauge_equivalent(x, x)
    assert cx.gauge_equivalent(x, state(LOOP, KS3, e=S3.index("132")))
    assert not cx.gauge_equivalent(state(LOOP, KZ3, e=1), state(LOOP, KZ3, e=0))


@pytest.mark.parametrize("H", [KS3, DZ2], ids=lambda H: H.name)
def test_gauge_equivalence_agrees_with_explicit_span(H):
    states = list(ConnectionState.all_basis(LOOP, H))
    for x, y in itertools.product(states, repeat=2):
        assert cx.gauge_equivalent(x, y) == cx.gauge_equivalent_by_span(x, y)


@pytest.mark.parametrize("H", [DZ2, DS3], ids=lambda H: H.name)
def test_full_toggle_turn_is_inverse_twist(H):
    lat = Lattice.build({"u": ("a", "b", "c"), "w": ("-c", "-b", "-a")})
    one = ConnectionState.simple(lat, H, {})
    got = cx.evaluate_multitangle(cx.toggle_power(lat, "u"), one).reorder(("a", "b", "c"))
    assert got.data == {k: c for k, c in H.coproduct_power(H.theta_inv, 3).items() if c}


def test_switch_is_an_involution():
    lat = Lattice.build({"v": ("a", "b", "-a", "-b")})
    mt = compose_multitangle(lat, [switch("a"), switch("-a")])
    for x in ConnectionState.all_basis(lat, DZ2):
        assert cx.evaluate_multitangle(mt, x).same_as(x)


def test_push_on_grouplike_connections():
    lat = Lattice.build({"u": ("-e1", "-e2", "e0"), "v0": ("-e0", "e1", "e2")})
    mt = cx.push(lat, "e0")
    assert mt.range.same_as(lat)
    for x0, y1, y2 in itertools.product(range(6), repeat=3):
        out = cx.evaluate_multitangle(mt, state(lat, KS3, e0=x0, e1=y1, e2=y2))
        want = state(lat, KS3, e0=S3.identity, e1=S3.mul(x0, y1), e2=S3.mul(x0, y2))
        assert out.same_as(want)


def test_push_is_invisible_to_observables():
    lat = Lattice.build({"u": ("-e1", "-e2", "e0"), "v0": ("-e0", "e1", "e2")})
    assert cx.push_invisibility_defects(lat, "e0", DZ2) == []


def test_cycle_enumeration_is_nonempty_and_closed():
    lat = Lattice.build({"u": ("a", "-b", "c"), "w": ("-c", "b", "-a")})
    cycles = cx.toggle_switch_cycles(lat, "u")
    assert (("T", 1),) * 3 in cycles
    for word in cycles:
        assert cx.cycle_multitangle(lat, "u", word).range.same_as(lat)
