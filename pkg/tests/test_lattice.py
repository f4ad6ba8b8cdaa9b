import pytest

from qlgft.lattice import (
    BadOrientation,
    ChainBreak,
    FixedPointInvolution,
    Lattice,
    ParseError,
    compose_multitangle,
    cut,
    diagram_signature,
    envelope_stats,
    format_lattice,
    paper_example_lattice,
    parse_lattice,
    stump,
    switch,
    triad,
)


def test_example_lattice_is_valid():
    lat = paper_example_lattice()
    assert len(lat.vertices) == 5
    assert len(lat.oriented_edges()) == 6


def test_fixed_point_involution_rejected():
    with pytest.raises(FixedPointInvolution):
        from qlgft.lattice import validate_lattice

        validate_lattice(Lattice((("v", ("e", "f")),), frozenset({"e"}), (("e", "e"), ("f", "f"))))


def test_orientation_with_both_halves_rejected():
    with pytest.raises(BadOrientation):
        Lattice.build({"v": ("e", "-e")}, {"e", "-e"})


@pytest.mark.parametrize(
    "verts, boundary, genus",
    [
        ({"v": ("-e", "e")}, 2, 0),
        ({"v": ("a", "b", "-a", "-b")}, 1, 1),
        ({"u": ("a",), "w": ("-a",)}, 1, 0),
    ],
)
def test_envelope(verts, boundary, genus):
    st = envelope_stats(Lattice.build(verts))
    assert (st.boundary_count, st.genus) == (boundary, genus)


def test_example_lattice_euler_characteristic():
    assert envelope_stats(paper_example_lattice()).euler_characteristic == -1


def test_switch_flips_orientation_only():
    lat = Lattice.build({"v": ("a", "b", "-a", "-b")})
    out = diagram_signature(lat, switch("a"))
    assert out.vertices == lat.vertices
    assert out.orientation == (lat.orientation - {"a"}) | {"-a"}


def test_triad_doubles_an_edge():
    lat = Lattice.build({"v": ("-e", "e")})
    out = diagram_signature(lat, triad("e"))
    assert out.vertex("v") == ("-e''", "-e'", "e'", "e''")


def test_cut_splits_a_vertex():
    lat = Lattice.build({"v": ("a", "b", "-a", "-b")})
    out = diagram_signature(lat, cut("v", 2, "v1", "v2"))
    assert out.vertex("v1") == ("a", "b") and out.vertex("v2") == ("-a", "-b")


def test_empty_chain_is_identity():
    lat = paper_example_lattice()
    assert compose_multitangle(lat, []).range.same_as(lat)


def test_triad_then_stump_keeps_second_copy():
    lat = Lattice.build({"v": ("-e", "e")})
    mt = compose_multitangle(lat, [triad("e"), stump("e'")])
    assert mt.range.vertex("v") == ("-e''", "e''")


def test_chain_break_reports_index():
    lat = Lattice.build({"u": ("e",), "w": ("-e",), "x": ("f", "-f")})
    with pytest.raises(ChainBreak) as info:
        compose_multitangle(lat, [stump("e"), switch("e")])
    assert info.value.index == 1


def test_lattice_file_round_trip():
    lat = paper_example_lattice()
    assert parse_lattice(format_lattice(lat)).same_as(lat)


def test_empty_vertex_line_is_a_parse_error():
    with pytest.raises(ParseError) as info:
        parse_lattice("vertex a: e\nvertex b:\n")
    assert info.value.line == 2
