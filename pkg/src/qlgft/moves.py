"""Catalogue of two-sided multitangle moves and an evaluation harness.

Every move is generated over a pool of small domain lattices, every
applicable position, both crossing signs and both orientations of any
edge created on the way. A move holds for a backend when both sides reach
the same range lattice and agree on every basis connection checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .connection import ConnectionState, evaluate_multitangle
from .finite_hopf import FiniteHopfBackend
from .lattice import (
    Lattice,
    Step,
    cap,
    cap_join_name,
    compose_multitangle,
    cross,
    cup,
    neg,
    stump,
    switch,
    triad,
)

__all__ = [
    "MoveCase",
    "MoveReport",
    "MOVES",
    "domain_pool",
    "move_cases",
    "move_invariance_check",
    "right_kink",
    "left_kink",
]

EXHAUSTIVE_LIMIT = 10**4


@dataclass(frozen=True)
class MoveCase:
    move: str
    label: str
    domain: Lattice
    lhs: Tuple[Step, ...]
    rhs: Tuple[Step, ...]
    relabel: Tuple[Tuple[str, str], ...] = ()  # applied to the right-hand range


@dataclass
class MoveReport:
    move: str
    backend: str
    cases: int = 0
    evaluations: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        head = f"{self.move} on {self.backend}: {self.cases} cases, {self.evaluations} evaluations"
        if self.ok:
            return head + ", pass"
        return head + f", FAIL ({len(self.failures)})\n  " + "\n  ".join(self.failures[:5])


# ---------------------------------------------------------------------------
# domain lattices

_SHAPES = [
    ("torus", {"v": ("a", "b", "-a", "-b")}),
    ("two-loops", {"v": ("a", "-a", "b", "-b")}),
    ("nested", {"v": ("a", "b", "-b", "-a")}),
    ("theta", {"u": ("a", "b"), "w": ("-a", "-b")}),
    ("loop-and-leg", {"u": ("a", "b", "-b"), "w": ("-a",)}),
    ("path", {"u": ("a",), "v": ("-a", "b"), "w": ("-b",)}),
]


def domain_pool() -> List[Tuple[str, Lattice]]:
    """Two-edge lattices in every orientation."""
    out = []
    for name, verts in _SHAPES:
        for oa, ob in itertools.product(("a", "-a"), ("b", "-b")):
            out.append((f"{name}[{oa},{ob}]", Lattice.build(verts, {oa, ob})))
    return out


def _adjacent(lat: Lattice, width: int) -> Iterator[Tuple[str, int, Tuple[str, ...]]]:
    for v in lat.vertex_names():
        hs = lat.vertex(v)
        for i in range(len(hs) - width + 1):
            yield v, i, hs[i:i + width]


def _edge(lat: Lattice, h: str) -> str:
    return lat.o_member(h)


def _capable(lat: Lattice, a: str, b: str) -> bool:
    return (a in lat.orientation) != (b in lat.orientation) and lat.partner(a) != b


# ---------------------------------------------------------------------------
# kinks


def right_kink(lat: Lattice, h: str, sign: int, label: str) -> List[Step]:
    """Curl on the right of ``h``; the strand keeps its name."""
    v, p = lat.vertex_of(h), lat.position(h)
    c = label if h in lat.orientation else neg(label)
    return [cup(v, p + 1, c), cross(sign, h, c), cap(h, neg(c), lat.o_member(h))]


def left_kink(lat: Lattice, h: str, sign: int, label: str) -> List[Step]:
    """Curl on the left of ``h``; the strand keeps its name."""
    v, p = lat.vertex_of(h), lat.position(h)
    c = neg(label) if h in lat.orientation else label
    return [cup(v, p, c), cross(sign, neg(c), h), cap(c, h, lat.o_member(h))]


# ---------------------------------------------------------------------------
# generalized Reidemeister moves

_BRAID_OK = [s for s in itertools.product((1, -1), repeat=3) if not (s[0] == s[2] != s[1])]


def _r1(lat: Lattice):
    """Yang-Baxter: three adjacent strands, every consistent sign pattern."""
    for v, i, (h1, h2, h3) in _adjacent(lat, 3):
        for s1, s2, s3 in _BRAID_OK:
            yield (f"{v}:{h1},{h2},{h3} {s1:+d}{s2:+d}{s3:+d}",
                   [cross(s1, h1, h2), cross(s2, h1, h3), cross(s3, h2, h3)],
                   [cross(s3, h2, h3), cross(s2, h1, h3), cross(s1, h1, h2)], {})


def _r2(lat: Lattice):
    """A strand slides across both legs of a cup."""
    for v, hs in lat.vertices:
        for i, h in enumerate(hs):
            for c, s in itertools.product(("c", "-c"), (1, -1)):
                yield (f"{h} left of cup {c} {s:+d}",
                       [cup(v, i + 1, c), cross(s, h, c), cross(s, h, neg(c))], [cup(v, i, c)], {})
                yield (f"{h} right of cup {c} {s:+d}",
                       [cup(v, i, c), cross(s, neg(c), h), cross(s, c, h)], [cup(v, i + 1, c)], {})


def _r3(lat: Lattice):
    """A crossing next to a stump disappears."""
    for v, i, (a, b) in _adjacent(lat, 2):
        for s, h in itertools.product((1, -1), (a, b)):
            e = _edge(lat, h)
            yield f"{a},{b} {s:+d} stump {e}", [cross(s, a, b), stump(e)], [stump(e)], {}


def _r4(lat: Lattice):
    """Framing: a curl on either side of a strand acts the same."""
    for h in lat.half_edges():
        for s in (1, -1):
            yield f"{h} {s:+d}", right_kink(lat, h, s, "c"), left_kink(lat, h, s, "c"), {}


def _r5(lat: Lattice):
    """A strand slides across both legs of a cap."""
    for v, i, (a, b) in _adjacent(lat, 2):
        if not _capable(lat, a, b):
            continue
        name = cap_join_name(lat, a, b)[2]
        hs = lat.vertex(v)
        for s in (1, -1):
            if i > 0:
                h = hs[i - 1]
                yield (f"{h} over cap {a},{b} {s:+d}",
                       [cross(s, h, a), cross(s, h, b), cap(a, b, name)], [cap(a, b, name)], {})
            if i + 2 < len(hs):
                h = hs[i + 2]
                yield (f"cap {a},{b} over {h} {s:+d}",
                       [cross(s, b, h), cross(s, a, h), cap(a, b, name)], [cap(a, b, name)], {})


def _r6(lat: Lattice):
    """Zigzag: a cup followed by a cap straightens to the bare strand."""
    for h in lat.half_edges():
        v, p = lat.vertex_of(h), lat.position(h)
        e = lat.o_member(h)
        c = "-z" if h == e else "z"
        yield f"{h} zigzag right", [cup(v, p + 1, c), cap(h, c, e)], [], {}
        c = neg(c)
        yield f"{h} zigzag left", [cup(v, p, c), cap(neg(c), h, e)], [], {}


def _r7(lat: Lattice):
    """A crossing followed by its inverse."""
    for v, i, (a, b) in _adjacent(lat, 2):
        for s in (1, -1):
            yield f"{a},{b} {s:+d}", [cross(s, a, b), cross(-s, b, a)], [], {}


def _r8(lat: Lattice):
    """A strand crosses both copies of a split edge."""
    for v, i, (a, b) in _adjacent(lat, 2):
        for s in (1, -1):
            for split, other in ((b, a), (a, b)):
                e = _edge(lat, split)
                if e == _edge(lat, other):
                    continue
                t = triad(e, "e1", "e2")
                pair = ("e1", "e2") if split == e else ("-e2", "-e1")
                if split == b:
                    rhs = [t, cross(s, a, pair[0]), cross(s, a, pair[1])]
                else:
                    rhs = [t, cross(s, pair[1], b), cross(s, pair[0], b)]
                yield f"{a},{b} {s:+d} split {e}", [cross(s, a, b), t], rhs, {}


def _r9(lat: Lattice):
    """Crossings on disjoint strands commute."""
    pairs = list(_adjacent(lat, 2))
    for (v1, i1, (a, b)), (v2, i2, (c, d)) in itertools.combinations(pairs, 2):
        if v1 == v2 and abs(i1 - i2) < 2:
            continue
        for s, t in itertools.product((1, -1), repeat=2):
            yield (f"{a},{b} {s:+d} / {c},{d} {t:+d}",
                   [cross(s, a, b), cross(t, c, d)], [cross(t, c, d), cross(s, a, b)], {})


# ---------------------------------------------------------------------------
# triad, cap, stump, switch moves


def _t1(lat: Lattice):
    """A split cup is two nested cups."""
    for v, hs in lat.vertices:
        for p in range(len(hs) + 1):
            yield (f"{v}@{p} c", [cup(v, p, "c"), triad("c", "c1", "c2")],
                   [cup(v, p, "c1"), cup(v, p + 1, "c2")], {})
            yield (f"{v}@{p} -c", [cup(v, p, "-c"), triad("c", "c1", "c2")],
                   [cup(v, p, "-c2"), cup(v, p + 1, "-c1")], {})


def _t2(lat: Lattice):
    """Splitting the first or the second copy gives the same three strands."""
    for e in lat.oriented_edges():
        yield (e, [triad(e, "e1", "x"), triad("x", "e2", "e3")],
               [triad(e, "y", "e3"), triad("y", "e1", "e2")], {})


def _c1(lat: Lattice):
    """Reversing a joined edge is reversing both parts before joining."""
    for v, i, (a, b) in _adjacent(lat, 2):
        if not _capable(lat, a, b):
            continue
        arriving, leaving, g = cap_join_name(lat, a, b)
        f = lat.partner(arriving)
        yield (f"cap {a},{b}", [cap(a, b, g), switch(g)],
               [switch(f), switch(leaving), cap(a, b, g)], {g: neg(g)})


def _c2(lat: Lattice):
    """Splitting a joined edge is joining the split parts pairwise."""
    for v, i, (a, b) in _adjacent(lat, 2):
        if not _capable(lat, a, b):
            continue
        arriving, leaving, g = cap_join_name(lat, a, b)
        f = lat.partner(arriving)
        lhs = [cap(a, b, g), triad(g, "g1", "g2")]
        rhs = [triad(f, "f1", "f2"), triad(leaving, "l1", "l2")]
        if arriving == a:
            rhs += [cap("-f1", "l1", "g1"), cap("-f2", "l2", "g2")]
        else:
            rhs += [cap("l2", "-f2", "g2"), cap("l1", "-f1", "g1")]
        yield f"cap {a},{b}", lhs, rhs, {}


def _c3(lat: Lattice):
    """Deleting a joined edge deletes both parts."""
    for v, i, (a, b) in _adjacent(lat, 2):
        if not _capable(lat, a, b):
            continue
        arriving, leaving, g = cap_join_name(lat, a, b)
        f = lat.partner(arriving)
        yield f"cap {a},{b}", [cap(a, b, g), stump(g)], [stump(f), stump(leaving)], {}


def _s1(lat: Lattice):
    """Deleting either copy of a split edge leaves the edge."""
    for e in lat.oriented_edges():
        yield f"{e} keep first", [triad(e, "e1", "e2"), stump("e2")], [], {e: "e1"}
        yield f"{e} keep second", [triad(e, "e1", "e2"), stump("e1")], [], {e: "e2"}


def _s2(lat: Lattice):
    """A deleted cup leaves nothing behind."""
    for v, hs in lat.vertices:
        for p in range(len(hs) + 1):
            for c in ("c", "-c"):
                yield f"{v}@{p} {c}", [cup(v, p, c), stump("c")], [], {}


def _s3(lat: Lattice):
    """Deleting both strands of a crossing."""
    for v, i, (a, b) in _adjacent(lat, 2):
        ea, eb = _edge(lat, a), _edge(lat, b)
        gone = [stump(ea)] if ea == eb else [stump(ea), stump(eb)]
        for s in (1, -1):
            yield f"{a},{b} {s:+d}", [cross(s, a, b)] + gone, list(gone), {}


def _w1(lat: Lattice):
    """A reversal moves through a split and becomes two reversals."""
    for e in lat.oriented_edges():
        yield (e, [switch(e), triad(neg(e), "-m2", "-m1")],
               [triad(e, "m1", "m2"), switch("m1"), switch("m2")], {})


def _w2(lat: Lattice):
    """A reversed edge that is deleted."""
    for e in lat.oriented_edges():
        yield e, [switch(e), stump(e)], [stump(e)], {}


def _w3(lat: Lattice):
    """Reversal is an involution."""
    for e in lat.oriented_edges():
        yield e, [switch(e), switch(e)], [], {}


def _w4(lat: Lattice):
    """A reversed cup is the cup with the other orientation."""
    for v, hs in lat.vertices:
        for p in range(len(hs) + 1):
            yield f"{v}@{p} c", [cup(v, p, "c"), switch("c")], [cup(v, p, "-d")], {"d": "-c"}
            yield f"{v}@{p} -c", [cup(v, p, "-c"), switch("c")], [cup(v, p, "d")], {"d": "-c"}


def _w5(lat: Lattice):
    """A crossing conjugated by reversing both strands."""
    for v, i, (a, b) in _adjacent(lat, 2):
        edges = sorted({_edge(lat, a), _edge(lat, b)})
        flips = [switch(e) for e in edges]
        for s in (1, -1):
            yield f"{a},{b} {s:+d}", flips + [cross(s, a, b)] + flips, [cross(s, a, b)], {}


# ---------------------------------------------------------------------------
# algebraic moves


def _a1(lat: Lattice):
    """An edge split, half reversed and rejoined is a deleted edge and a fresh loop."""
    for e in lat.oriented_edges():
        end, start = lat.terminal(e), lat.initial(e)
        steps = [triad(e, "e1", "e2"), switch("e2"), cap("-e2", "-e1", "g")]
        yield f"{e} joined at end", steps, [cup(start, lat.position(e), "g"), stump(e)], {}
        steps = [triad(e, "e1", "e2"), switch("e1"), cap("e1", "e2", "g")]
        yield f"{e} joined at start", steps, [cup(end, lat.position(neg(e)), "-g"), stump(e)], {}


def _a2(lat: Lattice):
    """A crossing of parallel copies slides from one end of the edge to the other."""
    for e in lat.oriented_edges():
        for s in (1, -1):
            yield (f"{e} {s:+d}", [triad(e, "e1", "e2"), cross(s, "e1", "e2")],
                   [triad(e, "e2", "e1"), cross(s, "-e1", "-e2")], {})


MOVES: Dict[str, Callable] = {
    "R1": _r1, "R2": _r2, "R3": _r3, "R4": _r4, "R5": _r5, "R6": _r6, "R7": _r7, "R8": _r8, "R9": _r9,
    "T1": _t1, "T2": _t2,
    "C1": _c1, "C2": _c2, "C3": _c3,
    "S1": _s1, "S2": _s2, "S3": _s3,
    "W1": _w1, "W2": _w2, "W3": _w3, "W4": _w4, "W5": _w5,
    "A1": _a1, "A2": _a2,
}


def move_cases(move: str, pool: Optional[Sequence[Tuple[str, Lattice]]] = None) -> List[MoveCase]:
    gen = MOVES[move]
    out = []
    for name, lat in pool or domain_pool():
        for label, lhs, rhs, ren in gen(lat):
            out.append(MoveCase(move, f"{name} {label}", lat, tuple(lhs), tuple(rhs), tuple(sorted(ren.items()))))
    return out


def _relabel_state(x: ConnectionState, mapping: Mapping[str, str]) -> ConnectionState:
    if not mapping:
        return x
    m = dict(mapping)
    for k, v in list(m.items()):
        m.setdefault(neg(k), neg(v))
    edges = tuple(m.get(e, e) for e in x.edges)
    return ConnectionState(x.lattice.relabel(mapping), x.backend, edges, x.data)


def move_invariance_check(move: str, H: FiniteHopfBackend, samples: Optional[int] = None, seed: int = 0,
                          pool: Optional[Sequence[Tuple[str, Lattice]]] = None) -> MoveReport:
    """Evaluate both sides of every case of ``move``.

    All basis connections are used when there are at most ``EXHAUSTIVE_LIMIT``
    of them and ``samples`` is not given; otherwise a seeded sample.
    """
    report = MoveReport(move, H.name)
    for n, case in enumerate(move_cases(move, pool)):
        report.cases += 1
        try:
            left = compose_multitangle(case.domain, case.lhs)
            right = compose_multitangle(case.domain, case.rhs)
        except Exception as exc:  # a malformed case is a catalogue bug, report it
            report.failures.append(f"{case.label}: cannot build ({exc})")
            continue
        ren = dict(case.relabel)
        if not left.range.same_as(right.range.relabel(ren)):
            report.failures.append(f"{case.label}: ranges differ")
            continue
        size = H.dim ** len(case.domain.oriented_edges())
        if samples is None and size <= EXHAUSTIVE_LIMIT:
            points = ConnectionState.all_basis(case.domain, H)
        else:
            points = ConnectionState.sample_basis(case.domain, H, samples or 200, seed + n)
        for x in points:
            report.evaluations += 1
            a = evaluate_multitangle(left, x)
            b = _relabel_state(evaluate_multitangle(right, x), ren)
            if not a.same_as(b):
                report.failures.append(f"{case.label} at {x.format()}: {a.format()} != {b.format()}")
                break
    return report
