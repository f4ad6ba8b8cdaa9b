"""Kauffman bracket skein algebra of a lattice's envelope.

A diagram is a closed, uncolored q-tangle drawn with blackboard framing.
Inside each vertex the strands pass through a word of events: crossings
``("x", i, sign)`` and, after resolution, Temperley-Lieb hooks ``("e", i)``
joining positions ``i`` and ``i+1`` (1-based). Below the events the strand
ends are capped off by a fixed planar matching.

Each crossing becomes ``-t * (A smoothing) - t^-1 * (B smoothing)``. For a
positive braid letter the A smoothing keeps the strands vertical; for a
negative one it is the hook. Closed curves whose edge word freely reduces to
nothing bound disks and are removed with the factor ``-(t^2 + t^-2)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .lattice import Lattice
from .scalars import LaurentPoly, RationalFn
from .wilson import (
    Component,
    MalformedTangle,
    QTangle,
    _endpoints,
    _resolve_passes,
    compile_qtangle,
    eval_wilson,
    stack_product,
)

__all__ = [
    "SkeinDiagram",
    "SkeinElement",
    "skein_reduce",
    "skein_product",
    "zeta",
    "zeta_compare",
    "ZetaReport",
    "kink_factor",
    "state_sum_bracket",
    "curve_key",
    "LOOP",
]

T1 = LaurentPoly.monomial(1)
TINV = LaurentPoly.monomial(-1)
LOOP = LaurentPoly({2: -1, -2: -1})  # value of a disk-bounding circle
Event = Tuple


@dataclass(frozen=True)
class SkeinDiagram:
    lattice: Lattice
    multiplicity: Tuple[Tuple[str, int], ...]
    events: Tuple[Tuple[str, Tuple[Event, ...]], ...]
    caps: Tuple[Tuple[str, Tuple[Tuple[int, int], ...]], ...]  # 0-based positions below the events

    @classmethod
    def from_qtangle(cls, lat: Lattice, L: QTangle) -> "SkeinDiagram":
        if not L.is_closed:
            raise MalformedTangle("skein diagrams have closed components only")
        prog = compile_qtangle(lat, L)  # validates
        comps, mult = _resolve_passes(lat, L)
        events, caps = [], []
        for v in lat.vertex_names():
            order = _endpoints(lat, v, mult)
            word = tuple(("x", abs(s), 1 if s > 0 else -1) for s in L.braid(v))
            for _, i, _ in word:
                order[i - 1], order[i] = order[i], order[i - 1]
            pos = {p: k for k, p in enumerate(order)}
            pairs = []
            for c in comps:
                n = len(c.word)
                for k in range(n):
                    h, j = c.word[k]
                    nh, nj = c.word[(k + 1) % n]
                    a = (lat.partner(h), j)
                    if a in pos:
                        pairs.append(tuple(sorted((pos[a], pos[(nh, nj)]))))
            events.append((v, word))
            caps.append((v, tuple(sorted(pairs))))
        del prog
        return cls(lat, tuple((e, mult[e]) for e in lat.oriented_edges()), tuple(events), tuple(caps))

    def crossings(self) -> List[Tuple[str, int]]:
        """(vertex, index into that vertex's events) for every unresolved crossing."""
        return [(v, k) for v, word in self.events for k, ev in enumerate(word) if ev[0] == "x"]

    def smooth(self, v: str, k: int, hook: bool) -> "SkeinDiagram":
        events = []
        for name, word in self.events:
            if name == v:
                ev = word[k]
                assert ev[0] == "x"
                rep = (("e", ev[1]),) if hook else ()
                word = word[:k] + rep + word[k + 1:]
            events.append((name, word))
        return SkeinDiagram(self.lattice, self.multiplicity, tuple(events), self.caps)


def _vertex_matching(n: int, word: Sequence[Event], caps: Sequence[Tuple[int, int]]):
    """Planar connectivity inside one vertex: (matching of top points, free loops)."""
    parent = list(range(n))
    adj: Dict[int, List[int]] = {i: [] for i in range(n)}
    cur = list(range(n))
    nxt = itertools.count(n)

    def link(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for ev in word:
        i = ev[1] - 1
        if ev[0] == "x":
            cur[i], cur[i + 1] = cur[i + 1], cur[i]
        else:
            link(cur[i], cur[i + 1])
            a, b = next(nxt), next(nxt)
            link(a, b)
            cur[i], cur[i + 1] = a, b
    for p, q in caps:
        link(cur[p], cur[q])
    del parent
    seen = set()
    match = {}
    for s in range(n):
        if s in seen:
            continue
        prev, node = None, s
        seen.add(s)
        while True:
            nbrs = [x for x in adj[node] if x != prev] if prev is not None else adj[node]
            if not nbrs:
                break
            prev, node = node, nbrs[0]
            seen.add(node)
            if node < n:
                break
        match[s], match[node] = node, s
    loops = 0
    for start in adj:
        if start in seen:
            continue
        loops += 1
        stack = [start]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj[x])
    return match, loops


def _crossingless(D: SkeinDiagram) -> Tuple[int, List[List[Tuple[str, int]]]]:
    """Free loops inside vertices and the curves, as words of (half-edge, pass)."""
    lat = D.lattice
    mult = dict(D.multiplicity)
    partner_end: Dict[Tuple[str, int], Tuple[str, int]] = {}
    loops = 0
    caps = dict(D.caps)
    for v, word in D.events:
        order = _endpoints(lat, v, mult)
        match, free = _vertex_matching(len(order), word, caps.get(v, ()))
        loops += free
        for a, b in match.items():
            partner_end[order[a]] = order[b]
    curves = []
    used = set()
    for e, m in D.multiplicity:
        for j in range(1, m + 1):
            if (e, j) in used:
                continue
            word = []
            h = e
            while (lat.o_member(h), j) not in used:
                used.add((lat.o_member(h), j))
                word.append((h, j))
                h, j = partner_end[(lat.partner(h), j)]
            curves.append(word)
    return loops, curves


def _edge_letter(lat: Lattice, h: str) -> Tuple[str, int]:
    e = lat.o_member(h)
    return (e, 1 if h == e else -1)


def _reduce_cyclic(word: List[Tuple[str, int]]) -> List[Tuple[str, int]]:
    out: List[Tuple[str, int]] = []
    for x in word:
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == (out[-1][0], -out[-1][1]):
        out = out[1:-1]
    return out


def curve_key(lat: Lattice, word: Sequence[str]) -> Tuple:
    """Free-homotopy class of a closed walk, unoriented: () when contractible."""
    red = _reduce_cyclic([_edge_letter(lat, h) for h in word])
    if not red:
        return ()
    inv = [(e, -s) for e, s in reversed(red)]
    cands = []
    for w in (red, inv):
        for r in range(len(w)):
            cands.append(tuple(w[r:] + w[:r]))
    return min(cands)


def _renumber(lat: Lattice, curves: List[List[Tuple[str, int]]]) -> QTangle:
    """Crossingless q-tangle from curves, pass indices compressed in order."""
    present: Dict[str, List[int]] = {}
    for c in curves:
        for h, j in c:
            present.setdefault(lat.o_member(h), []).append(j)
    remap = {e: {j: k + 1 for k, j in enumerate(sorted(js))} for e, js in present.items()}
    comps = []
    for n, c in enumerate(curves):
        word = tuple((h, remap[lat.o_member(h)][j]) for h, j in c)
        comps.append(Component(f"C{n + 1}", True, word))
    return QTangle(tuple(comps))


@dataclass(frozen=True)
class SkeinElement:
    lattice: Lattice
    terms: Tuple[Tuple[Tuple, LaurentPoly, QTangle], ...]  # (key, coefficient, representative)

    @classmethod
    def zero(cls, lat: Lattice) -> "SkeinElement":
        return cls(lat, ())

    @classmethod
    def empty(cls, lat: Lattice) -> "SkeinElement":
        return cls(lat, (((), LaurentPoly.const(1), QTangle()),))

    @classmethod
    def collect(cls, lat: Lattice, items: Iterable[Tuple[Tuple, LaurentPoly, QTangle]]) -> "SkeinElement":
        acc: Dict[Tuple, List] = {}
        for key, c, rep in items:
            if key in acc:
                acc[key][0] = acc[key][0] + c
            else:
                acc[key] = [c, rep]
        terms = tuple((k, v[0], v[1]) for k, v in sorted(acc.items()) if not v[0].is_zero())
        return cls(lat, terms)

    def __add__(self, other: "SkeinElement") -> "SkeinElement":
        return SkeinElement.collect(self.lattice, self.terms + other.terms)

    def scale(self, c) -> "SkeinElement":
        return SkeinElement.collect(self.lattice, [(k, v * c, r) for k, v, r in self.terms])

    def coefficient(self, key: Tuple = ()) -> LaurentPoly:
        for k, c, _ in self.terms:
            if k == key:
                return c
        return LaurentPoly.const(0)

    def same_as(self, other: "SkeinElement") -> bool:
        return [(k, c) for k, c, _ in self.terms] == [(k, c) for k, c, _ in other.terms]

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c, _ in self.terms:
            curves = " ".join("(" + " ".join(e if s > 0 else "-" + e for e, s in w) + ")" for w in key) or "1"
            parts.append(f"({c}) {curves}")
        return " + ".join(parts)


def _term_of(D: SkeinDiagram) -> Tuple[Tuple, LaurentPoly, QTangle]:
    loops, curves = _crossingless(D)
    lat = D.lattice
    coeff = LaurentPoly.const(1)
    kept, keys = [], []
    for c in curves:
        key = curve_key(lat, [h for h, _ in c])
        if key == ():
            loops += 1
        else:
            kept.append(c)
            keys.append(key)
    for _ in range(loops):
        coeff = coeff * LOOP
    order = sorted(range(len(kept)), key=lambda i: keys[i])
    return tuple(keys[i] for i in order), coeff, _renumber(lat, [kept[i] for i in order])


def _reduce(D: SkeinDiagram, pick) -> List[Tuple[Tuple, LaurentPoly, QTangle]]:
    xs = D.crossings()
    if not xs:
        return [_term_of(D)]
    v, k = pick(xs)
    sign = dict(D.events)[v][k][2]
    a_hook = sign < 0
    out = []
    for hook, w in ((a_hook, -T1), (not a_hook, -TINV)):
        for key, c, rep in _reduce(D.smooth(v, k, hook), pick):
            out.append((key, c * w, rep))
    return out


def skein_reduce(D, lat: Optional[Lattice] = None, order: Optional[int] = None) -> SkeinElement:
    """Resolve every crossing and drop disk-bounding circles.

    ``D`` is a ``SkeinDiagram``, a closed ``QTangle`` (with ``lat``), or a list
    of ``(coefficient, diagram)`` pairs. ``order`` seeds a random choice of
    which crossing to resolve next; the result does not depend on it.
    """
    if isinstance(D, list):
        acc = None
        for c, d in D:
            r = skein_reduce(d, lat, order).scale(LaurentPoly.coerce(c))
            acc = r if acc is None else acc + r
        return acc if acc is not None else SkeinElement.zero(lat)
    if isinstance(D, QTangle):
        D = SkeinDiagram.from_qtangle(lat, D)
    if order is None:
        pick = lambda xs: xs[0]
    else:
        rng = random.Random(order)
        pick = rng.choice
    return SkeinElement.collect(D.lattice, _reduce(D, pick))


def skein_product(a: SkeinElement, b: SkeinElement) -> SkeinElement:
    """``b`` stacked over ``a``, then reduced."""
    lat = a.lattice
    items = []
    for ka, ca, ra in a.terms:
        for kb, cb, rb in b.terms:
            prod = skein_reduce(stack_product(lat, ra, rb), lat)
            items += [(k, c * ca * cb, r) for k, c, r in prod.terms]
    return SkeinElement.collect(lat, items)


def zeta(L: QTangle, lat: Lattice, conn) -> LaurentPoly:
    """The observable ``(-1)^|L| W_L`` evaluated on a U_q(sl2) connection."""
    w = eval_wilson(compile_qtangle(lat, L), conn)
    return w if len(L.components) % 2 == 0 else -w


@dataclass
class ZetaReport:
    lhs: LaurentPoly
    rhs: LaurentPoly
    reduced: SkeinElement

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def __str__(self):
        return f"{'pass' if self.ok else 'FAIL'}: direct {self.lhs} vs reduced {self.rhs}"


def zeta_compare(L: QTangle, conn, lat: Lattice) -> ZetaReport:
    """Evaluate ``zeta`` directly and through the skein reduction of ``L``."""
    lhs = zeta(L, lat, conn)
    red = skein_reduce(L, lat)
    rhs = LaurentPoly.const(0)
    for _, c, rep in red.terms:
        rhs = rhs + c * zeta(rep, lat, conn)
    return ZetaReport(lhs, rhs, red)


def kink_factor() -> LaurentPoly:
    """Scalar that a writhe +1 kink contributes under skein reduction."""
    disk = Lattice.build({"u": ["a"], "w": ["-a"]})
    plain = skein_reduce(QTangle.loop("a -a"), disk).coefficient(())
    kinked = skein_reduce(QTangle.loop("a -a", {"w": [-1]}), disk).coefficient(())
    return (RationalFn(kinked) / RationalFn(plain)).as_laurent()


def state_sum_bracket(D: SkeinDiagram) -> LaurentPoly:
    """Bracket of a diagram whose curves are all contractible, summed over all smoothing states."""
    xs = D.crossings()
    total = LaurentPoly.const(0)
    signs = dict(D.events)
    for state in itertools.product((True, False), repeat=len(xs)):
        cur = D
        weight = LaurentPoly.const(1)
        # later indices first so earlier positions in a word stay valid
        for (v, k), use_a in sorted(zip(xs, state), key=lambda p: -p[0][1]):
            a_hook = signs[v][k][2] < 0
            cur = cur.smooth(v, k, a_hook if use_a else not a_hook)
            weight = weight * (-T1 if use_a else -TINV)
        loops, curves = _crossingless(cur)
        for c in curves:
            if curve_key(D.lattice, [h for h, _ in c]) != ():
                raise ValueError("state sum needs every curve to bound a disk")
        for _ in range(loops + len(curves)):
            weight = weight * LOOP
        total = total + weight
    return total
