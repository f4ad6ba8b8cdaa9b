"""Ciliated lattices, envelope statistics and the multitangle step language.

A half-edge is a string label; its involutary partner is the same label with
a leading ``-`` toggled, so ``neg("e1") == "-e1"`` and ``neg("-e1") == "e1"``.
A vertex is an ordered tuple of half-edges, the order being the ciliation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

__all__ = [
    "neg",
    "LatticeError",
    "FixedPointInvolution",
    "NotAPartition",
    "BadOrientation",
    "InvalidParameters",
    "ChainBreak",
    "ParseError",
    "Lattice",
    "EnvelopeStats",
    "Step",
    "MultitangleIR",
    "identity",
    "cross",
    "triad",
    "cap",
    "cup",
    "stump",
    "switch",
    "cut",
    "validate_lattice",
    "envelope_stats",
    "diagram_signature",
    "compose_multitangle",
    "parse_lattice",
    "format_lattice",
    "parse_multitangle",
    "paper_example_lattice",
]


def neg(h: str) -> str:
    return h[1:] if h.startswith("-") else "-" + h


class LatticeError(ValueError):
    pass


class FixedPointInvolution(LatticeError):
    pass


class NotAPartition(LatticeError):
    pass


class BadOrientation(LatticeError):
    pass


class InvalidParameters(LatticeError):
    pass


class ChainBreak(LatticeError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index} invalid: {reason}")
        self.index = index
        self.reason = reason


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Lattice:
    """Oriented ciliated graph ``(E, -, V^c, O)``.

    ``involution`` is optional; when omitted the sign-prefix convention is
    used. It exists so malformed raw data can be represented and rejected.
    """

    vertices: Tuple[Tuple[str, Tuple[str, ...]], ...]
    orientation: frozenset
    involution: Optional[Tuple[Tuple[str, str], ...]] = None
    _index: Dict[str, Tuple[str, int]] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((str(n), tuple(hs)) for n, hs in self.vertices))
        object.__setattr__(self, "orientation", frozenset(self.orientation))
        idx = {}
        for name, hs in self.vertices:
            for i, h in enumerate(hs):
                idx.setdefault(h, (name, i))
        object.__setattr__(self, "_index", idx)

    @classmethod
    def build(cls, vertices: Mapping[str, Sequence[str]] | Sequence[Tuple[str, Sequence[str]]], orientation: Iterable[str] | None = None) -> "Lattice":
        items = list(vertices.items()) if isinstance(vertices, Mapping) else list(vertices)
        if orientation is None:
            orientation = {h for _, hs in items for h in hs if not h.startswith("-")}
        lat = cls(tuple((n, tuple(hs)) for n, hs in items), frozenset(orientation))
        validate_lattice(lat)
        return lat

    # --- basic structure -------------------------------------------------
    def half_edges(self) -> List[str]:
        return [h for _, hs in self.vertices for h in hs]

    def partner(self, h: str) -> str:
        if self.involution is not None:
            return dict(self.involution)[h]
        return neg(h)

    def vertex_names(self) -> List[str]:
        return [n for n, _ in self.vertices]

    def vertex(self, name: str) -> Tuple[str, ...]:
        for n, hs in self.vertices:
            if n == name:
                return hs
        raise KeyError(name)

    def has_vertex(self, name: str) -> bool:
        return any(n == name for n, _ in self.vertices)

    def has_half_edge(self, h: str) -> bool:
        return h in self._index

    def vertex_of(self, h: str) -> str:
        return self._index[h][0]

    def position(self, h: str) -> int:
        return self._index[h][1]

    def initial(self, e: str) -> str:
        return self.vertex_of(e)

    def terminal(self, e: str) -> str:
        return self.vertex_of(self.partner(e))

    def oriented_edges(self) -> Tuple[str, ...]:
        """O in order of first appearance (vertex order, then cilial order)."""
        seen = []
        for h in self.half_edges():
            if h in self.orientation:
                seen.append(h)
        return tuple(seen)

    def o_member(self, h: str) -> str:
        if h in self.orientation:
            return h
        p = self.partner(h)
        if p in self.orientation:
            return p
        raise InvalidParameters(f"{h} is not an edge of the lattice")

    def ord(self, h: str) -> int:
        return self.position(h)

    def with_vertices(self, verts, orientation=None) -> "Lattice":
        return Lattice(tuple(verts), frozenset(self.orientation if orientation is None else orientation))

    def relabel(self, mapping: Mapping[str, str]) -> "Lattice":
        """Rename half-edges (partners must be renamed consistently)."""
        m = dict(mapping)
        for k, v in list(m.items()):
            m.setdefault(neg(k), neg(v))
        f = lambda h: m.get(h, h)
        return Lattice(tuple((n, tuple(f(h) for h in hs)) for n, hs in self.vertices), frozenset(f(h) for h in self.orientation))

    def rename_vertices(self, mapping: Mapping[str, str]) -> "Lattice":
        return Lattice(tuple((mapping.get(n, n), hs) for n, hs in self.vertices), self.orientation)

    def canonical(self):
        """Hashable form insensitive to vertex listing order."""
        return (tuple(sorted(self.vertices)), tuple(sorted(self.orientation)))

    def same_as(self, other: "Lattice") -> bool:
        return self.canonical() == other.canonical()

    def __str__(self):
        return format_lattice(self)


def validate_lattice(raw: Lattice) -> None:
    """Raise if the involution, partition or orientation axioms fail."""
    hs = raw.half_edges()
    seen = set()
    for h in hs:
        if h in seen:
            raise NotAPartition(f"half-edge {h} appears in more than one vertex slot")
        seen.add(h)
    for name, v in raw.vertices:
        if not v:
            raise NotAPartition(f"vertex {name} is empty")
    names = [n for n, _ in raw.vertices]
    if len(set(names)) != len(names):
        raise NotAPartition("duplicate vertex name")
    inv = dict(raw.involution) if raw.involution is not None else {h: neg(h) for h in hs}
    for h in hs:
        if h not in inv:
            raise NotAPartition(f"involution undefined on {h}")
        p = inv[h]
        if p == h:
            raise FixedPointInvolution(f"involution fixes {h}")
        if p not in seen:
            raise NotAPartition(f"partner {p} of {h} is not in any vertex")
        if inv.get(p) != h:
            raise FixedPointInvolution(f"involution is not self-inverse at {h}")
    for h in raw.orientation:
        if h not in seen:
            raise BadOrientation(f"orientation names unknown half-edge {h}")
    for h in hs:
        p = inv[h]
        a, b = h in raw.orientation, p in raw.orientation
        if a and b:
            raise BadOrientation(f"orientation contains both {h} and {p}")
        if not a and not b:
            raise BadOrientation(f"orientation misses the pair {h}/{p}")


@dataclass(frozen=True)
class EnvelopeStats:
    boundary_count: int
    euler_characteristic: int
    genus: int
    components: int


def envelope_stats(lat: Lattice) -> EnvelopeStats:
    """Boundary components by walking the fattened graph.

    Following a boundary arc: leave along half-edge ``h``, arrive at its
    partner, continue to the next half-edge in cilial (counterclockwise)
    order at that vertex.
    """
    succ = {}
    for _, hs in lat.vertices:
        n = len(hs)
        for i, h in enumerate(hs):
            succ[h] = hs[(i + 1) % n]
    seen = set()
    boundary = 0
    for h in lat.half_edges():
        if h in seen:
            continue
        boundary += 1
        cur = h
        while cur not in seen:
            seen.add(cur)
            cur = succ[lat.partner(cur)]
    parent = {n: n for n in lat.vertex_names()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in lat.orientation:
        a, b = find(lat.initial(e)), find(lat.terminal(e))
        parent[a] = b
    comps = len({find(n) for n in parent})
    chi = len(lat.vertices) - len(lat.orientation)
    genus2 = 2 * comps - chi - boundary
    if genus2 % 2:
        raise AssertionError("odd genus numerator; envelope walk is inconsistent")
    return EnvelopeStats(boundary, chi, genus2 // 2, comps)


# ---------------------------------------------------------------------------
# elementary diagrams


@dataclass(frozen=True)
class Step:
    """One elementary diagram.

    kinds and args:
      identity  ()
      cross     (sign, left, right)         adjacent half-edges, sign +1/-1
      triad     (e, first, second)          new labels default e' and e''
      cap       (left, right, name)         name of the joined edge (optional)
      cup       (vertex, pos, h)            inserts (h, -h) at pos
      stump     (e,)
      switch    (e,)
      cut       (vertex, k, first, second)  split after k half-edges
    """

    kind: str
    args: Tuple = ()
    color: object = None

    def __str__(self):
        if self.kind == "cross":
            s, a, b = self.args
            return f"cross {'+' if s > 0 else '-'} {a} {b}"
        return " ".join([self.kind] + [str(a) for a in self.args if a is not None])


def identity() -> Step:
    return Step("identity")


def cross(sign: int, left: str, right: str) -> Step:
    return Step("cross", (1 if sign > 0 else -1, left, right))


def triad(e: str, first: str | None = None, second: str | None = None) -> Step:
    return Step("triad", (e, first, second))


def cap(left: str, right: str, name: str | None = None, color=None) -> Step:
    return Step("cap", (left, right, name), color)


def cup(vertex: str, pos: int, h: str) -> Step:
    return Step("cup", (vertex, pos, h))


def stump(e: str) -> Step:
    return Step("stump", (e,))


def switch(e: str) -> Step:
    return Step("switch", (e,))


def cut(vertex: str, k: int, first: str | None = None, second: str | None = None) -> Step:
    return Step("cut", (vertex, k, first, second))


def _replace_vertex(lat: Lattice, name: str, new: Sequence[Tuple[str, Tuple[str, ...]]]):
    out = []
    for n, hs in lat.vertices:
        if n == name:
            out.extend(new)
        else:
            out.append((n, hs))
    return out


def _sub(hs, mapping):
    out = []
    for h in hs:
        out.extend(mapping.get(h, (h,)))
    return tuple(out)


def cap_join_name(lat: Lattice, a: str, b: str) -> Tuple[str, str, str]:
    """For a non-involutary cap on ``(a, b)``: (arriving, leaving, default name)."""
    arriving = a if a not in lat.orientation else b
    leaving = b if arriving == a else a
    f = lat.partner(arriving)  # O-member whose edge arrives here
    return arriving, leaving, f"{f}.{leaving}"


def diagram_signature(lat: Lattice, d: Step) -> Lattice:
    """Range lattice of an elementary diagram applied to ``lat``."""
    k = d.kind
    O = set(lat.orientation)
    if k == "identity":
        return lat
    if k == "cross":
        sign, a, b = d.args
        if not (lat.has_half_edge(a) and lat.has_half_edge(b)):
            raise InvalidParameters(f"crossing names unknown half-edges {a}, {b}")
        v = lat.vertex_of(a)
        if lat.vertex_of(b) != v or lat.position(b) != lat.position(a) + 1:
            raise InvalidParameters(f"{a}, {b} are not cilially adjacent")
        hs = list(lat.vertex(v))
        i = lat.position(a)
        hs[i], hs[i + 1] = hs[i + 1], hs[i]
        return lat.with_vertices(_replace_vertex(lat, v, [(v, tuple(hs))]))
    if k == "triad":
        e, first, second = d.args
        if e not in O:
            raise InvalidParameters(f"triad edge {e} is not in the orientation")
        e1, e2 = first or e + "'", second or e + "''"
        for x in (e1, e2, neg(e1), neg(e2)):
            if lat.has_half_edge(x):
                raise InvalidParameters(f"triad label {x} already present")
        m = {e: (e1, e2), lat.partner(e): (neg(e2), neg(e1))}
        verts = [(n, _sub(hs, m)) for n, hs in lat.vertices]
        return lat.with_vertices(verts, (O - {e}) | {e1, e2})
    if k == "switch":
        (e,) = d.args
        if not lat.has_half_edge(e):
            raise InvalidParameters(f"switch names unknown edge {e}")
        e = lat.o_member(e)
        return lat.with_vertices(lat.vertices, (O - {e}) | {lat.partner(e)})
    if k == "stump":
        (e,) = d.args
        if not lat.has_half_edge(e):
            raise InvalidParameters(f"stump names unknown edge {e}")
        e = lat.o_member(e)
        gone = {e, lat.partner(e)}
        verts = [(n, tuple(h for h in hs if h not in gone)) for n, hs in lat.vertices]
        verts = [(n, hs) for n, hs in verts if hs]
        return lat.with_vertices(verts, O - gone)
    if k == "cut":
        v, kk, first, second = d.args
        if not lat.has_vertex(v):
            raise InvalidParameters(f"cut names unknown vertex {v}")
        hs = lat.vertex(v)
        if not 0 < kk < len(hs):
            raise InvalidParameters(f"cut position {kk} leaves an empty vertex at {v}")
        n1, n2 = first or v + "'", second or v + "''"
        if (n1 != v and lat.has_vertex(n1)) or (n2 != v and lat.has_vertex(n2)) or n1 == n2:
            raise InvalidParameters("cut vertex names clash")
        return lat.with_vertices(_replace_vertex(lat, v, [(n1, hs[:kk]), (n2, hs[kk:])]))
    if k == "cup":
        v, pos, h = d.args
        if not lat.has_vertex(v):
            raise InvalidParameters(f"cup names unknown vertex {v}")
        hs = lat.vertex(v)
        if not 0 <= pos <= len(hs):
            raise InvalidParameters(f"cup position {pos} out of range at {v}")
        if lat.has_half_edge(h) or lat.has_half_edge(neg(h)):
            raise InvalidParameters(f"cup label {h} already present")
        new = hs[:pos] + (h, neg(h)) + hs[pos:]
        o = h if not h.startswith("-") else neg(h)
        return lat.with_vertices(_replace_vertex(lat, v, [(v, new)]), O | {o})
    if k == "cap":
        a, b, name = d.args
        if not (lat.has_half_edge(a) and lat.has_half_edge(b)):
            raise InvalidParameters(f"cap names unknown half-edges {a}, {b}")
        v = lat.vertex_of(a)
        if lat.vertex_of(b) != v or lat.position(b) != lat.position(a) + 1:
            raise InvalidParameters(f"cap pair {a}, {b} is not adjacent")
        if (a in O) == (b in O):
            raise InvalidParameters(f"cap pair {a}, {b} must contain exactly one oriented edge")
        if lat.partner(a) == b:
            verts = [(n, tuple(h for h in hs if h not in (a, b))) for n, hs in lat.vertices]
            verts = [(n, hs) for n, hs in verts if hs]
            return lat.with_vertices(verts, O - {a, b})
        arriving, leaving, default = cap_join_name(lat, a, b)
        g = name or default
        f = lat.partner(arriving)  # in O, sits at the start vertex
        end = lat.partner(leaving)  # not in O, sits at the end vertex
        if g not in (f, leaving) and (lat.has_half_edge(g) or lat.has_half_edge(neg(g))):
            raise InvalidParameters(f"cap name {g} already present")
        m = {f: (g,), end: (neg(g),), a: (), b: ()}
        verts = [(n, _sub(hs, m)) for n, hs in lat.vertices]
        verts = [(n, hs) for n, hs in verts if hs]
        return lat.with_vertices(verts, (O - {a, b, f}) | {g})
    raise InvalidParameters(f"unknown diagram kind {k!r}")


@dataclass(frozen=True)
class MultitangleIR:
    domain: Lattice
    steps: Tuple[Step, ...]
    lattices: Tuple[Lattice, ...]  # lattices[i] is the domain of steps[i]; last is the range

    @property
    def range(self) -> Lattice:
        return self.lattices[-1]

    def then(self, more: Sequence[Step]) -> "MultitangleIR":
        return compose_multitangle(self.domain, list(self.steps) + list(more))

    def __str__(self):
        return "\n".join(str(s) for s in self.steps)


def compose_multitangle(lat: Lattice, steps: Sequence[Step]) -> MultitangleIR:
    chain = [lat]
    cur = lat
    for i, s in enumerate(steps):
        try:
            cur = diagram_signature(cur, s)
        except (InvalidParameters, KeyError) as exc:
            raise ChainBreak(i, str(exc)) from None
        chain.append(cur)
    return MultitangleIR(lat, tuple(steps), tuple(chain))


# ---------------------------------------------------------------------------
# text formats


def _tokens(s: str) -> List[str]:
    return [t for t in s.replace(",", " ").split() if t]


def parse_lattice(text: str) -> Lattice:
    verts = []
    orient = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertex"):
            head, sep, rest = line.partition(":")
            if not sep:
                raise ParseError("expected ':' after vertex name", ln, len(head) + 1)
            parts = head.split()
            if len(parts) != 2:
                raise ParseError("expected 'vertex <name>:'", ln)
            hs = _tokens(rest)
            if not hs:
                raise ParseError(f"vertex {parts[1]} has no edges", ln, len(head) + 2)
            verts.append((parts[1], tuple(hs)))
        elif line.startswith("orient"):
            orient = set(_tokens(line[len("orient"):]))
        else:
            raise ParseError(f"unknown directive {line.split()[0]!r}", ln)
    if not verts:
        raise ParseError("no vertices", 1)
    lat = Lattice(tuple(verts), frozenset(orient) if orient is not None else frozenset(h for _, hs in verts for h in hs if not h.startswith("-")))
    validate_lattice(lat)
    return lat


def format_lattice(lat: Lattice) -> str:
    lines = [f"vertex {n}: {' '.join(hs)}" for n, hs in lat.vertices]
    lines.append("orient " + " ".join(lat.oriented_edges()))
    return "\n".join(lines)


def parse_step(line: str, ln: int = 1) -> Step:
    toks = line.split()
    k = toks[0]
    try:
        if k == "identity":
            return identity()
        if k == "cross":
            if toks[1] not in "+-":
                raise ParseError("crossing sign must be + or -", ln)
            return cross(1 if toks[1] == "+" else -1, toks[2], toks[3])
        if k == "triad":
            return triad(*toks[1:4])
        if k == "cap":
            return cap(toks[1], toks[2], toks[3] if len(toks) > 3 else None)
        if k == "cup":
            return cup(toks[1], int(toks[2]), toks[3])
        if k == "stump":
            return stump(toks[1])
        if k == "switch":
            return switch(toks[1])
        if k == "cut":
            return cut(toks[1], int(toks[2]), *(toks[3:5]))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed {k} step", ln) from None
    raise ParseError(f"unknown step kind {k!r}", ln)


def parse_multitangle(text: str, lat: Lattice) -> MultitangleIR:
    steps = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            steps.append(parse_step(line, ln))
    return compose_multitangle(lat, steps)


def paper_example_lattice() -> Lattice:
    """Six edges, five vertices; also the bowtie of the holonomy example."""
    return Lattice.build(
        [
            ("v1", ("-e1", "e2")),
            ("v2", ("-e2", "e3")),
            ("c", ("-e3", "e1", "e4", "-e6")),
            ("v4", ("-e5", "-e4")),
            ("v5", ("e6", "e5")),
        ]
    )
