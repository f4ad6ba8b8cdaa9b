"""Wilson operators: q-tangles on a lattice, trace programs, and their evaluation.

A q-tangle is a set of curves on the envelope. Each curve is a word of
half-edges; the ``j``-th time a curve runs along edge ``e`` it uses pass
``j``. Passes are numbered ``1..m`` from left to right at the start of the
edge, so at the far end they appear as ``m..1``. Inside a vertex the strand
ends are permuted by a signed braid word and then capped off in pairs.

Two evaluation routes exist and are kept independent:

* ``compile_qtangle`` walks each curve once and produces a letter word (edge
  passes, R-legs, charm insertions). ``eval_wilson`` contracts it, either by
  Sweedler enumeration over a finite backend or as a tensor network in the
  fundamental representation of U_q(sl2).
* ``compile_multitangle`` produces the elementary-diagram chain (triads,
  switches, crossings, caps). It is evaluated with the connection engine for
  finite backends, and for U_q(sl2) with ``evaluate_multitangle_fundamental``,
  which carries multi-strand coproduct jets and uses the universal R instead
  of the 4x4 R-matrix.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .connection import ConnectionState, evaluate_multitangle, nabla
from .finite_hopf import Elem, FiniteHopfBackend, rational_characters
from .lattice import (
    Lattice,
    MultitangleIR,
    ParseError,
    Step,
    cap,
    compose_multitangle,
    cross,
    diagram_signature,
    neg,
    stump,
    switch,
    triad,
)
from .scalars import LaurentPoly, RationalFn
from .tensor import LabeledTensor, contract
from .uqsl2 import (
    FUND,
    DenominatorNotClearing,
    UqElement,
    counit,
    fundamental_tensor,
    matrix_antipode,
    universal_r,
)

__all__ = [
    "MalformedTangle",
    "ColorMismatch",
    "Component",
    "QTangle",
    "parse_tangle",
    "format_tangle",
    "EdgePass",
    "RSlot",
    "Charm",
    "Crossing",
    "ProgramComponent",
    "TraceProgram",
    "compile_qtangle",
    "eval_wilson",
    "holonomy",
    "canonical_word",
    "compile_multitangle",
    "evaluate_multitangle_fundamental",
    "stack_product",
    "reverse_component",
    "star_value",
    "random_qtangle",
]

Endpoint = Tuple[str, int]  # (half-edge at this vertex, pass index)


class MalformedTangle(ValueError):
    pass


class ColorMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# q-tangles


@dataclass(frozen=True)
class Component:
    name: str
    closed: bool
    word: Tuple[Tuple[str, Optional[int]], ...]


def _item(x) -> Tuple[str, Optional[int]]:
    if isinstance(x, tuple):
        return (str(x[0]), None if x[1] is None else int(x[1]))
    s = str(x)
    head, dot, tail = s.rpartition(".")
    if dot and tail.isdigit() and head:
        return (head, int(tail))
    return (s, None)


@dataclass(frozen=True)
class QTangle:
    components: Tuple[Component, ...] = ()
    braids: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()
    colors: Tuple[Tuple[str, str], ...] = ()
    passes: Tuple[Tuple[str, Tuple[Endpoint, ...]], ...] = ()  # optional declared orders

    @classmethod
    def of(cls, components, braids: Optional[Mapping[str, Sequence[int]]] = None,
           colors: Optional[Mapping[str, str]] = None) -> "QTangle":
        """``components`` maps a name to a word, or to ``(word, closed)``."""
        comps = []
        items = components.items() if isinstance(components, Mapping) else components
        for name, spec in items:
            closed = True
            if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[1], bool):
                spec, closed = spec
            word = spec.split() if isinstance(spec, str) else list(spec)
            comps.append(Component(str(name), closed, tuple(_item(w) for w in word)))
        br = tuple((v, tuple(int(s) for s in w)) for v, w in (braids or {}).items() if len(w))
        col = tuple((str(c), str(k)) for c, k in (colors or {}).items())
        return cls(tuple(comps), br, col)

    @classmethod
    def loop(cls, word, braids=None, color: Optional[str] = None, name: str = "L") -> "QTangle":
        return cls.of({name: word}, braids, {name: color} if color else None)

    def braid(self, v: str) -> Tuple[int, ...]:
        return dict(self.braids).get(v, ())

    def color(self, name: str) -> Optional[str]:
        return dict(self.colors).get(name)

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def is_closed(self) -> bool:
        return all(c.closed for c in self.components)

    def crossing_count(self) -> int:
        return sum(len(w) for _, w in self.braids)


def _resolve_passes(lat: Lattice, L: QTangle) -> Tuple[List[Component], Dict[str, int]]:
    """Fill in default pass indices and check them; returns components and m(e)."""
    used: Dict[str, set] = {}
    for c in L.components:
        for h, j in c.word:
            if not lat.has_half_edge(h):
                raise MalformedTangle(f"component {c.name} uses unknown half-edge {h}")
            if j is not None:
                e = lat.o_member(h)
                if j < 1 or j in used.setdefault(e, set()):
                    raise MalformedTangle(f"pass {j} of edge {e} is repeated or invalid")
                used[e].add(j)
    out = []
    for c in L.components:
        word = []
        for h, j in c.word:
            e = lat.o_member(h)
            if j is None:
                taken = used.setdefault(e, set())
                j = 1
                while j in taken:
                    j += 1
                taken.add(j)
            word.append((h, j))
        out.append(Component(c.name, c.closed, tuple(word)))
    mult = {}
    for e in lat.oriented_edges():
        idx = used.get(e, set())
        if idx and idx != set(range(1, len(idx) + 1)):
            raise MalformedTangle(f"passes of edge {e} are {sorted(idx)}, not 1..{len(idx)}")
        mult[e] = len(idx)
    return out, mult


def _endpoints(lat: Lattice, v: str, mult: Mapping[str, int]) -> List[Endpoint]:
    out = []
    for h in lat.vertex(v):
        m = mult.get(lat.o_member(h), 0)
        rng = range(1, m + 1) if h in lat.orientation else range(m, 0, -1)
        out.extend((h, j) for j in rng)
    return out


def _fmt_endpoint(p: Endpoint, mult: Mapping[str, int], lat: Lattice) -> str:
    h, j = p
    return h if mult.get(lat.o_member(h), 0) == 1 else f"{h}.{j}"


# ---------------------------------------------------------------------------
# trace programs


@dataclass(frozen=True)
class EdgePass:
    edge: str
    index: int
    reversed: bool  # traversed against the orientation: contributes S(x^(j) k)


@dataclass(frozen=True)
class RSlot:
    crossing: int
    leg: str  # "s" or "t"
    arriving: bool


@dataclass(frozen=True)
class Charm:
    pass


Letter = Union[EdgePass, RSlot, Charm]


@dataclass(frozen=True)
class Crossing:
    id: int
    vertex: str
    sign: int
    left: Endpoint
    right: Endpoint

    def leg_of(self, left_strand: bool) -> str:
        if self.sign > 0:
            return "s" if left_strand else "t"
        return "t" if left_strand else "s"


@dataclass(frozen=True)
class ProgramComponent:
    name: str
    closed: bool
    letters: Tuple[Letter, ...]
    color: Optional[str]


@dataclass(frozen=True)
class TraceProgram:
    lattice: Lattice
    multiplicity: Tuple[Tuple[str, int], ...]
    components: Tuple[ProgramComponent, ...]
    crossings: Tuple[Crossing, ...]

    def m(self, e: str) -> int:
        return dict(self.multiplicity)[e]

    def s_power(self, slot: RSlot) -> int:
        c = self.crossings[slot.crossing - 1]
        return (1 if c.sign < 0 and slot.leg == "s" else 0) + (1 if slot.arriving else 0)

    def component(self, name: str) -> ProgramComponent:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def word(self, name: Optional[str] = None) -> str:
        comp = self.components[0] if name is None else self.component(name)
        return " ".join(self._render(x) for x in comp.letters)

    def _render(self, x: Letter) -> str:
        if isinstance(x, Charm):
            return "k"
        if isinstance(x, EdgePass):
            base = _edge_symbol(x.edge) + _pass_mark(x.index, self.m(x.edge))
            return f"S({base}k)" if x.reversed else base
        base = f"{x.leg}{x.crossing}"
        p = self.s_power(x)
        return base if p == 0 else (f"S({base})" if p == 1 else f"S^{p}({base})")


def _edge_symbol(e: str) -> str:
    m = re.fullmatch(r"e(\d+)", e)
    return f"x{m.group(1)}" if m else f"x[{e}]"


def _pass_mark(j: int, m: int) -> str:
    if m <= 1:
        return ""
    if m == 2:
        return "'" * j
    return f"^({j})"


def compile_qtangle(lat: Lattice, L: QTangle) -> TraceProgram:
    """Collapse the two-multitangle construction to one letter word per curve."""
    comps, mult = _resolve_passes(lat, L)
    names = [c.name for c in comps]
    if len(set(names)) != len(names):
        raise MalformedTangle("component names must be distinct")
    for c, _ in L.colors:
        if c not in names:
            raise MalformedTangle(f"color given for unknown component {c}")
    for c in comps:
        if not c.word:
            raise MalformedTangle(f"component {c.name} is empty")
        n = len(c.word)
        last = n if c.closed else n - 1
        for i in range(last):
            h, _ = c.word[i]
            nh, _ = c.word[(i + 1) % n]
            if lat.vertex_of(lat.partner(h)) != lat.vertex_of(nh):
                raise MalformedTangle(f"component {c.name} breaks between {h} and {nh}")

    # joins at vertices: arriving end of one pass, leaving end of the next
    pair_of: Dict[Endpoint, int] = {}
    joins: List[Tuple[Endpoint, Endpoint]] = []
    for c in comps:
        n = len(c.word)
        for i in range(n if c.closed else n - 1):
            h, j = c.word[i]
            nh, nj = c.word[(i + 1) % n]
            a, b = (lat.partner(h), j), (nh, nj)
            pair_of[a] = pair_of[b] = len(joins)
            joins.append((a, b))

    hits: Dict[Endpoint, List[Tuple[int, str]]] = {}
    crossings: List[Crossing] = []
    final_pos: Dict[Endpoint, int] = {}
    braid_vertices = {v for v, _ in L.braids}
    for v in braid_vertices:
        if not lat.has_vertex(v):
            raise MalformedTangle(f"braid given at unknown vertex {v}")
    declared = dict(L.passes)
    for v in lat.vertex_names():
        order = _endpoints(lat, v, mult)
        if v in declared and tuple(declared[v]) != tuple(order):
            shown = " ".join(_fmt_endpoint(p, mult, lat) for p in order)
            raise MalformedTangle(f"declared passes at {v} differ from the cilial order {shown}")
        for s in L.braid(v):
            i = abs(s)
            if s == 0 or i >= len(order):
                raise MalformedTangle(f"braid letter {s} at {v} is out of range for {len(order)} strands")
            left, right = order[i - 1], order[i]
            cid = len(crossings) + 1
            c = Crossing(cid, v, 1 if s > 0 else -1, left, right)
            crossings.append(c)
            hits.setdefault(left, []).append((cid, c.leg_of(True)))
            hits.setdefault(right, []).append((cid, c.leg_of(False)))
            order[i - 1], order[i] = right, left
        stack: List[int] = []
        for pos, p in enumerate(order):
            final_pos[p] = pos
            pid = pair_of.get(p)
            if pid is None:
                if stack:
                    raise MalformedTangle(f"open end {_fmt_endpoint(p, mult, lat)} at {v} is enclosed by a cap")
            elif stack and stack[-1] == pid:
                stack.pop()
            else:
                stack.append(pid)
        if stack:
            raise MalformedTangle(f"caps at {v} cross after the braid")

    colors = dict(L.colors)
    out = []
    for c in comps:
        letters: List[Letter] = []
        n = len(c.word)
        for i, (h, j) in enumerate(c.word):
            e = lat.o_member(h)
            letters += [RSlot(cid, leg, False) for cid, leg in reversed(hits.get((h, j), []))]
            letters.append(EdgePass(e, j, h != e))
            arrive = (lat.partner(h), j)
            letters += [RSlot(cid, leg, True) for cid, leg in hits.get(arrive, [])]
            if c.closed or i < n - 1:
                nxt = c.word[(i + 1) % n]
                if final_pos[arrive] > final_pos[nxt]:
                    letters.append(Charm())
        out.append(ProgramComponent(c.name, c.closed, tuple(letters), colors.get(c.name)))
    return TraceProgram(lat, tuple((e, mult[e]) for e in lat.oriented_edges()), tuple(out), tuple(crossings))


# ---------------------------------------------------------------------------
# symbolic words


def _tokens(prog: TraceProgram, comp: ProgramComponent):
    toks = []
    for x in comp.letters:
        if isinstance(x, Charm):
            toks.append(["k", 1])
        elif isinstance(x, EdgePass):
            m = prog.m(x.edge)
            if x.reversed:  # S(x k) = k^-1 S(x), and S(x^(j)) = (S x)^(m+1-j)
                toks.append(["k", -1])
                toks.append(["x", x.edge, m + 1 - x.index, m, True])
            else:
                toks.append(["x", x.edge, x.index, m, False])
        else:
            p = prog.s_power(x)
            if p == 2:  # S^2(a) = k a k^-1
                toks += [["k", 1], ["r", x.leg, x.crossing, 0], ["k", -1]]
            else:
                toks.append(["r", x.leg, x.crossing, p])
    merged = []
    for t in toks:
        if t[0] == "k" and merged and merged[-1][0] == "k":
            merged[-1][1] += t[1]
            if merged[-1][1] == 0:
                merged.pop()
        else:
            merged.append(t)
    return merged


def _k_str(n: int) -> str:
    return "k" if n == 1 else f"k^{n}"


def canonical_word(prog: TraceProgram, name: Optional[str] = None) -> Tuple[str, Dict[str, str]]:
    """Rewrite a component word into blocks of consecutive edge letters.

    Uses ``S(xk) = k^-1 S(x)``, ``S^2(a) = k a k^-1``, cancels charm powers,
    relabels ``S(x^(j))`` as ``(Sx)^(m+1-j)``, then names each maximal run of
    edge letters sharing one pass index. Returns the word and the blocks.
    """
    comp = prog.components[0] if name is None else prog.component(name)
    toks = _tokens(prog, comp)
    out: List[str] = []
    blocks: Dict[str, str] = {}
    names = iter("XYZWUV")
    i = 0
    while i < len(toks):
        t = toks[i]
        if t[0] != "x":
            out.append(_k_str(t[1]) if t[0] == "k" else
                       (f"{t[1]}{t[2]}" if t[3] == 0 else f"S({t[1]}{t[2]})"))
            i += 1
            continue
        key = (t[2], t[3])
        j = i
        last = i
        while j < len(toks) and (toks[j][0] == "k" or (toks[j][0] == "x" and (toks[j][2], toks[j][3]) == key)):
            if toks[j][0] == "x":
                last = j
            j += 1
        run = toks[i:last + 1]
        body = " ".join(_k_str(r[1]) if r[0] == "k" else
                        (f"S({_edge_symbol(r[1])})" if r[4] else _edge_symbol(r[1])) for r in run)
        label = next((k for k, b in blocks.items() if b == body), None)
        if label is None:
            label = next(names)
            blocks[label] = body
        out.append(label + _pass_mark(key[0], key[1]))
        i = last + 1
    return " ".join(out), blocks


# ---------------------------------------------------------------------------
# finite evaluation


def _finite_trace(H: FiniteHopfBackend, color: Optional[str]) -> Callable[[Elem], object]:
    if color in (None, "regular"):
        return H.regular_trace
    m = re.fullmatch(r"chi_?(\d+)", color)
    if m:
        if H.kind != "group":
            raise ColorMismatch(f"character colors need a group algebra, not {H.name}")
        chars = rational_characters(H.group)
        k = int(m.group(1))
        if k >= len(chars):
            raise ColorMismatch(f"{color}: only {len(chars)} rational characters")
        chi = chars[k]
        return lambda x: sum((c * chi[g] for g, c in x.items()), 0)
    raise ColorMismatch(f"color {color!r} is not available for {H.name}")


def _connection_terms(H: FiniteHopfBackend, conn, edges: Sequence[str]) -> List[Tuple[object, Dict[str, Elem]]]:
    if isinstance(conn, ConnectionState):
        out = []
        for key, c in conn.data.items():
            vals = {e: {i: 1} for e, i in zip(conn.edges, key)}
            out.append((c, {e: vals.get(e, H.unit) for e in edges}))
        return out
    vals = {}
    for e in edges:
        x = conn.get(e, H.unit)
        vals[e] = H.element(x) if isinstance(x, str) else x
    return [(1, vals)]


def _eval_finite(prog: TraceProgram, H: FiniteHopfBackend, conn, traced: bool = True):
    comps = prog.components
    traces = [(_finite_trace(H, c.color) if (c.closed and traced) else None) for c in comps]
    edges = [e for e, _ in prog.multiplicity]
    charm = H.charm
    s_cache: Dict[Tuple[int, int], Elem] = {}

    def s_pow(i: int, p: int) -> Elem:
        if (i, p) not in s_cache:
            x = {i: 1}
            for _ in range(p):
                x = H.S(x)
            s_cache[(i, p)] = x
        return s_cache[(i, p)]

    rev_cache: Dict[int, Elem] = {}

    def rev(i: int) -> Elem:
        if i not in rev_cache:
            rev_cache[i] = H.S(H.mul({i: 1}, charm))
        return rev_cache[i]

    r_terms = list(H.R.items())
    total: Dict[tuple, object] = {}
    for coeff, vals in _connection_terms(H, conn, edges):
        scalar = coeff
        split_edges, splits = [], []
        for e in edges:
            m = prog.m(e)
            if m == 0:
                scalar = scalar * H.eps(vals[e])
            else:
                split_edges.append(e)
                splits.append(list(H.coproduct_power(vals[e], m).items()))
        if scalar == 0:
            continue
        pos = {e: i for i, e in enumerate(split_edges)}
        choices = splits + [r_terms] * len(prog.crossings)
        nE = len(split_edges)
        for combo in itertools.product(*choices):
            c = scalar
            for _, w in combo:
                c = c * w
            if c == 0:
                continue
            open_parts = []
            for comp, tr in zip(comps, traces):
                acc = H.unit
                for x in comp.letters:
                    if isinstance(x, Charm):
                        y = charm
                    elif isinstance(x, EdgePass):
                        a = combo[pos[x.edge]][0][x.index - 1]
                        y = rev(a) if x.reversed else {a: 1}
                    else:
                        s, t = combo[nE + x.crossing - 1][0]
                        y = s_pow(s if x.leg == "s" else t, prog.s_power(x))
                    acc = H.mul(acc, y)
                if tr is not None:
                    c = c * tr(acc)
                    if c == 0:
                        break
                else:
                    open_parts.append(acc)
            if c == 0:
                continue
            for pick in itertools.product(*[list(p.items()) for p in open_parts]):
                key = tuple(i for i, _ in pick)
                w = c
                for _, a in pick:
                    w = w * a
                total[key] = total.get(key, 0) + w
    total = {k: v for k, v in total.items() if v != 0}
    if all(c.closed for c in comps) and traced:
        return total.get((), 0)
    return total


# ---------------------------------------------------------------------------
# fundamental-representation evaluation


def _sop() -> np.ndarray:
    """``S`` on 2x2 matrices as a 4-index tensor ``S(M)[r,c] = sum Sop[r,c,i,j] M[i,j]``."""
    out = np.empty((2, 2, 2, 2), dtype=object)
    for i in range(2):
        for j in range(2):
            E = np.empty((2, 2), dtype=object)
            for a in range(2):
                for b in range(2):
                    E[a, b] = LaurentPoly.const(1 if (a, b) == (i, j) else 0)
            out[:, :, i, j] = matrix_antipode(E)
    return out


SOP = _sop()
RHO_K = FUND.k
RHO_KINV = FUND.k_inv


def _eye2() -> np.ndarray:
    out = np.empty((2, 2), dtype=object)
    for a in range(2):
        for b in range(2):
            out[a, b] = LaurentPoly.const(1 if a == b else 0)
    return out


def _as_laurent(x) -> LaurentPoly:
    r = RationalFn.coerce(x)
    if not r.is_laurent():
        raise DenominatorNotClearing(f"{r} is not a Laurent polynomial")
    return r.as_laurent()


def _edge_matrix(x, m: int) -> np.ndarray:
    if isinstance(x, np.ndarray):
        if m != 1:
            raise ValueError("matrix-valued connections need every used edge to carry exactly one pass")
        return x
    return fundamental_tensor(x, m)


def _check_quantum_colors(comps):
    for c in comps:
        if c.closed and c.color not in (None, "fundamental"):
            raise ColorMismatch(f"component {c.name} has color {c.color}; quantum mode traces in the fundamental representation")


def _eval_fundamental(prog: TraceProgram, conn: Mapping[str, object], traced: bool = True, order: Optional[int] = None):
    _check_quantum_colors(prog.components)
    one = UqElement.monomial(0, 0, 0)
    tensors: List[LabeledTensor] = []
    scalar = LaurentPoly.const(1)
    rows: Dict[Tuple[str, int], Tuple[str, str]] = {}
    for e, m in prog.multiplicity:
        x = conn.get(e, one)
        if m == 0:
            if isinstance(x, np.ndarray):
                raise ValueError(f"edge {e} is unused; its counit needs a symbolic element")
            scalar = scalar * _as_laurent(counit(x))
            continue
        T = _edge_matrix(x, m).reshape((2,) * (2 * m))
        labels = [f"{e}#r{j}" for j in range(1, m + 1)] + [f"{e}#c{j}" for j in range(1, m + 1)]
        tensors.append(LabeledTensor(T, labels))
        for j in range(1, m + 1):
            rows[(e, j)] = (f"{e}#r{j}", f"{e}#c{j}")

    slot_wires: Dict[Tuple[int, str], Tuple[str, str]] = {}
    outputs: List[str] = []
    for ci, comp in enumerate(prog.components):
        n = len(comp.letters)
        wire = [f"w{ci}.{i}" for i in range(n)]
        closed = comp.closed and traced
        for i, x in enumerate(comp.letters):
            row = wire[i - 1] if (i > 0 or closed) else f"w{ci}.in"
            col = wire[i] if (i < n - 1 or closed) else f"w{ci}.out"
            if isinstance(x, Charm):
                tensors.append(LabeledTensor(RHO_K, (row, col)))
            elif isinstance(x, EdgePass):
                r, c = rows[(x.edge, x.index)]
                if x.reversed:
                    y = f"{r}#k"
                    tensors.append(LabeledTensor(RHO_K, (c, y)))
                    tensors.append(LabeledTensor(SOP, (row, col, r, y)))
                else:
                    tensors.append(LabeledTensor(_eye2(), (row, r)))
                    tensors.append(LabeledTensor(_eye2(), (c, col)))
            else:
                slot_wires[(x.crossing, x.leg)] = (row, col)
        if not closed:
            outputs += [f"w{ci}.in", f"w{ci}.out"]
    for c in prog.crossings:
        R4 = FUND.R4
        ps = prog.s_power(RSlot(c.id, "s", _arrives(prog, c.id, "s")))
        pt = prog.s_power(RSlot(c.id, "t", _arrives(prog, c.id, "t")))
        if ps:
            R4 = _leg_antipode(R4, 0, ps)
        if pt:
            R4 = _leg_antipode(R4, 1, pt)
        sr, sc = slot_wires[(c.id, "s")]
        tr_, tc = slot_wires[(c.id, "t")]
        tensors.append(LabeledTensor(R4, (sr, sc, tr_, tc)))
    data = contract(tensors, outputs, order=order)
    if not outputs:
        return scalar * LaurentPoly.coerce(data.item() if isinstance(data, np.ndarray) else data)
    return data * scalar


def _leg_antipode(R4: np.ndarray, leg: int, power: int) -> np.ndarray:
    from .uqsl2 import antipode_leg

    return antipode_leg(R4, leg, power)


def _arrives(prog: TraceProgram, cid: int, leg: str) -> bool:
    for comp in prog.components:
        for x in comp.letters:
            if isinstance(x, RSlot) and x.crossing == cid and x.leg == leg:
                return x.arriving
    raise KeyError((cid, leg))


def eval_wilson(prog: TraceProgram, conn, mode: Union[str, FiniteHopfBackend] = "uq", order: Optional[int] = None):
    """Evaluate a trace program on a connection.

    ``mode`` is a finite backend (Sweedler enumeration; ``conn`` is a
    ``ConnectionState`` or a map edge -> element) or ``"uq"`` for the
    fundamental representation (``conn`` maps edges to ``UqElement`` or, when
    every edge carries one pass, to 2x2 matrices). Missing edges get 1.
    Closed-only programs give a scalar; open components give a tensor.
    """
    if isinstance(mode, FiniteHopfBackend):
        return _eval_finite(prog, mode, conn)
    if mode not in ("uq", "fundamental", "uqsl2"):
        raise ValueError(f"unknown mode {mode!r}")
    return _eval_fundamental(prog, conn or {}, order=order)


def holonomy(prog: TraceProgram, conn, mode: Union[str, FiniteHopfBackend] = "uq"):
    """The untraced product along every component, as an element or matrix per component."""
    if isinstance(mode, FiniteHopfBackend):
        return _eval_finite(prog, mode, conn, traced=False)
    return _eval_fundamental(prog, conn or {}, traced=False)


# ---------------------------------------------------------------------------
# the multitangle route


def _pass_name(e: str, j: int, m: int) -> str:
    return e if m == 1 else f"{e}.{j}"


def compile_multitangle(lat: Lattice, L: QTangle, H: Optional[FiniteHopfBackend] = None,
                        scope: Optional[Iterable[str]] = None) -> List[Step]:
    """Elementary-diagram chain realising ``L`` on ``lat``.

    ``scope`` restricts the edges and vertices treated as belonging to ``L``
    (used when ``lat`` holds several copies). Loop-closing caps carry the
    component color: a trace callable when ``H`` is given, else the label.
    """
    comps, mult = _resolve_passes(lat, L)
    # validation and the crossing sequence come from the traversal compiler
    compile_qtangle(lat, L)
    verts = lat.vertex_names() if scope is None else [v for v in lat.vertex_names() if v in set(scope)]
    in_scope = set(verts)
    edges = [e for e in lat.oriented_edges() if lat.initial(e) in in_scope]
    steps: List[Step] = []
    cur = lat

    def emit(s: Step):
        nonlocal cur
        steps.append(s)
        cur = diagram_signature(cur, s)

    for e in edges:
        m = mult[e]
        if m == 0:
            emit(stump(e))
            continue
        name = e
        for j in range(1, m):
            rest = f"{e}.{j}+" if j < m - 1 else f"{e}.{m}"
            emit(triad(name, f"{e}.{j}", rest))
            name = rest
    # passes traversed against the orientation are switched
    travel = {}
    for c in comps:
        for h, j in c.word:
            travel[(lat.o_member(h), j)] = h
    for (e, j), h in travel.items():
        if h != e:
            emit(switch(_pass_name(e, j, mult[e])))

    alias: Dict[str, str] = {}
    for (e, j), h in travel.items():
        name = _pass_name(e, j, mult[e])
        alias[name], alias[neg(name)] = name, neg(name)

    def half(p: Endpoint) -> str:
        h, j = p
        e = lat.o_member(h)
        name = _pass_name(e, j, mult[e])
        base = name if h == e else neg(name)
        return alias[base]

    joins = {}
    comp_of = {}
    for c in comps:
        n = len(c.word)
        for i in range(n if c.closed else n - 1):
            h, j = c.word[i]
            nh, nj = c.word[(i + 1) % n]
            a, b = (lat.partner(h), j), (nh, nj)
            joins[a], joins[b] = b, a
            comp_of[a] = comp_of[b] = c.name
    colors = dict(L.colors)
    for v in verts:
        order = _endpoints(lat, v, mult)
        for s in L.braid(v):
            i = abs(s)
            emit(cross(s, half(order[i - 1]), half(order[i])))
            order[i - 1], order[i] = order[i], order[i - 1]
        stack: List[int] = []
        for pos, p in enumerate(order):
            if p not in joins:
                continue
            if stack and order[stack[-1]] == joins[p]:
                q = order[stack.pop()]
                a, b = half(q), half(p)
                if cur.partner(a) == b:
                    col = colors.get(comp_of[p])
                    emit(cap(a, b, None, _finite_trace(H, col) if H is not None else (col or "fundamental")))
                else:
                    arriving = a if a not in cur.orientation else b
                    leaving = b if arriving == a else a
                    f = cur.partner(arriving)
                    end = cur.partner(leaving)
                    emit(cap(a, b, f))
                    for key, val in alias.items():
                        if val == end:
                            alias[key] = neg(f)
            else:
                stack.append(pos)
    return steps


def _multiplicities_backward(mt: MultitangleIR) -> List[Dict[str, int]]:
    need = [dict() for _ in mt.lattices]
    need[-1] = {e: 1 for e in mt.range.oriented_edges()}
    for i in range(len(mt.steps) - 1, -1, -1):
        lat, step, after = mt.lattices[i], mt.steps[i], need[i + 1]
        before = dict(after)
        k = step.kind
        if k == "triad":
            e, first, second = step.args
            e1, e2 = first or e + "'", second or e + "''"
            before.pop(e1)
            before.pop(e2)
            before[e] = after[e1] + after[e2]
        elif k == "switch":
            e = lat.o_member(step.args[0])
            before[e] = before.pop(lat.partner(e))
        elif k == "stump":
            before[lat.o_member(step.args[0])] = 0
        elif k == "cup":
            _, _, h = step.args
            before.pop(h if not h.startswith("-") else neg(h))
        elif k == "cap":
            a, b, name = step.args
            if lat.partner(a) == b:
                before[lat.o_member(a)] = 1
            else:
                arriving = a if a not in lat.orientation else b
                leaving = b if arriving == a else a
                f = lat.partner(arriving)
                g = name or f"{f}.{leaving}"
                m = before.pop(g)
                before[f] = m
                before[leaving] = m
        need[i] = before
    return need


def _jet_antipode(A: np.ndarray, row_axes: Sequence[int], col_axes: Sequence[int], power: int = 1) -> np.ndarray:
    """Antipode on a coproduct jet occupying the given axes: per-factor S, factor order reversed."""
    for _ in range(power):
        for ra, ca in zip(row_axes, col_axes):
            B = np.tensordot(SOP, A, axes=([2, 3], [ra, ca]))
            A = np.moveaxis(B, [0, 1], [ra, ca])
        perm = list(range(A.ndim))
        for a, b in zip(row_axes, reversed(row_axes)):
            perm[a] = b
        for a, b in zip(col_axes, reversed(col_axes)):
            perm[a] = b
        A = A.transpose(perm)
    return A


def evaluate_multitangle_fundamental(mt: MultitangleIR, conn: Mapping[str, object], order: Optional[int] = None):
    """Push a symbolic U_q(sl2) connection through a multitangle, in the fundamental representation.

    Each edge carries the image of ``Delta^(m-1)(x_e)`` on ``V^(x)m`` where
    ``m`` is how many strands the edge feeds downstream. Crossings use the
    universal R on the two jets. Loop-closing caps take the matrix trace, so
    every edge that is still open at the end carries one strand.
    """
    need = _multiplicities_backward(mt)
    one = UqElement.monomial(0, 0, 0)
    counter = itertools.count()

    def fresh(n: int) -> List[str]:
        return [f"j{next(counter)}" for _ in range(n)]

    tensors: List[LabeledTensor] = []
    scalar = LaurentPoly.const(1)
    legs: Dict[str, Tuple[List[str], List[str]]] = {}
    for e in mt.domain.oriented_edges():
        m = need[0][e]
        x = conn.get(e, one)
        if m == 0:
            if isinstance(x, np.ndarray):
                raise ValueError(f"edge {e} is unused; its counit needs a symbolic element")
            scalar = scalar * _as_laurent(counit(x))
            legs[e] = ([], [])
            continue
        r, c = fresh(m), fresh(m)
        tensors.append(LabeledTensor(_edge_matrix(x, m).reshape((2,) * (2 * m)), r + c))
        legs[e] = (r, c)

    def right_mult_k(e: str):
        r, c = legs[e]
        new = fresh(len(c))
        for a, b in zip(c, new):
            tensors.append(LabeledTensor(RHO_K, (a, b)))
        legs[e] = (r, new)

    for i, step in enumerate(mt.steps):
        lat = mt.lattices[i]
        k = step.kind
        if k == "cross":
            sign, a, b = step.args
            ea, eb = lat.o_member(a), lat.o_member(b)
            ma, mb = len(legs[ea][0]), len(legs[eb][0])
            if ma == 0 or mb == 0:
                continue
            # leg 0 acts on the left strand
            m0, m1 = (ma, mb) if sign > 0 else (mb, ma)
            A = universal_r(m0, m1).reshape((2,) * (2 * (m0 + m1)))
            n = m0 + m1
            s_rows, s_cols = list(range(m0)), list(range(n, n + m0))
            t_rows, t_cols = list(range(m0, n)), list(range(n + m0, 2 * n))
            if sign > 0:
                groups = [(a, s_rows, s_cols, 0), (b, t_rows, t_cols, 0)]
            else:
                groups = [(a, t_rows, t_cols, 0), (b, s_rows, s_cols, 1)]
            labels = [None] * (2 * n)
            for h, ra, ca, p in groups:
                e = lat.o_member(h)
                left = h in lat.orientation
                if not left:
                    p += 1
                if p:
                    A = _jet_antipode(A, ra, ca, p)
                r, c = legs[e]
                new = fresh(len(r))
                if left:
                    for ax, l in zip(ra, new):
                        labels[ax] = l
                    for ax, l in zip(ca, r):
                        labels[ax] = l
                    legs[e] = (new, c)
                else:
                    for ax, l in zip(ra, c):
                        labels[ax] = l
                    for ax, l in zip(ca, new):
                        labels[ax] = l
                    legs[e] = (r, new)
            tensors.append(LabeledTensor(A, labels))
        elif k == "triad":
            e, first, second = step.args
            e1, e2 = first or e + "'", second or e + "''"
            r, c = legs.pop(e)
            m1 = need[i + 1][e1]
            legs[e1] = (r[:m1], c[:m1])
            legs[e2] = (r[m1:], c[m1:])
        elif k == "switch":
            e = lat.o_member(step.args[0])
            right_mult_k(e)
            r, c = legs.pop(e)
            nr, nc = fresh(len(r)), fresh(len(c))
            m = len(r)
            for j in range(m):
                tensors.append(LabeledTensor(SOP, (nr[j], nc[j], r[m - 1 - j], c[m - 1 - j])))
            legs[lat.partner(e)] = (nr, nc)
        elif k == "stump":
            e = lat.o_member(step.args[0])
            if legs.pop(e)[0]:
                raise AssertionError("stumped edge still carries strands")
        elif k == "cup":
            _, _, h = step.args
            o = h if not h.startswith("-") else neg(h)
            m = need[i + 1][o]
            r, c = fresh(m), fresh(m)
            M = _eye2() if o == h else RHO_KINV
            for a, b in zip(r, c):
                tensors.append(LabeledTensor(M, (a, b)))
            legs[o] = (r, c)
        elif k == "cap":
            a, b, name = step.args
            if lat.partner(a) == b:
                if step.color not in (None, "fundamental"):
                    raise ColorMismatch(f"loop closed at {a}, {b} has color {step.color!r}")
                e = lat.o_member(a)
                if a == e:
                    right_mult_k(e)
                r, c = legs.pop(e)
                for x, y in zip(c, r):
                    tensors.append(LabeledTensor(_eye2(), (x, y)))
            else:
                arriving = a if a not in lat.orientation else b
                leaving = b if arriving == a else a
                f = lat.partner(arriving)
                g = name or f"{f}.{leaving}"
                if arriving == b:
                    right_mult_k(f)
                fr, fc = legs.pop(f)
                lr, lc = legs.pop(leaving)
                for x, y in zip(fc, lr):
                    tensors.append(LabeledTensor(_eye2(), (x, y)))
                legs[g] = (fr, lc)
    outputs = []
    for e in mt.range.oriented_edges():
        r, c = legs[e]
        outputs += r + c
    data = contract(tensors, outputs, order=order)
    if not outputs:
        return scalar * LaurentPoly.coerce(data.item() if isinstance(data, np.ndarray) else data)
    return data * scalar


# ---------------------------------------------------------------------------
# products, reversal


def _suffix_tangle(L: QTangle, suffix: str) -> QTangle:
    comps = tuple(Component(c.name, c.closed, tuple((h + suffix, j) for h, j in c.word)) for c in L.components)
    braids = tuple((v + suffix, w) for v, w in L.braids)
    return QTangle(comps, braids, L.colors)


def _unique_names(L: QTangle, Lp: QTangle) -> QTangle:
    taken = {c.name for c in L.components}
    mapping = {}
    for c in Lp.components:
        n = c.name
        while n in taken:
            n += "'"
        taken.add(n)
        mapping[c.name] = n
    comps = tuple(Component(mapping[c.name], c.closed, c.word) for c in Lp.components)
    return QTangle(comps, Lp.braids, tuple((mapping[c], k) for c, k in Lp.colors))


def stack_product(lat: Lattice, L: QTangle, Lp: QTangle) -> QTangle:
    """``L`` laid under ``Lp``: on every edge ``L`` runs to the right of ``Lp``.

    Matches the coproduct-then-cut geometry, so ``W_{L*Lp} = W_L * W_Lp``.
    """
    cL, mL = _resolve_passes(lat, L)
    cP, mP = _resolve_passes(lat, _unique_names(L, Lp))
    comps = list(cL)
    for c in cP:
        comps.append(Component(c.name, c.closed, tuple((h, mL[lat.o_member(h)] + j) for h, j in c.word)))
    braids = {}
    for v in lat.vertex_names():
        tags = []
        for h in lat.vertex(v):
            e = lat.o_member(h)
            block = ["P"] * mL[e] + ["D"] * mP[e]
            tags += block if h == e else block[::-1]
        word = []
        for i in range(len(tags)):
            j = i
            if tags[j] != "P":
                continue
            while j > 0 and tags[j - 1] == "D":
                word.append(j)
                tags[j - 1], tags[j] = tags[j], tags[j - 1]
                j -= 1
        nL = sum(1 for t in tags if t == "P")
        word += list(L.braid(v))
        word += [s + nL if s > 0 else s - nL for s in Lp.braid(v)]
        if word:
            braids[v] = tuple(word)
    colors = tuple(L.colors) + tuple(_unique_names(L, Lp).colors)
    return QTangle(tuple(comps), tuple(braids.items()), colors)


def reverse_component(lat: Lattice, L: QTangle, name: str) -> QTangle:
    """Run one component backwards; pass indices stay with their edges."""
    comps = []
    found = False
    for c in L.components:
        if c.name == name:
            found = True
            comps.append(Component(c.name, c.closed, tuple((lat.partner(h), j) for h, j in reversed(c.word))))
        else:
            comps.append(c)
    if not found:
        raise KeyError(name)
    return QTangle(tuple(comps), L.braids, L.colors)


def star_value(lat: Lattice, L: QTangle, Lp: QTangle, conn, mode: Union[str, FiniteHopfBackend] = "uq"):
    """``(W_L * W_Lp)(conn)`` through the coproduct of connections, never forming ``L*Lp``."""
    steps = list(nabla(lat, ":1", ":2").steps)
    mt = compose_multitangle(lat, steps)
    H = mode if isinstance(mode, FiniteHopfBackend) else None
    for suffix, T in ((":1", L), (":2", Lp)):
        cur = mt.range
        scope = [v for v in cur.vertex_names() if v.endswith(suffix)]
        steps += compile_multitangle(cur, _suffix_tangle(T, suffix), H, scope)
        mt = compose_multitangle(lat, steps)
    if H is not None:
        state = conn if isinstance(conn, ConnectionState) else ConnectionState.simple(lat, H, conn)
        out = evaluate_multitangle(mt, state)
        return out.data.get((), 0)
    return evaluate_multitangle_fundamental(mt, conn)


# ---------------------------------------------------------------------------
# random tangles


def random_qtangle(lat: Lattice, rng: random.Random, max_len: int = 3, max_crossings: int = 2,
                   components: int = 1, tries: int = 200) -> QTangle:
    """A random valid closed q-tangle: random closed walks plus random vertex braids."""
    halves = lat.half_edges()
    for _ in range(tries):
        comps = {}
        for c in range(components):
            for _ in range(50):
                n = rng.randint(1, max_len)
                word = [rng.choice(halves)]
                while len(word) < n:
                    v = lat.vertex_of(lat.partner(word[-1]))
                    word.append(rng.choice(lat.vertex(v)))
                if lat.vertex_of(lat.partner(word[-1])) == lat.vertex_of(word[0]):
                    break
            else:
                continue
            comps[f"L{c + 1}"] = word
        if len(comps) < components:
            continue
        base = QTangle.of(comps)
        _, mult = _resolve_passes(lat, base)
        braids = {}
        budget = rng.randint(0, max_crossings)
        verts = [v for v in lat.vertex_names() if len(_endpoints(lat, v, mult)) > 1]
        for _ in range(budget):
            if not verts:
                break
            v = rng.choice(verts)
            n = len(_endpoints(lat, v, mult))
            braids.setdefault(v, []).append(rng.choice([1, -1]) * rng.randint(1, n - 1))
        L = QTangle.of(comps, braids)
        try:
            compile_qtangle(lat, L)
        except MalformedTangle:
            continue
        return L
    raise MalformedTangle("no valid random tangle found")


# ---------------------------------------------------------------------------
# text format


def parse_tangle(text: str, lat: Optional[Lattice] = None) -> QTangle:
    """Read ``component``, ``vertex`` and ``color`` lines (``#`` starts a comment)."""
    comps = []
    braids = {}
    passes = {}
    colors = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "component":
            left, colon, word = rest.partition(":")
            parts = left.split()
            if not colon or len(parts) != 2 or parts[1] not in ("closed", "open"):
                raise ParseError("expected 'component <name> closed|open : <word>'", ln)
            items = word.split()
            if not items:
                raise ParseError(f"component {parts[0]} has an empty word", ln, raw.find(":") + 2)
            comps.append(Component(parts[0], parts[1] == "closed", tuple(_item(w) for w in items)))
        elif head == "vertex":
            left, colon, body = rest.partition(":")
            v = left.strip()
            if not colon or not v:
                raise ParseError("expected 'vertex <v>: passes <list> braid <word>'", ln)
            toks = body.split()
            mode = None
            plist, word = [], []
            for tok in toks:
                if tok in ("passes", "braid"):
                    mode = tok
                elif mode == "passes":
                    plist.append(tok)
                elif mode == "braid":
                    try:
                        word.append(int(tok))
                    except ValueError:
                        raise ParseError(f"braid letter {tok!r} is not a signed integer", ln, raw.find(tok) + 1) from None
                else:
                    raise ParseError(f"unexpected token {tok!r}", ln, raw.find(tok) + 1)
            if plist:
                passes[v] = plist
            if word:
                braids[v] = tuple(word)
        elif head == "color":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError("expected 'color <component> <label>'", ln)
            colors[parts[0]] = parts[1]
        else:
            raise ParseError(f"unknown line kind {head!r}", ln)
    L = QTangle(tuple(comps), tuple(braids.items()), tuple(colors.items()))
    if passes:
        if lat is None:
            raise ParseError("declared passes need the lattice to resolve pass indices", 1)
        _, mult = _resolve_passes(lat, L)
        decl = []
        for v, plist in passes.items():
            eps = []
            for tok in plist:
                h, j = _item(tok)
                if not lat.has_half_edge(h):
                    raise MalformedTangle(f"vertex {v} lists unknown half-edge {h}")
                eps.append((h, j if j is not None else 1))
            decl.append((v, tuple(eps)))
        L = QTangle(L.components, L.braids, L.colors, tuple(decl))
    if lat is not None:
        compile_qtangle(lat, L)
    return L


def format_tangle(L: QTangle) -> str:
    lines = []
    for c in L.components:
        word = " ".join(h if j is None else f"{h}.{j}" for h, j in c.word)
        lines.append(f"component {c.name} {'closed' if c.closed else 'open'} : {word}")
    for v, w in L.braids:
        lines.append(f"vertex {v}: braid " + " ".join(f"{s:+d}" for s in w))
    for c, k in L.colors:
        lines.append(f"color {c} {k}")
    return "\n".join(lines) + "\n"
