"""Connections, gauge action and multitangle evaluation over finite backends.

A connection on a lattice is a sparse tensor with one leg per edge in the
orientation. At a vertex, a half-edge in the orientation is the start of its
edge and elements act on it by left multiplication; the other half-edges are
edge ends and act by right multiplication through the antipode.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .finite_hopf import FiniteHopfBackend, Elem, _add_into, clean
from .lattice import (
    Lattice,
    MultitangleIR,
    Step,
    compose_multitangle,
    cap,
    cross,
    cup,
    cut,
    neg,
    switch,
    triad,
)

__all__ = [
    "LatticeMismatch",
    "ColorRequired",
    "ConnectionState",
    "GaugeElement",
    "GaugeField",
    "gauge_act",
    "evaluate_multitangle",
    "induced_gauge_map",
    "nabla",
    "coassociativity_defect",
    "counit_defect",
    "star",
    "is_observable",
    "project_observable",
    "integral",
    "gauge_equivalent",
    "gauge_equivalent_by_span",
    "toggle",
    "twist_steps",
    "push",
    "composite_moves",
    "counit_field",
    "toggle_switch_cycles",
    "cycle_multitangle",
    "toggle_power",
    "push_invisibility_defects",
]


class LatticeMismatch(ValueError):
    pass


class ColorRequired(ValueError):
    pass


Key = Tuple[int, ...]


@dataclass
class ConnectionState:
    lattice: Lattice
    backend: FiniteHopfBackend
    edges: Tuple[str, ...]
    data: Dict[Key, object]

    @classmethod
    def basis(cls, lat: Lattice, H: FiniteHopfBackend, values: Mapping[str, int]) -> "ConnectionState":
        edges = lat.oriented_edges()
        return cls(lat, H, edges, {tuple(values[e] for e in edges): 1})

    @classmethod
    def simple(cls, lat: Lattice, H: FiniteHopfBackend, values: Mapping[str, Elem]) -> "ConnectionState":
        edges = lat.oriented_edges()
        data: Dict[Key, object] = {(): 1}
        for e in edges:
            x = values.get(e, H.unit)
            data = {k + (i,): c * a for k, c in data.items() for i, a in x.items()}
        return cls(lat, H, edges, clean(data))

    @classmethod
    def all_basis(cls, lat: Lattice, H: FiniteHopfBackend) -> Iterator["ConnectionState"]:
        edges = lat.oriented_edges()
        for key in itertools.product(range(H.dim), repeat=len(edges)):
            yield cls(lat, H, edges, {key: 1})

    @classmethod
    def sample_basis(cls, lat: Lattice, H: FiniteHopfBackend, n: int, seed: int = 0) -> List["ConnectionState"]:
        rng = random.Random(seed)
        edges = lat.oriented_edges()
        return [cls(lat, H, edges, {tuple(rng.randrange(H.dim) for _ in edges): 1}) for _ in range(n)]

    def reorder(self, edges: Sequence[str]) -> "ConnectionState":
        edges = tuple(edges)
        if sorted(edges) != sorted(self.edges):
            raise LatticeMismatch(f"edge sets differ: {self.edges} vs {edges}")
        perm = [self.edges.index(e) for e in edges]
        return ConnectionState(self.lattice, self.backend, edges, {tuple(k[p] for p in perm): c for k, c in self.data.items()})

    def canonical(self) -> Dict[Key, object]:
        return self.reorder(sorted(self.edges)).data

    def same_as(self, other: "ConnectionState") -> bool:
        return self.lattice.same_as(other.lattice) and clean(self.canonical()) == clean(other.canonical())

    def __add__(self, other: "ConnectionState") -> "ConnectionState":
        other = other.reorder(self.edges)
        acc = dict(self.data)
        for k, c in other.data.items():
            _add_into(acc, k, c)
        return ConnectionState(self.lattice, self.backend, self.edges, acc)

    def scale(self, c) -> "ConnectionState":
        return ConnectionState(self.lattice, self.backend, self.edges, clean({k: v * c for k, v in self.data.items()}))

    def __sub__(self, other: "ConnectionState") -> "ConnectionState":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not clean(self.data)

    def format(self) -> str:
        if not self.data:
            return "0"
        H = self.backend
        parts = []
        for k in sorted(self.data):
            c = self.data[k]
            word = " (x) ".join(f"{e}:{H.labels[i]}" for e, i in zip(self.edges, k))
            parts.append(word if c == 1 else f"{c} * [{word}]")
        return " + ".join(parts)


@dataclass
class GaugeElement:
    vertices: Tuple[str, ...]
    data: Dict[Key, object]

    @classmethod
    def at(cls, lat: Lattice, H: FiniteHopfBackend, vertex: str, y: Elem) -> "GaugeElement":
        """``y`` at one vertex, the unit elsewhere."""
        names = tuple(lat.vertex_names())
        data: Dict[Key, object] = {(): 1}
        for n in names:
            x = y if n == vertex else H.unit
            data = {k + (i,): c * a for k, c in data.items() for i, a in x.items()}
        return cls(names, clean(data))

    @classmethod
    def basis(cls, lat: Lattice, values: Mapping[str, int]) -> "GaugeElement":
        names = tuple(lat.vertex_names())
        return cls(names, {tuple(values[n] for n in names): 1})

    def counit(self, H: FiniteHopfBackend):
        return sum((c * _prod(H.counit[i] for i in k) for k, c in self.data.items()), 0)

    def reorder(self, names: Sequence[str]) -> "GaugeElement":
        names = tuple(names)
        perm = [self.vertices.index(n) for n in names]
        return GaugeElement(names, {tuple(k[p] for p in perm): c for k, c in self.data.items()})


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


# ---------------------------------------------------------------------------
# low-level factor operations


def _act_on(H: FiniteHopfBackend, left: bool, a: int, x: int) -> Elem:
    """``a . x`` on a start half-edge, ``x . S(a)`` on an end half-edge."""
    if left:
        return H.mult[a][x]
    return H.mul({x: 1}, H.anti[a])


def _apply_leg_elements(H, data: Dict[Key, object], actions: Sequence[Tuple[int, bool, Elem]]) -> Dict[Key, object]:
    """Apply each ``(leg, left?, element)`` in turn to every term."""
    for leg, left, elem in actions:
        acc: Dict[Key, object] = {}
        for k, c in data.items():
            x = k[leg]
            for a, ca in elem.items():
                for y, cy in _act_on(H, left, a, x).items():
                    _add_into(acc, k[:leg] + (y,) + k[leg + 1:], c * ca * cy)
        data = acc
    return data


def _map_leg(data: Dict[Key, object], leg: int, fn: Callable[[int], Elem]) -> Dict[Key, object]:
    acc: Dict[Key, object] = {}
    cache: Dict[int, Elem] = {}
    for k, c in data.items():
        x = k[leg]
        if x not in cache:
            cache[x] = fn(x)
        for y, cy in cache[x].items():
            _add_into(acc, k[:leg] + (y,) + k[leg + 1:], c * cy)
    return acc


def _split_leg(data: Dict[Key, object], leg: int, fn: Callable[[int], Dict[Tuple[int, int], object]]) -> Dict[Key, object]:
    acc: Dict[Key, object] = {}
    for k, c in data.items():
        for (y1, y2), cy in fn(k[leg]).items():
            _add_into(acc, k[:leg] + (y1, y2) + k[leg + 1:], c * cy)
    return acc


def _drop_leg(data: Dict[Key, object], leg: int, fn: Callable[[int], object]) -> Dict[Key, object]:
    acc: Dict[Key, object] = {}
    for k, c in data.items():
        v = fn(k[leg])
        if v:
            _add_into(acc, k[:leg] + k[leg + 1:], c * v)
    return acc


def _leg(edges: Sequence[str], lat: Lattice, h: str) -> Tuple[int, bool]:
    e = lat.o_member(h)
    return edges.index(e), h == e


# ---------------------------------------------------------------------------
# gauge action


def _vertex_legs(lat: Lattice, edges: Sequence[str], v: str) -> List[Tuple[int, bool]]:
    return [_leg(edges, lat, h) for h in lat.vertex(v)]


def gauge_act(y: GaugeElement, x: ConnectionState) -> ConnectionState:
    lat, H = x.lattice, x.backend
    if sorted(y.vertices) != sorted(lat.vertex_names()):
        raise LatticeMismatch("gauge element and connection live on different lattices")
    out: Dict[Key, object] = {}
    legs_by_vertex = [(_vertex_legs(lat, x.edges, v)) for v in y.vertices]
    for ykey, yc in y.data.items():
        data = dict(x.data)
        for (legs, yi) in zip(legs_by_vertex, ykey):
            split = H.coproduct_power({yi: 1}, len(legs))
            acc: Dict[Key, object] = {}
            for parts, c in split.items():
                d2 = _apply_leg_elements(H, data, [(leg, left, {a: 1}) for (leg, left), a in zip(legs, parts)])
                for k, v in d2.items():
                    _add_into(acc, k, v * c)
            data = acc
        for k, v in data.items():
            _add_into(out, k, v * yc)
    return ConnectionState(lat, H, x.edges, out)


# ---------------------------------------------------------------------------
# multitangle evaluation


def _default_trace(H: FiniteHopfBackend):
    return H.regular_trace


def _apply_step(lat: Lattice, nxt: Lattice, step: Step, H: FiniteHopfBackend, edges: Tuple[str, ...], data, trace):
    k = step.kind
    if k in ("identity", "cut"):
        return edges, data
    if k == "cross":
        sign, a, b = step.args
        la, lefta = _leg(edges, lat, a)
        lb, leftb = _leg(edges, lat, b)
        acc: Dict[Key, object] = {}
        if sign > 0:
            pairs = [(i, j, c) for (i, j), c in H.R.items()]  # s on a, t on b
        else:
            pairs = [(j, i, c) for (i, j), c in H.R_inv.items()]  # t on a, S(s) on b
        for ea, eb, c in pairs:
            d2 = _apply_leg_elements(H, data, [(la, lefta, {ea: 1}), (lb, leftb, {eb: 1})])
            for kk, v in d2.items():
                _add_into(acc, kk, v * c)
        return edges, acc
    if k == "triad":
        e, first, second = step.args
        e1, e2 = first or e + "'", second or e + "''"
        leg = edges.index(e)
        data = _split_leg(data, leg, lambda x: H.cop[x])
        return edges[:leg] + (e1, e2) + edges[leg + 1:], data
    if k == "switch":
        e = lat.o_member(step.args[0])
        leg = edges.index(e)
        kk = H.charm
        data = _map_leg(data, leg, lambda x: H.S(H.mul({x: 1}, kk)))
        return edges[:leg] + (lat.partner(e),) + edges[leg + 1:], data
    if k == "stump":
        e = lat.o_member(step.args[0])
        leg = edges.index(e)
        return edges[:leg] + edges[leg + 1:], _drop_leg(data, leg, lambda x: H.counit[x])
    if k == "cup":
        v, pos, h = step.args
        o = h if not h.startswith("-") else neg(h)
        val = H.unit if o == h else H.charm_inv
        data = {kk + (i,): c * a for kk, c in data.items() for i, a in val.items()}
        return edges + (o,), clean(data)
    if k == "cap":
        a, b, name = step.args
        if lat.partner(a) == b:
            e = lat.o_member(a)
            leg = edges.index(e)
            tr = step.color if callable(step.color) else trace
            if tr is None:
                raise ColorRequired(f"cap on {a}, {b} closes a loop and needs a trace")
            if a == e:  # (e, -e)
                kk = H.charm
                return edges[:leg] + edges[leg + 1:], _drop_leg(data, leg, lambda x: tr(H.mul({x: 1}, kk)))
            return edges[:leg] + edges[leg + 1:], _drop_leg(data, leg, lambda x: tr({x: 1}))
        arriving = a if a not in lat.orientation else b
        leaving = b if arriving == a else a
        f = lat.partner(arriving)
        g = name or f"{f}.{leaving}"
        lf, le = edges.index(f), edges.index(leaving)
        kk = H.charm if arriving == b else None
        acc: Dict[Key, object] = {}
        for key, c in data.items():
            xf, xe = {key[lf]: 1}, {key[le]: 1}
            prod = H.mul_many(xf, kk, xe) if kk is not None else H.mul(xf, xe)
            rest = list(key)
            for y, cy in prod.items():
                rest[lf] = y
                new = tuple(r for i, r in enumerate(rest) if i != le)
                _add_into(acc, new, c * cy)
        new_edges = list(edges)
        new_edges[lf] = g
        del new_edges[le]
        return tuple(new_edges), acc
    raise ValueError(f"unknown step kind {k}")


def evaluate_multitangle(mt: MultitangleIR, x: ConnectionState, trace: Optional[Callable[[Elem], object]] = None) -> ConnectionState:
    """Push a connection through every elementary diagram of ``mt``."""
    if not mt.domain.same_as(x.lattice):
        raise LatticeMismatch("multitangle domain differs from the connection's lattice")
    H = x.backend
    trace = trace or _default_trace(H)
    edges, data = x.edges, dict(x.data)
    for i, step in enumerate(mt.steps):
        edges, data = _apply_step(mt.lattices[i], mt.lattices[i + 1], step, H, edges, data, trace)
    return ConnectionState(mt.range, H, edges, clean(data))


def induced_gauge_map(mt: MultitangleIR, y: GaugeElement, H: FiniteHopfBackend) -> GaugeElement:
    """Counit on deleted vertices, coproduct on cut vertices."""
    names, data = list(y.vertices), dict(y.data)
    for i, step in enumerate(mt.steps):
        before, after = mt.lattices[i], mt.lattices[i + 1]
        if step.kind == "cut":
            v, kk, n1, n2 = step.args
            n1, n2 = n1 or v + "'", n2 or v + "''"
            leg = names.index(v)
            data = _split_leg(data, leg, lambda x: H.cop[x])
            names = names[:leg] + [n1, n2] + names[leg + 1:]
            continue
        for v in before.vertex_names():
            if not after.has_vertex(v):
                leg = names.index(v)
                data = _drop_leg(data, leg, lambda x: H.counit[x])
                del names[leg]
    return GaugeElement(tuple(names), clean(data))


# ---------------------------------------------------------------------------
# comultiplication of connections


def nabla(lat: Lattice, first: str = "'", second: str = "''", vertices: Optional[Iterable[str]] = None) -> MultitangleIR:
    """Triad every edge, slide the second-copy strands over to the right, cut.

    ``vertices`` restricts the construction to one connected piece of a
    disconnected lattice (used to build ``nabla (x) 1``).
    """
    names = list(lat.vertex_names()) if vertices is None else list(vertices)
    inside = set(names)
    edges = [e for e in lat.oriented_edges() if lat.initial(e) in inside]
    steps: List[Step] = [triad(e, e + first, e + second) for e in edges]
    cur = compose_multitangle(lat, steps).range
    seconds = {e + second for e in edges} | {neg(e + second) for e in edges}
    for v in names:
        order = list(cur.vertex(v))
        # bubble each first-copy strand left past the second-copy strands
        for i in range(len(order)):
            j = i
            while j > 0 and order[j - 1] in seconds and order[j] not in seconds:
                steps.append(cross(+1, order[j - 1], order[j]))
                order[j - 1], order[j] = order[j], order[j - 1]
                j -= 1
        n_first = sum(1 for h in order if h not in seconds)
        steps.append(cut(v, n_first, v + first, v + second))
    return compose_multitangle(lat, steps)


def coassociativity_defect(lat: Lattice, x: ConnectionState) -> Optional[str]:
    """Compare ``(nabla (x) 1) nabla`` with ``(1 (x) nabla) nabla`` on ``x``; None if equal."""
    A, B = ":1", ":2"
    N = nabla(lat, A, B)
    y = evaluate_multitangle(N, x)
    mid = N.range
    left = nabla(mid, A, B, [v + A for v in lat.vertex_names()])
    right = nabla(mid, A, B, [v + B for v in lat.vertex_names()])
    zl = evaluate_multitangle(left, y)
    zr = evaluate_multitangle(right, y)
    # rename both to a common three-copy labelling
    ren_l = {A + A: ".1", A + B: ".2", B: ".3"}
    ren_r = {A: ".1", B + A: ".2", B + B: ".3"}

    def rename(label: str, table) -> str:
        for suf in sorted(table, key=len, reverse=True):
            if label.endswith(suf):
                return label[: -len(suf)] + table[suf]
        return label

    def canon(z: ConnectionState, table):
        lat2 = z.lattice
        verts = tuple((rename(n, table), tuple(rename(h, table) for h in hs)) for n, hs in lat2.vertices)
        L = Lattice(verts, frozenset(rename(h, table) for h in lat2.orientation))
        edges = tuple(rename(e, table) for e in z.edges)
        return ConnectionState(L, z.backend, edges, z.data)

    cl, cr = canon(zl, ren_l), canon(zr, ren_r)
    if not cl.lattice.same_as(cr.lattice):
        return f"range lattices differ:\n{cl.lattice}\n--\n{cr.lattice}"
    if not cl.same_as(cr):
        return f"{cl.format()} != {cr.format()}"
    return None


def counit_defect(lat: Lattice, x: ConnectionState) -> Optional[str]:
    """``(eps (x) 1) nabla = (1 (x) eps) nabla = id`` on ``x``; None if both hold."""
    H = x.backend
    N = nabla(lat)
    edges = lat.oriented_edges()
    y = evaluate_multitangle(N, x).reorder([e + "'" for e in edges] + [e + "''" for e in edges])
    n = len(edges)
    target = x.reorder(edges).data
    for keep in (slice(n, None), slice(0, n)):
        drop = slice(0, n) if keep.start == n else slice(n, None)
        acc: Dict[Key, object] = {}
        for k, c in y.data.items():
            e = _prod(H.counit[i] for i in k[drop])
            if e:
                _add_into(acc, k[keep], c * e)
        if clean(acc) != clean(target):
            return f"counit fails on the {'first' if keep.start == n else 'second'} copy"
    return None


def _copy_lattice(lat: Lattice, suffix: str) -> Lattice:
    m = {}
    for h in lat.half_edges():
        m[h] = h + suffix
    return Lattice(tuple((n + suffix, tuple(m[h] for h in hs)) for n, hs in lat.vertices), frozenset(m[h] for h in lat.orientation))


# ---------------------------------------------------------------------------
# gauge fields and observables


@dataclass
class GaugeField:
    """Linear functional on connections, stored on the basis ``{key: value}``."""

    lattice: Lattice
    backend: FiniteHopfBackend
    edges: Tuple[str, ...]
    values: Dict[Key, object]

    def __call__(self, x: ConnectionState):
        x = x.reorder(self.edges)
        return sum((c * self.values.get(k, 0) for k, c in x.data.items()), 0)

    @classmethod
    def coordinate(cls, lat: Lattice, H: FiniteHopfBackend, key: Key) -> "GaugeField":
        return cls(lat, H, lat.oriented_edges(), {tuple(key): 1})

    @classmethod
    def from_function(cls, lat: Lattice, H: FiniteHopfBackend, fn: Callable[[ConnectionState], object]) -> "GaugeField":
        vals = {}
        for x in ConnectionState.all_basis(lat, H):
            v = fn(x)
            if v:
                vals[next(iter(x.data))] = v
        return cls(lat, H, lat.oriented_edges(), vals)

    def __add__(self, other):
        acc = dict(self.values)
        for k, v in other.values.items():
            _add_into(acc, k, v)
        return GaugeField(self.lattice, self.backend, self.edges, acc)

    def scale(self, c):
        return GaugeField(self.lattice, self.backend, self.edges, clean({k: v * c for k, v in self.values.items()}))

    def __eq__(self, other):
        return isinstance(other, GaugeField) and clean(self.values) == clean(other.values) and self.edges == other.edges


def counit_field(lat: Lattice, H: FiniteHopfBackend) -> GaugeField:
    """``epsilon_Gamma``, the product of counits over the edges."""
    edges = lat.oriented_edges()
    vals = {}
    for key in itertools.product(range(H.dim), repeat=len(edges)):
        v = _prod(H.counit[i] for i in key)
        if v:
            vals[key] = v
    return GaugeField(lat, H, edges, vals)


def star(f: GaugeField, g: GaugeField, lat: Optional[Lattice] = None) -> GaugeField:
    """``(f * g)(x) = (f (x) g)(nabla x)`` tabulated on basis connections."""
    lat = lat or f.lattice
    H = f.backend
    N = nabla(lat)
    edges = lat.oriented_edges()
    f = GaugeField(f.lattice, H, f.edges, f.values)
    first = [e + "'" for e in f.edges]
    second = [e + "''" for e in g.edges]
    vals = {}
    for x in ConnectionState.all_basis(lat, H):
        y = evaluate_multitangle(N, x).reorder(first + second)
        n = len(first)
        v = sum((c * f.values.get(k[:n], 0) * g.values.get(k[n:], 0) for k, c in y.data.items()), 0)
        if v:
            vals[next(iter(x.data))] = v
    return GaugeField(lat, H, edges, vals)


def integral(H: FiniteHopfBackend) -> Elem:
    """Two-sided integral ``L`` with ``x L = L x = eps(x) L`` and ``eps(L) = 1``."""
    if "integral" in H._cache:
        return H._cache["integral"]
    n = H.dim
    rows = []
    for a in range(n):
        for side in (0, 1):
            # coefficient matrix of (b_a L - eps(b_a) L) and (L b_a - eps(b_a) L)
            M = [[Fraction(0)] * n for _ in range(n)]
            for j in range(n):
                prod = H.mult[a][j] if side == 0 else H.mult[j][a]
                for i, c in prod.items():
                    M[i][j] += c
                M[j][j] -= H.counit[a]
            rows.extend(M)
    rows.append([Fraction(H.counit[j]) for j in range(n)])
    rhs = [Fraction(0)] * (len(rows) - 1) + [Fraction(1)]
    sol = _least_solve(rows, rhs, n)
    if sol is None:
        raise ValueError(f"{H.name} has no normalized integral")
    L = clean({j: (int(v) if v.denominator == 1 else v) for j, v in enumerate(sol)})
    H._cache["integral"] = L
    return L


def _least_solve(rows, rhs, n):
    """Exact solution of an overdetermined consistent system, or None."""
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(A)) if A[i][col] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][col]
        A[r] = [v / pv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, len(A)):
        if A[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        sol[col] = A[i][n]
    return sol


def _integral_everywhere(lat: Lattice, H: FiniteHopfBackend) -> GaugeElement:
    L = integral(H)
    names = tuple(lat.vertex_names())
    data: Dict[Key, object] = {(): 1}
    for _ in names:
        data = {k + (i,): c * a for k, c in data.items() for i, a in L.items()}
    return GaugeElement(names, clean(data))


def project_observable(f: GaugeField) -> GaugeField:
    """``f(L . x)`` with ``L`` the normalized integral at every vertex."""
    lat, H = f.lattice, f.backend
    Y = _integral_everywhere(lat, H)
    vals = {}
    for x in ConnectionState.all_basis(lat, H):
        v = f(gauge_act(Y, x))
        if v:
            vals[next(iter(x.data))] = v
    return GaugeField(lat, H, f.edges, vals)


def is_observable(f: GaugeField) -> bool:
    """``f(y . x) = eps(y) f(x)`` for ``y`` a basis element at one vertex."""
    lat, H = f.lattice, f.backend
    for v in lat.vertex_names():
        for a in range(H.dim):
            y = GaugeElement.at(lat, H, v, {a: 1})
            ey = H.counit[a]
            for x in ConnectionState.all_basis(lat, H):
                if f(gauge_act(y, x)) != ey * f(x):
                    return False
    return True


def gauge_equivalent(x: ConnectionState, y: ConnectionState) -> bool:
    """``x - y`` lies in the span of ``{g . z - eps(g) z}``.

    For a semisimple backend that span is exactly the kernel of the action of
    the normalized integral at every vertex, which is what is tested here.
    """
    if not x.lattice.same_as(y.lattice):
        raise LatticeMismatch("connections live on different lattices")
    d = x - y.reorder(x.edges)
    Y = _integral_everywhere(x.lattice, x.backend)
    return gauge_act(Y, d).is_zero()


def gauge_equivalent_by_span(x: ConnectionState, y: ConnectionState, max_dim: int = 4000) -> bool:
    """Direct membership test against the spanning set (small lattices only)."""
    lat, H = x.lattice, x.backend
    edges = x.edges
    space = H.dim ** len(edges)
    if space * H.dim * len(lat.vertex_names()) > max_dim * 50:
        raise ValueError("connection space too large for the explicit span")
    basis = Reducer()
    for v in lat.vertex_names():
        for a in range(H.dim):
            g = GaugeElement.at(lat, H, v, {a: 1})
            for z in ConnectionState.all_basis(lat, H):
                vec = gauge_act(g, z) - z.scale(H.counit[a])
                basis.add(vec.reorder(edges).data)
    d = (x - y.reorder(edges)).data
    return basis.contains(d)


class Reducer:
    """Incremental exact row reduction on sparse vectors."""

    def __init__(self):
        self.rows: Dict[object, Dict[object, Fraction]] = {}

    def reduce(self, v: Mapping) -> Dict[object, Fraction]:
        v = {k: Fraction(c) for k, c in v.items() if c}
        while v:
            piv = min(v)
            row = self.rows.get(piv)
            if row is None:
                return v
            f = v[piv]
            for k, c in row.items():
                _add_into(v, k, -f * c)
        return v

    def add(self, v: Mapping) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        piv = min(r)
        f = r[piv]
        self.rows[piv] = {k: c / f for k, c in r.items()}
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)


# ---------------------------------------------------------------------------
# composite moves: toggles, switches, pushes


def twist_steps(lat: Lattice, h: str, label: str) -> Tuple[List[Step], str]:
    """A positive twist on the strand ``h`` (cup, crossing, cap); returns the new label.

    Acts by ``theta^-1`` on the factor of ``h``.
    """
    v = lat.vertex_of(h)
    pos = lat.position(h)
    if h in lat.orientation:
        steps = [cup(v, pos + 1, label), cross(+1, h, label), cap(h, neg(label), h)]
        return steps, h
    steps = [cup(v, pos + 1, neg(label)), cross(+1, h, neg(label)), cap(h, label, lat.partner(h))]
    return steps, h


def toggle(lat: Lattice, v: str, direction: int = 1, label: str = "tw") -> MultitangleIR:
    """Move the cilium at ``v`` one step: the first strand crosses over the rest and twists.

    ``direction=-1`` gives the inverse move (last strand crosses back under and
    untwists).
    """
    hs = list(lat.vertex(v))
    steps: List[Step] = []
    if direction > 0:
        h = hs[0]
        for other in hs[1:]:
            steps.append(cross(+1, h, other))
        cur = compose_multitangle(lat, steps).range
        tw, _ = twist_steps(cur, h, label)
        steps += tw
        return compose_multitangle(lat, steps)
    h = hs[-1]
    cur = lat
    # negative twist first, then cross back under everything
    tw = _negative_twist_steps(cur, h, label)
    steps += tw
    cur = compose_multitangle(lat, steps).range
    for other in reversed(hs[:-1]):
        steps.append(cross(-1, other, h))
    return compose_multitangle(lat, steps)


def _negative_twist_steps(lat: Lattice, h: str, label: str) -> List[Step]:
    v = lat.vertex_of(h)
    pos = lat.position(h)
    if h in lat.orientation:
        return [cup(v, pos + 1, label), cross(-1, h, label), cap(h, neg(label), h)]
    return [cup(v, pos + 1, neg(label)), cross(-1, h, neg(label)), cap(h, label, lat.partner(h))]


def push(lat: Lattice, e0: str) -> MultitangleIR:
    """Push the terminal vertex of ``e0`` through to its initial vertex.

    Requires the terminal vertex to read ``(-e0, e1, ..., en)`` with every
    ``ei`` oriented outward, and ``e0`` to be the last half-edge at its start.
    The result is the same lattice; on connections the ``e0`` factor is moved
    onto the outgoing edges.
    """
    u, v0 = lat.initial(e0), lat.terminal(e0)
    hv = lat.vertex(v0)
    if u == v0 or hv[0] != lat.partner(e0) or any(h not in lat.orientation for h in hv[1:]):
        raise ValueError(f"push along {e0} needs its end vertex to read (-{e0}, outgoing edges...)")
    if lat.vertex(u)[-1] != e0:
        raise ValueError(f"push along {e0} needs {e0} last at {u}")
    outs = list(hv[1:])
    n = len(outs)
    steps: List[Step] = []
    # split e0 into n parallel copies, numbered left to right at u
    names = [f"{e0}#{i}" for i in range(1, n + 1)]
    cur = e0
    for i in range(n - 1):
        first, rest = names[i], (f"{e0}#r{i}" if i < n - 2 else names[-1])
        steps.append(triad(cur, first, rest))
        cur = rest
    if n == 1:
        names = [e0]
    # at v0 the copies read -e0#n ... -e0#1 followed by e1..en; cap innermost first
    for i in range(n):
        steps.append(cap(neg(names[i]), outs[i], outs[i]))
    mt = compose_multitangle(lat, steps)
    at_u = mt.range.vertex(u)
    pos = at_u.index(outs[0])
    steps.append(cup(u, pos, e0))
    steps.append(cut(u, pos + 1, u, v0))
    return compose_multitangle(lat, steps)


def composite_moves(kind: str, lat: Lattice, target: str, direction: int = 1) -> MultitangleIR:
    if kind == "toggle":
        return toggle(lat, target, direction)
    if kind == "switch":
        return compose_multitangle(lat, [switch(target)])
    if kind == "push":
        return push(lat, target)
    raise ValueError(f"unknown composite move {kind!r}")


def cycle_multitangle(lat: Lattice, v: str, word: Sequence[Tuple[str, object]]) -> MultitangleIR:
    """Compose toggles ``("T", +1|-1)`` at ``v`` and switches ``("S", edge)``."""
    steps: List[Step] = []
    cur = lat
    for k, (kind, arg) in enumerate(word):
        if kind == "T":
            mt = toggle(cur, v, arg, label=f"tw{k}")
        else:
            mt = compose_multitangle(cur, [switch(arg)])
        steps += list(mt.steps)
        cur = mt.range
    return compose_multitangle(lat, steps)


def toggle_switch_cycles(lat: Lattice, v: str, max_len: Optional[int] = None) -> List[Tuple[Tuple[str, object], ...]]:
    """Words in toggles at ``v`` and switches of its edges that return to ``lat``.

    Words are freely reduced (no toggle next to its inverse) and listed once
    per cyclic rotation. ``max_len`` defaults to twice the valence of ``v``.
    """
    hs = lat.vertex(v)
    n = len(hs)
    max_len = 2 * n if max_len is None else max_len
    edges = sorted({lat.o_member(h) for h in hs})
    gens: List[Tuple[str, object]] = [("T", 1), ("T", -1)] + [("S", e) for e in edges]
    out = []
    for length in range(1, max_len + 1):
        for idx in itertools.product(range(len(gens)), repeat=length):
            if idx != min(idx[r:] + idx[:r] for r in range(length)):
                continue
            word = [gens[i] for i in idx]
            if any(a[0] == b[0] == "T" and a[1] == -b[1] for a, b in zip(word, word[1:] + word[:1])):
                continue
            if sum(a for k, a in word if k == "T") % n:
                continue
            if any(sum(1 for g in word if g == ("S", e)) % 2 for e in edges):
                continue
            if cycle_multitangle(lat, v, word).range.same_as(lat):
                out.append(tuple(word))
    return out


def toggle_power(lat: Lattice, v: str, power: Optional[int] = None) -> MultitangleIR:
    """``power`` successive toggles at ``v`` (default: its valence)."""
    power = len(lat.vertex(v)) if power is None else power
    return cycle_multitangle(lat, v, [("T", 1 if power > 0 else -1)] * abs(power))


def push_invisibility_defects(lat: Lattice, e0: str, H: FiniteHopfBackend) -> List[Tuple[Key, Key]]:
    """Basis connections and observable coordinates where a push is visible.

    The projected coordinate fields ``f_key(L . x)`` span the observables, so
    comparing every coordinate of ``L . push(x)`` and ``L . x`` checks
    ``f(push(x)) = f(x)`` for that spanning set. Returns the mismatches.
    """
    mt = push(lat, e0)
    Y = _integral_everywhere(lat, H)
    bad = []
    for x in ConnectionState.all_basis(lat, H):
        d = gauge_act(Y, evaluate_multitangle(mt, x)) - gauge_act(Y, x)
        for key, c in d.canonical().items():
            if c:
                bad.append((next(iter(x.data)), key))
    return bad
